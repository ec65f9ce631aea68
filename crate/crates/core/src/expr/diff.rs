use super::simplify::{add, div, mul, neg, pow, sub, unary};
use super::{BinaryOp, Expr, UnaryOp};

impl Expr {
    /// Symbolic partial derivative with respect to `var`.
    ///
    /// The result is built through the folding constructors, so a derivative
    /// with respect to a variable that does not occur is exactly `Const(0)`.
    pub fn differentiate(&self, var: &str) -> Expr {
        if !self.contains_var(var) {
            return Expr::zero();
        }
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(_) => Expr::one(),
            Expr::Unary(op, a) => {
                let da = a.differentiate(var);
                let a = (**a).clone();
                match op {
                    UnaryOp::Neg => neg(da),
                    UnaryOp::Exp => mul(unary(UnaryOp::Exp, a), da),
                    UnaryOp::Log => div(da, a),
                    UnaryOp::Sqrt => div(da, mul(Expr::Const(2.0), unary(UnaryOp::Sqrt, a))),
                    UnaryOp::Sin => mul(unary(UnaryOp::Cos, a), da),
                    UnaryOp::Cos => neg(mul(unary(UnaryOp::Sin, a), da)),
                }
            }
            Expr::Binary(op, a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinaryOp::Add => add(da, db),
                    BinaryOp::Sub => sub(da, db),
                    BinaryOp::Mul => add(mul(da, b), mul(a, db)),
                    BinaryOp::Div => {
                        if db.is_const_value(0.0) {
                            div(da, b)
                        } else {
                            div(
                                sub(mul(da, b.clone()), mul(a, db)),
                                pow(b, Expr::Const(2.0)),
                            )
                        }
                    }
                    BinaryOp::Pow => {
                        if db.is_const_value(0.0) {
                            // d(a^c) = c a^(c-1) da
                            let c_minus_1 = sub(b.clone(), Expr::one());
                            mul(mul(b, pow(a, c_minus_1)), da)
                        } else if da.is_const_value(0.0) {
                            // d(c^b) = c^b log(c) db
                            let lg = unary(UnaryOp::Log, a.clone());
                            mul(mul(pow(a, b), lg), db)
                        } else {
                            let lg = unary(UnaryOp::Log, a.clone());
                            let inner = add(mul(db, lg), div(mul(b.clone(), da), a.clone()));
                            mul(pow(a, b), inner)
                        }
                    }
                }
            }
        }
    }
}
