use std::collections::{BTreeMap, HashMap};

use super::{BinaryOp, Expr, ExprError, UnaryOp};

/// Source of variable values for [`Expr::eval`].
pub trait Binding {
    fn value(&self, name: &str) -> Option<f64>;
}

impl Binding for HashMap<String, f64> {
    fn value(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Binding for BTreeMap<String, f64> {
    fn value(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Binding for [(&str, f64)] {
    fn value(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl<const N: usize> Binding for [(&str, f64); N] {
    fn value(&self, name: &str) -> Option<f64> {
        self.as_slice().value(name)
    }
}

fn domain(e: &Expr, reason: &str) -> ExprError {
    ExprError::Domain {
        subexpr: e.to_string(),
        reason: reason.to_string(),
    }
}

fn apply_unary(op: UnaryOp, a: f64) -> Result<f64, &'static str> {
    Ok(match op {
        UnaryOp::Neg => -a,
        UnaryOp::Exp => a.exp(),
        UnaryOp::Log => {
            if a <= 0.0 {
                return Err("logarithm of a non-positive number");
            }
            a.ln()
        }
        UnaryOp::Sqrt => {
            if a < 0.0 {
                return Err("square root of a negative number");
            }
            a.sqrt()
        }
        UnaryOp::Sin => a.sin(),
        UnaryOp::Cos => a.cos(),
    })
}

fn apply_binary(op: BinaryOp, a: f64, b: f64) -> Result<f64, &'static str> {
    Ok(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return Err("division by zero");
            }
            a / b
        }
        BinaryOp::Pow => {
            if a == 0.0 && b < 0.0 {
                return Err("zero raised to a negative power");
            }
            if a < 0.0 && b.fract() != 0.0 {
                return Err("negative base with non-integer exponent");
            }
            if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                a.powi(b as i32)
            } else {
                a.powf(b)
            }
        }
    })
}

impl Expr {
    /// Evaluates the tree with variables looked up in `binding`.
    pub fn eval<B: Binding + ?Sized>(&self, binding: &B) -> Result<f64, ExprError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(name) => binding
                .value(name)
                .ok_or_else(|| ExprError::Unbound(name.to_string())),
            Expr::Unary(op, a) => {
                let x = a.eval(binding)?;
                apply_unary(*op, x).map_err(|r| domain(self, r))
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval(binding)?;
                let y = b.eval(binding)?;
                apply_binary(*op, x, y).map_err(|r| domain(self, r))
            }
        }
    }

    /// Compiles the tree for repeated evaluation with positional variables.
    pub fn compile(&self, vars: &[&str]) -> Result<CompiledExpr, ExprError> {
        CompiledExpr::new(self, vars)
    }
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize),
}

const INLINE_STACK: usize = 32;

/// A postfix program equivalent to an [`Expr`], with variables resolved to
/// slots so evaluation does no name lookups.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    code: Vec<Instr>,
    // subexpressions referenced by fallible instructions, for error messages
    sources: Vec<Expr>,
    depth: usize,
    arity: usize,
}

impl CompiledExpr {
    pub fn new(e: &Expr, vars: &[&str]) -> Result<CompiledExpr, ExprError> {
        let mut out = CompiledExpr {
            code: Vec::with_capacity(e.size()),
            sources: Vec::new(),
            depth: 0,
            arity: vars.len(),
        };
        let mut height = 0;
        out.emit(e, vars, &mut height)?;
        Ok(out)
    }

    fn emit(&mut self, e: &Expr, vars: &[&str], height: &mut usize) -> Result<(), ExprError> {
        match e {
            Expr::Const(c) => {
                self.code.push(Instr::Const(*c));
                *height += 1;
            }
            Expr::Var(name) => {
                let slot = vars
                    .iter()
                    .position(|v| **v == **name)
                    .ok_or_else(|| ExprError::Unbound(name.to_string()))?;
                self.code.push(Instr::Var(slot));
                *height += 1;
            }
            Expr::Unary(op, a) => {
                self.emit(a, vars, height)?;
                self.sources.push(e.clone());
                self.code.push(Instr::Unary(*op, self.sources.len() - 1));
            }
            Expr::Binary(op, a, b) => {
                self.emit(a, vars, height)?;
                self.emit(b, vars, height)?;
                self.sources.push(e.clone());
                self.code.push(Instr::Binary(*op, self.sources.len() - 1));
                *height -= 1;
            }
        }
        self.depth = self.depth.max(*height);
        Ok(())
    }

    /// Number of positional variables expected by [`CompiledExpr::eval`].
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ExprError> {
        debug_assert!(x.len() >= self.arity);
        if self.depth <= INLINE_STACK {
            let mut stack = [0.0; INLINE_STACK];
            self.run(x, &mut stack)
        } else {
            let mut stack = vec![0.0; self.depth];
            self.run(x, &mut stack)
        }
    }

    fn run(&self, x: &[f64], stack: &mut [f64]) -> Result<f64, ExprError> {
        let mut top = 0;
        for instr in &self.code {
            match *instr {
                Instr::Const(c) => {
                    stack[top] = c;
                    top += 1;
                }
                Instr::Var(slot) => {
                    stack[top] = x[slot];
                    top += 1;
                }
                Instr::Unary(op, src) => {
                    stack[top - 1] = apply_unary(op, stack[top - 1])
                        .map_err(|r| domain(&self.sources[src], r))?;
                }
                Instr::Binary(op, src) => {
                    let b = stack[top - 1];
                    let a = stack[top - 2];
                    top -= 1;
                    stack[top - 1] =
                        apply_binary(op, a, b).map_err(|r| domain(&self.sources[src], r))?;
                }
            }
        }
        Ok(stack[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn arithmetic() {
        let e = parse_expr("1 + x*y", &["x", "y"]).unwrap();
        let v = e.eval(&[("x", 0.2), ("y", 0.3)]).unwrap();
        assert!((v - 1.06).abs() < 1e-15);
        let c = e.compile(&["x", "y"]).unwrap();
        assert_eq!(c.eval(&[0.2, 0.3]).unwrap(), v);
    }

    #[test]
    fn identity_case() {
        let e = parse_expr("exp(x^2*y^2/4)", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&[("x", 0.0), ("y", 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn log_at_zero_is_domain_error() {
        let e = parse_expr("1 + log(x)", &["x"]).unwrap();
        match e.eval(&[("x", 0.0)]) {
            Err(ExprError::Domain { subexpr, .. }) => assert_eq!(subexpr, "log(x)"),
            other => panic!("unexpected {:?}", other),
        }
        let c = e.compile(&["x"]).unwrap();
        assert!(matches!(c.eval(&[0.0]), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn division_and_power_domains() {
        let e = parse_expr("1/x", &["x"]).unwrap();
        assert!(matches!(
            e.eval(&[("x", 0.0)]),
            Err(ExprError::Domain { .. })
        ));
        let e = parse_expr("x^0.5", &["x"]).unwrap();
        assert!(matches!(
            e.eval(&[("x", -1.0)]),
            Err(ExprError::Domain { .. })
        ));
        let e = parse_expr("x^3", &["x"]).unwrap();
        assert_eq!(e.eval(&[("x", -2.0)]).unwrap(), -8.0);
    }

    #[test]
    fn unbound_variable() {
        let e = parse_expr("x + y", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&[("x", 1.0)]), Err(ExprError::Unbound("y".into())));
        assert!(e.compile(&["x"]).is_err());
    }

    #[test]
    fn deep_trees_use_heap_stack() {
        // right-nested sum needs a stack as deep as the tree
        let mut e = Expr::var("x");
        for _ in 0..100 {
            e = Expr::var("x") + e;
        }
        let c = e.compile(&["x"]).unwrap();
        assert_eq!(c.eval(&[1.0]).unwrap(), 101.0);
    }
}
