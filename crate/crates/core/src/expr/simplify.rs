//! Local rewriting: constant folding, neutral-element removal and merging
//! of like terms in sums.
//!
//! The smart constructors here are also used by differentiation so derivative
//! trees stay small.

use super::{BinaryOp, Expr, UnaryOp};

fn fold(value: f64) -> Option<Expr> {
    value.is_finite().then_some(Expr::Const(value))
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Unary(UnaryOp::Neg, inner) => (*inner).clone(),
        other => Expr::unary(UnaryOp::Neg, other),
    }
}

pub(crate) fn unary(op: UnaryOp, a: Expr) -> Expr {
    if op == UnaryOp::Neg {
        return neg(a);
    }
    if let Some(c) = a.as_const() {
        let v = match op {
            UnaryOp::Exp => c.exp(),
            UnaryOp::Log if c > 0.0 => c.ln(),
            UnaryOp::Sqrt if c >= 0.0 => c.sqrt(),
            UnaryOp::Sin => c.sin(),
            UnaryOp::Cos => c.cos(),
            _ => f64::NAN,
        };
        if let Some(e) = fold(v) {
            return e;
        }
    }
    match (op, &a) {
        (UnaryOp::Log, Expr::Unary(UnaryOp::Exp, inner)) => (**inner).clone(),
        _ => Expr::unary(op, a),
    }
}

fn mul_factors<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Binary(BinaryOp::Mul, l, r) => {
            mul_factors(l, out);
            mul_factors(r, out);
        }
        _ => out.push(e),
    }
}

// `c * t` as `(c, t)`, pulling constant factors out of a product chain;
// anything else has coefficient 1 (constants are `c * 1`)
fn split_coef(e: &Expr) -> (f64, Expr) {
    match e {
        Expr::Const(c) => (*c, Expr::one()),
        Expr::Unary(UnaryOp::Neg, a) => {
            let (c, t) = split_coef(a);
            (-c, t)
        }
        Expr::Binary(BinaryOp::Mul, _, _) => {
            let mut fs = Vec::new();
            mul_factors(e, &mut fs);
            let mut c = 1.0;
            let mut rest: Vec<&Expr> = Vec::with_capacity(fs.len());
            for f in fs {
                match f.as_const() {
                    Some(k) => c *= k,
                    None => rest.push(f),
                }
            }
            let t = match rest.split_first() {
                None => Expr::one(),
                Some((first, tail)) => tail.iter().fold((*first).clone(), |acc, f| {
                    Expr::binary(BinaryOp::Mul, acc, (*f).clone())
                }),
            };
            (c, t)
        }
        _ => (1.0, e.clone()),
    }
}

// Equal up to reordering the factors of a product.
fn same_term(a: &Expr, b: &Expr) -> bool {
    if a == b {
        return true;
    }
    let (mut fa, mut fb) = (Vec::new(), Vec::new());
    mul_factors(a, &mut fa);
    mul_factors(b, &mut fb);
    if fa.len() < 2 || fa.len() != fb.len() {
        return false;
    }
    let mut used = vec![false; fb.len()];
    fa.iter().all(
        |f| match (0..fb.len()).find(|&k| !used[k] && *fb[k] == **f) {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        },
    )
}

fn flatten_sum(e: &Expr, sign: f64, out: &mut Vec<(f64, Expr)>) {
    match e {
        Expr::Binary(BinaryOp::Add, a, b) => {
            flatten_sum(a, sign, out);
            flatten_sum(b, sign, out);
        }
        Expr::Binary(BinaryOp::Sub, a, b) => {
            flatten_sum(a, sign, out);
            flatten_sum(b, -sign, out);
        }
        Expr::Unary(UnaryOp::Neg, a) => flatten_sum(a, -sign, out),
        _ => {
            let (c, t) = split_coef(e);
            out.push((sign * c, t));
        }
    }
}

// Merges structurally equal terms of `a ± b`; None when nothing merges.
fn collect_terms(a: &Expr, b: &Expr, sign: f64) -> Option<Expr> {
    let mut flat = Vec::new();
    flatten_sum(a, 1.0, &mut flat);
    flatten_sum(b, sign, &mut flat);
    let mut merged: Vec<(f64, Expr)> = Vec::with_capacity(flat.len());
    let mut any = false;
    for (c, t) in flat {
        match merged.iter_mut().find(|(_, u)| same_term(u, &t)) {
            Some(slot) => {
                slot.0 += c;
                any = true;
            }
            None => merged.push((c, t)),
        }
    }
    if !any || merged.iter().any(|(c, _)| !c.is_finite()) {
        return None;
    }
    let mut acc = Expr::zero();
    for (c, t) in merged {
        if c == 0.0 {
            continue;
        }
        acc = if c < 0.0 {
            sub(acc, mul(Expr::Const(-c), t))
        } else {
            add(acc, mul(Expr::Const(c), t))
        };
    }
    Some(acc)
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => fold(x + y).unwrap_or_else(|| Expr::binary(BinaryOp::Add, a, b)),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ if let Some(e) = collect_terms(&a, &b, 1.0) => e,
        _ => match b {
            Expr::Unary(UnaryOp::Neg, inner) => sub(a, (*inner).clone()),
            Expr::Const(y) if y < 0.0 => Expr::binary(BinaryOp::Sub, a, Expr::Const(-y)),
            _ => Expr::binary(BinaryOp::Add, a, b),
        },
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => fold(x - y).unwrap_or_else(|| Expr::binary(BinaryOp::Sub, a, b)),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ if a == b => Expr::zero(),
        _ if let Some(e) = collect_terms(&a, &b, -1.0) => e,
        _ => match b {
            Expr::Unary(UnaryOp::Neg, inner) => add(a, (*inner).clone()),
            _ => Expr::binary(BinaryOp::Sub, a, b),
        },
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => fold(x * y).unwrap_or_else(|| Expr::binary(BinaryOp::Mul, a, b)),
        (Some(x), _) if x == 0.0 => Expr::zero(),
        (_, Some(y)) if y == 0.0 => Expr::zero(),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        (None, Some(_)) => mul(b, a),
        (Some(x), None) => match &b {
            // keep a single leading constant factor
            Expr::Binary(BinaryOp::Mul, l, r) if l.as_const().is_some() => {
                mul(Expr::Const(x * l.as_const().unwrap()), (**r).clone())
            }
            Expr::Unary(UnaryOp::Neg, inner) => mul(Expr::Const(-x), (**inner).clone()),
            _ => Expr::binary(BinaryOp::Mul, a, b),
        },
        (None, None) => match (a, b) {
            (Expr::Unary(UnaryOp::Neg, l), Expr::Unary(UnaryOp::Neg, r)) => {
                mul((*l).clone(), (*r).clone())
            }
            (Expr::Unary(UnaryOp::Neg, l), r) => neg(mul((*l).clone(), r)),
            (l, Expr::Unary(UnaryOp::Neg, r)) => neg(mul(l, (*r).clone())),
            (l, r) => Expr::binary(BinaryOp::Mul, l, r),
        },
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => {
            fold(x / y).unwrap_or_else(|| Expr::binary(BinaryOp::Div, a, b))
        }
        (Some(x), _) if x == 0.0 => Expr::zero(),
        (_, Some(y)) if y == 1.0 => a,
        (_, Some(y)) if y == -1.0 => neg(a),
        _ if a == b => Expr::one(),
        _ => match (a, b) {
            (Expr::Unary(UnaryOp::Neg, l), r) => neg(div((*l).clone(), r)),
            (l, r) => Expr::binary(BinaryOp::Div, l, r),
        },
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => {
            let v = if x < 0.0 && y.fract() != 0.0 {
                f64::NAN
            } else {
                x.powf(y)
            };
            fold(v).unwrap_or_else(|| Expr::binary(BinaryOp::Pow, a, b))
        }
        (_, Some(y)) if y == 0.0 => Expr::one(),
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == 1.0 => Expr::one(),
        _ => Expr::binary(BinaryOp::Pow, a, b),
    }
}

pub(crate) fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    match op {
        BinaryOp::Add => add(a, b),
        BinaryOp::Sub => sub(a, b),
        BinaryOp::Mul => mul(a, b),
        BinaryOp::Div => div(a, b),
        BinaryOp::Pow => pow(a, b),
    }
}

impl Expr {
    /// Rebuilds the tree bottom-up through the folding constructors.
    ///
    /// Guarantees constant folding (when the folded value is finite), removal
    /// of additive and multiplicative neutral elements, annihilation by 0,
    /// `x - x → 0`, `x / x → 1`, double-negation removal and merging of
    /// structurally equal terms in sums (`2*u + 3*u → 5*u`). It is not a
    /// normal form.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, a) => unary(*op, a.simplify()),
            Expr::Binary(op, a, b) => binary(*op, a.simplify(), b.simplify()),
        }
    }

    /// An expression whose partial derivatives equal those of `log|self|`.
    ///
    /// Logs of products, quotients, powers, square roots and exponentials are
    /// split into sums so that variables that enter only through separate
    /// factors produce symbolic zeros in mixed second derivatives. Additive
    /// constants may differ from `log|self|`; only derivatives are meaningful.
    pub fn log_expanded(&self) -> Expr {
        match self {
            Expr::Const(c) => {
                if *c != 0.0 {
                    Expr::Const(c.abs().ln())
                } else {
                    Expr::unary(UnaryOp::Log, self.clone())
                }
            }
            Expr::Unary(UnaryOp::Neg, a) => a.log_expanded(),
            Expr::Unary(UnaryOp::Exp, a) => a.simplify(),
            Expr::Unary(UnaryOp::Sqrt, a) => mul(Expr::Const(0.5), a.log_expanded()),
            Expr::Binary(BinaryOp::Mul, a, b) => add(a.log_expanded(), b.log_expanded()),
            Expr::Binary(BinaryOp::Div, a, b) => sub(a.log_expanded(), b.log_expanded()),
            Expr::Binary(BinaryOp::Pow, a, b) => mul(b.simplify(), a.log_expanded()),
            _ => {
                let s = self.simplify();
                if s != *self {
                    s.log_expanded()
                } else {
                    unary(UnaryOp::Log, s)
                }
            }
        }
    }
}
