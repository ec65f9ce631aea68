use crate::expr::Expr;
use crate::web::{nonuniformity_tensor, WebChart};
use crate::{Error, Result};

/// Both derivative factors must exceed this in absolute value for the
/// invariants to count as generic.
pub const GENERICITY_THRESHOLD: f64 = 1e-8;

/// Largest `|h − 1|` on the axes for a chart to count as normalized.
const AXIS_TOL: f64 = 1e-9;
const AXIS_SAMPLES: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarInvariants {
    /// `κ(p) / h(p)`.
    pub kappa0: f64,
    /// `|F_x F_y / h⁵|^{1/2}` with `F_x = h ∂ₓκ − ∂ₓh κ` and likewise for y.
    pub a: f64,
    pub generic: bool,
    /// `(F_x, F_y)` at p.
    pub factors: [f64; 2],
}

fn check_planar(w: &WebChart) -> Result<()> {
    if w.dim() != 2 || w.n_blocks() != 2 {
        return Err(Error::Invalid(
            "planar invariants need a 2-dimensional chart with two 1-dimensional blocks".into(),
        ));
    }
    Ok(())
}

/// The scalar invariants of a planar web at `p`.
pub fn planar_invariants(w: &WebChart, p: &[f64]) -> Result<PlanarInvariants> {
    check_planar(w)?;
    w.check_point(p)?;
    let names = w.var_names();
    let kappa = nonuniformity_tensor(w).get(0, 1).clone();
    let h = w.density();
    let at = |e: &Expr| -> Result<f64> { Ok(e.compile(&names)?.eval(p)?) };
    let (hv, k) = (at(h)?, at(&kappa)?);
    let factor = |v: &str| -> Result<f64> {
        Ok(hv * at(&kappa.differentiate(v))? - at(&h.differentiate(v))? * k)
    };
    let factors = [factor(names[0])?, factor(names[1])?];
    Ok(PlanarInvariants {
        kappa0: k / hv,
        a: (factors[0] * factors[1] / hv.powi(5)).abs().sqrt(),
        generic: factors.iter().all(|f| f.abs() > GENERICITY_THRESHOLD),
        factors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFormReport {
    /// `κ₀` in the canonical chart; it flips sign with each quarter turn.
    pub kappa0: f64,
    pub a: f64,
    /// Number of quarter turns `(x, y) ↦ (y, −x)` applied first.
    pub rotations: u8,
    /// Then `(x, y) ↦ (c x, y / c)` with this `c > 0`.
    pub scale: f64,
    /// Coefficients of `xy`, `x²y` and `xy²` in the canonical chart.
    pub jet: [f64; 3],
    /// Largest mismatch between `jet` and `(κ₀, a/2, a/2)`.
    pub jet_error: f64,
    pub jet_matches: bool,
    /// `(ε, max |h − jet|)` on circles of radius ε, ε halving.
    pub remainder: Vec<(f64, f64)>,
    /// The remainder shrinks like `ε⁴` (ratios ≥ 8 per halving, or below
    /// roundoff).
    pub remainder_consistent: bool,
}

// (x, y) = m (u, v) after `rotations` quarter turns and the (c, 1/c) scaling
fn chart_matrix(rotations: u8, c: f64) -> [[f64; 2]; 2] {
    // inverse scaling first, then undo each rotation with (a, b) ↦ (−b, a)
    let mut m = [[1.0 / c, 0.0], [0.0, c]];
    for _ in 0..rotations {
        m = [[-m[1][0], -m[1][1]], [m[0][0], m[0][1]]];
    }
    m
}

/// Checks the canonical form `h = 1 + xy(κ₀ + a(x + y)/2 + O(2))` of a
/// normalized generic planar chart at the origin, and reports the quarter
/// turns and scaling that make `∂ₓκ(0) = ∂_yκ(0) > 0`.
pub fn canonical_form_report(w: &WebChart) -> Result<CanonicalFormReport> {
    check_planar(w)?;
    let origin = [0.0, 0.0];
    let dom = w.domain().normalized();
    if !dom.contains_interior(&origin) {
        return Err(Error::Invalid(
            "the canonical form is taken at the origin, which is not interior".into(),
        ));
    }
    let h = w.compiled_density();
    let mut axis_dev: f64 = 0.0;
    for axis in 0..2 {
        let (lo, hi) = (dom.lo(axis), dom.hi(axis));
        for n in 0..AXIS_SAMPLES {
            let mut q = [0.0, 0.0];
            q[axis] = lo + (hi - lo) * n as f64 / (AXIS_SAMPLES - 1) as f64;
            axis_dev = axis_dev.max((h.eval(&q)? - 1.0).abs());
        }
    }
    if axis_dev > AXIS_TOL {
        return Err(Error::Invalid(format!(
            "chart is not normalized: |h - 1| reaches {axis_dev:e} on the axes"
        )));
    }
    let inv = planar_invariants(w, &origin)?;
    if !inv.generic {
        return Err(Error::Invalid(format!(
            "chart is not generic at the origin: derivative factors {:?}",
            inv.factors
        )));
    }
    let [p, q] = inv.factors;
    // a quarter turn maps (p, q) to (−q, p)
    let rotations = match (p > 0.0, q > 0.0) {
        (true, true) => 0,
        (true, false) => 1,
        (false, false) => 2,
        (false, true) => 3,
    };
    let (p2, q2) = match rotations {
        0 => (p, q),
        1 => (-q, p),
        2 => (-p, -q),
        _ => (q, -p),
    };
    let scale = (p2 / q2).sqrt();
    let m = chart_matrix(rotations, scale);

    let names = w.var_names();
    let (u, v) = (Expr::var("__u"), Expr::var("__v"));
    let lin = |r: [f64; 2]| Expr::num(r[0]) * u.clone() + Expr::num(r[1]) * v.clone();
    let ht = w
        .density()
        .substitute(names[0], &lin(m[0]))
        .substitute(names[1], &lin(m[1]));
    let uv = ["__u", "__v"];
    let d = |e: &Expr, vars: &[&str]| -> Result<f64> {
        let mut e = e.clone();
        for x in vars {
            e = e.differentiate(x);
        }
        Ok(e.compile(&uv)?.eval(&[0.0, 0.0])?)
    };
    let h0 = d(&ht, &[])?;
    let log_ht = ht.log_expanded();
    let kappa0 = d(&log_ht, &["__u", "__v"])? / h0;
    let jet = [
        d(&ht, &["__u", "__v"])?,
        d(&ht, &["__u", "__u", "__v"])? / 2.0,
        d(&ht, &["__u", "__v", "__v"])? / 2.0,
    ];
    let jet_error = (jet[0] - kappa0)
        .abs()
        .max((jet[1] - inv.a / 2.0).abs())
        .max((jet[2] - inv.a / 2.0).abs());

    let room = (0..2)
        .map(|k| (-dom.lo(k)).min(dom.hi(k)))
        .fold(f64::INFINITY, f64::min);
    let stretch = scale.max(1.0 / scale);
    let eps0 = (0.1f64).min(0.5 * room / stretch);
    let code = ht.compile(&uv)?;
    let mut remainder = Vec::new();
    for n in 0..3 {
        let eps = eps0 / f64::powi(2.0, n);
        let mut worst: f64 = 0.0;
        for k in 0..16 {
            let t = std::f64::consts::PI * k as f64 / 8.0;
            let (x, y) = (eps * t.cos(), eps * t.sin());
            let model = 1.0 + x * y * (jet[0] + jet[1] * x + jet[2] * y);
            worst = worst.max((code.eval(&[x, y])? - model).abs());
        }
        remainder.push((eps, worst));
    }
    let floor = 1e3 * f64::EPSILON;
    let remainder_consistent = remainder
        .windows(2)
        .all(|w| w[1].1 <= floor || w[0].1 >= 8.0 * w[1].1);
    Ok(CanonicalFormReport {
        kappa0,
        a: inv.a,
        rotations,
        scale,
        jet,
        jet_error,
        jet_matches: jet_error <= 1e-8 * inv.a.max(1.0),
        remainder,
        remainder_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Region;

    fn chart(h: &str) -> WebChart {
        WebChart::parse(
            &["x", "y"],
            &[1, 1],
            h,
            Region::cube(&[0.0; 2], 0.5).unwrap(),
        )
        .unwrap()
    }

    const CUBIC: &str = "exp(x*y + x^2*y/2 + x*y^2/2)";

    #[test]
    fn invariants_of_examples() {
        let i = planar_invariants(&chart("1"), &[0.0, 0.0]).unwrap();
        assert_eq!((i.kappa0, i.a, i.generic), (0.0, 0.0, false));
        let i = planar_invariants(&chart("1 + x*y"), &[0.0, 0.0]).unwrap();
        assert_eq!((i.kappa0, i.a, i.generic), (1.0, 0.0, false));
        let i = planar_invariants(&chart(CUBIC), &[0.0, 0.0]).unwrap();
        assert!((i.kappa0 - 1.0).abs() < 1e-15 && (i.a - 1.0).abs() < 1e-15 && i.generic);
    }

    #[test]
    fn canonical_form_of_cubic() {
        let r = canonical_form_report(&chart(CUBIC)).unwrap();
        assert_eq!((r.rotations, r.scale), (0, 1.0));
        assert!(
            (r.kappa0 - 1.0).abs() < 1e-14 && r.jet_matches && r.remainder_consistent,
            "{:?}",
            r
        );
    }

    #[test]
    fn rotation_and_scaling_chosen() {
        // ∂ₓκ(0) = 2, ∂_yκ(0) = −1/2
        let r = canonical_form_report(&chart("exp(x*y + x^2*y - x*y^2/4)")).unwrap();
        assert_eq!(r.rotations, 1);
        assert!((r.scale - 0.5).abs() < 1e-14);
        assert!((r.kappa0 + 1.0).abs() < 1e-14 && (r.a - 1.0).abs() < 1e-14);
        assert!(r.jet_matches && r.remainder_consistent, "{:?}", r);
    }

    #[test]
    fn rejected_inputs() {
        assert!(
            matches!(canonical_form_report(&chart("1 + x*y")), Err(Error::Invalid(m)) if m.contains("generic"))
        );
        assert!(matches!(
            canonical_form_report(&chart("(1 + x)*(1 + y)")),
            Err(Error::Invalid(m)) if m.contains("normalized")
        ));
    }
}
