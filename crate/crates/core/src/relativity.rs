//! Divergence-free 2-webs of 3+1 split Lorentzian metrics.
//!
//! In normal coordinates `(t, x₁, x₂, x₃)` the metric is `−α² dt² + γ` and the
//! web consists of the slices `{t = const}`, their orthogonal curves and the
//! volume density `α √det γ`.

use std::f64::consts::PI;

use crate::expr::build::{add, mul, sub};
use crate::expr::{is_identically_zero, sample_points, Expr, ZeroVerdict};
use crate::web::{
    is_locally_trivial, nonuniformity_tensor, TrivialityVerdict, WebChart, DEFAULT_ZERO_SAMPLES,
    DEFAULT_ZERO_TOL,
};
use crate::{Error, Region, Result};

/// Points per axis for the sampled positivity checks of lapse and γ.
const METRIC_SAMPLES: usize = 5;

/// Names of the shipped spacetimes.
pub const BUILTIN_SPACETIMES: [&str; 3] = ["minkowski", "schwarzschild_radial", "lemaitre"];

/// `g = −α² dt² + γ` with symbolic lapse and spatial metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMetric {
    coords: [String; 4],
    lapse: Expr,
    gamma: [[Expr; 3]; 3],
}

fn det3(g: &[[Expr; 3]; 3]) -> Expr {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        sub(
            mul(g[r1][c1].clone(), g[r2][c2].clone()),
            mul(g[r1][c2].clone(), g[r2][c1].clone()),
        )
    };
    add(
        sub(
            mul(g[0][0].clone(), minor(1, 2, 1, 2)),
            mul(g[0][1].clone(), minor(1, 2, 0, 2)),
        ),
        mul(g[0][2].clone(), minor(1, 2, 0, 1)),
    )
}

impl SplitMetric {
    /// `gamma` must be symmetric; entries are compared after simplification.
    pub fn new(coords: [&str; 4], lapse: Expr, gamma: [[Expr; 3]; 3]) -> Result<SplitMetric> {
        for (k, c) in coords.iter().enumerate() {
            if coords[..k].contains(c) {
                return Err(Error::Invalid(format!("coordinate `{c}` declared twice")));
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                if gamma[a][b].simplify() != gamma[b][a].simplify() {
                    return Err(Error::Invalid(format!(
                        "spatial metric is not symmetric in entries ({}, {})",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        let known: Vec<&str> = coords.to_vec();
        let stray = std::iter::once(&lapse)
            .chain(gamma.iter().flatten())
            .flat_map(|e| e.variables())
            .find(|v| !known.contains(&v.as_str()));
        if let Some(v) = stray {
            return Err(Error::Invalid(format!(
                "metric uses unknown coordinate `{v}`"
            )));
        }
        Ok(SplitMetric {
            coords: coords.map(String::from),
            lapse,
            gamma,
        })
    }

    /// Splits a full 4×4 metric (time first). Fails when any `g_{0k}` shift
    /// entry is not identically zero, since such charts are not adapted.
    pub fn from_metric(coords: [&str; 4], g: [[Expr; 4]; 4]) -> Result<SplitMetric> {
        for k in 1..4 {
            for e in [&g[0][k], &g[k][0]] {
                if !e.simplify().is_const_value(0.0) {
                    return Err(Error::Invalid(format!(
                        "metric has a shift term d{} d{}; transform to normal coordinates first",
                        coords[0], coords[k]
                    )));
                }
            }
        }
        let lapse = (-g[0][0].clone()).simplify().sqrt();
        let gamma = std::array::from_fn(|a| std::array::from_fn(|b| g[a + 1][b + 1].clone()));
        SplitMetric::new(coords, lapse, gamma)
    }

    pub fn coords(&self) -> [&str; 4] {
        [0, 1, 2, 3].map(|k| self.coords[k].as_str())
    }

    pub fn lapse(&self) -> &Expr {
        &self.lapse
    }

    pub fn gamma(&self) -> &[[Expr; 3]; 3] {
        &self.gamma
    }

    /// Samples `α > 0` and the leading principal minors of γ on `domain`.
    pub fn check_on(&self, domain: &Region) -> Result<()> {
        if domain.dim() != 4 {
            return Err(Error::Invalid("a spacetime domain has 4 axes".into()));
        }
        let vars = self.coords();
        let g = &self.gamma;
        let minors = [
            g[0][0].clone(),
            sub(
                mul(g[0][0].clone(), g[1][1].clone()),
                mul(g[0][1].clone(), g[1][0].clone()),
            ),
            det3(g),
        ];
        let lapse = self.lapse.compile(&vars)?;
        let minors = minors
            .iter()
            .map(|e| e.compile(&vars))
            .collect::<Result<Vec<_>, _>>()?;
        for x in sample_points(&domain.normalized(), METRIC_SAMPLES) {
            let a = lapse.eval(&x)?;
            if !(a > 0.0) {
                return Err(Error::Invalid(format!(
                    "lapse is not positive at {:?} ({a})",
                    x
                )));
            }
            for (k, m) in minors.iter().enumerate() {
                let v = m.eval(&x)?;
                if !(v > 0.0) {
                    return Err(Error::Invalid(format!(
                        "spatial metric is not positive definite at {:?} (minor {} is {v})",
                        x,
                        k + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `α √det γ`, with the determinant expanded symbolically.
pub fn volume_density(gm: &SplitMetric) -> Expr {
    mul(gm.lapse.clone(), det3(&gm.gamma).sqrt()).simplify()
}

/// The web `({t = const}, orthogonal curves, dV)` on `domain`.
pub fn web_from_metric(gm: &SplitMetric, domain: Region) -> Result<WebChart> {
    gm.check_on(&domain)?;
    WebChart::new(gm.coords.to_vec(), &[1, 3], volume_density(gm), domain)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlicingReport {
    pub density: Expr,
    /// `(k, 𝒦_{t x_k})` for the three spatial coordinates, k = 1..=3.
    pub entries: Vec<(usize, Expr)>,
    pub verdict: TrivialityVerdict,
    /// The lapse is constant along every slice.
    pub geodesic_slicing: bool,
    /// Some normal chart has `α γ^{1/2}` constant, so the conservation laws
    /// take their flat form; equivalent to triviality.
    pub conservation_simplifies: bool,
}

/// Nonuniformity of the slicing, its triviality and whether it is geodesic.
pub fn slicing_report(gm: &SplitMetric, domain: Region) -> Result<SlicingReport> {
    let w = web_from_metric(gm, domain)?;
    let k = nonuniformity_tensor(&w);
    let entries = (1..4).map(|l| (l, k.get(0, l).simplify())).collect();
    let verdict = is_locally_trivial(&w, DEFAULT_ZERO_TOL)?;
    let vars = gm.coords();
    let region = w.domain().normalized();
    let mut geodesic_slicing = true;
    for v in &vars[1..] {
        let d = gm.lapse.differentiate(v);
        let z = is_identically_zero(&d, &vars, &region, DEFAULT_ZERO_SAMPLES, DEFAULT_ZERO_TOL)?;
        if matches!(z, ZeroVerdict::Nonzero { .. }) {
            geodesic_slicing = false;
        }
    }
    Ok(SlicingReport {
        density: w.density().clone(),
        entries,
        conservation_simplifies: verdict.trivial,
        verdict,
        geodesic_slicing,
    })
}

fn mass(name: &str, params: &[(&str, f64)]) -> Result<f64> {
    let mut m = None;
    for (k, v) in params {
        match *k {
            "m" => m = Some(*v),
            other => {
                return Err(Error::Invalid(format!("{name} has no parameter `{other}`")));
            }
        }
    }
    match m {
        None => Err(Error::Invalid(format!("{name} needs the mass parameter m"))),
        Some(m) if !(m > 0.0) || !m.is_finite() => {
            Err(Error::Invalid(format!("mass must be positive, got {m}")))
        }
        Some(m) => Ok(m),
    }
}

fn diag(a: Expr, b: Expr, c: Expr) -> [[Expr; 3]; 3] {
    [
        [a, Expr::zero(), Expr::zero()],
        [Expr::zero(), b, Expr::zero()],
        [Expr::zero(), Expr::zero(), c],
    ]
}

/// One of [`BUILTIN_SPACETIMES`] with exact symbolic entries.
///
/// `schwarzschild_radial` and `lemaitre` take the mass `m > 0`; `minkowski`
/// takes no parameters.
pub fn builtin_spacetime(name: &str, params: &[(&str, f64)]) -> Result<SplitMetric> {
    let v = Expr::var;
    match name {
        "minkowski" => {
            if let Some((k, _)) = params.first() {
                return Err(Error::Invalid(format!("minkowski has no parameter `{k}`")));
            }
            SplitMetric::new(
                ["t", "x", "y", "z"],
                Expr::one(),
                diag(Expr::one(), Expr::one(), Expr::one()),
            )
        }
        "schwarzschild_radial" => {
            let m = mass(name, params)?;
            let f = Expr::one() - Expr::num(2.0 * m) / v("r");
            let r2 = v("r").powf(2.0);
            SplitMetric::new(
                ["t", "r", "theta", "phi"],
                f.clone().sqrt(),
                diag(Expr::one() / f, r2.clone(), r2 * v("theta").sin().powf(2.0)),
            )
        }
        "lemaitre" => {
            let m = mass(name, params)?;
            let s = (2.0 * m).sqrt();
            let r = (Expr::num(1.5) * (v("R") - Expr::num(s) * v("T"))).powf(2.0 / 3.0);
            let r2 = r.clone().powf(2.0);
            SplitMetric::new(
                ["T", "R", "theta", "phi"],
                Expr::one(),
                diag(Expr::one() / r, r2.clone(), r2 * v("theta").sin().powf(2.0)),
            )
        }
        other => Err(Error::Invalid(format!(
            "unknown spacetime `{other}`; known: {}",
            BUILTIN_SPACETIMES.join(", ")
        ))),
    }
}

/// A box away from coordinate singularities on which the builtin is valid.
pub fn builtin_domain(name: &str, params: &[(&str, f64)]) -> Result<Region> {
    let theta = (0.3, PI - 0.3);
    match name {
        "minkowski" => Region::cube(&[0.0; 4], 1.0),
        "schwarzschild_radial" => {
            let m = mass(name, params)?;
            Region::new(
                vec![-1.0, 3.0 * m, theta.0, 0.0],
                vec![1.0, 10.0 * m, theta.1, 2.0 * PI],
            )
        }
        "lemaitre" => {
            let s = (2.0 * mass(name, params)?).sqrt();
            Region::new(
                vec![-0.5, s + 0.5, theta.0, 0.0],
                vec![0.5, s + 3.0, theta.1, 2.0 * PI],
            )
        }
        other => Err(Error::Invalid(format!("unknown spacetime `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &Expr, vars: [&str; 4], x: [f64; 4]) -> f64 {
        e.compile(&vars).unwrap().eval(&x).unwrap()
    }

    #[test]
    fn schwarzschild_density() {
        let g = builtin_spacetime("schwarzschild_radial", &[("m", 1.0)]).unwrap();
        let h = volume_density(&g);
        assert!((at(&h, g.coords(), [0.0, 4.0, PI / 2.0, 0.0]) - 16.0).abs() < 1e-12);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn lemaitre_tensor_entry() {
        let g = builtin_spacetime("lemaitre", &[("m", 1.0)]).unwrap();
        let dom = builtin_domain("lemaitre", &[("m", 1.0)]).unwrap();
        let r = slicing_report(&g, dom).unwrap();
        let k = at(&r.entries[0].1, g.coords(), [0.0, 2.0, 1.5708, 0.0]);
        assert!((k - 2f64.sqrt() / 4.0).abs() < 1e-12);
        assert!(r.entries[1].1.is_const_value(0.0) && r.entries[2].1.is_const_value(0.0));
        assert!(!r.verdict.trivial && r.geodesic_slicing && !r.conservation_simplifies);
    }

    #[test]
    fn schwarzschild_slicing() {
        let p = [("m", 1.0)];
        let g = builtin_spacetime("schwarzschild_radial", &p).unwrap();
        let r = slicing_report(&g, builtin_domain("schwarzschild_radial", &p).unwrap()).unwrap();
        assert!(r.verdict.trivial && r.verdict.symbolic());
        assert!(!r.geodesic_slicing);
    }

    #[test]
    fn minkowski_slicing() {
        let g = builtin_spacetime("minkowski", &[]).unwrap();
        assert_eq!(volume_density(&g), Expr::one());
        let r = slicing_report(&g, builtin_domain("minkowski", &[]).unwrap()).unwrap();
        assert!(r.verdict.trivial && r.geodesic_slicing && r.conservation_simplifies);
    }

    #[test]
    fn bad_names_and_params() {
        assert!(builtin_spacetime("kerr", &[]).is_err());
        assert!(builtin_spacetime("lemaitre", &[("m", 0.0)]).is_err());
        assert!(builtin_spacetime("lemaitre", &[]).is_err());
        assert!(builtin_spacetime("minkowski", &[("m", 1.0)]).is_err());
    }

    #[test]
    fn shift_terms_rejected() {
        let v = Expr::var;
        let z = Expr::zero;
        let f = Expr::one() - Expr::num(2.0) / v("r");
        let shift = (Expr::num(2.0) / v("r")).sqrt();
        let g = [
            [-f, shift.clone(), z(), z()],
            [shift, Expr::one(), z(), z()],
            [z(), z(), v("r").powf(2.0), z()],
            [z(), z(), z(), v("r").powf(2.0) * v("theta").sin().powf(2.0)],
        ];
        assert!(matches!(
            SplitMetric::from_metric(["T", "r", "theta", "phi"], g),
            Err(Error::Invalid(m)) if m.contains("shift")
        ));
    }

    #[test]
    fn domain_must_avoid_horizon() {
        let g = builtin_spacetime("schwarzschild_radial", &[("m", 1.0)]).unwrap();
        let bad = Region::new(vec![-1.0, 1.0, 0.3, 0.0], vec![1.0, 5.0, 2.8, 6.0]).unwrap();
        assert!(web_from_metric(&g, bad).is_err());
    }
}
