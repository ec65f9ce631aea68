//! Recovery of local invariants from reflections and loops.
//!
//! Near the anchor, with `x = q − p`, the reflection along axis i is
//!
//! ```text
//! x_i ↦ −x_i − α_i x_i² − α_i² x_i³ − Σ_j (α_ij / 2) x_i² x_j + O(|x|⁴)
//! ```
//!
//! with `α_i = ∂_i log h(p)` and `α_ij = ∂_i∂_j log h(p)`, and the loop along
//! axes i, j displaces q by `(κ_ij x_i² x_j, −κ_ij x_i x_j²) + O(|x|⁴)`.

use super::reflect::{holonomy_defect, reflect};
use crate::quadrature::QuadratureSpec;
use crate::web::{nonuniformity_tensor, WebChart};
use crate::{Error, Result};

pub const DEFAULT_FIT_SCALES: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Loop defects below this multiple of the quadrature tolerance are
/// dominated by solver noise.
const NOISE_FACTOR: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct FitSample {
    pub scale: f64,
    pub defect: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureFit {
    /// Least-squares estimate of κ_ij(p).
    pub kappa_hat: f64,
    /// Root-mean-square deviation of the normalized defects from the fit.
    pub residual: f64,
    /// κ_ij(p) from the nonuniformity tensor.
    pub kappa: f64,
    pub samples: Vec<FitSample>,
}

/// Estimates `κ_ij(p)` from loop defects at `q = p + s e_i + s e_j`.
///
/// Each scale contributes `defect_i / s³` and `−defect_j / s³`; the estimate
/// is their least-squares constant.
pub fn fit_loop_curvature(
    w: &WebChart,
    p: &[f64],
    i: usize,
    j: usize,
    scales: &[f64],
    spec: &QuadratureSpec,
) -> Result<CurvatureFit> {
    if scales.is_empty() {
        return Err(Error::Invalid("no fit scales given".into()));
    }
    if scales.iter().any(|s| !(*s > 0.0)) || scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid(
            "fit scales must be positive and strictly decreasing".into(),
        ));
    }
    let smallest = *scales.last().unwrap();
    if smallest.powi(3) < NOISE_FACTOR * spec.abs_tol {
        return Err(Error::Numeric(format!(
            "fit ill-conditioned: scale {smallest} is too small for tolerance {:e}",
            spec.abs_tol
        )));
    }
    let mut samples = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(2 * scales.len());
    for &s in scales {
        let mut q = p.to_vec();
        q[i] += s;
        q[j] += s;
        let defect = holonomy_defect(w, p, i, j, &q, spec)?;
        let s3 = s * s * s;
        ys.push(defect[i] / s3);
        ys.push(-defect[j] / s3);
        samples.push(FitSample { scale: s, defect });
    }
    let kappa_hat = ys.iter().sum::<f64>() / ys.len() as f64;
    let residual =
        (ys.iter().map(|y| (y - kappa_hat).powi(2)).sum::<f64>() / ys.len() as f64).sqrt();
    let kappa = nonuniformity_tensor(w)
        .get(i, j)
        .compile(&w.var_names())?
        .eval(p)?;
    Ok(CurvatureFit {
        kappa_hat,
        residual,
        kappa,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub estimate: f64,
    pub exact: f64,
}

impl Coefficient {
    /// `|estimate − exact| / max(|exact|, 1)`.
    pub fn relative_error(&self) -> f64 {
        (self.estimate - self.exact).abs() / self.exact.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCheck {
    /// `α_i`.
    pub alpha_i: Coefficient,
    /// `(j, α_ij)` for every other axis j.
    pub alpha_ij: Vec<(usize, Coefficient)>,
    pub max_rel_error: f64,
    /// Finite-difference step used.
    pub step: f64,
}

/// Finite-difference estimates of the reflection's expansion coefficients at
/// `p`, compared with the derivatives of `log h`.
///
/// `α_i ≈ −(z(s) + z(−s)) / 2s²`, where `z(s)` is the reflected offset of
/// `p + s e_i`. For `α_ij` the difference `D(s) = z(s e_i + r e_j) − z(s e_i − r e_j)`
/// gives `α_ij ≈ −(D(s) + D(−s)) / 2s²r`; both are accurate to second order.
pub fn reflection_taylor_check(
    w: &WebChart,
    p: &[f64],
    i: usize,
    spec: &QuadratureSpec,
) -> Result<TaylorCheck> {
    w.check_point(p)?;
    w.check_axis(i)?;
    let dom = w.domain();
    let room = (0..w.dim())
        .map(|k| (p[k] - dom.lo(k)).min(dom.hi(k) - p[k]))
        .fold(f64::INFINITY, f64::min);
    if !(room > 0.0) {
        return Err(Error::Invalid(format!(
            "{:?} is not interior to the domain",
            p
        )));
    }
    let step = (0.01f64).min(0.1 * room);
    let z = |si: f64, j: Option<(usize, f64)>| -> Result<f64> {
        let mut q = p.to_vec();
        q[i] += si;
        if let Some((j, r)) = j {
            q[j] += r;
        }
        Ok(reflect(w, p, i, &q, spec)?.point[i] - p[i])
    };
    let s = step;
    let names = w.var_names();
    let log_h = w.log_density();
    let grad_i = log_h.differentiate(names[i]);
    let alpha_i = Coefficient {
        estimate: -(z(s, None)? + z(-s, None)?) / (2.0 * s * s),
        exact: grad_i.compile(&names)?.eval(p)?,
    };
    let mut alpha_ij = Vec::new();
    for j in (0..w.dim()).filter(|j| *j != i) {
        let r = step;
        let d = |si: f64| -> Result<f64> { Ok(z(si, Some((j, r)))? - z(si, Some((j, -r)))?) };
        let estimate = -(d(s)? + d(-s)?) / (2.0 * s * s * r);
        let exact = grad_i.differentiate(names[j]).compile(&names)?.eval(p)?;
        alpha_ij.push((j, Coefficient { estimate, exact }));
    }
    let max_rel_error = alpha_ij
        .iter()
        .map(|(_, c)| c.relative_error())
        .fold(alpha_i.relative_error(), f64::max);
    Ok(TaylorCheck {
        alpha_i,
        alpha_ij,
        max_rel_error,
        step,
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
            Region::cube(&[0.0; 2], 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn flat_web_has_zero_coefficients() {
        let spec = QuadratureSpec::default();
        let f =
            fit_loop_curvature(&chart("1"), &[0.0, 0.0], 0, 1, &DEFAULT_FIT_SCALES, &spec).unwrap();
        assert!(f.kappa_hat.abs() < 1e-6);
        let t = reflection_taylor_check(&chart("1"), &[0.0, 0.0], 0, &spec).unwrap();
        assert!(t.alpha_i.estimate.abs() < 1e-6 && t.alpha_ij[0].1.estimate.abs() < 1e-4);
    }

    #[test]
    fn bilinear_loop_curvature() {
        let spec = QuadratureSpec::default();
        let f = fit_loop_curvature(
            &chart("1 + x*y"),
            &[0.0, 0.0],
            0,
            1,
            &DEFAULT_FIT_SCALES,
            &spec,
        )
        .unwrap();
        assert_eq!(f.kappa, 1.0);
        assert!((f.kappa_hat - 1.0).abs() < 0.02);
    }

    #[test]
    fn defect_leading_term() {
        let spec = QuadratureSpec::default();
        let s = 0.02;
        let d = holonomy_defect(&chart("1 + x*y"), &[0.0, 0.0], 0, 1, &[s, s], &spec).unwrap();
        let s3 = s * s * s;
        assert!((d[0] / s3 - 1.0).abs() < 0.05);
        assert!((d[1] / s3 + 1.0).abs() < 0.05);
    }

    #[test]
    fn taylor_coefficients() {
        let spec = QuadratureSpec::default();
        let t = reflection_taylor_check(&chart("1 + x*y"), &[0.0, 0.0], 0, &spec).unwrap();
        assert!(t.alpha_i.exact == 0.0 && t.alpha_ij[0].1.exact == 1.0);
        assert!(t.max_rel_error < 0.02, "{:?}", t);
        let t = reflection_taylor_check(&chart("(1 + x)*(1 + y)"), &[0.0, 0.0], 0, &spec).unwrap();
        assert!(t.alpha_i.exact == 1.0 && t.alpha_ij[0].1.exact == 0.0);
        assert!(t.max_rel_error < 0.02, "{:?}", t);
    }

    #[test]
    fn bad_scales_rejected() {
        let spec = QuadratureSpec::default();
        let w = chart("1 + x*y");
        assert!(fit_loop_curvature(&w, &[0.0, 0.0], 0, 1, &[0.05, 0.1], &spec).is_err());
        assert!(matches!(
            fit_loop_curvature(&w, &[0.0, 0.0], 0, 1, &[1e-4], &spec),
            Err(Error::Numeric(_))
        ));
    }
}
