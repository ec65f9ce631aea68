//! Adaptive Gauss–Legendre quadrature, iterated over boxes.

use crate::{Error, Result};

/// Controls for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target absolute error of the whole integral.
    pub abs_tol: f64,
    /// Maximum bisection depth of any 1D panel.
    pub max_depth: usize,
    /// Number of Gauss–Legendre nodes per panel.
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            max_depth: 30,
            order: 7,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Invalid(format!(
                "quadrature tolerance {} must be positive",
                self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::Invalid("quadrature depth must be at least 1".into()));
        }
        if self.order < 1 || self.order > 64 {
            return Err(Error::Invalid(format!(
                "quadrature order {} outside 1..=64",
                self.order
            )));
        }
        Ok(())
    }
}

/// An integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> GaussLegendre {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn apply<F>(&self, f: &mut F, a: f64, b: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(c + r * x)?;
        }
        Ok(sum * r)
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct Adaptive<'r> {
    rule: &'r GaussLegendre,
    max_depth: usize,
    evaluations: usize,
    error: f64,
    converged: bool,
}

impl Adaptive<'_> {
    fn panel<F>(
        &mut self,
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let m = 0.5 * (a + b);
        let left = self.rule.apply(f, a, m)?;
        let right = self.rule.apply(f, m, b)?;
        self.evaluations += 2 * self.rule.nodes.len();
        let halves = left + right;
        let err = (whole - halves).abs();
        // below this the comparison measures round-off, not truncation
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if err <= tol.max(floor) {
            self.error += err;
            return Ok(halves);
        }
        if depth >= self.max_depth || m == a || m == b {
            self.error += err;
            self.converged = false;
            return Ok(halves);
        }
        Ok(self.panel(f, a, m, left, 0.5 * tol, depth + 1)?
            + self.panel(f, m, b, right, 0.5 * tol, depth + 1)?)
    }
}

/// Adaptive 1D integral of `f` from `a` to `b` (signed when `b < a`).
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let rule = GaussLegendre::new(spec.order);
    integrate_with(&rule, &mut f, a, b, spec.abs_tol, spec.max_depth)
}

fn integrate_with<F>(
    rule: &GaussLegendre,
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut run = Adaptive {
        rule,
        max_depth,
        evaluations: rule.nodes.len(),
        error: 0.0,
        converged: true,
    };
    let whole = rule.apply(f, a, b)?;
    let value = run.panel(f, a, b, whole, tol, 0)?;
    if !run.converged && run.error > tol {
        return Err(Error::Quadrature {
            estimate: value,
            error: run.error,
            tolerance: tol,
        });
    }
    Ok(Estimate {
        value,
        error: run.error,
        evaluations: run.evaluations,
    })
}

/// Iterated integral of `f` over the box with corners `a` and `b`.
///
/// Each axis is integrated from `a[k]` to `b[k]`, so reversed axes flip the
/// sign. The tolerance is split evenly between the outer integral and the
/// accumulated error of the inner ones.
pub fn integrate_box<F>(mut f: F, a: &[f64], b: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    assert_eq!(a.len(), b.len());
    let rule = GaussLegendre::new(spec.order);
    let mut x = a.to_vec();
    box_level(&rule, &mut f, &mut x, a, b, 0, spec.abs_tol, spec.max_depth)
}

#[allow(clippy::too_many_arguments)]
fn box_level<F>(
    rule: &GaussLegendre,
    f: &mut F,
    x: &mut Vec<f64>,
    a: &[f64],
    b: &[f64],
    k: usize,
    tol: f64,
    max_depth: usize,
) -> Result<Estimate>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let m = a.len();
    if m == 0 {
        return Ok(Estimate {
            value: f(x)?,
            error: 0.0,
            evaluations: 1,
        });
    }
    let remaining = m - k;
    if remaining == 1 {
        return integrate_with(
            rule,
            &mut |t| {
                x[k] = t;
                f(x)
            },
            a[k],
            b[k],
            tol,
            max_depth,
        );
    }
    let len = (b[k] - a[k]).abs();
    let outer_tol = tol / remaining as f64;
    let inner_tol = tol * (remaining - 1) as f64 / remaining as f64 / len.max(f64::MIN_POSITIVE);
    let mut inner_error: f64 = 0.0;
    let mut evaluations = 0;
    let mut scratch = x.clone();
    let outer = integrate_with(
        rule,
        &mut |t| {
            scratch[k] = t;
            let e = box_level(rule, f, &mut scratch, a, b, k + 1, inner_tol, max_depth)?;
            inner_error = inner_error.max(e.error);
            evaluations += e.evaluations;
            Ok(e.value)
        },
        a[k],
        b[k],
        outer_tol,
        max_depth,
    )?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error * len,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        for n in 1..=12 {
            let rule = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got: f64 = rule
                    .nodes()
                    .iter()
                    .zip(rule.weights())
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let want = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!(
                    (got - want).abs() < 1e-14,
                    "n={n} deg={deg}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn adaptive_smooth_integrand() {
        let spec = QuadratureSpec::default();
        let e = integrate(|x| Ok(x.exp() * x.sin()), 0.0, 3.0, &spec).unwrap();
        let want = 0.5 * (3f64.exp() * (3f64.sin() - 3f64.cos()) + 1.0);
        assert!((e.value - want).abs() < 1e-12);
        let r = integrate(|x| Ok(x.exp() * x.sin()), 3.0, 0.0, &spec).unwrap();
        assert_eq!(r.value, -e.value);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let spec = QuadratureSpec::default();
        let e = integrate(|x| Ok(1.0 / (1e-4 + x * x)), -1.0, 1.0, &spec).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((e.value - want).abs() < 1e-9 * want);
    }

    #[test]
    fn singular_integrand_reports_failure() {
        let spec = QuadratureSpec {
            max_depth: 8,
            ..Default::default()
        };
        let r = integrate(|x| Ok(1.0 / x.abs().sqrt()), 0.0, 1.0, &spec);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn box_integral_and_orientation() {
        let spec = QuadratureSpec::default();
        let f = |x: &[f64]| Ok(1.0 + x[0] * x[1]);
        let (u1, u2) = (0.7, -0.4);
        let e = integrate_box(f, &[0.0, 0.0], &[u1, u2], &spec).unwrap();
        assert!((e.value - (u1 * u2 + u1 * u1 * u2 * u2 / 4.0)).abs() < 1e-14);
        let e = integrate_box(|_: &[f64]| Ok(1.0), &[1.0, 1.0], &[0.0, 0.0], &spec).unwrap();
        assert!((e.value - 1.0).abs() < 1e-15);
        let e = integrate_box(
            |x: &[f64]| Ok((x[0] + x[1] * x[2]).exp()),
            &[0.0, 0.0, 0.0],
            &[1.0, 1.0, 1.0],
            &spec,
        )
        .unwrap();
        // ∫∫∫ e^{x+yz} = (e-1) ∫₀¹ (e^{y}-1)/y dy
        let ein = 1.317_902_151_454_403_9;
        assert!((e.value - (std::f64::consts::E - 1.0) * ein).abs() < 1e-11);
    }
}
