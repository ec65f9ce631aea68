use crate::quadrature::{integrate_box, QuadratureSpec};
use crate::roots::newton_bracketed;
use crate::web::WebChart;
use crate::{Error, Result};

/// Residual tolerance of the reflection equation, in multiples of the
/// quadrature tolerance.
const RESIDUAL_FACTOR: f64 = 10.0;
const MAX_NEWTON: usize = 100;
const MAX_EXPANSIONS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionResult {
    /// The image point; only coordinate i differs from the input.
    pub point: Vec<f64>,
    pub iterations: usize,
    /// |F(u′_i) + F(u_i)| at the accepted root.
    pub residual: f64,
}

/// The reflection equation along one axis.
///
/// With `u = q − p`, the Ω-volume of ⟨p, q⟩ is `Π_{j≠i} u_j · F(u_i)` where
/// `F(s) = ∫_0^s f(σ) dσ` and `f(σ)` averages `h(p_j + t_j u_j, p_i + σ)` over
/// the unit cube in the `t_j`. Dividing out `Π u_j` keeps the equation
/// regular when q lies on a coordinate hyperplane through p.
struct Fiber<'a> {
    w: &'a WebChart,
    p: &'a [f64],
    u: Vec<f64>,
    i: usize,
    spec: &'a QuadratureSpec,
}

impl Fiber<'_> {
    fn point(&self, sigma: f64, t: &[f64], out: &mut [f64]) {
        for k in 0..self.p.len() {
            out[k] = if k == self.i {
                self.p[k] + sigma
            } else {
                self.p[k] + t[k] * self.u[k]
            };
        }
    }

    // F(s)
    fn antiderivative(&self, s: f64) -> Result<f64> {
        let h = self.w.compiled_density();
        let m = self.p.len();
        let lo = vec![0.0; m];
        let mut hi = vec![1.0; m];
        hi[self.i] = s;
        let mut y = vec![0.0; m];
        let e = integrate_box(
            |t| {
                self.point(t[self.i], t, &mut y);
                Ok(h.eval(&y)?)
            },
            &lo,
            &hi,
            self.spec,
        )?;
        Ok(e.value)
    }

    // f(s)
    fn fiber(&self, s: f64) -> Result<f64> {
        let h = self.w.compiled_density();
        let m = self.p.len();
        let mut y = vec![0.0; m];
        if m == 1 {
            self.point(s, &[0.0], &mut y);
            return Ok(h.eval(&y)?);
        }
        // integrate over the t_j, j != i
        let idx: Vec<usize> = (0..m).filter(|k| *k != self.i).collect();
        let mut t = vec![0.0; m];
        let e = integrate_box(
            |r| {
                for (slot, k) in idx.iter().enumerate() {
                    t[*k] = r[slot];
                }
                self.point(s, &t, &mut y);
                Ok(h.eval(&y)?)
            },
            &vec![0.0; m - 1],
            &vec![1.0; m - 1],
            self.spec,
        )?;
        Ok(e.value)
    }
}

fn check_inputs(w: &WebChart, p: &[f64], i: usize, q: &[f64]) -> Result<()> {
    if !w.is_codim1() {
        return Err(Error::Invalid(
            "reflections need a codimension-1 web; refine the chart first".into(),
        ));
    }
    w.check_point(p)?;
    w.check_point(q)?;
    w.check_axis(i)?;
    let dom = w.domain();
    if !dom.contains(p) || !dom.contains(q) {
        return Err(Error::Invalid(format!(
            "anchor {:?} and point {:?} must lie in the domain",
            p, q
        )));
    }
    Ok(())
}

/// Volume-preserving reflection of `q` across the leaf `{x_i = p_i}`.
///
/// Returns the point q′ that differs from q only in coordinate i, lies on the
/// other side of `p_i`, and makes the boxes ⟨p, q⟩ and ⟨p, q′⟩ have opposite
/// signed Ω-volumes.
pub fn reflect(
    w: &WebChart,
    p: &[f64],
    i: usize,
    q: &[f64],
    spec: &QuadratureSpec,
) -> Result<ReflectionResult> {
    spec.validate()?;
    check_inputs(w, p, i, q)?;
    let u: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let ui = u[i];
    if ui == 0.0 {
        return Ok(ReflectionResult {
            point: q.to_vec(),
            iterations: 0,
            residual: 0.0,
        });
    }
    let fiber = Fiber { w, p, u, i, spec };
    let target = fiber.antiderivative(ui)?;
    let g = |s: f64| -> Result<f64> { Ok(fiber.antiderivative(s)? + target) };

    // the root lies on the side of p_i opposite to q_i; grow the bracket
    // geometrically from −u_i until g changes sign
    let dom = w.domain();
    let limit = if ui > 0.0 {
        dom.lo(i) - p[i]
    } else {
        dom.hi(i) - p[i]
    };
    let mut near = 0.0;
    let mut far = -ui;
    let mut found = false;
    for _ in 0..MAX_EXPANSIONS {
        if far.abs() > limit.abs() {
            far = limit;
        }
        let gf = g(far)?;
        if (ui > 0.0 && gf <= 0.0) || (ui < 0.0 && gf >= 0.0) {
            found = true;
            break;
        }
        if far == limit {
            break;
        }
        near = far;
        far *= 2.0;
    }
    if !found {
        return Err(Error::Root(format!(
            "no bracket for the reflection of {:?} along axis {} inside the domain",
            q,
            i + 1
        )));
    }
    let (lo, hi) = if near < far { (near, far) } else { (far, near) };
    let start = (-ui).clamp(lo, hi);
    let g_tol = RESIDUAL_FACTOR * spec.abs_tol;
    let x_tol = 1e-15 * (1.0 + ui.abs());
    let root = newton_bracketed(
        |s| Ok((g(s)?, fiber.fiber(s)?)),
        lo,
        hi,
        start,
        g_tol,
        x_tol,
        MAX_NEWTON,
    )?;
    let mut point = q.to_vec();
    point[i] = p[i] + root.x;
    Ok(ReflectionResult {
        point,
        iterations: root.iterations,
        residual: root.residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopResult {
    /// `ℓ(q)`.
    pub point: Vec<f64>,
    /// `q` followed by the four intermediate images.
    pub orbit: Vec<Vec<f64>>,
    pub max_residual: f64,
}

/// The loop `ℓ = r_j ∘ r_i ∘ r_j ∘ r_i` anchored at `p`, applied to `q`.
pub fn reflection_loop(
    w: &WebChart,
    p: &[f64],
    i: usize,
    j: usize,
    q: &[f64],
    spec: &QuadratureSpec,
) -> Result<LoopResult> {
    if i == j {
        return Err(Error::Invalid("a loop needs two distinct axes".into()));
    }
    w.check_axis(j)?;
    let mut orbit = vec![q.to_vec()];
    let mut max_residual: f64 = 0.0;
    for (stage, axis) in [i, j, i, j].into_iter().enumerate() {
        let cur = orbit.last().unwrap().clone();
        let r = reflect(w, p, axis, &cur, spec).map_err(|e| Error::LoopStage {
            stage: stage + 1,
            source: Box::new(e),
        })?;
        max_residual = max_residual.max(r.residual);
        orbit.push(r.point);
    }
    Ok(LoopResult {
        point: orbit.last().unwrap().clone(),
        orbit,
        max_residual,
    })
}

/// Displacement `ℓ(q) − q` of the loop.
pub fn holonomy_defect(
    w: &WebChart,
    p: &[f64],
    i: usize,
    j: usize,
    q: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let l = reflection_loop(w, p, i, j, q, spec)?;
    Ok(l.point.iter().zip(q).map(|(a, b)| a - b).collect())
}
