use super::tensor::log_gradient;
use super::WebChart;
use crate::expr::CompiledExpr;
use crate::{Error, Result};

pub const DEFAULT_GEODESIC_STEPS: usize = 1000;

/// Samples of a geodesic `x(t)` with velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// The path was cut short because the next step left the domain.
    pub left_domain: bool,
}

fn accel(grad: &[CompiledExpr], x: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
    for k in 0..x.len() {
        out[k] = -grad[k].eval(x)? * v[k] * v[k];
    }
    Ok(())
}

/// Integrates `ẍ_k + ∂_k log h · ẋ_k² = 0` from `p` with velocity `v` over
/// `[0, t_end]` using `steps` classical Runge–Kutta steps.
///
/// These are the geodesics of the unique torsionless connection of a
/// codimension-1 web that preserves the foliations and the volume form.
pub fn integrate_geodesic(
    w: &WebChart,
    p: &[f64],
    v: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    if !w.is_codim1() {
        return Err(Error::Invalid(
            "geodesics need a codimension-1 web; refine the chart first".into(),
        ));
    }
    if steps < 1 {
        return Err(Error::Invalid("at least one step is required".into()));
    }
    w.check_point(p)?;
    w.check_point(v)?;
    if !w.domain().contains(p) {
        return Err(Error::Invalid(format!(
            "start point {:?} is outside the domain",
            p
        )));
    }
    let names = w.var_names();
    let grad = log_gradient(w)
        .iter()
        .map(|g| g.compile(&names))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let m = w.dim();
    let h = t_end / steps as f64;
    let mut path = GeodesicPath {
        times: vec![0.0],
        points: vec![p.to_vec()],
        velocities: vec![v.to_vec()],
        left_domain: false,
    };
    let (mut x, mut u) = (p.to_vec(), v.to_vec());
    let (mut kx, mut kv) = (vec![vec![0.0; m]; 4], vec![vec![0.0; m]; 4]);
    let (mut xs, mut us) = (vec![0.0; m], vec![0.0; m]);
    for step in 1..=steps {
        for stage in 0..4 {
            let c = match stage {
                0 => 0.0,
                3 => h,
                _ => 0.5 * h,
            };
            for k in 0..m {
                let (dx, dv) = if stage == 0 {
                    (0.0, 0.0)
                } else {
                    (kx[stage - 1][k], kv[stage - 1][k])
                };
                xs[k] = x[k] + c * dx;
                us[k] = u[k] + c * dv;
            }
            kx[stage].copy_from_slice(&us);
            accel(&grad, &xs, &us, &mut kv[stage])?;
        }
        let mut nx = x.clone();
        let mut nu = u.clone();
        for k in 0..m {
            nx[k] += h / 6.0 * (kx[0][k] + 2.0 * kx[1][k] + 2.0 * kx[2][k] + kx[3][k]);
            nu[k] += h / 6.0 * (kv[0][k] + 2.0 * kv[1][k] + 2.0 * kv[2][k] + kv[3][k]);
        }
        if !w.domain().contains(&nx) || nx.iter().chain(&nu).any(|c| !c.is_finite()) {
            path.left_domain = true;
            break;
        }
        x = nx;
        u = nu;
        path.times.push(step as f64 * h);
        path.points.push(x.clone());
        path.velocities.push(u.clone());
    }
    Ok(path)
}
