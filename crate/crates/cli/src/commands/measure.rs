//! Reflections, loops and volume comparisons.

use std::path::PathBuf;

use clap::Args;
use divweb::measure::{
    check_product_condition, equal_split, fit_loop_curvature, reflection_loop,
    reflection_taylor_check, region_volume, Coefficient,
};
use divweb::{parse_expr, Region, WebChart};
use serde_json::{json, Value};

use super::{Common, Outcome};
use crate::error::{input, Result};
use crate::input::{axes, load_spec, point, point_in, Tolerances};
use crate::output::report;

#[derive(Debug, Clone, Args)]
pub struct HolonomyArgs {
    /// Web spec (JSON)
    pub spec: PathBuf,
    /// Anchor point p of the reflections (default: the origin)
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub anchor: Vec<f64>,
    /// The two axes (1-based) of the loop r_j r_i r_j r_i
    #[arg(long, num_args = 2, value_name = "AXIS", default_values_t = [1, 2])]
    pub axes: Vec<usize>,
    /// Apply the loop to this point
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub point: Vec<f64>,
    /// Fit the curvature from loops at p + s(e_i + e_j) for these decreasing scales
    #[arg(long, num_args = 1.., value_name = "S")]
    pub fit_scales: Vec<f64>,
    /// Also check the expansion coefficients of the reflection along axis i
    #[arg(long)]
    pub taylor: bool,
    #[command(flatten)]
    pub common: Common,
}

// The loop for h = 1 + x_i x_j anchored at the origin, in closed form.
fn bilinear_loop(x: f64, y: f64) -> [f64; 2] {
    let psi = (4.0 * (1.0 - x * y) - x * x * y * y).sqrt() - 2.0;
    [psi * psi / (x * y * y), x * x * y * y * y / (psi * psi)]
}

fn is_bilinear(w: &WebChart, tol: &Tolerances) -> Result<bool> {
    if w.dim() != 2 {
        return Ok(false);
    }
    let v = w.vars();
    let model = parse_expr(&format!("1 + {}*{}", v[0], v[1]), &w.var_names())?;
    let d = w.density().clone() - model;
    Ok(w.zero_verdict(&d, tol.samples, tol.zero)?.is_zero())
}

fn coefficient_json(c: &Coefficient) -> Value {
    json!({ "estimate": c.estimate, "exact": c.exact, "relative_error": c.relative_error() })
}

pub fn holonomy(a: &HolonomyArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    let w = &spec.chart;
    let m = w.dim();
    let ax = axes(&a.axes, m)?;
    let (i, j) = (ax[0], ax[1]);
    if w.same_block(i, j) {
        return Err(input(format!(
            "axes {} and {} belong to the same foliation",
            i + 1,
            j + 1
        )));
    }
    let p = if a.anchor.is_empty() {
        vec![0.0; m]
    } else {
        point_in(&a.anchor, w.domain(), "anchor")?
    };
    if a.point.is_empty() && a.fit_scales.is_empty() && !a.taylor {
        return Err(input("give --point, --fit-scales or --taylor"));
    }
    let quad = tol.quad();
    let mut results = json!({ "anchor": p, "axes": [i + 1, j + 1] });
    if !a.point.is_empty() {
        let q = point_in(&a.point, w.domain(), "point")?;
        let l = reflection_loop(w, &p, i, j, &q, &quad)?;
        let defect: Vec<f64> = l.point.iter().zip(&q).map(|(a, b)| a - b).collect();
        results["loop"] = json!({
            "point": q,
            "image": l.point,
            "defect": defect,
            "orbit": l.orbit,
            "max_residual": l.max_residual,
        });
        if p.iter().all(|v| *v == 0.0) && q[i] != 0.0 && q[j] != 0.0 && is_bilinear(w, &tol)? {
            let c = bilinear_loop(q[i], q[j]);
            let mut want = q.clone();
            want[i] = c[0];
            want[j] = c[1];
            let err = want
                .iter()
                .zip(&l.point)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            results["loop"]["closed_form"] = json!({ "image": want, "max_abs_error": err });
        }
    }
    if !a.fit_scales.is_empty() {
        let f = fit_loop_curvature(w, &p, i, j, &a.fit_scales, &quad)?;
        let samples: Vec<Value> = f
            .samples
            .iter()
            .map(|s| json!({ "scale": s.scale, "defect": s.defect }))
            .collect();
        results["fit"] = json!({
            "kappa_hat": f.kappa_hat,
            "kappa": f.kappa,
            "relative_error": (f.kappa_hat - f.kappa).abs() / f.kappa.abs().max(f64::MIN_POSITIVE),
            "residual": f.residual,
            "samples": samples,
        });
    }
    if a.taylor {
        let t = reflection_taylor_check(w, &p, i, &quad)?;
        results["taylor"] = json!({
            "axis": i + 1,
            "alpha_i": coefficient_json(&t.alpha_i),
            "alpha_ij": t.alpha_ij.iter().map(|(j, c)| json!({ "j": j + 1, "coefficient": coefficient_json(c) })).collect::<Vec<_>>(),
            "max_rel_error": t.max_rel_error,
            "step": t.step,
        });
    }
    Ok(Outcome::new(report("holonomy", spec.source, &tol, results)))
}

#[derive(Debug, Clone, Args)]
pub struct VolumesArgs {
    /// Web spec (JSON)
    pub spec: PathBuf,
    /// Lower corner of the box K (default: the domain)
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub min: Vec<f64>,
    /// Upper corner of the box K
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub max: Vec<f64>,
    /// Cut K through this point and compare bd with ac
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub at: Vec<f64>,
    /// The two axes (1-based) of the cuts through --at
    #[arg(long, num_args = 2, value_name = "AXIS", default_values_t = [1, 2])]
    pub axes: Vec<usize>,
    /// Split K into cells of equal volume along these axes (1-based)
    #[arg(long, num_args = 1.., value_name = "AXIS")]
    pub split: Vec<usize>,
    #[command(flatten)]
    pub common: Common,
}

pub fn volumes(a: &VolumesArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    let w = &spec.chart;
    let m = w.dim();
    let k = match (a.min.is_empty(), a.max.is_empty()) {
        (true, true) => w.domain().normalized(),
        (false, false) => Region::new(point(&a.min, m, "min")?, point(&a.max, m, "max")?)?,
        _ => return Err(input("--min and --max must be given together")),
    };
    if !w.domain().normalized().contains_region(&k.normalized()) {
        return Err(input("the box must lie inside the chart domain"));
    }
    let quad = tol.quad();
    let vol = region_volume(w, &k, &quad)?;
    let mut results = json!({
        "box": { "min": k.start(), "max": k.end() },
        "diameter": k.diameter(),
        "volume": { "value": vol.value, "error": vol.error },
    });
    if !a.at.is_empty() {
        let p = point_in(&a.at, &k, "at")?;
        let ax = axes(&a.axes, m)?;
        let r = check_product_condition(w, &k, &p, ax[0], ax[1], &quad)?;
        results["product"] = json!({
            "at": p,
            "axes": [ax[0] + 1, ax[1] + 1],
            "a": r.volumes.a,
            "b": r.volumes.b,
            "c": r.volumes.c,
            "d": r.volumes.d,
            "error": r.volumes.error,
            "bd_minus_ac": r.bd_minus_ac,
            "noise": r.noise,
            "kappa": r.kappa,
            "consistent": r.consistent,
        });
    }
    if !a.split.is_empty() {
        let ax = axes(&a.split, m)?;
        let s = equal_split(w, &k, &ax, &quad)?;
        results["split"] = json!({
            "axes": a.split,
            "cuts": s.cuts,
            "cell_volumes": s.cell_volumes,
            "spread": s.spread,
            "equal": s.equal,
            "tolerance": divweb::measure::SPLIT_TOL_FACTOR * quad.abs_tol,
        });
    }
    Ok(Outcome::new(report("volumes", spec.source, &tol, results)))
}
