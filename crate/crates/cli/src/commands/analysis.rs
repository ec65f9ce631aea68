//! Symbolic analyses: curvature, triviality, normal forms and slicings.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use divweb::normalform::{canonical_form_report, normalize_chart, planar_invariants, BoundaryData};
use divweb::relativity::{builtin_domain, builtin_spacetime, slicing_report, SplitMetric};
use divweb::web::{
    curvature_form, is_locally_trivial_with, nonuniformity_tensor, trivializing_map,
};
use divweb::{Region, WebChart};
use serde_json::{json, Value};

use super::{entry_json, expr_text, verdict_json, Common, Outcome};
use crate::error::{input, Result};
use crate::input::{load_spec, point_in, points_in, ToleranceOverrides, SCHEMA_VERSION};
use crate::output::{grid_points, report, Table};

#[derive(Debug, Clone, Args)]
pub struct CurvatureArgs {
    /// Web spec (JSON)
    pub spec: PathBuf,
    /// Evaluate the tensor at these points; repeat or list several points
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub at: Vec<f64>,
    /// Sample the cross-block entries on an N-per-axis grid of the domain
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Write the grid samples as CSV (requires --grid)
    #[arg(long, value_name = "PATH", requires = "grid")]
    pub csv: Option<PathBuf>,
    /// Write the tensor as a reconstruct input file
    #[arg(long, value_name = "PATH")]
    pub export_tensor: Option<PathBuf>,
    /// Write the axis-leaf values of the density as a reconstruct boundary file
    #[arg(long, value_name = "PATH")]
    pub export_boundary: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

fn blocks_json(w: &WebChart) -> Value {
    json!(w
        .blocks()
        .iter()
        .map(|b| b.clone().map(|k| k + 1).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn domain_json(r: &Region) -> Value {
    json!({ "min": r.lower(), "max": r.upper() })
}

fn check_grid(n: usize) -> Result<()> {
    if n < 1 {
        return Err(input("--grid needs at least 1 point per axis"));
    }
    Ok(())
}

pub fn curvature(a: &CurvatureArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    let w = &spec.chart;
    let names = w.var_names();
    let k = nonuniformity_tensor(w);
    let mut entries = Vec::new();
    for (i, j) in k.cross_block_pairs() {
        let e = k.get(i, j).simplify();
        let v = w.zero_verdict(&e, tol.samples, tol.zero)?;
        entries.push(json!({
            "i": i + 1,
            "j": j + 1,
            "expr": e.to_string(),
            "verdict": verdict_json(&v),
        }));
    }
    let forms: Vec<Value> = curvature_form(w)
        .iter()
        .enumerate()
        .map(|(b, f)| {
            let terms: Vec<Value> = f
                .terms
                .iter()
                .map(|(l, k, c)| json!({ "l": l + 1, "k": k + 1, "coefficient": expr_text(c) }))
                .collect();
            json!({ "block": b + 1, "terms": terms })
        })
        .collect();
    let mut at = Vec::new();
    for x in points_in(&a.at, w.domain(), "at")? {
        at.push(json!({ "point": x, "tensor": k.eval_at(&names, &x)? }));
    }
    let mut results = json!({
        "variables": w.vars(),
        "blocks": blocks_json(w),
        "density": w.density().to_string(),
        "entries": entries,
        "curvature_forms": forms,
        "at": at,
    });
    if let Some(g) = &spec.metric {
        results["metric"] = metric_json(g);
    }
    let mut out = Outcome::new(Value::Null);
    if let Some(n) = a.grid {
        check_grid(n)?;
        let pairs = k.cross_block_pairs();
        let mut header: Vec<String> = w.vars().to_vec();
        header.extend(pairs.iter().map(|(i, j)| format!("K_{}_{}", i + 1, j + 1)));
        let code = pairs
            .iter()
            .map(|(i, j)| k.get(*i, *j).compile(&names))
            .collect::<Result<Vec<_>, _>>()?;
        let mut t = Table::new(header);
        for x in grid_points(w.domain(), n) {
            let mut row = x.clone();
            for c in &code {
                row.push(c.eval(&x)?);
            }
            t.push(row);
        }
        match &a.csv {
            Some(p) => {
                results["grid"] = json!({ "per_axis": n, "csv": p });
                out.files.push((p.clone(), t.to_csv().into_bytes()));
            }
            None => results["grid"] = json!({ "per_axis": n, "table": t.to_json() }),
        }
    }
    if let Some(p) = &a.export_tensor {
        let m = w.dim();
        let rows: Vec<Vec<String>> = (0..m)
            .map(|i| (0..m).map(|j| expr_text(k.get(i, j))).collect())
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "variables": w.vars(),
            "blocks": blocks_json(w),
            "domain": domain_json(w.domain()),
            "tensor": rows,
        });
        out.files.push((p.clone(), pretty(&doc)));
    }
    if let Some(p) = &a.export_boundary {
        let bd = BoundaryData::from_chart(w)?;
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "boundary": bd.exprs().iter().map(expr_text).collect::<Vec<_>>(),
        });
        out.files.push((p.clone(), pretty(&doc)));
    }
    out.report = report("curvature", spec.source, &tol, results);
    Ok(out)
}

pub fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s.into_bytes()
}

#[derive(Debug, Clone, Args)]
pub struct TrivialArgs {
    /// Web spec (JSON)
    pub spec: PathBuf,
    /// Points per axis of the trivializing-map sample table
    #[arg(long, value_name = "N", default_value_t = 3)]
    pub grid: usize,
    /// Base point of the trivializing map (default: origin if inside, else the domain centre)
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub base: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn trivial(a: &TrivialArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    check_grid(a.grid)?;
    let w = &spec.chart;
    let v = is_locally_trivial_with(w, tol.zero, tol.samples)?;
    let mut results = json!({
        "trivial": v.trivial,
        "symbolic": v.trivial && v.symbolic(),
        "entries": v.entries.iter().map(entry_json).collect::<Vec<_>>(),
        "witness": v.witness.as_ref().map(|(i, j, x, value)| json!({
            "i": i + 1, "j": j + 1, "point": x, "value": value,
        })),
    });
    if v.trivial {
        let base = if a.base.is_empty() {
            None
        } else {
            Some(point_in(&a.base, w.domain(), "base")?)
        };
        let map = trivializing_map(w, base.as_deref(), &tol.quad())?;
        let mut header: Vec<String> = w.vars().to_vec();
        header.extend((1..=w.dim()).map(|k| format!("u{k}")));
        header.push("jacobian_det".into());
        header.push("density".into());
        let mut t = Table::new(header);
        let mut worst: f64 = 0.0;
        for x in grid_points(w.domain(), a.grid) {
            let mut row = x.clone();
            row.extend(map.forward(&x)?);
            let (j, h) = (map.jacobian_det(&x)?, w.density_at(&x)?);
            worst = worst.max((j - h).abs() / h.abs());
            row.push(j);
            row.push(h);
            t.push(row);
        }
        results["trivializing_map"] = json!({
            "base": map.base(),
            "samples": t.to_json(),
            "max_rel_jacobian_mismatch": worst,
        });
    }
    let mut out = Outcome::new(report("trivial", spec.source, &tol, results));
    out.negative = !v.trivial;
    Ok(out)
}

#[derive(Debug, Clone, Args)]
pub struct NormalizeArgs {
    /// Web spec (JSON); the origin must lie in the domain
    pub spec: PathBuf,
    /// Points per axis of the sample table
    #[arg(long, value_name = "N", default_value_t = 5)]
    pub grid: usize,
    /// Points per axis when measuring |h - 1| on the axis leaves
    #[arg(long, value_name = "N", default_value_t = 17)]
    pub cross_samples: usize,
    /// Write the sample table as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn normalize(a: &NormalizeArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    check_grid(a.grid)?;
    if a.cross_samples < 2 {
        return Err(input("--cross-samples needs at least 2"));
    }
    let w = &spec.chart;
    let n = normalize_chart(w, &tol.quad())?;
    let (dev, at) = n.cross_deviation(a.cross_samples)?;
    let mut header: Vec<String> = w.vars().to_vec();
    header.extend(w.vars().iter().map(|v| format!("{v}_normal")));
    header.push("jacobian_det".into());
    header.push("density_normal".into());
    let mut t = Table::new(header);
    for y in grid_points(w.domain(), a.grid) {
        let mut row = y.clone();
        row.extend(n.forward(&y)?);
        row.push(n.jacobian_det(&y)?);
        row.push(n.density_at_source(&y)?);
        t.push(row);
    }
    let mut results = json!({
        "base_value": n.base_value(),
        "scales": n.scales(),
        "cross_deviation": { "max": dev, "at": at, "per_axis": a.cross_samples },
    });
    let mut out = Outcome::new(Value::Null);
    match &a.csv {
        Some(p) => {
            results["samples"] = json!({ "csv": p });
            out.files.push((p.clone(), t.to_csv().into_bytes()));
        }
        None => results["samples"] = t.to_json(),
    }
    out.report = report("normalize", spec.source, &tol, results);
    Ok(out)
}

#[derive(Debug, Clone, Args)]
pub struct InvariantsArgs {
    /// Planar web spec (JSON)
    pub spec: PathBuf,
    /// Points at which to evaluate (default: the origin)
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub at: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn invariants(a: &InvariantsArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    let w = &spec.chart;
    let pts = if a.at.is_empty() {
        vec![vec![0.0; w.dim()]]
    } else {
        points_in(&a.at, w.domain(), "at")?
    };
    let mut at = Vec::new();
    for p in &pts {
        let i = planar_invariants(w, p)?;
        at.push(json!({
            "point": p,
            "kappa0": i.kappa0,
            "a": i.a,
            "generic": i.generic,
            "factors": i.factors,
        }));
    }
    let canonical = match canonical_form_report(w) {
        Ok(r) => json!({
            "applicable": true,
            "kappa0": r.kappa0,
            "a": r.a,
            "rotations": r.rotations,
            "scale": r.scale,
            "jet": r.jet,
            "jet_error": r.jet_error,
            "jet_matches": r.jet_matches,
            "remainder": r.remainder.iter().map(|(e, v)| json!({ "radius": e, "max_abs": v })).collect::<Vec<_>>(),
            "remainder_consistent": r.remainder_consistent,
        }),
        Err(e) if e.is_input_error() => json!({ "applicable": false, "reason": e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    let results = json!({
        "genericity_threshold": divweb::normalform::GENERICITY_THRESHOLD,
        "at": at,
        "canonical_form": canonical,
    });
    Ok(Outcome::new(report(
        "invariants",
        spec.source,
        &tol,
        results,
    )))
}

#[derive(Debug, Clone, Args)]
pub struct SpacetimeArgs {
    /// One of minkowski, schwarzschild_radial, lemaitre
    pub name: String,
    /// Metric parameter as KEY=VALUE, e.g. m=1
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Lower corner of the domain (default: the built-in domain)
    #[arg(long, num_args = 4, allow_negative_numbers = true, value_name = "X")]
    pub min: Vec<f64>,
    /// Upper corner of the domain
    #[arg(long, num_args = 4, allow_negative_numbers = true, value_name = "X")]
    pub max: Vec<f64>,
    /// Evaluate the density and tensor entries at these points
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub at: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

fn parse_params(list: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for s in list {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| input(format!("--param {s:?} is not KEY=VALUE")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| input(format!("--param {s:?}: {v:?} is not a number")))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(input(format!("parameter {k} given twice")));
        }
    }
    Ok(out)
}

fn metric_json(g: &SplitMetric) -> Value {
    json!({
        "coords": g.coords(),
        "lapse": expr_text(g.lapse()),
        "gamma": g.gamma().iter().map(|r| r.iter().map(expr_text).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn spacetime(a: &SpacetimeArgs) -> Result<Outcome> {
    let tol = a.common.tolerances(&ToleranceOverrides::default())?;
    let params = parse_params(&a.params)?;
    let plist: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let g = builtin_spacetime(&a.name, &plist)?;
    let domain = match (a.min.is_empty(), a.max.is_empty()) {
        (true, true) => builtin_domain(&a.name, &plist)?,
        (false, false) => Region::new(a.min.clone(), a.max.clone())?.normalized(),
        _ => return Err(input("--min and --max must be given together")),
    };
    let r = slicing_report(&g, domain.clone())?;
    let coords = g.coords();
    let mut at = Vec::new();
    for x in points_in(&a.at, &domain, "at")? {
        let binding: Vec<(&str, f64)> = coords.iter().copied().zip(x.iter().copied()).collect();
        let mut entries = Vec::new();
        for (l, e) in &r.entries {
            entries.push(json!({ "i": 1, "j": l + 1, "value": e.eval(binding.as_slice())? }));
        }
        at.push(json!({
            "point": x,
            "density": r.density.eval(binding.as_slice())?,
            "entries": entries,
        }));
    }
    let results = json!({
        "metric": metric_json(&g),
        "domain": domain_json(&domain),
        "density": r.density.to_string(),
        "entries": r.entries.iter().map(|(l, e)| json!({ "i": 1, "j": l + 1, "expr": e.to_string() })).collect::<Vec<_>>(),
        "trivial": r.verdict.trivial,
        "symbolic": r.verdict.trivial && r.verdict.symbolic(),
        "entry_verdicts": r.verdict.entries.iter().map(entry_json).collect::<Vec<_>>(),
        "geodesic_slicing": r.geodesic_slicing,
        "conservation_simplifies": r.conservation_simplifies,
        "at": at,
    });
    let inputs = json!({ "spacetime": { "name": a.name, "params": params } });
    Ok(Outcome::new(report("spacetime", inputs, &tol, results)))
}
