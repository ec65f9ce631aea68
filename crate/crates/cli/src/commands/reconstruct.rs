use std::path::PathBuf;

use clap::{Args, ValueEnum};
use divweb::normalform::{
    check_matrix_admissible, reconstruct_density_with, AdmissibleTensor, BoundaryData, GridSpec,
    PairRule,
};
use serde_json::{json, Value};

use super::{Common, Outcome};
use crate::error::{input, Result};
use crate::input::{load_boundary, load_spec, load_tensor};
use crate::output::{report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// Tensor file (JSON): variables, blocks, domain and the full matrix
    pub tensor: PathBuf,
    /// Boundary file (JSON): the density on each axis leaf, one expression per block
    pub boundary: PathBuf,
    /// Points per axis of the uniform grid (snapped to contain 0)
    #[arg(long, value_name = "N", default_value_t = 17)]
    pub grid: usize,
    /// Which pair of blocks to integrate over at each step
    #[arg(long, value_enum, default_value_t = Rule::Smallest)]
    pub rule: Rule,
    /// Write the reconstructed grid as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Compare against the density of this web spec
    #[arg(long, value_name = "SPEC")]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<Outcome> {
    let t = load_tensor(&a.tensor)?;
    let tol = a.common.tolerances(&t.tolerances)?;
    let names = t.names();
    let blocks = t.blocks();
    let (bexprs, bsource) = load_boundary(&a.boundary, &names)?;
    let inputs = json!({ "tensor": t.source, "boundary": bsource });

    let (verdict, field) =
        check_matrix_admissible(&t.rows, &blocks, &names, &t.domain, tol.samples, tol.zero)?;
    let admissibility = json!({
        "admissible": verdict.admissible,
        "symbolic": verdict.symbolic,
        "violation": verdict.violation.as_ref().map(|v| json!({
            "condition": v.condition.id(),
            "description": v.to_string(),
            "indices": v.indices.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "point": v.point,
            "value": v.value,
        })),
    });
    if !verdict.admissible {
        let mut out = Outcome::new(report(
            "reconstruct",
            inputs,
            &tol,
            json!({ "admissibility": admissibility }),
        ));
        out.negative = true;
        return Ok(out);
    }
    let tensor = AdmissibleTensor::with_tolerance(field, &names, &t.domain, tol.samples, tol.zero)?;
    let bd = BoundaryData::new(bexprs, &blocks, &names)?;
    let grid = GridSpec::uniform(&t.domain, a.grid)?;
    let rule = match a.rule {
        Rule::Smallest => PairRule::Smallest,
        Rule::Largest => PairRule::Largest,
    };
    let rec = reconstruct_density_with(&tensor, &bd, &grid, &tol.quad(), rule)?;

    let mut header = t.variables.clone();
    header.push("h".into());
    let mut table = Table::new(header);
    for (x, v) in rec.iter() {
        let mut row = x;
        row.push(v);
        table.push(row);
    }
    let mut results = json!({
        "admissibility": admissibility,
        "base_value": bd.base_value(),
        "grid": { "axes": grid.axes(), "shape": grid.shape(), "rule": format!("{:?}", a.rule).to_lowercase() },
        "min_value": rec.min_value(),
    });
    if let Some(path) = &a.reference {
        let spec = load_spec(path)?;
        let w = &spec.chart;
        if w.vars() != t.variables.as_slice() {
            return Err(input(format!(
                "reference variables {:?} differ from the tensor's {:?}",
                w.vars(),
                t.variables
            )));
        }
        let mut worst = (0.0, Vec::new());
        for (x, v) in rec.iter() {
            let want = w.density_at(&x)?;
            let e = (v - want).abs() / want.abs();
            if e > worst.0 || worst.1.is_empty() {
                worst = (e, x);
            }
        }
        results["reference"] = json!({ "max_rel_error": worst.0, "worst_point": worst.1 });
    }
    let mut out = Outcome::new(Value::Null);
    match &a.csv {
        Some(p) => {
            results["values"] = json!({ "csv": p });
            out.files.push((p.clone(), table.to_csv().into_bytes()));
        }
        None => results["values"] = table.to_json(),
    }
    out.report = report("reconstruct", inputs, &tol, results);
    Ok(out)
}
