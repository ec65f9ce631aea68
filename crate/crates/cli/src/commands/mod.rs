use std::path::PathBuf;

use clap::Args;
use divweb::web::EntryVerdict;
use divweb::{Expr, ZeroVerdict};
use serde_json::{json, Value};

use crate::error::Result;
use crate::input::{ToleranceOverrides, Tolerances, TOL_ENV};

pub mod analysis;
pub mod measure;
pub mod plot;
pub mod reconstruct;

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Write the JSON report to this file instead of stdout
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Absolute tolerance of sampled zero tests
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,
    /// Absolute tolerance of the adaptive quadrature
    #[arg(long, value_name = "TOL")]
    pub quad_tol: Option<f64>,
    /// Sample points per axis in zero tests
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
}

impl Common {
    pub fn tolerances(&self, file: &ToleranceOverrides) -> Result<Tolerances> {
        let flags = ToleranceOverrides {
            zero: self.tol,
            quadrature: self.quad_tol,
            samples: self.samples,
        };
        let env = std::env::var(TOL_ENV).ok();
        Tolerances::resolve(env.as_deref(), file, &flags)
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    /// The command answered its question in the negative (exit code 1).
    pub negative: bool,
    /// Extra artifacts to write atomically.
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outcome {
    pub fn new(report: Value) -> Outcome {
        Outcome {
            report,
            negative: false,
            files: Vec::new(),
        }
    }
}

pub fn verdict_json(v: &ZeroVerdict) -> Value {
    match v {
        ZeroVerdict::SymbolicZero => json!({ "kind": "symbolic_zero", "max_abs": 0.0 }),
        ZeroVerdict::NumericallyZero { max_abs } => {
            json!({ "kind": "numerically_zero", "max_abs": max_abs })
        }
        ZeroVerdict::Nonzero { max_abs, witness } => {
            json!({ "kind": "nonzero", "max_abs": max_abs, "witness": witness })
        }
    }
}

pub fn entry_json(e: &EntryVerdict) -> Value {
    json!({
        "i": e.k + 1,
        "j": e.l + 1,
        "expr": e.entry.to_string(),
        "verdict": verdict_json(&e.verdict),
    })
}

pub fn expr_text(e: &Expr) -> String {
    e.simplify().to_string()
}
