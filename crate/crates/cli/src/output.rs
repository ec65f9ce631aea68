use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::input::{Tolerances, SCHEMA_VERSION};

/// Writes `bytes` to a sibling temp file and renames it over `path`, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let err = |source| CliError::Write {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| err(std::io::Error::other("not a file path")))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res.map_err(err)
}

pub fn report(command: &str, input: Value, tol: &Tolerances, results: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input": input,
        "tolerances": tol.to_json(),
        "results": results,
    })
}

/// A CSV table of numbers with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Table {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.header, "rows": self.rows })
    }
}

/// Full tensor grid with `n` points per axis spanning `region`.
pub fn grid_points(region: &divweb::Region, n: usize) -> Vec<Vec<f64>> {
    let r = region.normalized();
    let m = r.dim();
    let axis = |k: usize, i: usize| {
        if n == 1 {
            0.5 * (r.lo(k) + r.hi(k))
        } else {
            r.lo(k) + (r.hi(k) - r.lo(k)) * i as f64 / (n - 1) as f64
        }
    };
    let total = n.pow(m as u32);
    (0..total)
        .map(|mut flat| {
            let mut x = vec![0.0; m];
            for k in (0..m).rev() {
                x[k] = axis(k, flat % n);
                flat /= n;
            }
            x
        })
        .collect()
}
