//! Web specs, tensor and boundary files, and the tolerance settings.

use std::collections::BTreeMap;
use std::path::Path;

use divweb::relativity::{builtin_domain, builtin_spacetime, web_from_metric, SplitMetric};
use divweb::web::{DEFAULT_ZERO_SAMPLES, DEFAULT_ZERO_TOL};
use divweb::{parse_expr, Expr, QuadratureSpec, Region, WebChart};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{input, CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOL_ENV: &str = "DIVWEB_TOL";

/// Numerical settings shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance of sampled zero tests.
    pub zero: f64,
    /// Absolute tolerance of the adaptive quadrature.
    pub quadrature: f64,
    /// Sample points per axis in zero tests.
    pub samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: DEFAULT_ZERO_TOL,
            quadrature: QuadratureSpec::default().abs_tol,
            samples: DEFAULT_ZERO_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub zero: Option<f64>,
    pub quadrature: Option<f64>,
    pub samples: Option<usize>,
}

impl Tolerances {
    /// Built-in defaults, then `DIVWEB_TOL`, then the input file, then flags.
    pub fn resolve(
        env: Option<&str>,
        file: &ToleranceOverrides,
        flags: &ToleranceOverrides,
    ) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        if let Some(s) = env {
            t.zero = s
                .trim()
                .parse()
                .map_err(|_| input(format!("{TOL_ENV}={s:?} is not a number")))?;
        }
        for o in [file, flags] {
            t.zero = o.zero.unwrap_or(t.zero);
            t.quadrature = o.quadrature.unwrap_or(t.quadrature);
            t.samples = o.samples.unwrap_or(t.samples);
        }
        if !(t.zero > 0.0 && t.zero.is_finite()) {
            return Err(input(format!("zero tolerance {} must be positive", t.zero)));
        }
        if !(t.quadrature > 0.0 && t.quadrature.is_finite()) {
            return Err(input(format!(
                "quadrature tolerance {} must be positive",
                t.quadrature
            )));
        }
        if t.samples < 2 {
            return Err(input("at least 2 samples per axis are needed"));
        }
        Ok(t)
    }

    pub fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::with_tol(self.quadrature)
    }

    pub fn to_json(self) -> Value {
        serde_json::json!({
            "zero": self.zero,
            "quadrature": self.quadrature,
            "samples": self.samples,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpacetimeFile {
    name: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    schema_version: Option<u32>,
    dimension: Option<usize>,
    blocks: Option<Vec<Vec<usize>>>,
    variables: Option<Vec<String>>,
    density: Option<String>,
    domain: Option<DomainFile>,
    spacetime: Option<SpacetimeFile>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
}

/// A loaded web spec.
#[derive(Debug, Clone)]
pub struct WebSpec {
    pub chart: WebChart,
    /// Set for `spacetime` specs.
    pub metric: Option<SplitMetric>,
    /// The file as read, echoed into reports.
    pub source: Value,
    pub tolerances: ToleranceOverrides,
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn check_version(v: Option<u32>, path: &Path) -> Result<()> {
    match v {
        Some(v) if v != SCHEMA_VERSION => Err(input(format!(
            "{}: schema_version {v} is not supported (expected {SCHEMA_VERSION})",
            path.display()
        ))),
        _ => Ok(()),
    }
}

fn region(d: &DomainFile, m: usize) -> Result<Region> {
    if d.min.len() != m || d.max.len() != m {
        return Err(input(format!(
            "domain bounds have lengths {} and {}, expected {m}",
            d.min.len(),
            d.max.len()
        )));
    }
    for k in 0..m {
        if !(d.min[k] < d.max[k]) {
            return Err(input(format!(
                "domain axis {}: min {} must be below max {}",
                k + 1,
                d.min[k],
                d.max[k]
            )));
        }
    }
    Ok(Region::new(d.min.clone(), d.max.clone())?)
}

/// Block sizes from 1-based index lists, which must list the coordinates in
/// order so that each block is a consecutive run.
pub fn block_sizes(blocks: &[Vec<usize>], m: usize) -> Result<Vec<usize>> {
    let mut next = 1;
    let mut sizes = Vec::with_capacity(blocks.len());
    for b in blocks {
        if b.is_empty() {
            return Err(input("blocks must be nonempty"));
        }
        for &k in b {
            if k != next {
                return Err(input(format!(
                    "blocks {:?} must partition 1..={m} into consecutive runs in order",
                    blocks
                )));
            }
            next += 1;
        }
        sizes.push(b.len());
    }
    if next != m + 1 {
        return Err(input(format!("blocks {:?} do not cover 1..={m}", blocks)));
    }
    Ok(sizes)
}

fn params_list(p: &BTreeMap<String, f64>) -> Vec<(&str, f64)> {
    p.iter().map(|(k, v)| (k.as_str(), *v)).collect()
}

pub fn load_spec(path: &Path) -> Result<WebSpec> {
    let source = read_json(path)?;
    let f: SpecFile = serde_json::from_value(source.clone())
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    check_version(f.schema_version, path)?;
    if let Some(st) = &f.spacetime {
        if f.density.is_some()
            || f.blocks.is_some()
            || f.variables.is_some()
            || f.dimension.is_some()
        {
            return Err(input(
                "a spacetime spec takes only `spacetime`, `domain` and `tolerances`",
            ));
        }
        let params = params_list(&st.params);
        let metric = builtin_spacetime(&st.name, &params)?;
        let domain = match &f.domain {
            Some(d) => region(d, 4)?,
            None => builtin_domain(&st.name, &params)?,
        };
        metric.check_on(&domain)?;
        let chart = web_from_metric(&metric, domain)?;
        return Ok(WebSpec {
            chart,
            metric: Some(metric),
            source,
            tolerances: f.tolerances,
        });
    }
    let missing = |field: &str| input(format!("{}: missing field `{field}`", path.display()));
    let vars = f.variables.ok_or_else(|| missing("variables"))?;
    let m = f.dimension.unwrap_or(vars.len());
    if vars.len() != m {
        return Err(input(format!("{} variables for dimension {m}", vars.len())));
    }
    let sizes = block_sizes(&f.blocks.ok_or_else(|| missing("blocks"))?, m)?;
    let domain = region(f.domain.as_ref().ok_or_else(|| missing("domain"))?, m)?;
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let density = f.density.ok_or_else(|| missing("density"))?;
    let chart = WebChart::new(vars.clone(), &sizes, parse_expr(&density, &names)?, domain)?;
    Ok(WebSpec {
        chart,
        metric: None,
        source,
        tolerances: f.tolerances,
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    schema_version: Option<u32>,
    variables: Vec<String>,
    blocks: Vec<Vec<usize>>,
    domain: DomainFile,
    tensor: Vec<Vec<String>>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
}

/// A prescribed tensor: full symmetric matrix of expressions.
#[derive(Debug, Clone)]
pub struct TensorSpec {
    pub variables: Vec<String>,
    pub block_sizes: Vec<usize>,
    pub domain: Region,
    pub rows: Vec<Vec<Expr>>,
    pub source: Value,
    pub tolerances: ToleranceOverrides,
}

impl TensorSpec {
    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(String::as_str).collect()
    }

    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.block_sizes
            .iter()
            .map(|s| {
                start += s;
                start - s..start
            })
            .collect()
    }
}

pub fn load_tensor(path: &Path) -> Result<TensorSpec> {
    let source = read_json(path)?;
    let f: TensorFile = serde_json::from_value(source.clone())
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    check_version(f.schema_version, path)?;
    let m = f.variables.len();
    let block_sizes = block_sizes(&f.blocks, m)?;
    let domain = region(&f.domain, m)?;
    if f.tensor.len() != m || f.tensor.iter().any(|r| r.len() != m) {
        return Err(input(format!(
            "tensor must be a {m}x{m} matrix of expressions"
        )));
    }
    let names: Vec<&str> = f.variables.iter().map(String::as_str).collect();
    let rows = f
        .tensor
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| parse_expr(s, &names))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TensorSpec {
        variables: f.variables,
        block_sizes,
        domain,
        rows,
        source,
        tolerances: f.tolerances,
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryFile {
    schema_version: Option<u32>,
    boundary: Vec<String>,
}

/// Leaf values of the density, one expression per block.
pub fn load_boundary(path: &Path, vars: &[&str]) -> Result<(Vec<Expr>, Value)> {
    let source = read_json(path)?;
    let f: BoundaryFile = serde_json::from_value(source.clone())
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    check_version(f.schema_version, path)?;
    let exprs = f
        .boundary
        .iter()
        .map(|s| parse_expr(s, vars))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((exprs, source))
}

/// Splits a flat list of coordinates into points of dimension `m`.
pub fn points(flat: &[f64], m: usize, flag: &str) -> Result<Vec<Vec<f64>>> {
    if !flat.len().is_multiple_of(m) {
        return Err(input(format!(
            "--{flag} takes {m} coordinates per point, got {} values",
            flat.len()
        )));
    }
    Ok(flat.chunks(m).map(<[f64]>::to_vec).collect())
}

/// A single point of dimension `m`.
pub fn point(flat: &[f64], m: usize, flag: &str) -> Result<Vec<f64>> {
    if flat.len() != m {
        return Err(input(format!(
            "--{flag} takes {m} coordinates, got {}",
            flat.len()
        )));
    }
    Ok(flat.to_vec())
}

/// Like [`points`], rejecting points outside `domain`.
pub fn points_in(flat: &[f64], domain: &Region, flag: &str) -> Result<Vec<Vec<f64>>> {
    let pts = points(flat, domain.dim(), flag)?;
    let d = domain.normalized();
    if let Some(x) = pts.iter().find(|x| !d.contains(x)) {
        return Err(input(format!(
            "--{flag} point {x:?} lies outside the domain"
        )));
    }
    Ok(pts)
}

/// Like [`point`], rejecting a point outside `domain`.
pub fn point_in(flat: &[f64], domain: &Region, flag: &str) -> Result<Vec<f64>> {
    point(flat, domain.dim(), flag)?;
    Ok(points_in(flat, domain, flag)?.remove(0))
}

/// Converts 1-based axis numbers to indices.
pub fn axes(list: &[usize], m: usize) -> Result<Vec<usize>> {
    list.iter()
        .map(|&a| {
            if a == 0 || a > m {
                Err(input(format!("axis {a} is outside 1..={m}")))
            } else {
                Ok(a - 1)
            }
        })
        .collect()
}
