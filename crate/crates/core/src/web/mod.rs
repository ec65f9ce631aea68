//! Webs in adapted charts and their differential invariants.

mod forms;
mod geodesic;
mod ricci;
mod tensor;
mod trivialize;

use std::ops::Range;

pub use forms::{connection_form, curvature_form, OneForm, TwoForm};
pub use geodesic::{integrate_geodesic, GeodesicPath, DEFAULT_GEODESIC_STEPS};
pub use ricci::{ricci_offdiag, ricci_tensor};
pub use tensor::{
    is_locally_trivial, is_locally_trivial_with, nonuniformity_tensor, EntryVerdict,
    TrivialityVerdict, DEFAULT_ZERO_SAMPLES, DEFAULT_ZERO_TOL,
};
pub use trivialize::{trivializing_map, TrivializingMap};

use crate::expr::{is_identically_zero, sample_points, CompiledExpr, Expr, ZeroVerdict};
use crate::{Error, Region, Result};

/// Points per axis used to check positivity of the density at construction.
const POSITIVITY_SAMPLES: usize = 9;

/// A divergence-free web in adapted coordinates.
///
/// Coordinates `x₁..x_m` are split into contiguous blocks, one per foliation;
/// the leaves of foliation i are the sets where all coordinates of block i are
/// constant. The volume form is `h dx₁∧…∧dx_m`.
#[derive(Debug, Clone)]
pub struct WebChart {
    vars: Vec<String>,
    blocks: Vec<Range<usize>>,
    density: Expr,
    domain: Region,
    code: CompiledExpr,
}

impl WebChart {
    /// Builds a chart from variable names, block sizes (in coordinate order),
    /// the density and its domain. The density is checked to be positive on a
    /// sample grid of the domain.
    pub fn new(
        vars: Vec<String>,
        block_sizes: &[usize],
        density: Expr,
        domain: Region,
    ) -> Result<WebChart> {
        let m = vars.len();
        if m == 0 {
            return Err(Error::Invalid(
                "a chart needs at least one coordinate".into(),
            ));
        }
        for (k, v) in vars.iter().enumerate() {
            if vars[..k].contains(v) {
                return Err(Error::Invalid(format!("coordinate `{v}` declared twice")));
            }
        }
        if block_sizes.contains(&0) {
            return Err(Error::Invalid("blocks must be nonempty".into()));
        }
        if block_sizes.iter().sum::<usize>() != m {
            return Err(Error::Invalid(format!(
                "block sizes {:?} do not add up to the dimension {m}",
                block_sizes
            )));
        }
        if domain.dim() != m {
            return Err(Error::Invalid(format!(
                "domain has dimension {}, chart has {m}",
                domain.dim()
            )));
        }
        let mut blocks = Vec::with_capacity(block_sizes.len());
        let mut start = 0;
        for s in block_sizes {
            blocks.push(start..start + s);
            start += s;
        }
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let code = density.compile(&names)?;
        let chart = WebChart {
            vars,
            blocks,
            density,
            domain,
            code,
        };
        chart.check_positive()?;
        Ok(chart)
    }

    /// Parses `density` over `vars` and builds the chart.
    pub fn parse(
        vars: &[&str],
        block_sizes: &[usize],
        density: &str,
        domain: Region,
    ) -> Result<WebChart> {
        let h = crate::expr::parse_expr(density, vars)?;
        WebChart::new(
            vars.iter().map(|s| s.to_string()).collect(),
            block_sizes,
            h,
            domain,
        )
    }

    fn check_positive(&self) -> Result<()> {
        let domain = self.domain.normalized();
        let mut probes = sample_points(&domain, POSITIVITY_SAMPLES);
        probes.push(domain.center());
        for x in probes {
            let v = self.code.eval(&x)?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!(
                    "density is not positive at {:?} (value {v})",
                    x
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Index of the block containing coordinate `k` (0-based).
    pub fn block_of(&self, k: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&k))
            .expect("coordinate index out of range")
    }

    pub fn same_block(&self, k: usize, l: usize) -> bool {
        self.block_of(k) == self.block_of(l)
    }

    pub fn is_codim1(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn domain(&self) -> &Region {
        &self.domain
    }

    pub fn compiled_density(&self) -> &CompiledExpr {
        &self.code
    }

    pub fn density_at(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.code.eval(x)?)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Invalid(format!(
                "point has {} coordinates, chart has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_axis(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(Error::Invalid(format!(
                "axis {} out of range 1..={}",
                i + 1,
                self.dim()
            )));
        }
        Ok(())
    }

    /// `log h` expanded so that mixed derivatives of separated factors are
    /// symbolic zeros; see [`Expr::log_expanded`].
    pub fn log_density(&self) -> Expr {
        self.density.log_expanded()
    }

    /// Same partition and domain with another density.
    pub fn with_density(&self, density: Expr) -> Result<WebChart> {
        WebChart::new(
            self.vars.clone(),
            &self.block_sizes(),
            density,
            self.domain.clone(),
        )
    }

    /// Same web data on another domain.
    pub fn with_domain(&self, domain: Region) -> Result<WebChart> {
        WebChart::new(
            self.vars.clone(),
            &self.block_sizes(),
            self.density.clone(),
            domain,
        )
    }

    /// The induced codimension-1 web: every coordinate becomes its own block.
    pub fn refine_to_codim1(&self) -> WebChart {
        WebChart {
            vars: self.vars.clone(),
            blocks: (0..self.dim()).map(|k| k..k + 1).collect(),
            density: self.density.clone(),
            domain: self.domain.clone(),
            code: self.code.clone(),
        }
    }

    /// Zero test of an expression over this chart's variables and domain.
    pub fn zero_verdict(&self, e: &Expr, samples: usize, tol: f64) -> Result<ZeroVerdict> {
        Ok(is_identically_zero(
            e,
            &self.var_names(),
            &self.domain.normalized(),
            samples,
            tol,
        )?)
    }
}

/// A symmetric m×m matrix of expressions tied to a block partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    dim: usize,
    // upper triangle including the diagonal, row by row
    entries: Vec<Expr>,
    blocks: Vec<Range<usize>>,
}

fn tri_index(dim: usize, k: usize, l: usize) -> usize {
    let (k, l) = if k <= l { (k, l) } else { (l, k) };
    k * dim - k * (k + 1) / 2 + l
}

impl SymTensorField {
    pub fn zeros(dim: usize, blocks: &[Range<usize>]) -> SymTensorField {
        SymTensorField {
            dim,
            entries: vec![Expr::zero(); dim * (dim + 1) / 2],
            blocks: blocks.to_vec(),
        }
    }

    /// Fills the upper triangle (`k <= l`) from `f`.
    pub fn from_fn<F: FnMut(usize, usize) -> Expr>(
        dim: usize,
        blocks: &[Range<usize>],
        mut f: F,
    ) -> Self {
        let mut t = SymTensorField::zeros(dim, blocks);
        for k in 0..dim {
            for l in k..dim {
                t.entries[tri_index(dim, k, l)] = f(k, l);
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn get(&self, k: usize, l: usize) -> &Expr {
        &self.entries[tri_index(self.dim, k, l)]
    }

    pub fn set(&mut self, k: usize, l: usize, e: Expr) {
        let i = tri_index(self.dim, k, l);
        self.entries[i] = e;
    }

    fn block_of(&self, k: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&k))
            .unwrap_or(usize::MAX)
    }

    pub fn same_block(&self, k: usize, l: usize) -> bool {
        self.block_of(k) == self.block_of(l)
    }

    /// Index pairs `k < l` with `k` and `l` in different blocks.
    pub fn cross_block_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.dim {
            for l in k + 1..self.dim {
                if !self.same_block(k, l) {
                    out.push((k, l));
                }
            }
        }
        out
    }

    /// Numeric values of all entries at `x`.
    pub fn eval_at(&self, vars: &[&str], x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let binding: Vec<(&str, f64)> = vars.iter().copied().zip(x.iter().copied()).collect();
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for k in 0..self.dim {
            for l in k..self.dim {
                let v = self.get(k, l).eval(binding.as_slice())?;
                out[k][l] = v;
                out[l][k] = v;
            }
        }
        Ok(out)
    }

    /// Keeps only cross-block entries (the projection onto off-block pairs).
    pub fn project_off_block(&self) -> SymTensorField {
        let mut t = self.clone();
        for k in 0..self.dim {
            for l in k..self.dim {
                if self.same_block(k, l) {
                    t.set(k, l, Expr::zero());
                }
            }
        }
        t
    }
}
