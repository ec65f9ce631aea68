use std::ops::Range;

use super::AdmissibleTensor;
use crate::expr::{CompiledExpr, Expr};
use crate::quadrature::{integrate_box, QuadratureSpec};
use crate::web::{nonuniformity_tensor, WebChart};
use crate::{Error, Region, Result};

/// Density restricted to the leaves through the origin of the complementary
/// foliations: one expression per block, in that block's variables only.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    exprs: Vec<Expr>,
    base: f64,
}

/// Relative mismatch allowed between the blocks' values at the origin.
const BASE_MISMATCH: f64 = 1e-12;

impl BoundaryData {
    pub fn new(exprs: Vec<Expr>, blocks: &[Range<usize>], vars: &[&str]) -> Result<BoundaryData> {
        if exprs.len() != blocks.len() {
            return Err(Error::Invalid(format!(
                "{} boundary expressions for {} blocks",
                exprs.len(),
                blocks.len()
            )));
        }
        let origin = vec![0.0; vars.len()];
        let mut base = None;
        for (i, (e, b)) in exprs.iter().zip(blocks).enumerate() {
            if let Some(v) = e
                .variables()
                .iter()
                .find(|v| !vars[b.clone()].contains(&v.as_str()))
            {
                return Err(Error::Invalid(format!(
                    "boundary data of block {} depends on `{v}`, which is outside the block",
                    i + 1
                )));
            }
            let h0 = e.compile(vars)?.eval(&origin)?;
            if !(h0 > 0.0) || !h0.is_finite() {
                return Err(Error::Invalid(format!(
                    "boundary data of block {} is not positive at the origin ({h0})",
                    i + 1
                )));
            }
            match base {
                None => base = Some(h0),
                Some(b0) if (h0 - b0).abs() > BASE_MISMATCH * b0 => {
                    return Err(Error::Invalid(format!(
                        "boundary data disagree at the origin: block 1 gives {b0}, block {} gives {h0}",
                        i + 1
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(BoundaryData {
            exprs,
            base: base.unwrap_or(1.0),
        })
    }

    /// The chart's own density on the axis leaves.
    pub fn from_chart(w: &WebChart) -> Result<BoundaryData> {
        let exprs = w
            .blocks()
            .iter()
            .map(|b| {
                let mut e = w.density().clone();
                for (k, v) in w.vars().iter().enumerate() {
                    if !b.contains(&k) {
                        e = e.substitute(v, &Expr::zero());
                    }
                }
                e.simplify()
            })
            .collect();
        BoundaryData::new(exprs, w.blocks(), &w.var_names())
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    /// The common value at the origin.
    pub fn base_value(&self) -> f64 {
        self.base
    }
}

/// Tensor-product sample grid; every axis contains 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Vec<f64>>,
}

impl GridSpec {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<GridSpec> {
        if axes.is_empty() {
            return Err(Error::Invalid("grid needs at least one axis".into()));
        }
        for (k, a) in axes.iter().enumerate() {
            if a.iter().any(|v| !v.is_finite()) || a.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Invalid(format!(
                    "grid axis {} must be finite and strictly increasing",
                    k + 1
                )));
            }
            if !a.contains(&0.0) {
                return Err(Error::Invalid(format!(
                    "grid axis {} does not contain 0",
                    k + 1
                )));
            }
        }
        Ok(GridSpec { axes })
    }

    /// `n` equispaced points per axis over `region`. Points within roundoff of
    /// zero are snapped to it.
    pub fn uniform(region: &Region, n: usize) -> Result<GridSpec> {
        if n < 2 {
            return Err(Error::Invalid(
                "a uniform grid needs at least 2 points per axis".into(),
            ));
        }
        let r = region.normalized();
        let axes = (0..r.dim())
            .map(|k| {
                let (lo, hi) = (r.lo(k), r.hi(k));
                (0..n)
                    .map(|i| {
                        let v = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                        if v.abs() <= 1e-12 * (hi - lo) {
                            0.0
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        GridSpec::new(axes)
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn zero_index(&self, k: usize) -> usize {
        self.axes[k].iter().position(|v| *v == 0.0).unwrap_or(0)
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            let n = self.axes[k].len();
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (i, a)| acc * a.len() + i)
    }

    fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(i, a)| a[*i]).collect()
    }

    fn within(&self, region: &Region) -> bool {
        let r = region.normalized();
        self.axes.iter().enumerate().all(|(k, a)| {
            a.first().is_some_and(|v| *v >= r.lo(k)) && a.last().is_some_and(|v| *v <= r.hi(k))
        })
    }
}

/// Density values on a [`GridSpec`], last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    grid: GridSpec,
    values: Vec<f64>,
}

impl DensityGrid {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.flatten(idx)]
    }

    /// Grid points paired with their values, in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        (0..self.values.len()).map(|f| (self.grid.point(&self.grid.unflatten(f)), self.values[f]))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Which cross-block pair drives each step of the reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairRule {
    /// Lexicographically smallest pair `(j, k)`, `j < k`.
    #[default]
    Smallest,
    /// Lexicographically largest pair; used to test that the result does not
    /// depend on the choice.
    Largest,
}

struct Filler<'a> {
    grid: &'a GridSpec,
    block_of: Vec<usize>,
    zero: Vec<usize>,
    // compiled A_jk for j < k, row-major in an m×m table
    entries: Vec<Option<CompiledExpr>>,
    boundary: Vec<CompiledExpr>,
    values: Vec<f64>,
    rule: PairRule,
    spec: &'a QuadratureSpec,
}

impl Filler<'_> {
    fn value(&mut self, idx: &[usize]) -> Result<f64> {
        let flat = self.grid.flatten(idx);
        if !self.values[flat].is_nan() {
            return Ok(self.values[flat]);
        }
        let m = idx.len();
        let support: Vec<usize> = (0..m).filter(|&k| idx[k] != self.zero[k]).collect();
        let x = self.grid.point(idx);
        let block_of = &self.block_of;
        let pairs = support.iter().enumerate().flat_map(|(n, &j)| {
            support[n + 1..]
                .iter()
                .filter(move |&&k| block_of[j] != block_of[k])
                .map(move |&k| (j, k))
        });
        let pair = match self.rule {
            PairRule::Smallest => pairs.clone().next(),
            PairRule::Largest => pairs.last(),
        };
        let v = match pair {
            None => {
                let b = support.first().map_or(0, |k| block_of[*k]);
                self.boundary[b].eval(&x)?
            }
            Some((j, k)) => {
                let mut at = idx.to_vec();
                at[j] = self.zero[j];
                let hj = self.value(&at)?;
                at[k] = self.zero[k];
                let hjk = self.value(&at)?;
                at[j] = idx[j];
                let hk = self.value(&at)?;
                let integral = match &self.entries[j * m + k] {
                    None => 0.0,
                    Some(a) => {
                        let mut y = x.clone();
                        integrate_box(
                            |t| {
                                y[j] = t[0];
                                y[k] = t[1];
                                Ok(a.eval(&y)?)
                            },
                            &[0.0, 0.0],
                            &[x[j], x[k]],
                            self.spec,
                        )?
                        .value
                    }
                };
                hj * hk / hjk * integral.exp()
            }
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Numeric(format!(
                "reconstructed density is not positive at {:?} ({v}); tensor and boundary data are inconsistent",
                x
            )));
        }
        self.values[flat] = v;
        Ok(v)
    }
}

/// Density with nonuniformity tensor `a` and leaf values `bd`, sampled on
/// `grid`, using the smallest-pair rule.
pub fn reconstruct_density(
    a: &AdmissibleTensor,
    bd: &BoundaryData,
    grid: &GridSpec,
    spec: &QuadratureSpec,
) -> Result<DensityGrid> {
    reconstruct_density_with(a, bd, grid, spec, PairRule::Smallest)
}

/// Grid points are filled by induction on the number of blocks with nonzero
/// coordinates. A point touching two or more blocks is expressed through
/// three points with fewer nonzero coordinates,
///
/// ```text
/// h(x) = h(x|x_j=0) h(x|x_k=0) / h(x|x_j=x_k=0) · exp ∫₀^{x_j}∫₀^{x_k} A_jk dt_k dt_j,
/// ```
///
/// and the rest come straight from the boundary data.
pub fn reconstruct_density_with(
    a: &AdmissibleTensor,
    bd: &BoundaryData,
    grid: &GridSpec,
    spec: &QuadratureSpec,
    rule: PairRule,
) -> Result<DensityGrid> {
    spec.validate()?;
    let field = a.field();
    let m = field.dim();
    if grid.dim() != m {
        return Err(Error::Invalid(format!(
            "grid has {} axes, tensor has dimension {m}",
            grid.dim()
        )));
    }
    if bd.exprs().len() != field.blocks().len() {
        return Err(Error::Invalid(format!(
            "{} boundary expressions for {} blocks",
            bd.exprs().len(),
            field.blocks().len()
        )));
    }
    let vars = a.vars();
    let block_of = (0..m)
        .map(|k| {
            field
                .blocks()
                .iter()
                .position(|b| b.contains(&k))
                .unwrap_or(0)
        })
        .collect();
    let mut entries = vec![None; m * m];
    for (j, k) in field.cross_block_pairs() {
        let e = field.get(j, k).simplify();
        if !e.is_const_value(0.0) {
            entries[j * m + k] = Some(e.compile(&vars)?);
        }
    }
    let boundary = bd
        .exprs()
        .iter()
        .map(|e| e.compile(&vars))
        .collect::<Result<Vec<_>, _>>()?;
    let mut f = Filler {
        grid,
        block_of,
        zero: (0..m).map(|k| grid.zero_index(k)).collect(),
        entries,
        boundary,
        values: vec![f64::NAN; grid.len()],
        rule,
        spec,
    };
    for flat in 0..grid.len() {
        f.value(&grid.unflatten(flat))?;
    }
    Ok(DensityGrid {
        grid: grid.clone(),
        values: f.values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    /// `max |h_rec − h| / |h|` over the grid.
    pub max_rel_error: f64,
    pub worst_point: Vec<f64>,
    pub reconstructed: DensityGrid,
}

/// Reconstructs `w`'s density from its own tensor and leaf values and
/// compares with the original.
pub fn roundtrip_error(w: &WebChart, grid: &GridSpec, spec: &QuadratureSpec) -> Result<RoundTrip> {
    roundtrip_error_with(w, grid, spec, PairRule::Smallest)
}

pub fn roundtrip_error_with(
    w: &WebChart,
    grid: &GridSpec,
    spec: &QuadratureSpec,
    rule: PairRule,
) -> Result<RoundTrip> {
    if grid.dim() != w.dim() || !grid.within(w.domain()) {
        return Err(Error::Invalid(
            "grid must lie inside the chart domain".into(),
        ));
    }
    let a = AdmissibleTensor::trusted(nonuniformity_tensor(w), &w.var_names());
    let bd = BoundaryData::from_chart(w)?;
    let rec = reconstruct_density_with(&a, &bd, grid, spec, rule)?;
    let h = w.compiled_density();
    let mut max_rel_error = 0.0;
    let mut worst_point = vec![0.0; w.dim()];
    for (x, v) in rec.iter() {
        let want = h.eval(&x)?;
        let err = (v - want).abs() / want.abs();
        if err > max_rel_error {
            max_rel_error = err;
            worst_point = x;
        }
    }
    Ok(RoundTrip {
        max_rel_error,
        worst_point,
        reconstructed: rec,
    })
}
