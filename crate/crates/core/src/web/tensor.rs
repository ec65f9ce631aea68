use super::{SymTensorField, WebChart};
use crate::expr::{Expr, ZeroVerdict};
use crate::Result;

/// Sample points per axis for numeric zero tests.
pub const DEFAULT_ZERO_SAMPLES: usize = 33;
/// Absolute threshold below which sampled values count as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// First partials of `log h`, one per coordinate.
pub(crate) fn log_gradient(w: &WebChart) -> Vec<Expr> {
    let l = w.log_density();
    w.vars().iter().map(|v| l.differentiate(v)).collect()
}

/// The nonuniformity tensor: `∂²log h/∂x_k∂x_l` for `k`, `l` in different
/// blocks and 0 within a block.
pub fn nonuniformity_tensor(w: &WebChart) -> SymTensorField {
    let grad = log_gradient(w);
    let vars = w.vars();
    SymTensorField::from_fn(w.dim(), w.blocks(), |k, l| {
        if w.same_block(k, l) {
            Expr::zero()
        } else {
            grad[k].differentiate(&vars[l])
        }
    })
}

/// Zero test of one cross-block entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryVerdict {
    pub k: usize,
    pub l: usize,
    pub entry: Expr,
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrivialityVerdict {
    pub trivial: bool,
    pub entries: Vec<EntryVerdict>,
    /// On failure: entry indices, the point of largest |κ| and κ there.
    pub witness: Option<(usize, usize, Vec<f64>, f64)>,
}

impl TrivialityVerdict {
    /// True when every entry was decided symbolically.
    pub fn symbolic(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.verdict == ZeroVerdict::SymbolicZero)
    }
}

/// Local triviality test with the default sample density.
pub fn is_locally_trivial(w: &WebChart, tol: f64) -> Result<TrivialityVerdict> {
    is_locally_trivial_with(w, tol, DEFAULT_ZERO_SAMPLES)
}

/// A web is trivial iff every cross-block entry of its nonuniformity tensor
/// vanishes on the domain.
pub fn is_locally_trivial_with(
    w: &WebChart,
    tol: f64,
    samples: usize,
) -> Result<TrivialityVerdict> {
    let k_field = nonuniformity_tensor(w);
    let mut entries = Vec::new();
    let mut witness: Option<(usize, usize, Vec<f64>, f64)> = None;
    for (k, l) in k_field.cross_block_pairs() {
        let entry = k_field.get(k, l).clone();
        let verdict = w.zero_verdict(&entry, samples, tol)?;
        if let ZeroVerdict::Nonzero {
            max_abs,
            witness: x,
        } = &verdict
        {
            if witness
                .as_ref()
                .is_none_or(|(_, _, _, v)| v.abs() < *max_abs)
            {
                let value = entry.compile(&w.var_names())?.eval(x)?;
                witness = Some((k, l, x.clone(), value));
            }
        }
        entries.push(EntryVerdict {
            k,
            l,
            entry,
            verdict,
        });
    }
    Ok(TrivialityVerdict {
        trivial: witness.is_none(),
        entries,
        witness,
    })
}
