use super::{Expr, ExprError};
use crate::region::Region;

/// Outcome of [`is_identically_zero`].
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    /// Simplification reduced the expression to the constant 0.
    SymbolicZero,
    /// Every sample was within tolerance.
    NumericallyZero { max_abs: f64 },
    /// Some sample exceeded the tolerance; `witness` attains `max_abs`.
    Nonzero { max_abs: f64, witness: Vec<f64> },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::Nonzero { .. })
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            ZeroVerdict::SymbolicZero => 0.0,
            ZeroVerdict::NumericallyZero { max_abs } | ZeroVerdict::Nonzero { max_abs, .. } => {
                *max_abs
            }
        }
    }
}

/// Largest number of points in a full tensor grid before switching to a
/// Halton sequence of the same size.
pub const MAX_GRID_POINTS: usize = 50_000;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    out
}

/// Deterministic sample points in `region`.
///
/// Uses the cell-centred grid with `per_axis` points per axis when it has at
/// most [`MAX_GRID_POINTS`] points, otherwise that many Halton points.
pub fn sample_points(region: &Region, per_axis: usize) -> Vec<Vec<f64>> {
    let m = region.dim();
    let per_axis = per_axis.max(1);
    let total = (per_axis as f64).powi(m as i32);
    let lo = region.lower();
    let hi = region.upper();
    if total <= MAX_GRID_POINTS as f64 {
        let total = total as usize;
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; m];
        for _ in 0..total {
            out.push(
                (0..m)
                    .map(|k| lo[k] + (idx[k] as f64 + 0.5) / per_axis as f64 * (hi[k] - lo[k]))
                    .collect(),
            );
            for k in (0..m).rev() {
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    } else {
        assert!(
            m <= PRIMES.len(),
            "Halton sampling supports up to {} axes",
            PRIMES.len()
        );
        (1..=MAX_GRID_POINTS as u64)
            .map(|i| {
                (0..m)
                    .map(|k| lo[k] + radical_inverse(i, PRIMES[k]) * (hi[k] - lo[k]))
                    .collect()
            })
            .collect()
    }
}

/// Decides whether `e` vanishes on `region`.
///
/// `vars[k]` names the coordinate along axis k. A symbolic zero is reported
/// when simplification reaches the constant 0; otherwise `e` is sampled with
/// [`sample_points`] and compared against the absolute tolerance `tol`.
pub fn is_identically_zero(
    e: &Expr,
    vars: &[&str],
    region: &Region,
    samples: usize,
    tol: f64,
) -> Result<ZeroVerdict, ExprError> {
    let s = e.simplify();
    if s.is_const_value(0.0) {
        return Ok(ZeroVerdict::SymbolicZero);
    }
    let code = s.compile(vars)?;
    let mut max_abs = 0.0;
    let mut witness = None;
    for x in sample_points(region, samples) {
        let v = code.eval(&x)?.abs();
        if v > max_abs || witness.is_none() {
            max_abs = v;
            witness = Some(x);
        }
    }
    if max_abs > tol {
        Ok(ZeroVerdict::Nonzero {
            max_abs,
            witness: witness.unwrap_or_default(),
        })
    } else {
        Ok(ZeroVerdict::NumericallyZero { max_abs })
    }
}
