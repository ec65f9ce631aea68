use super::tensor::{is_locally_trivial, DEFAULT_ZERO_TOL};
use super::WebChart;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::{Error, Result};

/// Numeric equivalence from a trivial web to the standard web with Lebesgue
/// volume.
///
/// For block i with coordinates `𝐱_i` the factor
/// `g_i(𝐱_i) = h(b + (𝐱_i − b_i)) / h(b)^{(n−1)/n}` is the density restricted
/// to the leaf through the base point `b` and rescaled. The map keeps every
/// coordinate except the last one of each block, which becomes
/// `G_i = ∫_{b_last}^{x_last} g_i dt`. Its Jacobian determinant is `Π g_i`,
/// which equals `h` exactly when `log h` separates over the blocks.
#[derive(Debug, Clone)]
pub struct TrivializingMap {
    chart: WebChart,
    base: Vec<f64>,
    scale: f64,
    spec: QuadratureSpec,
}

fn default_base(w: &WebChart) -> Vec<f64> {
    let origin = vec![0.0; w.dim()];
    if w.domain().contains(&origin) && w.compiled_density().eval(&origin).is_ok_and(|v| v > 0.0) {
        origin
    } else {
        w.domain().center()
    }
}

/// Builds the trivializing map of a locally trivial web.
///
/// `base` defaults to the origin when it lies in the domain with positive
/// density, and to the domain centre otherwise.
pub fn trivializing_map(
    w: &WebChart,
    base: Option<&[f64]>,
    spec: &QuadratureSpec,
) -> Result<TrivializingMap> {
    spec.validate()?;
    let verdict = is_locally_trivial(w, DEFAULT_ZERO_TOL)?;
    if let Some((_, _, x, value)) = verdict.witness {
        return Err(Error::NotTrivial { witness: x, value });
    }
    let base = match base {
        Some(b) => {
            w.check_point(b)?;
            b.to_vec()
        }
        None => default_base(w),
    };
    let h0 = w.compiled_density().eval(&base)?;
    if !(h0 > 0.0) {
        return Err(Error::Invalid(format!(
            "density is not positive at the base point {:?}",
            base
        )));
    }
    let n = w.n_blocks() as f64;
    Ok(TrivializingMap {
        chart: w.clone(),
        base,
        scale: h0.powf((n - 1.0) / n),
        spec: *spec,
    })
}

impl TrivializingMap {
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// `g_i` evaluated at the block-i coordinates of `x`.
    pub fn block_factor(&self, i: usize, x: &[f64]) -> Result<f64> {
        let mut z = self.base.clone();
        let b = self.chart.blocks()[i].clone();
        z[b.clone()].copy_from_slice(&x[b]);
        Ok(self.chart.compiled_density().eval(&z)? / self.scale)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.chart.check_point(x)?;
        let mut out = x.to_vec();
        for (i, b) in self.chart.blocks().iter().enumerate() {
            let last = b.end - 1;
            let mut y = x.to_vec();
            let e = integrate(
                |t| {
                    y[last] = t;
                    self.block_factor(i, &y)
                },
                self.base[last],
                x[last],
                &self.spec,
            )?;
            out[last] = e.value;
        }
        Ok(out)
    }

    /// Jacobian determinant of [`TrivializingMap::forward`], `Π g_i`.
    pub fn jacobian_det(&self, x: &[f64]) -> Result<f64> {
        self.chart.check_point(x)?;
        (0..self.chart.n_blocks())
            .map(|i| self.block_factor(i, x))
            .product()
    }
}
