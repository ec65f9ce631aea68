use crate::expr::sample_points;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::roots::newton_bracketed;
use crate::web::WebChart;
use crate::{Error, Region, Result};

/// Coordinates in which the density is 1 on the leaves through the origin of
/// the complementary foliations.
///
/// Only the first coordinate of each block changes:
///
/// ```text
/// x_a = c_i ∫₀^{y_a} h(0,…,0, t, y_{a+1},…, y_{block end}, 0,…,0) dt
/// ```
///
/// with `c_1 = 1` and `c_i = 1/h(0)` for the other blocks. The Jacobian
/// determinant is `Π_i c_i h(y restricted to block i)`, which equals `h` on
/// every axis leaf, so the transformed density is 1 there.
#[derive(Debug, Clone)]
pub struct NormalizedChart {
    chart: WebChart,
    h0: f64,
    scales: Vec<f64>,
    spec: QuadratureSpec,
}

pub fn normalize_chart(w: &WebChart, spec: &QuadratureSpec) -> Result<NormalizedChart> {
    spec.validate()?;
    let origin = vec![0.0; w.dim()];
    if !w.domain().contains(&origin) {
        return Err(Error::Invalid(
            "normalization needs the origin inside the domain".into(),
        ));
    }
    let h0 = w.compiled_density().eval(&origin)?;
    if !(h0 > 0.0) {
        return Err(Error::Invalid(format!(
            "density is not positive at the origin ({h0})"
        )));
    }
    let mut scales = vec![1.0 / h0; w.n_blocks()];
    scales[0] = 1.0;
    Ok(NormalizedChart {
        chart: w.clone(),
        h0,
        scales,
        spec: *spec,
    })
}

impl NormalizedChart {
    pub fn chart(&self) -> &WebChart {
        &self.chart
    }

    /// `h(0)` in the original coordinates.
    pub fn base_value(&self) -> f64 {
        self.h0
    }

    /// The constants `c_i`.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    fn check(&self, y: &[f64]) -> Result<()> {
        self.chart.check_point(y)?;
        if !self.chart.domain().contains(y) {
            return Err(Error::Invalid(format!(
                "{:?} is outside the chart domain",
                y
            )));
        }
        Ok(())
    }

    // y with every coordinate outside block i set to 0
    fn leaf_point(&self, i: usize, y: &[f64]) -> Vec<f64> {
        let b = &self.chart.blocks()[i];
        (0..y.len())
            .map(|k| if b.contains(&k) { y[k] } else { 0.0 })
            .collect()
    }

    fn lead_value(&self, i: usize, y: &[f64], s: f64) -> Result<f64> {
        let a = self.chart.blocks()[i].start;
        let h = self.chart.compiled_density();
        let mut z = self.leaf_point(i, y);
        let e = integrate(
            |t| {
                z[a] = t;
                Ok(h.eval(&z)?)
            },
            0.0,
            s,
            &self.spec,
        )?;
        Ok(self.scales[i] * e.value)
    }

    /// Normalized coordinates of the point `y`.
    pub fn forward(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        let mut x = y.to_vec();
        for i in 0..self.chart.n_blocks() {
            let a = self.chart.blocks()[i].start;
            x[a] = self.lead_value(i, y, y[a])?;
        }
        Ok(x)
    }

    /// Original coordinates of the normalized point `x`.
    pub fn inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.chart.check_point(x)?;
        let dom = self.chart.domain().normalized();
        let h = self.chart.compiled_density();
        let mut y = x.to_vec();
        for i in 0..self.chart.n_blocks() {
            let a = self.chart.blocks()[i].start;
            let (lo, hi) = (dom.lo(a), dom.hi(a));
            let target = x[a];
            let g = |s: f64| -> Result<(f64, f64)> {
                let mut z = self.leaf_point(i, &y);
                let v = self.lead_value(i, &y, s)? - target;
                z[a] = s;
                Ok((v, self.scales[i] * h.eval(&z)?))
            };
            if g(lo)?.0 > 0.0 || g(hi)?.0 < 0.0 {
                return Err(Error::Invalid(format!(
                    "{:?} is outside the image of the chart domain",
                    x
                )));
            }
            let root = newton_bracketed(
                g,
                lo,
                hi,
                target,
                10.0 * self.spec.abs_tol,
                1e-15 * (1.0 + target.abs()),
                100,
            )?;
            y[a] = root.x;
        }
        Ok(y)
    }

    /// Jacobian determinant of [`forward`](Self::forward) at `y`.
    pub fn jacobian_det(&self, y: &[f64]) -> Result<f64> {
        self.check(y)?;
        let h = self.chart.compiled_density();
        let mut det = 1.0;
        for i in 0..self.chart.n_blocks() {
            det *= self.scales[i] * h.eval(&self.leaf_point(i, y))?;
        }
        Ok(det)
    }

    /// Transformed density at the image of `y`.
    pub fn density_at_source(&self, y: &[f64]) -> Result<f64> {
        Ok(self.chart.compiled_density().eval(y)? / self.jacobian_det(y)?)
    }

    /// Transformed density at the normalized point `x`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        self.density_at_source(&self.inverse(x)?)
    }

    /// Largest `|h̃ − 1|` over sample points of the axis leaves, `per_axis`
    /// points along each coordinate of a block, with the point attaining it.
    pub fn cross_deviation(&self, per_axis: usize) -> Result<(f64, Vec<f64>)> {
        let dom = self.chart.domain().normalized();
        let m = self.chart.dim();
        let mut worst = (0.0, vec![0.0; m]);
        for b in self.chart.blocks() {
            let leaf = Region::new(
                b.clone().map(|k| dom.lo(k)).collect(),
                b.clone().map(|k| dom.hi(k)).collect(),
            )?;
            for s in sample_points(&leaf, per_axis) {
                let mut y = vec![0.0; m];
                for (k, v) in b.clone().zip(s) {
                    y[k] = v;
                }
                let dev = (self.density_at_source(&y)? - 1.0).abs();
                if dev > worst.0 {
                    worst = (dev, y);
                }
            }
        }
        Ok(worst)
    }
}
