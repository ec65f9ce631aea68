//! Oriented coordinate boxes.

use crate::{Error, Result};

/// The oriented box ⟨a, b⟩ = Π ⟨a_k, b_k⟩.
///
/// Axis k is positively oriented when `b_k > a_k`. Integrals over a region
/// carry the product of the axis orientations as their sign.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Region {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Region> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Invalid(format!(
                "region corners have dimensions {} and {}",
                a.len(),
                b.len()
            )));
        }
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Invalid(format!(
                    "region axis {} is not finite",
                    k + 1
                )));
            }
            if x == y {
                return Err(Error::Invalid(format!(
                    "region axis {} has zero length",
                    k + 1
                )));
            }
        }
        Ok(Region { a, b })
    }

    /// The cube of half-width `half` around `center`.
    pub fn cube(center: &[f64], half: f64) -> Result<Region> {
        Region::new(
            center.iter().map(|c| c - half).collect(),
            center.iter().map(|c| c + half).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn start(&self) -> &[f64] {
        &self.a
    }

    pub fn end(&self) -> &[f64] {
        &self.b
    }

    pub fn lo(&self, k: usize) -> f64 {
        self.a[k].min(self.b[k])
    }

    pub fn hi(&self, k: usize) -> f64 {
        self.a[k].max(self.b[k])
    }

    pub fn lower(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.lo(k)).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.hi(k)).collect()
    }

    /// +1 or -1 for axis `k`.
    pub fn axis_orientation(&self, k: usize) -> f64 {
        (self.b[k] - self.a[k]).signum()
    }

    pub fn orientation(&self) -> f64 {
        (0..self.dim()).map(|k| self.axis_orientation(k)).product()
    }

    /// Same box with every axis positively oriented.
    pub fn normalized(&self) -> Region {
        Region {
            a: self.lower(),
            b: self.upper(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(k, v)| *v >= self.lo(k) && *v <= self.hi(k))
    }

    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(k, v)| *v > self.lo(k) && *v < self.hi(k))
    }

    /// True when `other` lies inside this box (orientation ignored).
    pub fn contains_region(&self, other: &Region) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|k| other.lo(k) >= self.lo(k) && other.hi(k) <= self.hi(k))
    }

    pub fn center(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(x, y)| 0.5 * (x + y))
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(x, y)| (y - x).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Signed Lebesgue volume.
    pub fn lebesgue_volume(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(x, y)| y - x).product()
    }
}
