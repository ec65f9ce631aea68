use super::tensor::log_gradient;
use super::WebChart;
use crate::expr::Expr;

/// A 1-form `Σ c_k dx_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub terms: Vec<(usize, Expr)>,
}

/// A 2-form `Σ c dx_l∧dx_k`, stored as `(l, k, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    pub terms: Vec<(usize, usize, Expr)>,
}

impl OneForm {
    pub fn coefficient(&self, k: usize) -> Option<&Expr> {
        self.terms.iter().find(|(i, _)| *i == k).map(|(_, c)| c)
    }
}

impl TwoForm {
    /// Coefficient on `dx_l∧dx_k` in the stored orientation, if present.
    pub fn coefficient(&self, l: usize, k: usize) -> Option<&Expr> {
        self.terms
            .iter()
            .find(|(a, b, _)| *a == l && *b == k)
            .map(|(_, _, c)| c)
    }
}

/// Diagonal connection forms `ω^i_i = Σ_{k∈π_i} ∂_k log h dx_k`, one per block.
pub fn connection_form(w: &WebChart) -> Vec<OneForm> {
    let grad = log_gradient(w);
    w.blocks()
        .iter()
        .map(|b| OneForm {
            terms: b.clone().map(|k| (k, grad[k].clone())).collect(),
        })
        .collect()
}

/// Curvature forms `Ξ^i_i = dω^i_i`, one per block.
///
/// Terms are `(l, k, ∂²log h/∂x_k∂x_l)` on `dx_l∧dx_k` with `k` in block i and
/// `l` outside it; the same-block part of `dω^i_i` cancels by symmetry.
pub fn curvature_form(w: &WebChart) -> Vec<TwoForm> {
    let grad = log_gradient(w);
    let vars = w.vars();
    w.blocks()
        .iter()
        .map(|b| {
            let mut terms = Vec::new();
            for l in 0..w.dim() {
                if b.contains(&l) {
                    continue;
                }
                for k in b.clone() {
                    terms.push((l, k, grad[k].differentiate(&vars[l])));
                }
            }
            TwoForm { terms }
        })
        .collect()
}
