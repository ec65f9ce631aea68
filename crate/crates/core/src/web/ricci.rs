//! Ricci tensor of the coordinate connection of the codimension-1 refinement.
//!
//! The connection has `Γ^k_kk = ∂_k log h` and all other symbols zero. With
//! `R(∂_i,∂_j)∂_k = R^l_ijk ∂_l` and
//! `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`,
//! the Ricci tensor is the contraction `Rc_ik = Σ_j R^j_ijk` of the second
//! lower index with the upper one. Under this convention the off-diagonal
//! entries are `+∂_i∂_k log h`.

use super::tensor::log_gradient;
use super::{SymTensorField, WebChart};
use crate::expr::{build, Expr};

/// Full Ricci matrix `Rc[i][k]`.
pub fn ricci_tensor(w: &WebChart) -> Vec<Vec<Expr>> {
    let m = w.dim();
    let vars = w.vars();
    let grad = log_gradient(w);
    // gamma(l, i, k) = Γ^l_ik
    let gamma = |l: usize, i: usize, k: usize| -> Expr {
        if l == i && i == k {
            grad[k].clone()
        } else {
            Expr::zero()
        }
    };
    let mut rc = vec![vec![Expr::zero(); m]; m];
    for (i, row) in rc.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            let mut sum = Expr::zero();
            for j in 0..m {
                // R^j_ijk
                let mut r = gamma(j, j, k).differentiate(&vars[i]).simplify();
                r = build::sub(r, gamma(j, i, k).differentiate(&vars[j]));
                for mm in 0..m {
                    r = build::add(r, build::mul(gamma(j, i, mm), gamma(mm, j, k)));
                    r = build::sub(r, build::mul(gamma(j, j, mm), gamma(mm, i, k)));
                }
                sum = build::add(sum, r);
            }
            *slot = sum;
        }
    }
    rc
}

/// `pr_O(Rc)`: the Ricci tensor with same-block entries removed.
pub fn ricci_offdiag(w: &WebChart) -> SymTensorField {
    let rc = ricci_tensor(w);
    SymTensorField::from_fn(w.dim(), w.blocks(), |k, l| {
        if w.same_block(k, l) {
            Expr::zero()
        } else {
            rc[k][l].clone()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::web::nonuniformity_tensor;
    use crate::Region;

    #[test]
    fn constant_density() {
        let w = WebChart::parse(
            &["x", "y"],
            &[1, 1],
            "3",
            Region::cube(&[0.0; 2], 1.0).unwrap(),
        )
        .unwrap();
        let r = ricci_offdiag(&w);
        assert_eq!(r.get(0, 1), &Expr::zero());
    }

    #[test]
    fn three_dimensional_exponential() {
        let w = WebChart::parse(
            &["x", "y", "z"],
            &[1, 1, 1],
            "exp(x*y + y*z)",
            Region::cube(&[0.0; 3], 0.5).unwrap(),
        )
        .unwrap();
        let r = ricci_offdiag(&w);
        assert_eq!(r.get(0, 1), &Expr::one());
        assert_eq!(r.get(1, 2), &Expr::one());
        assert_eq!(r.get(0, 2), &Expr::zero());
    }

    #[test]
    fn ricci_is_symmetric_and_matches_tensor() {
        let w = WebChart::parse(
            &["x", "y"],
            &[1, 1],
            "1 + x*y",
            Region::cube(&[0.0; 2], 0.5).unwrap(),
        )
        .unwrap();
        let rc = ricci_tensor(&w);
        let k = nonuniformity_tensor(&w);
        let at = [("x", 0.2), ("y", -0.45)];
        let a = rc[0][1].eval(&at).unwrap();
        let b = rc[1][0].eval(&at).unwrap();
        let c = k.get(0, 1).eval(&at).unwrap();
        assert!((a - b).abs() < 1e-15 && (a - c).abs() < 1e-15);
    }
}
