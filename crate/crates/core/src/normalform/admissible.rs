use std::fmt;
use std::ops::Range;

use crate::expr::{build::sub, is_identically_zero, Expr, ZeroVerdict};
use crate::web::{SymTensorField, DEFAULT_ZERO_SAMPLES, DEFAULT_ZERO_TOL};
use crate::{Error, Region, Result};

/// The identities a tensor must satisfy to be a nonuniformity tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `A_kl = A_lk`.
    Symmetry,
    /// `A_kl = 0` for `k`, `l` in one block.
    BlockDiagonal,
    /// `∂_a A_bc = ∂_b A_ac` whenever `c` lies outside the blocks of `a` and `b`.
    Compatibility,
}

impl Condition {
    pub fn id(self) -> u8 {
        match self {
            Condition::Symmetry => 1,
            Condition::BlockDiagonal => 2,
            Condition::Compatibility => 3,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Symmetry => "symmetry",
            Condition::BlockDiagonal => "vanishing within blocks",
            Condition::Compatibility => "compatibility",
        };
        write!(f, "({}) {s}", self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    /// `(k, l)` for conditions 1 and 2, `(a, b, c)` for condition 3; 0-based.
    pub indices: Vec<usize>,
    pub point: Vec<f64>,
    /// Value of the offending difference (or entry) at `point`.
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        write!(
            f,
            "condition {} fails for indices ({}) at {:?}: {:e}",
            self.condition,
            idx.join(", "),
            self.point,
            self.value
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    /// First failed identity, in condition order.
    pub violation: Option<Violation>,
    /// True when every identity was settled by simplification alone.
    pub symbolic: bool,
}

struct Checker<'a> {
    vars: &'a [&'a str],
    region: &'a Region,
    samples: usize,
    tol: f64,
    symbolic: bool,
}

impl Checker<'_> {
    fn check(
        &mut self,
        e: &Expr,
        condition: Condition,
        indices: Vec<usize>,
    ) -> Result<Option<Violation>> {
        let verdict = is_identically_zero(e, self.vars, self.region, self.samples, self.tol)?;
        match verdict {
            ZeroVerdict::SymbolicZero => Ok(None),
            ZeroVerdict::NumericallyZero { .. } => {
                self.symbolic = false;
                Ok(None)
            }
            ZeroVerdict::Nonzero { witness, .. } => {
                let value = e.compile(self.vars)?.eval(&witness)?;
                Ok(Some(Violation {
                    condition,
                    indices,
                    point: witness,
                    value,
                }))
            }
        }
    }
}

fn verdict(violation: Option<Violation>, symbolic: bool) -> AdmissibilityVerdict {
    AdmissibilityVerdict {
        admissible: violation.is_none(),
        symbolic: symbolic && violation.is_none(),
        violation,
    }
}

/// Checks conditions (2) and (3) on `a`; symmetry holds by construction.
///
/// Each identity is first simplified and, if not a symbolic zero, sampled on
/// `region` with `samples` points per axis against the absolute `tol`.
pub fn check_tensor_admissible(
    a: &SymTensorField,
    vars: &[&str],
    region: &Region,
    samples: usize,
    tol: f64,
) -> Result<AdmissibilityVerdict> {
    let m = a.dim();
    if vars.len() != m || region.dim() != m {
        return Err(Error::Invalid(format!(
            "tensor of dimension {m} with {} variables on a {}-dimensional region",
            vars.len(),
            region.dim()
        )));
    }
    let region = region.normalized();
    let mut c = Checker {
        vars,
        region: &region,
        samples,
        tol,
        symbolic: true,
    };
    for k in 0..m {
        for l in k..m {
            if a.same_block(k, l) {
                if let Some(v) = c.check(a.get(k, l), Condition::BlockDiagonal, vec![k, l])? {
                    return Ok(verdict(Some(v), false));
                }
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in (0..m).filter(|k| !a.same_block(i, *k) && !a.same_block(j, *k)) {
                let e = sub(
                    a.get(j, k).differentiate(vars[i]),
                    a.get(i, k).differentiate(vars[j]),
                );
                if let Some(v) = c.check(&e, Condition::Compatibility, vec![i, j, k])? {
                    return Ok(verdict(Some(v), false));
                }
            }
        }
    }
    Ok(verdict(None, c.symbolic))
}

/// Like [`check_tensor_admissible`] for a full matrix, which may also fail
/// symmetry. Returns the verdict and the tensor built from the upper triangle.
pub fn check_matrix_admissible(
    rows: &[Vec<Expr>],
    blocks: &[Range<usize>],
    vars: &[&str],
    region: &Region,
    samples: usize,
    tol: f64,
) -> Result<(AdmissibilityVerdict, SymTensorField)> {
    let m = rows.len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Invalid("tensor matrix is not square".into()));
    }
    if blocks.last().map(|b| b.end) != Some(m) {
        return Err(Error::Invalid(format!(
            "blocks {:?} do not cover {m} coordinates",
            blocks
        )));
    }
    let field = SymTensorField::from_fn(m, blocks, |k, l| rows[k][l].clone());
    if vars.len() != m || region.dim() != m {
        return Err(Error::Invalid(format!(
            "tensor of dimension {m} with {} variables on a {}-dimensional region",
            vars.len(),
            region.dim()
        )));
    }
    let region_n = region.normalized();
    let mut c = Checker {
        vars,
        region: &region_n,
        samples,
        tol,
        symbolic: true,
    };
    for k in 0..m {
        for l in k + 1..m {
            let e = sub(rows[k][l].clone(), rows[l][k].clone());
            if let Some(v) = c.check(&e, Condition::Symmetry, vec![k, l])? {
                return Ok((verdict(Some(v), false), field));
            }
        }
    }
    let mut v = check_tensor_admissible(&field, vars, region, samples, tol)?;
    v.symbolic &= c.symbolic;
    Ok((v, field))
}

/// A tensor field known to satisfy the nonuniformity identities, together
/// with the names of its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleTensor {
    field: SymTensorField,
    vars: Vec<String>,
}

impl AdmissibleTensor {
    /// Checks `field` on `region` with the default zero-test settings.
    pub fn new(field: SymTensorField, vars: &[&str], region: &Region) -> Result<AdmissibleTensor> {
        AdmissibleTensor::with_tolerance(
            field,
            vars,
            region,
            DEFAULT_ZERO_SAMPLES,
            DEFAULT_ZERO_TOL,
        )
    }

    /// Like [`new`](Self::new) with explicit zero-test settings.
    pub fn with_tolerance(
        field: SymTensorField,
        vars: &[&str],
        region: &Region,
        samples: usize,
        tol: f64,
    ) -> Result<AdmissibleTensor> {
        let v = check_tensor_admissible(&field, vars, region, samples, tol)?;
        if let Some(bad) = v.violation {
            return Err(Error::Invalid(format!("tensor is not admissible: {bad}")));
        }
        Ok(AdmissibleTensor::trusted(field, vars))
    }

    /// For tensors that are admissible by construction, such as nonuniformity
    /// tensors of a chart.
    pub(crate) fn trusted(field: SymTensorField, vars: &[&str]) -> AdmissibleTensor {
        AdmissibleTensor {
            field,
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn field(&self) -> &SymTensorField {
        &self.field
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }
}
