use super::region_volume;
use crate::quadrature::{integrate_box, QuadratureSpec};
use crate::region::Region;
use crate::roots::newton_bracketed;
use crate::web::{nonuniformity_tensor, WebChart};
use crate::{Error, Result};

/// Cells of an equal split count as equal when their volumes spread by at
/// most this multiple of the quadrature tolerance.
pub const SPLIT_TOL_FACTOR: f64 = 100.0;

/// Ω-volumes of the four parts of K cut by `{x_i = p_i}` and `{x_j = p_j}`.
///
/// `b` is the part with `x_i ≥ p_i, x_j ≥ p_j`, `d` the opposite one,
/// `a` has `x_i ≤ p_i, x_j ≥ p_j` and `c` the remaining one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdivisionVolumes {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Sum of the quadrature error estimates.
    pub error: f64,
}

fn sub_box(k: &Region, cuts: &[(usize, f64, f64)]) -> Result<Region> {
    let mut lo = k.lower();
    let mut hi = k.upper();
    for &(axis, a, b) in cuts {
        lo[axis] = a;
        hi[axis] = b;
    }
    Region::new(lo, hi)
}

fn check_pair(w: &WebChart, k: &Region, p: &[f64], i: usize, j: usize) -> Result<()> {
    w.check_point(p)?;
    w.check_axis(i)?;
    w.check_axis(j)?;
    if w.same_block(i, j) {
        return Err(Error::Invalid(format!(
            "axes {} and {} belong to the same foliation",
            i + 1,
            j + 1
        )));
    }
    if k.dim() != w.dim() || !k.contains_interior(p) {
        return Err(Error::Invalid(format!(
            "{:?} is not interior to the region",
            p
        )));
    }
    Ok(())
}

pub fn subdivision_volumes(
    w: &WebChart,
    k: &Region,
    p: &[f64],
    i: usize,
    j: usize,
    spec: &QuadratureSpec,
) -> Result<SubdivisionVolumes> {
    check_pair(w, k, p, i, j)?;
    let (li, hi_i) = (k.lo(i), k.hi(i));
    let (lj, hi_j) = (k.lo(j), k.hi(j));
    let vol = |ci: (f64, f64), cj: (f64, f64)| -> Result<(f64, f64)> {
        let r = sub_box(k, &[(i, ci.0, ci.1), (j, cj.0, cj.1)])?;
        let e = region_volume(w, &r, spec)?;
        Ok((e.value, e.error))
    };
    let (a, ea) = vol((li, p[i]), (p[j], hi_j))?;
    let (b, eb) = vol((p[i], hi_i), (p[j], hi_j))?;
    let (c, ec) = vol((p[i], hi_i), (lj, p[j]))?;
    let (d, ed) = vol((li, p[i]), (lj, p[j]))?;
    Ok(SubdivisionVolumes {
        a,
        b,
        c,
        d,
        error: ea + eb + ec + ed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    pub volumes: SubdivisionVolumes,
    pub bd_minus_ac: f64,
    /// `κ_ij(p)`.
    pub kappa: f64,
    /// Bound on the quadrature noise in `bd − ac`.
    pub noise: f64,
    /// `sign(bd − ac) = sign(κ_ij(p))`, with |bd − ac| above the noise when
    /// κ is nonzero and below it when κ vanishes.
    pub consistent: bool,
    pub diameter: f64,
}

/// Compares the sign of `bd − ac` with the sign of `κ_ij(p)`.
///
/// The comparison is only meaningful for small K; the report carries K's
/// diameter so callers can judge.
pub fn check_product_condition(
    w: &WebChart,
    k: &Region,
    p: &[f64],
    i: usize,
    j: usize,
    spec: &QuadratureSpec,
) -> Result<ProductReport> {
    let v = subdivision_volumes(w, k, p, i, j, spec)?;
    let bd_minus_ac = v.b * v.d - v.a * v.c;
    let total = v.a.abs() + v.b.abs() + v.c.abs() + v.d.abs();
    let noise = spec.abs_tol.max(v.error) * total
        + 8.0 * f64::EPSILON * (v.b * v.d).abs().max((v.a * v.c).abs());
    let names = w.var_names();
    let kappa = nonuniformity_tensor(w).get(i, j).compile(&names)?.eval(p)?;
    let consistent = if kappa.abs() <= crate::web::DEFAULT_ZERO_TOL {
        bd_minus_ac.abs() <= noise
    } else {
        bd_minus_ac.abs() > noise && bd_minus_ac.signum() == kappa.signum()
    };
    Ok(ProductReport {
        volumes: v,
        bd_minus_ac,
        kappa,
        noise,
        consistent,
        diameter: k.diameter(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    /// Cut position per requested axis.
    pub cuts: Vec<f64>,
    /// Volumes of the 2^k cells; bit `b` of the cell index selects the upper
    /// half along the b-th requested axis.
    pub cell_volumes: Vec<f64>,
    /// Largest minus smallest cell volume.
    pub spread: f64,
    /// Spread within [`SPLIT_TOL_FACTOR`] times the quadrature tolerance.
    pub equal: bool,
}

/// Ω-volume of the face `{x_axis = c}` of `k`.
fn face_integral(
    w: &WebChart,
    k: &Region,
    axis: usize,
    c: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let h = w.compiled_density();
    let m = w.dim();
    if m == 1 {
        return Ok(h.eval(&[c])?);
    }
    let idx: Vec<usize> = (0..m).filter(|a| *a != axis).collect();
    let lo: Vec<f64> = idx.iter().map(|a| k.lo(*a)).collect();
    let hi: Vec<f64> = idx.iter().map(|a| k.hi(*a)).collect();
    let mut x = vec![c; m];
    let e = integrate_box(
        |r| {
            for (slot, a) in idx.iter().enumerate() {
                x[*a] = r[slot];
            }
            x[axis] = c;
            Ok(h.eval(&x)?)
        },
        &lo,
        &hi,
        spec,
    )?;
    Ok(e.value)
}

/// Cuts K by one leaf per axis into cells of equal Ω-volume.
///
/// Each axis is cut where the slab below holds half of Vol(K). For trivial
/// webs all 2^k cells then have equal volume; otherwise the spread of the cell
/// volumes witnesses nontriviality.
pub fn equal_split(
    w: &WebChart,
    k: &Region,
    axes: &[usize],
    spec: &QuadratureSpec,
) -> Result<SplitResult> {
    spec.validate()?;
    if axes.is_empty() {
        return Err(Error::Invalid("no axes to split".into()));
    }
    for (n, a) in axes.iter().enumerate() {
        w.check_axis(*a)?;
        if axes[..n].contains(a) {
            return Err(Error::Invalid(format!("axis {} listed twice", a + 1)));
        }
        if axes[..n].iter().any(|b| w.same_block(*a, *b)) {
            return Err(Error::Invalid(format!(
                "axis {} shares a foliation with an earlier axis",
                a + 1
            )));
        }
    }
    let k = k.normalized();
    let total = region_volume(w, &k, spec)?.value;
    let mut cuts = Vec::with_capacity(axes.len());
    for &axis in axes {
        let (lo, hi) = (k.lo(axis), k.hi(axis));
        let g = |c: f64| -> Result<(f64, f64)> {
            let below = if c <= lo {
                0.0
            } else {
                region_volume(w, &sub_box(&k, &[(axis, lo, c)])?, spec)?.value
            };
            Ok((below - 0.5 * total, face_integral(w, &k, axis, c, spec)?))
        };
        let root = newton_bracketed(
            g,
            lo,
            hi,
            0.5 * (lo + hi),
            SPLIT_TOL_FACTOR * spec.abs_tol * total.abs().max(1.0),
            1e-15 * (hi - lo),
            200,
        )
        .map_err(|e| Error::Root(format!("cut along axis {}: {e}", axis + 1)))?;
        cuts.push(root.x);
    }
    let mut cell_volumes = Vec::with_capacity(1 << axes.len());
    for cell in 0..(1usize << axes.len()) {
        let bounds: Vec<(usize, f64, f64)> = axes
            .iter()
            .enumerate()
            .map(|(n, &a)| {
                if cell >> n & 1 == 1 {
                    (a, cuts[n], k.hi(a))
                } else {
                    (a, k.lo(a), cuts[n])
                }
            })
            .collect();
        cell_volumes.push(region_volume(w, &sub_box(&k, &bounds)?, spec)?.value);
    }
    let max = cell_volumes.iter().cloned().fold(f64::MIN, f64::max);
    let min = cell_volumes.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max - min;
    Ok(SplitResult {
        cuts,
        cell_volumes,
        spread,
        equal: spread <= SPLIT_TOL_FACTOR * spec.abs_tol * total.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(h: &str) -> WebChart {
        WebChart::parse(
            &["x", "y"],
            &[1, 1],
            h,
            Region::cube(&[0.0; 2], 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn flat_quadrants() {
        let k = Region::cube(&[0.0; 2], 1.0).unwrap();
        let v = subdivision_volumes(
            &chart("1"),
            &k,
            &[0.0, 0.0],
            0,
            1,
            &QuadratureSpec::default(),
        )
        .unwrap();
        for x in [v.a, v.b, v.c, v.d] {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bilinear_quadrants() {
        let s: f64 = 0.3;
        let k = Region::cube(&[0.0; 2], s).unwrap();
        let v = subdivision_volumes(
            &chart("1 + x*y"),
            &k,
            &[0.0, 0.0],
            0,
            1,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let q = s.powi(4) / 4.0;
        assert!((v.b - (s * s + q)).abs() < 1e-14 && (v.d - v.b).abs() < 1e-14);
        assert!((v.a - (s * s - q)).abs() < 1e-14 && (v.c - v.a).abs() < 1e-14);
        assert!((v.a + v.b + v.c + v.d - 4.0 * s * s).abs() < 1e-14);
    }

    #[test]
    fn product_condition_signs() {
        let spec = QuadratureSpec::default();
        let k = Region::cube(&[0.0; 2], 0.2).unwrap();
        let r = check_product_condition(&chart("1"), &k, &[0.0, 0.0], 0, 1, &spec).unwrap();
        assert!(r.consistent && r.kappa == 0.0);
        let r = check_product_condition(&chart("1 + x*y"), &k, &[0.0, 0.0], 0, 1, &spec).unwrap();
        assert!(r.consistent && r.bd_minus_ac > 0.0 && r.kappa == 1.0);
        let r = check_product_condition(&chart("1 - x*y"), &k, &[0.0, 0.0], 0, 1, &spec).unwrap();
        assert!(r.consistent && r.bd_minus_ac < 0.0 && r.kappa == -1.0);
    }

    #[test]
    fn point_on_boundary_rejected() {
        let k = Region::cube(&[0.0; 2], 0.2).unwrap();
        let r = subdivision_volumes(
            &chart("1"),
            &k,
            &[0.2, 0.0],
            0,
            1,
            &QuadratureSpec::default(),
        );
        assert!(matches!(r, Err(Error::Invalid(_))));
    }

    #[test]
    fn splits() {
        let spec = QuadratureSpec::default();
        let unit = Region::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let s = equal_split(&chart("1"), &unit, &[0, 1], &spec).unwrap();
        assert!(s.equal);
        assert!((s.cuts[0] - 0.5).abs() < 1e-12 && (s.cuts[1] - 0.5).abs() < 1e-12);
        assert!(s.cell_volumes.iter().all(|v| (v - 0.25).abs() < 1e-12));

        let s = equal_split(&chart("1 + x"), &unit, &[0], &spec).unwrap();
        assert!((s.cuts[0] - (2.5f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(s.equal);

        let k = Region::cube(&[0.0; 2], 0.3).unwrap();
        let s = equal_split(&chart("1 + x*y"), &k, &[0, 1], &spec).unwrap();
        assert!(!s.equal);
        assert!((s.spread - 2.0 * 0.3f64.powi(4) / 4.0).abs() < 1e-12);
    }
}
