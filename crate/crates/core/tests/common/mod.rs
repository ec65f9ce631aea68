#![allow(dead_code)]

use divweb::{Expr, Region, WebChart};
use proptest::prelude::*;

/// Random expressions in `x`, `y` that are finite and smooth on [−1, 1]².
pub fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        (-2.0..2.0f64).prop_map(Expr::num),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / (2.0 + b.sin())),
            inner.clone().prop_map(|a| -a),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.sin().exp()),
            inner.clone().prop_map(|a| (1.0 + a.clone() * a).sqrt()),
            inner.clone().prop_map(|a| (2.0 + a.cos()).log()),
            (inner, 0..4i32).prop_map(|(a, n)| a.powf(n as f64)),
        ]
    })
}

/// Fourth-order central difference of `f` at `x`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub fn planar(h: &str, half: f64) -> WebChart {
    WebChart::parse(
        &["x", "y"],
        &[1, 1],
        h,
        Region::cube(&[0.0; 2], half).unwrap(),
    )
    .unwrap()
}

pub fn cube3(h: &str, sizes: &[usize], half: f64) -> WebChart {
    WebChart::parse(
        &["x", "y", "z"],
        sizes,
        h,
        Region::cube(&[0.0; 3], half).unwrap(),
    )
    .unwrap()
}

/// Closed-form reflection of `(x, y)` across `{x = 0}` for `h = 1 + xy`.
pub fn bilinear_reflection(x: f64, y: f64) -> f64 {
    ((4.0 * (1.0 - x * y) - x * x * y * y).sqrt() - 2.0) / y
}

/// Closed-form loop `r_y ∘ r_x ∘ r_y ∘ r_x` at the origin for `h = 1 + xy`.
pub fn bilinear_loop(x: f64, y: f64) -> [f64; 2] {
    let psi = (4.0 * (1.0 - x * y) - x * x * y * y).sqrt() - 2.0;
    [psi * psi / (x * y * y), x * x * y * y * y / (psi * psi)]
}

/// Deterministic low-discrepancy points in `region` (Kronecker sequence).
pub fn kronecker_points(region: &Region, n: usize) -> Vec<Vec<f64>> {
    const ALPHA: [f64; 4] = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_3,
        0.430_159_709_001_946_7,
        0.341_163_901_914_009_7,
    ];
    let r = region.normalized();
    (1..=n)
        .map(|i| {
            (0..r.dim())
                .map(|k| {
                    let t = (0.5 + i as f64 * ALPHA[k % 4]).fract();
                    r.lo(k) + t * (r.hi(k) - r.lo(k))
                })
                .collect()
        })
        .collect()
}
