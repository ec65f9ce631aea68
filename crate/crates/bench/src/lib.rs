//! Shared fixtures for the benchmarks.

use divweb::{Region, WebChart};

/// Planar chart on `[-half, half]²`.
pub fn planar(h: &str, half: f64) -> WebChart {
    WebChart::parse(
        &["x", "y"],
        &[1, 1],
        h,
        Region::cube(&[0.0; 2], half).unwrap(),
    )
    .unwrap()
}

/// Three singleton blocks on `[-half, half]³`.
pub fn cube3(h: &str, half: f64) -> WebChart {
    WebChart::parse(
        &["x", "y", "z"],
        &[1, 1, 1],
        h,
        Region::cube(&[0.0; 3], half).unwrap(),
    )
    .unwrap()
}

/// The polar chart `h = r`.
pub fn polar() -> WebChart {
    let d = Region::new(vec![0.2, -3.0], vec![3.0, 3.0]).unwrap();
    WebChart::parse(&["r", "phi"], &[1, 1], "r", d).unwrap()
}
