mod common;

use std::f64::consts::PI;

use common::*;
use divweb::measure::{check_product_condition, equal_split, holonomy_defect, reflect};
use divweb::relativity::{builtin_domain, builtin_spacetime, volume_density, web_from_metric};
use divweb::web::{
    is_locally_trivial, nonuniformity_tensor, ricci_offdiag, trivializing_map, DEFAULT_ZERO_TOL,
};
use divweb::{QuadratureSpec, Region, WebChart};

fn eval4(e: &divweb::Expr, vars: [&str; 4], x: &[f64]) -> f64 {
    e.compile(&vars).unwrap().eval(x).unwrap()
}

#[test]
fn lemaitre_curvature_in_schwarzschild_radius() {
    // with R − √(2m) T = (2/3) r^{3/2}, dR = √r dr + √(2m) dT, so
    // K_TR dT dR = K_TR √(2m) dT² + K_TR √r dT dr
    for m in [0.5, 1.0, 2.0] {
        let p = [("m", m)];
        let g = builtin_spacetime("lemaitre", &p).unwrap();
        let dom = builtin_domain("lemaitre", &p).unwrap();
        let w = web_from_metric(&g, dom.clone()).unwrap();
        let k = nonuniformity_tensor(&w).get(0, 1).clone();
        let s = (2.0 * m).sqrt();
        for x in kronecker_points(&dom, 30) {
            let r = (1.5 * (x[1] - s * x[0])).powf(2.0 / 3.0);
            let kv = eval4(&k, g.coords(), &x);
            let dt2 = kv * s;
            let dtdr = kv * r.sqrt();
            assert!((dt2 - 4.5 * m * r.powi(-3)).abs() <= 1e-10 * dt2.abs());
            assert!((dtdr - 2.25 * s * r.powf(-2.5)).abs() <= 1e-10 * dtdr.abs());
        }
    }
}

#[test]
fn lemaitre_curvature_blows_up_at_the_singularity() {
    let m = 1.0;
    let s = (2.0f64).sqrt();
    let g = builtin_spacetime("lemaitre", &[("m", m)]).unwrap();
    let w = web_from_metric(&g, builtin_domain("lemaitre", &[("m", m)]).unwrap()).unwrap();
    let k = nonuniformity_tensor(&w).get(0, 1).clone();
    let mut last = 0.0;
    for eps in [1.0, 0.1, 0.01] {
        let x = [0.2, 0.2 * s + eps, 1.0, 0.0];
        let v = eval4(&k, g.coords(), &x);
        assert!((v * eps * eps - s).abs() < 1e-9 * s, "eps {eps}: {v}");
        assert!(v > 10.0 * last);
        last = v;
    }
}

type Closed = fn(&[f64], f64) -> f64;

#[test]
fn spacetime_densities_match_closed_forms() {
    let cases: [(&str, f64, Closed); 3] = [
        ("minkowski", 0.0, |_, _| 1.0),
        ("schwarzschild_radial", 1.3, |x, _| x[1] * x[1] * x[2].sin()),
        ("lemaitre", 0.7, |x, m| {
            1.5 * (x[1] - (2.0 * m).sqrt() * x[0]) * x[2].sin()
        }),
    ];
    for (name, m, formula) in cases {
        let p: Vec<(&str, f64)> = if m > 0.0 { vec![("m", m)] } else { vec![] };
        let g = builtin_spacetime(name, &p).unwrap();
        let h = volume_density(&g);
        for x in kronecker_points(&builtin_domain(name, &p).unwrap(), 50) {
            let (got, want) = (eval4(&h, g.coords(), &x), formula(&x, m));
            assert!(
                (got - want).abs() <= 1e-12 * want.abs(),
                "{name} at {x:?}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn ricci_contraction_is_the_nonuniformity_tensor() {
    let webs = [
        planar("exp(x*y)*(1 + x^2)", 0.5),
        cube3("exp(x*y + y*z)", &[1, 1, 1], 0.5),
        cube3("(2 + x*z)*exp(x*y + y^2*z)", &[2, 1], 0.5),
        cube3("(2 + x*y*z)*exp(x + y*z)", &[1, 2], 0.5),
    ];
    for w in &webs {
        let (rc, k) = (ricci_offdiag(w), nonuniformity_tensor(w));
        for a in 0..w.dim() {
            for b in 0..w.dim() {
                let d = rc.get(a, b).clone() - k.get(a, b).clone();
                let v = w.zero_verdict(&d, 9, 1e-10).unwrap();
                assert!(v.is_zero(), "({a},{b}) of {}: {v:?}", w.density());
            }
        }
    }
}

// Five characterizations of triviality agree on every example.
#[test]
fn triviality_tests_agree() {
    let spec = QuadratureSpec::default();
    let cases = [
        ("1", true),
        ("(1 + x)*(1 + y)", true),
        ("exp(x + y^2)*(2 + cos(x))", true),
        ("1 + x*y", false),
        ("exp(x*y)", false),
        ("exp(x^2*y^2/4)", false),
    ];
    let p = [0.4, 0.3];
    let k = Region::cube(&p, 0.1).unwrap();
    for (h, trivial) in cases {
        let w = planar(h, 1.0);
        assert_eq!(
            is_locally_trivial(&w, DEFAULT_ZERO_TOL).unwrap().trivial,
            trivial,
            "{h}"
        );
        assert_eq!(trivializing_map(&w, None, &spec).is_ok(), trivial, "{h}");
        let d = holonomy_defect(&w, &p, 0, 1, &[0.5, 0.45], &spec).unwrap();
        assert_eq!(d[0].abs().max(d[1].abs()) < 1e-10, trivial, "{h}: {d:?}");
        assert_eq!(
            equal_split(&w, &k, &[0, 1], &spec).unwrap().equal,
            trivial,
            "{h}"
        );
        let r = check_product_condition(&w, &k, &p, 0, 1, &spec).unwrap();
        assert!(r.consistent, "{h}: {r:?}");
        assert_eq!(r.bd_minus_ac.abs() <= r.noise, trivial, "{h}");
    }
}

#[test]
fn polar_chart_conjugates_to_flat_reflections() {
    let spec = QuadratureSpec::default();
    let polar = WebChart::parse(
        &["r", "phi"],
        &[1, 1],
        "r",
        Region::new(vec![0.3, -PI], vec![2.5, PI]).unwrap(),
    )
    .unwrap();
    let flat = WebChart::parse(
        &["rho", "phi"],
        &[1, 1],
        "1",
        Region::new(vec![-2.0, -PI], vec![4.0, PI]).unwrap(),
    )
    .unwrap();
    let map = trivializing_map(&polar, Some(&[1.0, 0.0]), &spec).unwrap();
    let x = map.forward(&[1.4, 0.7]).unwrap();
    assert!(
        (x[0] - (1.4f64 * 1.4 - 1.0) / 2.0).abs() < 1e-13 && (x[1] - 0.7).abs() < 1e-13,
        "{x:?}"
    );
    for (p, q) in [
        ([1.0, 0.0], [1.2, 0.3]),
        ([1.2, -0.2], [0.95, 0.4]),
        ([1.1, 0.5], [1.3, 0.1]),
    ] {
        for axis in 0..2 {
            let direct = map
                .forward(&reflect(&polar, &p, axis, &q, &spec).unwrap().point)
                .unwrap();
            let (fp, fq) = (map.forward(&p).unwrap(), map.forward(&q).unwrap());
            let conj = reflect(&flat, &fp, axis, &fq, &spec).unwrap().point;
            assert!((direct[0] - conj[0]).abs() < 1e-10 && (direct[1] - conj[1]).abs() < 1e-10);
        }
    }
}
