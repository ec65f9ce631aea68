use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_divweb");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn report(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| {
            panic!(
                "stdout is not JSON ({e}):\n{}\n{}",
                self.stdout, self.stderr
            )
        })
    }
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("DIVWEB_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn divweb");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

/// Runs and checks the exit code, then validates the report.
fn ok(args: &[&str], code: i32) -> Value {
    let r = run(args);
    assert_eq!(r.code, code, "{args:?}\nstderr: {}", r.stderr);
    let rep = r.report();
    assert_schema("report", &rep);
    rep
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema(name: &str, doc: &Value) {
    let v = jsonschema::validator_for(&schema(name)).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} schema violations: {errors:?}");
}

fn write(dir: &TempDir, name: &str, doc: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(doc).unwrap()).unwrap();
    p
}

fn planar(density: &str, half: f64) -> Value {
    json!({
        "schema_version": 1,
        "variables": ["x", "y"],
        "blocks": [[1], [2]],
        "density": density,
        "domain": { "min": [-half, -half], "max": [half, half] },
    })
}

fn spec(dir: &TempDir, name: &str, doc: Value) -> String {
    assert_schema("webspec", &doc);
    write(dir, name, &doc).to_str().unwrap().to_owned()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// numbers in every `points="…"` attribute
fn polylines(svg: &str) -> Vec<Vec<[f64; 2]>> {
    svg.split("points=\"")
        .skip(1)
        .map(|s| {
            s[..s.find('"').unwrap()]
                .split_whitespace()
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    [x.parse().unwrap(), y.parse().unwrap()]
                })
                .collect()
        })
        .collect()
}

#[test]
fn curvature_of_bilinear_density_at_origin() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    let r = ok(&["curvature", &s, "--at", "0", "0"], 0);
    assert_eq!(r["command"], "curvature");
    let t = &r["results"]["at"][0]["tensor"];
    assert!(close(f(&t[0][1]), 1.0, 1e-12));
    assert!(close(f(&t[1][0]), 1.0, 1e-12));
    let e = &r["results"]["entries"][0];
    assert_eq!(e["verdict"]["kind"], "nonzero");
    assert_eq!(e["expr"], "1 / (1 + x * y)^2");
}

#[test]
fn curvature_of_constant_density_is_zero() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "one.json", planar("1", 0.5));
    let r = ok(&["curvature", &s, "--at", "0.1", "0.2", "-0.3", "0.4"], 0);
    for e in r["results"]["entries"].as_array().unwrap() {
        assert_eq!(e["verdict"]["kind"], "symbolic_zero");
        assert_eq!(e["expr"], "0");
    }
    for at in r["results"]["at"].as_array().unwrap() {
        for row in at["tensor"].as_array().unwrap() {
            assert!(row.as_array().unwrap().iter().all(|v| f(v) == 0.0));
        }
    }
}

#[test]
fn curvature_of_lemaitre_chart() {
    let d = TempDir::new().unwrap();
    let s = spec(
        &d,
        "lem.json",
        json!({ "spacetime": { "name": "lemaitre", "params": { "m": 1 } } }),
    );
    let r = ok(&["curvature", &s, "--at", "0", "2", "1.5708", "0"], 0);
    let t = &r["results"]["at"][0]["tensor"];
    // sqrt(2m) (R - sqrt(2m) T)^-2 at T = 0, R = 2
    let want = 2f64.sqrt() / 4.0;
    assert!(close(f(&t[0][1]), want, 1e-9), "{}", t[0][1]);
    assert!(close(want, 0.353553, 1e-6));
    assert!(r["results"]["metric"].is_object());
}

#[test]
fn curvature_grid_csv_and_output_file() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    let csv = d.path().join("k.csv");
    let out = d.path().join("report.json");
    let r = run(&[
        "curvature",
        &s,
        "--grid",
        "3",
        "--csv",
        csv.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_schema("report", &rep);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[0].starts_with("x,y"));
    // no temporaries left behind
    let names: Vec<String> = std::fs::read_dir(d.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
}

#[test]
fn trivial_verdicts_and_exit_codes() {
    let d = TempDir::new().unwrap();
    let sch = spec(
        &d,
        "sch.json",
        json!({ "spacetime": { "name": "schwarzschild_radial", "params": { "m": 1 } } }),
    );
    let r = ok(&["trivial", &sch], 0);
    assert_eq!(r["results"]["trivial"], true);
    assert_eq!(r["results"]["symbolic"], true);

    let lem = spec(
        &d,
        "lem.json",
        json!({ "spacetime": { "name": "lemaitre", "params": { "m": 1 } } }),
    );
    let r = ok(&["trivial", &lem], 1);
    assert_eq!(r["results"]["trivial"], false);
    assert!(r["results"]["witness"].is_object() || r["results"]["witness"].is_array());

    let prod = spec(&d, "prod.json", planar("exp(x)*(2 + sin(y))", 0.5));
    let r = ok(&["trivial", &prod, "--grid", "3"], 0);
    assert_eq!(r["results"]["trivial"], true);
    let m = &r["results"]["trivializing_map"];
    assert!(f(&m["max_rel_jacobian_mismatch"]) < 1e-8, "{m}");
}

#[test]
fn holonomy_matches_closed_form_loop() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    let r = ok(
        &[
            "holonomy", &s, "--anchor", "0", "0", "--axes", "1", "2", "--point", "0.2", "0.3",
        ],
        0,
    );
    let l = &r["results"]["loop"];
    assert!(f(&l["closed_form"]["max_abs_error"]) < 1e-8);
    // leading term 2 kappa x^2 y in the first coordinate
    let defect = l["defect"].as_array().unwrap();
    assert!(f(&defect[0]) > 0.0);
    assert_eq!(l["orbit"].as_array().unwrap().len(), 5);
}

#[test]
fn holonomy_of_constant_density_closes() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "one.json", planar("1", 0.5));
    let r = ok(&["holonomy", &s, "--point", "0.2", "0.3"], 0);
    for v in r["results"]["loop"]["defect"].as_array().unwrap() {
        assert!(f(v).abs() < 1e-10);
    }
    assert!(r["results"]["loop"].get("closed_form").is_none());
}

#[test]
fn holonomy_fit_recovers_curvature() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    let r = ok(
        &[
            "holonomy",
            &s,
            "--fit-scales",
            "0.1",
            "0.05",
            "0.025",
            "0.0125",
            "--taylor",
        ],
        0,
    );
    let fit = &r["results"]["fit"];
    assert!(f(&fit["relative_error"]) < 0.02, "{fit}");
    assert!(close(f(&fit["kappa"]), 1.0, 1e-12));
    assert!(f(&r["results"]["taylor"]["max_rel_error"]) < 0.02);
}

fn tensor_file(d: &TempDir, half: f64, a12: &str) -> String {
    let doc = json!({
        "schema_version": 1,
        "variables": ["x", "y"],
        "blocks": [[1], [2]],
        "domain": { "min": [-half, -half], "max": [half, half] },
        "tensor": [["0", a12], [a12, "0"]],
    });
    assert_schema("tensor", &doc);
    write(d, "tensor.json", &doc).to_str().unwrap().to_owned()
}

fn boundary_file(d: &TempDir, exprs: &[&str]) -> String {
    let doc = json!({ "schema_version": 1, "boundary": exprs });
    assert_schema("boundary", &doc);
    write(d, "boundary.json", &doc).to_str().unwrap().to_owned()
}

#[test]
fn reconstruct_zero_tensor_gives_constant() {
    let d = TempDir::new().unwrap();
    let t = tensor_file(&d, 1.0, "0");
    let b = boundary_file(&d, &["1", "1"]);
    let r = ok(&["reconstruct", &t, &b, "--grid", "9"], 0);
    for row in r["results"]["values"]["rows"].as_array().unwrap() {
        assert!(close(f(&row[2]), 1.0, 1e-12));
    }
}

#[test]
fn reconstruct_prescribed_tensor_examples() {
    let d = TempDir::new().unwrap();
    // 1 + x vanishes at -1, so the separable case uses a smaller box
    for (half, bd, want) in [
        (1.0, ["1", "1"], "exp(x^2*y^2/4)"),
        (0.9, ["1 + x", "1 + y"], "(1 + x)*(1 + y)*exp(x^2*y^2/4)"),
    ] {
        let t = tensor_file(&d, half, "x*y");
        let b = boundary_file(&d, &bd);
        let reference = spec(&d, "ref.json", planar(want, half));
        let csv = d.path().join("h.csv");
        let r = ok(
            &[
                "reconstruct",
                &t,
                &b,
                "--grid",
                "33",
                "--reference",
                &reference,
                "--csv",
                csv.to_str().unwrap(),
            ],
            0,
        );
        let e = f(&r["results"]["reference"]["max_rel_error"]);
        assert!(e < 1e-6, "{want}: {e}");
        assert_eq!(
            std::fs::read_to_string(&csv).unwrap().lines().count(),
            1 + 33 * 33
        );
    }
}

#[test]
fn export_reconstruct_round_trip() {
    let d = TempDir::new().unwrap();
    let cases = [
        planar("1 + x*y", 0.5),
        json!({
            "variables": ["x", "y", "z"],
            "blocks": [[1], [2], [3]],
            "density": "exp(x*y + y*z)",
            "domain": { "min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0.5] },
        }),
        planar("(1 + x)*(1 + y)*exp(x^2*y^2/4)", 0.5),
    ];
    for (n, doc) in cases.into_iter().enumerate() {
        let s = spec(&d, &format!("h{n}.json"), doc);
        let t = d.path().join(format!("t{n}.json"));
        let b = d.path().join(format!("b{n}.json"));
        let (t, b) = (t.to_str().unwrap(), b.to_str().unwrap());
        ok(
            &[
                "curvature",
                &s,
                "--export-tensor",
                t,
                "--export-boundary",
                b,
            ],
            0,
        );
        for (name, path) in [("tensor", t), ("boundary", b)] {
            let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
            assert_schema(name, &doc);
        }
        let mut errs = Vec::new();
        for rule in ["smallest", "largest"] {
            let r = ok(
                &[
                    "reconstruct",
                    t,
                    b,
                    "--grid",
                    "9",
                    "--rule",
                    rule,
                    "--reference",
                    &s,
                ],
                0,
            );
            errs.push(f(&r["results"]["reference"]["max_rel_error"]));
        }
        assert!(errs.iter().all(|e| *e < 1e-6), "case {n}: {errs:?}");
    }
}

#[test]
fn inadmissible_tensor_is_a_negative_verdict() {
    let d = TempDir::new().unwrap();
    let doc = json!({
        "schema_version": 1,
        "variables": ["x", "y"],
        "blocks": [[1], [2]],
        "domain": { "min": [-0.5, -0.5], "max": [0.5, 0.5] },
        "tensor": [["x", "1"], ["1", "0"]],
    });
    let t = write(&d, "bad.json", &doc);
    let b = boundary_file(&d, &["1", "1"]);
    let r = ok(&["reconstruct", t.to_str().unwrap(), &b], 1);
    let a = &r["results"]["admissibility"];
    assert_eq!(a["admissible"], false);
    assert!(a["violation"]["description"].is_string());
}

#[test]
fn planar_invariant_examples() {
    let d = TempDir::new().unwrap();
    let cases = [
        ("1", 0.0, 0.0, false),
        ("1 + x*y", 1.0, 0.0, false),
        ("exp(x*y + x^2*y/2 + x*y^2/2)", 1.0, 1.0, true),
    ];
    for (h, kappa0, a, generic) in cases {
        let s = spec(&d, "p.json", planar(h, 0.5));
        let r = ok(&["invariants", &s, "--at", "0", "0"], 0);
        let at = &r["results"]["at"][0];
        assert!(close(f(&at["kappa0"]), kappa0, 1e-10), "{h}: {at}");
        assert!(close(f(&at["a"]), a, 1e-10), "{h}: {at}");
        assert_eq!(at["generic"], generic, "{h}");
    }
}

#[test]
fn normalize_drives_cross_to_one() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "sep.json", planar("(1 + x)*(1 + y)", 0.5));
    let r = ok(&["normalize", &s], 0);
    assert!(f(&r["results"]["cross_deviation"]["max"]) <= 1e-9);
}

#[test]
fn volumes_product_condition_and_split() {
    let d = TempDir::new().unwrap();
    for (h, sign) in [("1 + x*y", 1.0), ("1 - x*y", -1.0)] {
        let s = spec(&d, "v.json", planar(h, 0.5));
        let r = ok(
            &[
                "volumes", &s, "--min", "-0.14", "-0.14", "--max", "0.14", "0.14", "--at", "0.03",
                "0.05",
            ],
            0,
        );
        let p = &r["results"]["product"];
        assert_eq!(f(&p["bd_minus_ac"]).signum(), sign, "{h}: {p}");
        assert_eq!(p["consistent"], true);
    }
    let s = spec(&d, "one.json", planar("1", 0.5));
    let r = ok(
        &["volumes", &s, "--at", "0.1", "0.2", "--split", "1", "2"],
        0,
    );
    assert!(f(&r["results"]["product"]["bd_minus_ac"]).abs() <= 1e-12);
    assert_eq!(r["results"]["split"]["equal"], true);
}

#[test]
fn spacetime_command_reports_slicing() {
    // a report, not a verdict: exit 0 either way
    let r = ok(
        &[
            "spacetime",
            "lemaitre",
            "--param",
            "m=1",
            "--at",
            "0",
            "2",
            "1.5708",
            "0",
        ],
        0,
    );
    let res = &r["results"];
    assert_eq!(res["trivial"], false);
    assert_eq!(res["geodesic_slicing"], true);
    let e = &res["at"][0]["entries"][0];
    assert!(close(f(&e["value"]), 2f64.sqrt() / 4.0, 1e-9));
    let r = ok(&["spacetime", "schwarzschild_radial", "--param", "m=1"], 0);
    assert_eq!(r["results"]["trivial"], true);
}

#[test]
fn plot_polar_geodesics_are_spirals() {
    let d = TempDir::new().unwrap();
    let s = spec(
        &d,
        "polar.json",
        json!({
            "variables": ["r", "phi"],
            "blocks": [[1], [2]],
            "density": "r",
            "domain": { "min": [0.2, -3.1], "max": [3, 3.1] },
        }),
    );
    let svg = d.path().join("g.svg");
    let r = ok(
        &[
            "plot",
            &s,
            "--what",
            "geodesics",
            "--embed",
            "polar",
            "--start",
            "1",
            "0.5",
            "--svg",
            svg.to_str().unwrap(),
        ],
        0,
    );
    assert_eq!(r["results"]["polylines"], 8);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    let lines = polylines(&text);
    assert_eq!(lines.len(), 8);
    // rays with an angular component bend: some point is off the chord
    let bent = lines.iter().filter(|l| {
        let (a, b) = (l[0], l[l.len() - 1]);
        let n = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        l.iter().any(|p| {
            ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])).abs() / n > 2.0
        })
    });
    assert!(bent.count() >= 6);
}

#[test]
fn plot_trivial_leaves_are_grid_lines() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "one.json", planar("1", 0.5));
    let svg = d.path().join("l.svg");
    ok(
        &[
            "plot",
            &s,
            "--what",
            "leaves",
            "--lines",
            "5",
            "--svg",
            svg.to_str().unwrap(),
        ],
        0,
    );
    let lines = polylines(&std::fs::read_to_string(&svg).unwrap());
    assert_eq!(lines.len(), 10);
    for l in &lines {
        let vertical = l.iter().all(|p| p[0] == l[0][0]);
        let horizontal = l.iter().all(|p| p[1] == l[0][1]);
        assert!(vertical ^ horizontal);
    }
}

#[test]
fn plot_orbit_is_an_open_quadrilateral() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    let svg = d.path().join("o.svg");
    let r = ok(
        &[
            "plot",
            &s,
            "--what",
            "orbit",
            "--point",
            "0.2",
            "0.3",
            "--svg",
            svg.to_str().unwrap(),
        ],
        0,
    );
    assert_eq!(r["results"]["orbit"].as_array().unwrap().len(), 5);
    let lines = polylines(&std::fs::read_to_string(&svg).unwrap());
    let orbit = &lines[0];
    assert_eq!(orbit.len(), 4 * 20 + 1);
    let (a, b) = (orbit[0], orbit[orbit.len() - 1]);
    assert!((a[0] - b[0]).abs() + (a[1] - b[1]).abs() > 0.01);
}

#[test]
fn input_errors_exit_2() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    let missing = d.path().join("missing.json");
    let garbage = d.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let mut unknown = planar("1", 0.5);
    unknown["colour"] = json!("red");
    let unknown = write(&d, "unknown.json", &unknown);
    let mut version = planar("1", 0.5);
    version["schema_version"] = json!(2);
    let version = write(&d, "version.json", &version);
    let mut blocks = planar("1", 0.5);
    blocks["blocks"] = json!([[2], [1]]);
    let blocks = write(&d, "blocks.json", &blocks);
    let syntax = write(&d, "syntax.json", &planar("1 + * x", 0.5));
    let negative = write(&d, "neg.json", &planar("x*y - 1", 0.5));
    for args in [
        vec!["curvature", missing.to_str().unwrap()],
        vec!["curvature", garbage.to_str().unwrap()],
        vec!["curvature", unknown.to_str().unwrap()],
        vec!["curvature", version.to_str().unwrap()],
        vec!["curvature", blocks.to_str().unwrap()],
        vec!["curvature", syntax.to_str().unwrap()],
        vec!["curvature", negative.to_str().unwrap()],
        vec!["curvature", &s, "--at", "5", "5"],
        vec!["curvature", &s, "--at", "0"],
        vec!["holonomy", &s, "--axes", "1", "1", "--point", "0.1", "0.1"],
        vec!["spacetime", "kerr"],
        vec!["nonsense"],
    ] {
        let r = run(&args);
        assert_eq!(
            r.code, 2,
            "{args:?}\nstdout: {}\nstderr: {}",
            r.stdout, r.stderr
        );
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn math_domain_errors_exit_3() {
    let d = TempDir::new().unwrap();
    for h in ["log(x)", "sqrt(x)"] {
        let s = spec(&d, "dom.json", planar(h, 0.5));
        let r = run(&["curvature", &s]);
        assert_eq!(r.code, 3, "{h}: {}", r.stderr);
        assert!(r.stderr.contains("domain error"));
    }
}

#[test]
fn tolerance_precedence() {
    let d = TempDir::new().unwrap();
    let mut doc = planar("1 + x*y", 0.5);
    let s = spec(&d, "bil.json", doc.clone());
    let tol = |r: &Run| r.report()["tolerances"].clone();

    let base = tol(&run(&["curvature", &s]));
    assert_eq!(f(&base["zero"]), 1e-9);
    assert_eq!(f(&base["quadrature"]), 1e-12);

    let env = tol(&run_env(&["curvature", &s], &[("DIVWEB_TOL", "1e-6")]));
    assert_eq!(f(&env["zero"]), 1e-6);

    doc["tolerances"] = json!({ "zero": 1e-7, "samples": 9 });
    let s2 = spec(&d, "bil2.json", doc);
    let file = tol(&run_env(&["curvature", &s2], &[("DIVWEB_TOL", "1e-6")]));
    assert_eq!(f(&file["zero"]), 1e-7);
    assert_eq!(file["samples"], 9);

    let flag = tol(&run_env(
        &["curvature", &s2, "--tol", "1e-5", "--quad-tol", "1e-10"],
        &[("DIVWEB_TOL", "1e-6")],
    ));
    assert_eq!(f(&flag["zero"]), 1e-5);
    assert_eq!(f(&flag["quadrature"]), 1e-10);
    assert_eq!(flag["samples"], 9);

    let bad = run_env(&["curvature", &s], &[("DIVWEB_TOL", "tight")]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("DIVWEB_TOL"));
}

#[test]
fn output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let s = spec(&d, "bil.json", planar("1 + x*y", 0.5));
    for args in [
        vec!["curvature", s.as_str(), "--grid", "4"],
        vec![
            "holonomy",
            s.as_str(),
            "--point",
            "0.2",
            "0.3",
            "--fit-scales",
            "0.1",
            "0.05",
        ],
        vec!["volumes", s.as_str(), "--at", "0.1", "0.1", "--split", "1"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn shipped_specs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let p = path.to_str().unwrap();
        if doc.get("tensor").is_some() {
            assert_schema("tensor", &doc);
            let b = dir.join("unit-boundary.json");
            ok(&["reconstruct", p, b.to_str().unwrap(), "--grid", "5"], 0);
        } else if doc.get("boundary").is_some() {
            assert_schema("boundary", &doc);
        } else {
            assert_schema("webspec", &doc);
            ok(&["curvature", p], 0);
        }
        n += 1;
    }
    assert!(n >= 8);
}
