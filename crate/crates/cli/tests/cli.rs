use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capacitary"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn oracle_values() {
    let o = run(&["oracle", "--shape", "sphere", "1", "--dim", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let pi = std::f64::consts::PI;
    assert!((f(&v["capacity"]) - 4.0 * pi).abs() < 1e-14);
    assert_eq!(f(&v["f1"]), 0.0);
    assert!((f(&v["f2_lhs"]) - 2.0 * pi).abs() < 1e-14);
    assert!((f(&v["f2_rhs"]) - 2.0 * pi).abs() < 1e-14);
    assert!((f(&v["lb_product"]) - 8.0 * pi * pi).abs() < 1e-12);
    let o = run(&["oracle", "--dim", "4", "--shape", "sphere", "1"]);
    assert!((f(&json(&o)["capacity"]) - 4.0 * pi * pi).abs() < 1e-13);
    let o = run(&["oracle", "--shape", "ellipsoid", "2", "1", "1"]);
    assert!((f(&json(&o)["capacity"]) - 16.527_174_043_782_8).abs() < 1e-9);
}

#[test]
fn unsupported_shapes_exit_5() {
    assert_eq!(code(&run(&["oracle", "--shape", "torus", "1", "0.3"])), 5);
    assert_eq!(code(&run(&["oracle", "--shape", "bumpy", "1", "0.05"])), 5);
    assert_eq!(
        code(&run(&[
            "oracle",
            "--shape",
            "ellipsoid",
            "2",
            "1",
            "1",
            "--dim",
            "4"
        ])),
        5
    );
    assert_eq!(code(&run(&["capacity", "--shape", "cube", "1", "2"])), 5);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["capacity"])), 1);
    assert_eq!(code(&run(&["capacity", "--shape", "sphere", "-1", "2"])), 1);
    assert_eq!(code(&run(&["capacity", "--shape", "sphere", "1"])), 1);
    assert_eq!(
        code(&run(&[
            "capacity",
            "--shape",
            "sphere",
            "1",
            "1",
            "--quad-order",
            "5"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "capacity",
            "--shape",
            "sphere",
            "1",
            "1",
            "--far-radius",
            "2"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "verify", "--shape", "sphere", "1", "1", "--tol-f1", "-1"
        ])),
        1
    );
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn mesh_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("s.off");
    let o = run(&[
        "export",
        "--shape",
        "ellipsoid",
        "1.5",
        "1",
        "0.8",
        "2",
        "-o",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["capacity", "--mesh", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&o)["mesh"]["panels"], 320);

    let text = std::fs::read_to_string(&good).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let counts: Vec<usize> = lines[1]
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    let fixed_counts = format!("{} {} 0", counts[0], counts[1] - 1);
    lines[1] = &fixed_counts;
    lines.remove(2 + counts[0]);
    let broken = dir.path().join("broken.off");
    std::fs::write(&broken, lines.join("\n")).unwrap();
    let o = run(&["capacity", "--mesh", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("open edge"), "{}", stderr(&o));

    let garbage = dir.path().join("garbage.off");
    std::fs::write(&garbage, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n").unwrap();
    let o = run(&["capacity", "--mesh", garbage.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("non-triangular face"));
    assert_eq!(
        code(&run(&[
            "capacity",
            "--mesh",
            &dir.path().join("missing.off").display().to_string()
        ])),
        4
    );
}

#[test]
fn solver_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.off");
    // Two coincident copies of a tetrahedron give a singular system.
    let tet = "0 0 0\n1 0 0\n0 1 0\n0 0 1\n";
    let faces = "3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n3 4 6 5\n3 4 5 7\n3 4 7 6\n3 5 6 7\n";
    std::fs::write(&p, format!("OFF\n8 8 0\n{tet}{tet}{faces}")).unwrap();
    let o = run(&["capacity", "--mesh", p.to_str().unwrap()]);
    assert!(matches!(code(&o), 2 | 3), "{}", stderr(&o));
}

#[test]
fn capacity_json_and_csv() {
    let o = run(&["capacity", "--shape", "sphere", "1", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let four_pi = 4.0 * std::f64::consts::PI;
    for key in ["cap_charge", "cap_asymptotic", "cap_energy"] {
        assert!((f(&v[key]) - four_pi).abs() / four_pi < 0.01, "{key}");
    }
    assert_eq!(v["config"]["subcommand"], "capacity");
    assert_eq!(v["config"]["input"]["shape"]["kind"], "sphere");
    assert_eq!(v["config"]["quad_order"], 6);
    let o = run(&["capacity", "--shape", "sphere", "1", "2", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("panels,level,cap_charge,"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn verify_reports_and_threshold_semantics() {
    let o = run(&["verify", "--shape", "sphere", "1", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for key in [
        "f1",
        "f2_lhs",
        "f2_rhs",
        "lb_product",
        "lb_rhs",
        "newton_sup_deficit",
        "pbv_max_residual",
    ] {
        assert!(v[key].is_number(), "{key}");
    }
    assert_eq!(v["verdict"]["ball"], true);
    assert_eq!(v["mesh"]["panels"], 1280);
    assert_eq!(v["mesh"]["level"], 3);
    assert!(v["thresholds"]["newton"].is_number());

    let o = run(&["verify", "--shape", "ellipsoid", "2", "1", "1", "3"]);
    assert_eq!(code(&o), 0, "verdicts never change the exit status");
    let v = json(&o);
    assert_eq!(v["verdict_ball"], false);
    assert!(f(&v["f1"]) > 0.0);
    assert!(f(&v["lb_product"]) > 8.0 * std::f64::consts::PI.powi(2));

    let o = run(&[
        "verify",
        "--shape",
        "sphere",
        "1",
        "3",
        "--tol-newton",
        "1e-9",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict_ball"], false);
    assert_eq!(v["config"]["tol_newton"], json_num(1e-9));
}

fn json_num(x: f64) -> Value {
    serde_json::from_str(&format!("{x:.16e}")).unwrap()
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let p = dir.path().join("r.json");
            let o = run(&[
                "verify",
                "--shape",
                "bumpy",
                "1",
                "0.05",
                "2",
                "--seed",
                "11",
                "-o",
                p.to_str().unwrap(),
            ]);
            assert_eq!(code(&o), 0, "{}", stderr(&o));
            assert!(o.stdout.is_empty());
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert!(outs[0] == outs[1]);
    let a = run(&[
        "convergence",
        "--shape",
        "ellipsoid",
        "2",
        "1",
        "1",
        "--levels",
        "1-2",
        "--no-timing",
    ]);
    let b = run(&[
        "convergence",
        "--shape",
        "ellipsoid",
        "2",
        "1",
        "1",
        "--levels",
        "1-2",
        "--no-timing",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn convergence_csv_contract() {
    let o = run(&["convergence", "--shape", "sphere", "1", "--levels", "1-3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("level,panels,capacity,cap_error,f1,f2_gap,newton_deficit,wall_time_s")
    );
    let errors: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    let o = run(&["convergence", "--mesh", "x.off"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn identity_check_filters_and_faults() {
    let o = run(&["identity-check", "--dims", "3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("all checks passed"));
    let row = text
        .lines()
        .find(|l| l.trim_start().starts_with("n=10 "))
        .unwrap();
    let fields: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(&fields[..3], ["n=10", "gamma1=-9", "gamma2=-5"]);
    assert!(text.lines().filter(|l| l.starts_with("4 ")).count() == 0);
    let o = run(&["identity-check", "--dims", "3", "--inject-fault", "c"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("identity C"));
    let o = run(&["identity-check", "--dims", "3", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(code(&run(&["identity-check", "--dims", "2"])), 1);
}

#[test]
fn output_path_errors() {
    let o = run(&[
        "oracle",
        "--shape",
        "sphere",
        "1",
        "-o",
        Path::new("/nonexistent/dir/x.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}
