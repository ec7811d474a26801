use std::fs;

use cddprof::cli::run_with;

fn call(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("cddprof").chain(args.iter().copied()).map(String::from).collect();
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run_with(&argv, &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

#[test]
fn curve_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "json", "svg"] {
        let a = dir.path().join(format!("a.{fmt}"));
        let b = dir.path().join(format!("b.{fmt}"));
        for p in [&a, &b] {
            let args = ["gl", "--rho", "1", "--N", "-2", "--D", "inf", "--v-grid", "17", "--format", fmt, "--out", p.to_str().unwrap()];
            assert_eq!(call(&args).0, 0);
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
    let csv = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 18);
    assert!(csv.starts_with("v,value\n0.000000,0.000000000000\n"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# gaussian\nrho = 1\nN = inf\nD = inf\nv = 0.25\n").unwrap();
    let (code, out, _) = call(&["gl", "--config", cfg.to_str().unwrap(), "--v", "0.5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("0.398942"), "{out}");
    let (code, out, _) = call(&["gl", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("0.3177"), "{out}");
    fs::write(&cfg, "rho 1\n").unwrap();
    assert_eq!(call(&["gl", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn unwritable_output_path() {
    let args = ["gl", "--rho", "1", "--N", "inf", "--v", "0.5", "--out", "/nonexistent-dir/x.csv"];
    assert_eq!(call(&args).0, 2);
}

#[test]
fn sturm_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.csv");
    let mut text = String::from("t,J\n");
    for i in -100..=600 {
        let t = i as f64 / 200.0;
        text += &format!("{t},{}\n", (1.0 + t).powi(-3) * (-t).exp());
    }
    fs::write(&path, text).unwrap();
    let (code, out, err) = call(&["sturm", "--rho", "0", "--N", "-2", "--H", "-4", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dominated"], true);
    assert!(v["min_residual"].as_f64().unwrap() > 1.0 / 3.0 - 1e-5);
    let (code, _, err) = call(&["sturm", "--rho", "5", "--N", "-2", "--H", "-4", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("not-cd-certified"));
}

#[test]
fn other_subcommands() {
    let (code, out, _) = call(&["density", "--H", "0", "--rho", "1", "--N", "-1", "--t", "0"]);
    assert_eq!((code, out.trim()), (0, "1"));
    let (code, out, _) = call(&["models", "--rho", "1", "--N", "-1", "--D", "inf"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"cosh\""));
    assert_eq!(call(&["models", "--rho", "1", "--N", "0.5", "--D", "2"]).0, 3);
    let (code, out, _) = call(&["poincare", "--rho", "1", "--N", "-1", "--D", "2", "--d-che-inf", "0.7071067811865476"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lichnerowicz"], 2.0);
    assert_eq!(v["diameter"], 16.0);
    let (code, out, _) = call(&["constants", "--N", "-2", "--d-che", "1", "--w1", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["stability_w1"].as_f64().unwrap() - 0.04618).abs() < 1e-4);
    let (code, out, _) = call(&["cheeger", "--rho", "0", "--N", "-2", "--D", "1", "--v-grid", "9"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = call(&["concentration", "--rho", "1", "--N", "inf", "--v-grid", "65", "--r-grid", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    let fam = r#"{"family":"cosh","k":0.7071067811865476,"exponent":-2}"#;
    let (code, out, _) = call(&["oracle", "--family", fam, "--lo", "-20", "--hi", "20", "--v", "0.3", "--grid", "4001"]);
    assert_eq!(code, 0, "{out}");
}
