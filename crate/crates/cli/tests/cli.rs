use std::path::Path;
use std::process::{Command, Output};

fn hdx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdx")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn eta_dictator(dir: &Path) {
    let o = hdx(
        dir,
        &[
            "gen",
            "--kind",
            "eta-correlated",
            "--eta",
            "0.2",
            "--function",
            r#"{"kind":"dictator","coord":0,"value":1}"#,
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gen_writes_complex_and_function() {
    let dir = tempfile::tempdir().unwrap();
    eta_dictator(dir.path());
    let c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("complex.json")).unwrap()).unwrap();
    assert!(c.is_object());
    assert!(dir.path().join("fn.json").exists());
}

#[test]
fn gen_is_seeded() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let o = hdx(d, &["--seed", "7", "gen", "--kind", "perturbed-product", "--sizes", "3,3,2", "--gamma", "0.1"]);
        assert!(o.status.success());
    }
    let read = |d: &Path| std::fs::read(d.join("complex.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn certify_reports_eta() {
    let dir = tempfile::tempdir().unwrap();
    eta_dictator(dir.path());
    let v = json(&hdx(dir.path(), &["certify", "complex.json"]));
    assert!((v["epsilon"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 1);
}

#[test]
fn decompose_gives_components_by_bitmask() {
    let dir = tempfile::tempdir().unwrap();
    eta_dictator(dir.path());
    let v = json(&hdx(dir.path(), &["decompose", "complex.json", "fn.json"]));
    let get = |k: &str| v[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect::<Vec<_>>();
    let close = |a: Vec<f64>, b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
    assert!(close(get("0"), &[0.5]));
    assert!(close(get("1"), &[-0.5, 0.5]));
    assert!(close(get("2"), &[-0.1, 0.1]));
    assert!(close(get("3"), &[0.1, -0.1, 0.1, -0.1]));
}

#[test]
fn influence_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    eta_dictator(dir.path());
    let o = hdx(dir.path(), &["influence", "complex.json", "fn.json", "--degree", "1"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("S,x,I,I_trunc"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert!((first[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn global_and_walk() {
    let dir = tempfile::tempdir().unwrap();
    eta_dictator(dir.path());
    let v = json(&hdx(dir.path(), &["global", "complex.json", "fn.json", "--degree", "1"]));
    assert!((v["delta_min"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json(&hdx(dir.path(), &["walk", "complex.json", "fn.json", "--op", "noise", "--rho", "0.5"]));
    let got: Vec<f64> = v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in got.iter().zip([0.225, 0.275, 0.725, 0.775]) {
        assert!((a - b).abs() < 1e-12, "{got:?}");
    }
}

#[test]
fn check_writes_reports_and_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = hdx(dir.path(), &["--out", "r", "check", "exact-identities"]);
    assert_eq!(o.status.code(), Some(0));
    for ext in ["jsonl", "csv", "md"] {
        assert!(dir.path().join(format!("r/exact-identities.{ext}")).exists());
    }
    let o = hdx(dir.path(), &["report", "r/exact-identities.jsonl", "--format", "jsonl"]);
    assert!(o.status.success());
    assert_eq!(o.stdout, std::fs::read(dir.path().join("r/exact-identities.jsonl")).unwrap());
    let o = hdx(dir.path(), &["report", "r/exact-identities.jsonl", "--format", "csv"]);
    assert_eq!(o.stdout, std::fs::read(dir.path().join("r/exact-identities.csv")).unwrap());
}

#[test]
fn kk_on_light_product_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind":"product","sizes":[4,4,4,4],"marginals":{"type":"light","light":2,"mass":0.005}}"#;
    let f = r#"{"kind":"light-corner-set","p":0.5,"light":2}"#;
    let o = hdx(dir.path(), &["--seed", "3", "gen", "--spec", spec, "--function", f]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = hdx(dir.path(), &["kk", "complex.json", "fn.json", "--delta", "0.005"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v.as_array().unwrap().iter().all(|r| r["status"] == "PASS"));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hdx(dir.path(), &["check", "bogus"]).status.code(), Some(2));
    assert_eq!(hdx(dir.path(), &["certify", "missing.json"]).status.code(), Some(2));
}
