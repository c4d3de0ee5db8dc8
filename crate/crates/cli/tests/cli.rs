use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cusplab")).args(args).output().expect("spawn cusplab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cusplab-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn field_info_reports_the_invariants() {
    let o = run(&["field-info", "--field-d", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["disc"], 5);
    assert_eq!(v["class_number"], 1);
    assert!((v["regulator"].as_f64().unwrap() - 0.48121182505960347).abs() < 1e-12);

    let q: serde_json::Value = serde_json::from_str(&stdout(&run(&["field-info", "--field-d", "0"]))).unwrap();
    assert_eq!(q["disc"], 1);
    assert_eq!(q["degree"], 1);

    let g: serde_json::Value = serde_json::from_str(&stdout(&run(&["field-info", "--field-d", "-1"]))).unwrap();
    assert_eq!(g["disc"], 4);
    assert_eq!(g["roots_of_unity"], 4);

    assert!(run(&["field-info", "--field-d", "6"]).status.success());
    let bad = run(&["field-info", "--field-d", "4"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("UnsupportedField"));
}

#[test]
fn eval_writes_one_csv_row() {
    let o = run(&["eval", "zeta", "--field-d", "0", "--s", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("kind,field_d,s_re,s_im,value_re,value_im,method,error_estimate,status\r\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    let v: f64 = r[0][4].parse().unwrap();
    assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
    assert_eq!(r[0][8], "ok");

    let e = run(&["eval", "eisenstein-fourier", "--field-d", "0", "--s", "2", "--z", "0.1,1.2"]);
    assert!(e.status.success());
    let d = run(&["eval", "eisenstein-direct", "--field-d", "0", "--s", "2", "--z", "0.1,1.2"]);
    let (a, b): (f64, f64) = (rows(&stdout(&e))[0][4].parse().unwrap(), rows(&stdout(&d))[0][4].parse().unwrap());
    assert!((a - b).abs() < 1e-5 * a, "{a} vs {b}");
}

#[test]
fn eval_reports_poles_in_the_status_column() {
    let o = run(&["eval", "phi", "--field-d", "0", "--s", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert!(r[0][8].starts_with("error:"), "{:?}", r[0]);
}

#[test]
fn eval_rejects_a_point_with_the_wrong_shape() {
    let o = run(&["eval", "eisenstein-fourier", "--field-d", "5", "--z", "0.1,1.2"]);
    assert!(!o.status.success());
}

#[test]
fn check_exit_codes_follow_the_tolerance() {
    let ok = run(&["check", "bessel"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    let text = stdout(&ok);
    assert!(text.starts_with("check,field_d,item,value,reference,residual,tolerance,pass\r\n"));
    assert!(rows(&text).iter().all(|r| r[7] == "true"));

    let fe = run(&["check", "functional-equation", "--field-d", "5"]);
    assert!(fe.status.success());
    let strict = run(&["check", "functional-equation", "--field-d", "5", "--tolerance", "1e-300"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(rows(&stdout(&strict)).iter().any(|r| r[7] == "false"));
}

#[test]
fn equidist_is_deterministic_and_writes_artifacts() {
    let dir = scratch_dir("equidist");
    let cfg = dir.join("config.json");
    fs::write(&cfg, r#"{"schema": 1, "field_d": 0, "equidist": {"k_min": 3, "k_max": 6}}"#).unwrap();
    let out = dir.join("run.csv");
    let a = run(&["equidist", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let first = fs::read(&out).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("k,q,m_q,m,e,nodes\r\n"));
    let r = rows(&text);
    assert_eq!(r.iter().map(|x| x[0].as_str()).collect::<Vec<_>>(), ["3", "4", "5", "6"]);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(json["ks"].as_array().unwrap().len(), 4);
    let svg = fs::read_to_string(dir.join("run.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    let b = run(&["equidist", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(b.status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn config_is_validated() {
    let dir = scratch_dir("config");
    let bad_schema = dir.join("schema.json");
    fs::write(&bad_schema, r#"{"schema": 2}"#).unwrap();
    assert!(!run(&["field-info", "--config", bad_schema.to_str().unwrap()]).status.success());
    let unknown = dir.join("unknown.json");
    fs::write(&unknown, r#"{"schema": 1, "colour": "red"}"#).unwrap();
    assert!(!run(&["field-info", "--config", unknown.to_str().unwrap()]).status.success());
    // flags override the file
    let cfg = dir.join("ok.json");
    fs::write(&cfg, r#"{"schema": 1, "field_d": 5}"#).unwrap();
    let o = run(&["field-info", "--config", cfg.to_str().unwrap(), "--field-d", "-3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["disc"], 3);
    let _ = fs::remove_dir_all(&dir);
}
