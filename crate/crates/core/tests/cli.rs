use std::process::{Command, Output};

fn ragnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ragnet"))
        .args(args)
        .env("RAGNET_THREADS", "2")
        .output()
        .expect("run ragnet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--set", "lambda=0.1", "--slots", "2e5", "--seed", "7"];
    let (a, b) = (ragnet(&args), ragnet(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("# ragnet simulate {"));
    let c = ragnet(&["simulate", "--set", "lambda=0.1", "--slots", "2e5", "--seed", "8"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(ragnet(&["region", "--set", "alpha1=1.2"]).status.code(), Some(2));
    assert_eq!(ragnet(&["region", "--set", "bogus=0.1"]).status.code(), Some(2));
    assert_eq!(ragnet(&["bounds", "--sweep", "alpha:0.3:0.6:1"]).status.code(), Some(2));
    assert_eq!(ragnet(&["bounds", "--sweep", "nope:0.3:0.6:3"]).status.code(), Some(2));
    assert_eq!(ragnet(&["bvp", "--M", "300"]).status.code(), Some(2));
    assert_eq!(ragnet(&["frobnicate"]).status.code(), Some(2));
    let bad = Command::new(env!("CARGO_BIN_EXE_ragnet"))
        .args(["region"])
        .env("RAGNET_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_3() {
    let o = ragnet(&["bvp", "--set", "s=0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn closure_grid_has_one_row_per_point() {
    let o = ragnet(&["region", "--mode", "closure", "--which", "stability", "--resolution", "2", "--alpha-resolution", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], "stability,0.0,0.0,true");
}

#[test]
fn point_membership() {
    let o = ragnet(&["region", "--set", "s=0", "--lambda1", "0.2", "--lambda2", "0.2", "--which", "stability"]);
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("stability,0.2,0.2,true,both,false,"));
    assert!(rows[0].ends_with(",positive-recurrent"));
}

#[test]
fn symmetric_params_file_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    std::fs::write(&params, r#"{"lambda":0.1,"alpha":0.5,"s":0.2,"l_minus":0.5,"l_plus":0.5}"#).unwrap();
    let out = dir.path().join("b.json");
    let o = ragnet(&[
        "bounds",
        "--params",
        params.to_str().unwrap(),
        "--sweep",
        "alpha:0.3:0.6:4",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["params"]["s"], 0.2);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0]["L_low"].as_f64().unwrap() <= rows[0]["L_up"].as_f64().unwrap());

    std::fs::write(&params, r#"{"lambda":0.1,"alpha":0.5,"s":0.2,"l_minus":0.5,"l_plus":0.5,"extra":1}"#).unwrap();
    let o = ragnet(&["bounds", "--params", params.to_str().unwrap(), "--sweep", "alpha:0.3:0.6:4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unstable_rows_have_empty_bounds() {
    let o = ragnet(&["bounds", "--sweep", "lambda:0.1:0.5:2"]);
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[1], "0.5,false,,,,");
}

#[test]
fn compare_identical_networks_differ_by_zero() {
    let o = ragnet(&["compare", "--set", "s=0", "--sweep", "lambda:0.05:0.1:2"]);
    assert_eq!(o.status.code(), Some(0));
    for row in data_rows(&stdout(&o)) {
        assert!(row.ends_with(",0.0"), "{row}");
    }
}

#[test]
fn bvp_reports_solution() {
    let o = ragnet(&["bvp", "--set", "lambda=0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solution"]["chi"], 1);
    assert_eq!(v["config"]["M"], 1024);
    assert!((v["solution"]["pi00"].as_f64().unwrap() - 0.6025880688592).abs() < 1e-9);
}

#[test]
fn dominant_simulation_reports_formula() {
    let o = ragnet(&[
        "simulate", "--set", "s=0.1", "--set", "l_plus=1", "--set", "lambda1=0.05", "--set", "lambda2=0.1",
        "--dominant", "r1", "--slots", "2e5",
    ]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("formula_p_empty2,")).unwrap();
    let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (1.0 - 0.2 / 0.3025)).abs() < 1e-12);
}

#[test]
fn split_override_sets_complement() {
    let o = ragnet(&["region", "--set", "l1_plus=0.4", "--lambda1", "0.1", "--lambda2", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(r#""l1_minus":0.6,"l1_plus":0.4"#));
}
