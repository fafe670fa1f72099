use std::process::{Command, Output};

fn walkzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkzeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

/// Error output must be a single JSON line.
fn error_json(o: &Output) -> serde_json::Value {
    let s = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(s.trim_end().lines().count(), 1, "stderr: {s}");
    serde_json::from_str(s.trim_end()).unwrap()
}

#[test]
fn logzeta_rw_line_matches_closed_form() {
    let o = walkzeta(&["logzeta", "--model", "rw", "--d", "1", "--u", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "model,d,N|inf,u,value,diag_nodes,diag_err,closed_form");
    let row = lines.next().unwrap();
    let (v, cf) = (field(row, 4), field(row, 7));
    assert!((v + 0.06933).abs() < 1e-5);
    assert!((v - cf).abs() < 1e-8);
}

#[test]
fn correspond_hadamard() {
    let o = walkzeta(&["correspond", "--model", "qw-m", "--xi", "0.7853981634", "--u", "-0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(field(row, 5) < 1e-8);
}

#[test]
fn zeta_at_zero_is_one() {
    let o = walkzeta(&["zeta", "--model", "rw", "--d", "1", "--N", "2", "--u", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "model,d,N|inf,u,value,diag_nodes,diag_err");
    assert_eq!(field(text.lines().nth(1).unwrap(), 4), 1.0);
}

#[test]
fn u_range_expands() {
    let o = walkzeta(&["zeta", "--model", "rw", "--d", "2", "--N", "3", "--u", "-0.5:0.5:5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn invalid_config_exits_2() {
    for args in [
        vec!["zeta", "--bogus"],
        vec!["logzeta", "--model", "rw", "--u", "abc"],
        vec!["logzeta", "--model", "qw-m", "--u", "-0.1"],
        vec!["zeta", "--model", "rw", "--u", "0.1"],
    ] {
        let o = walkzeta(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(error_json(&o)["error"], "config");
    }
}

#[test]
fn domain_error_exits_3() {
    let o = walkzeta(&["logzeta", "--model", "qw-m", "--xi", "0.7", "--u", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"], "domain");
    let o = walkzeta(&["newton", "--model", "qw-f", "--xi", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"], "degenerate");
}

#[test]
fn accuracy_error_exits_4() {
    let o = walkzeta(&["logzeta", "--model", "rw", "--d", "1", "--u", "0.5", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(4));
    let e = error_json(&o);
    assert_eq!(e["error"], "accuracy");
    assert!(e["nodes"].as_u64().unwrap() > 0);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ronkin", "--model", "rw", "--d", "2", "--u", "0.9", "--resolution", "9"];
    let mut files = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let path = dir.path().join(format!("r{i}.csv"));
        let o = Command::new(env!("CARGO_BIN_EXE_walkzeta"))
            .args(args)
            .args(["--out", path.to_str().unwrap()])
            .env("RZ_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[1], files[2]);
    assert_eq!(String::from_utf8_lossy(&files[0]).lines().count(), 82);
}

#[test]
fn bad_thread_count_is_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_walkzeta"))
        .args(["zeta", "--N", "2", "--u", "0"])
        .env("RZ_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn custom_coin_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coin.json");
    std::fs::write(&path, walkzeta::walk::rw_coin(1).unwrap().to_json()).unwrap();
    let custom = walkzeta(&[
        "zeta", "--model", "custom-coin-file", "--file", path.to_str().unwrap(), "--N", "4", "--u", "0.3",
    ]);
    let builtin = walkzeta(&["zeta", "--model", "rw", "--d", "1", "--N", "4", "--u", "0.3"]);
    assert!(custom.status.success());
    let a = stdout(&custom);
    let b = stdout(&builtin);
    assert_eq!(field(a.lines().nth(1).unwrap(), 4), field(b.lines().nth(1).unwrap(), 4));
}

#[test]
fn custom_laurent_file_newton() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let p = walkzeta::ronkin::p_rw(2, 0.5).unwrap();
    std::fs::write(&path, p.to_json()).unwrap();
    let o = walkzeta(&[
        "newton", "--model", "custom-laurent-file", "--file", path.to_str().unwrap(), "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn amoeba_report_and_svg() {
    let o = walkzeta(&["amoeba", "--model", "rw", "--d", "2", "--u", "0.9", "--resolution", "120", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 5);
    assert_eq!(v["fpt"]["within"], true);
    let o = walkzeta(&["amoeba", "--model", "rw", "--d", "2", "--u", "0.9", "--resolution", "60", "--format", "svg"]);
    assert!(stdout(&o).starts_with("<svg"));
    let o = walkzeta(&["amoeba", "--model", "rw", "--d", "2", "--u", "0.9", "--resolution", "8"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "x,y");
    assert!(text.lines().count() > 8);
}

#[test]
fn tropical_json_and_svg() {
    let o = walkzeta(&["tropical", "--model", "rw", "--d", "2", "--format", "json", "--resolution", "20"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["duality"]["passed"], true);
    assert_eq!(v["complex"]["cones"].as_array().unwrap().len(), 4);
    let o = walkzeta(&["tropical", "--model", "rw", "--d", "2", "--format", "svg"]);
    assert!(stdout(&o).starts_with("<svg"));
    let o = walkzeta(&["tropical", "--model", "rw", "--d", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cr_table_hadamard() {
    let o = walkzeta(&["cr", "--model", "qw-m", "--xi", "0.7853981633974483", "--r-max", "4", "--N", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "r,finite,limit,return_trace");
    let row2 = text.lines().nth(2).unwrap();
    for i in 1..4 {
        assert!((field(row2, i) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn simulate_dumps() {
    let o = walkzeta(&["simulate", "--model", "rw", "--d", "1", "--steps", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "site,value");
    let total: f64 = text.lines().skip(1).map(|l| field(l, 1)).sum();
    assert!((total - 1.0).abs() < 1e-14);
    let o = walkzeta(&["simulate", "--model", "qw-f", "--xi", "0.5", "--steps", "2", "--dump", "state", "--N", "5"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "site,component_index,re,im");
    assert_eq!(text.lines().count(), 1 + 5 * 2);
    let o = walkzeta(&["simulate", "--model", "rw", "--steps", "21"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let o = walkzeta(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.contains(",PASS,")));
    assert_eq!(text.lines().count(), 1 + walkzeta::verify::check_ids().len());
}
