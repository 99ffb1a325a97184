// SPDX-License-Identifier: Apache-2.0

use std::process::{Command, Output};

fn classprime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_classprime"))
        .args(args)
        .env_remove("CLASSPRIME_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn forms_and_bad_discriminant() {
    let o = classprime(&["forms", "--disc", "-23"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "class_index,a,b,c,order\n0,1,1,6,1\n1,2,-1,3,3\n2,2,1,3,3\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("orders=3"));
    assert_eq!(classprime(&["forms", "--disc", "-5"]).status.code(), Some(2));
    assert_eq!(classprime(&["forms"]).status.code(), Some(2));
}

#[test]
fn least_primes_csv_schema() {
    let o = classprime(&["least-primes", "--disc=-23", "--x", "3,24"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(
        out,
        "class_index,a,b,c,heegner_im,least_prime,is_ramified_prime\n\
         0,1,1,6,2.39791576166,23,true\n\
         1,2,-1,3,1.19895788083,2,false\n\
         2,2,1,3,1.19895788083,2,false\n"
    );
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("r[3]=1\n") && err.contains("r[24]=0\n"), "{err}");

    let o = classprime(&["least-primes", "--disc", "-23", "--x-cap", "2"]);
    assert_eq!(stdout(&o).matches("none@cap").count(), 3);
}

#[test]
fn json_matches_csv() {
    let csv = stdout(&classprime(&["heegner", "--disc", "-47"]));
    let json = stdout(&classprime(&["heegner", "--disc", "-47", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = v["rows"].as_array().unwrap();
    for (line, row) in csv.lines().skip(1).zip(rows) {
        let im: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert_eq!(im, row["heegner_im"].as_f64().unwrap());
    }
    assert_eq!(rows.len(), csv.lines().count() - 1);
}

#[test]
fn variance_exit_codes() {
    let o = classprime(&["variance", "--disc", "-23", "--t", "1000", "--weight", "indicator"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(classprime(&["variance", "--disc", "-23", "--t", "1.5"]).status.code(), Some(2));
    assert_eq!(classprime(&["variance", "--disc", "-23", "--t", "1000", "--weight", "box"]).status.code(), Some(2));
}

#[test]
fn dirichlet_check_ok() {
    let o = classprime(&["dirichlet-check", "--disc", "-23", "--n-max", "5000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(",OK,"));
}

#[test]
fn scan_is_byte_identical_across_thread_counts() {
    let a = classprime(&["scan", "--d-min", "-2000", "--d-max", "-3", "--threads", "1"]);
    let b = classprime(&["scan", "--d-min", "-2000", "--d-max", "-3", "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_classprime"))
        .args(["scan", "--d-min", "-2000", "--d-max", "-3"])
        .env("CLASSPRIME_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn scan_empty_range_and_zero_threads() {
    let o = classprime(&["scan", "--d-min", "-2", "--d-max", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert_eq!(classprime(&["scan", "--d-min", "-50", "--threads", "0"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("classprime-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# test\ndisc=-23\nformat=json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = classprime(&["forms", "--config", c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_start().starts_with('{'));
    let o = classprime(&["forms", "--config", c, "--disc", "-4", "--format", "csv"]);
    assert_eq!(stdout(&o), "class_index,a,b,c,order\n0,1,0,1,1\n");
    std::fs::write(&cfg, "nonsense=1\n").unwrap();
    assert_eq!(classprime(&["forms", "--config", c, "--disc", "-23"]).status.code(), Some(2));
    let out = dir.join("forms.csv");
    let o = classprime(&["forms", "--disc", "-23", "--out", out.to_str().unwrap()]);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("class_index"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selftest_single_criterion() {
    let o = classprime(&["selftest", "--criteria", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion  7 PASS"));
}
