use std::path::PathBuf;
use std::process::{Command, Output};

fn hballs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hballs"))
        .args(args)
        .env_remove("HBALLS_SEED")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hballs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Values of the `re_f`/`im_f` columns of an extend CSV.
fn values(csv: &str) -> Vec<(f64, f64)> {
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# hballs.extend.v1"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let re = header.iter().position(|h| *h == "re_f").unwrap();
    lines
        .map(|l| {
            let cols: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (cols[re], cols[re + 1])
        })
        .collect()
}

#[test]
fn extend_constant_on_grid() {
    let out = scratch("f.csv");
    let o = hballs(&[
        "extend", "--n", "1", "--boundary", "const:1", "--nodes", "4096", "--points", "grid:0.1:0.7:8", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = values(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(v.len(), 8);
    for (re, im) in v {
        assert!((re - 1.0).abs() <= 1e-10 && im.abs() <= 1e-10, "{re} {im}");
    }
}

#[test]
fn extend_real_part() {
    let o = hballs(&["extend", "--n", "1", "--boundary", "re", "--nodes", "4096", "--points", "0.5+0i"]);
    assert!(o.status.success());
    let v = values(&String::from_utf8(o.stdout).unwrap());
    assert!((v[0].0 - 0.5).abs() <= 1e-8, "{:?}", v);
}

#[test]
fn extend_monte_carlo_is_reproducible() {
    let args = [
        "extend", "--n", "2", "--boundary", "const:1", "--nodes", "200000", "--seed", "42", "--points",
        "grid:0:0.7:4", "--dirs", "3",
    ];
    let a = hballs(&args);
    let b = hballs(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn extend_outside_guard_exits_3() {
    let o = hballs(&["extend", "--n", "1", "--boundary", "re", "--points", "0.95+0i"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.95+0i"));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(hballs(&["extend", "--n", "x", "--points", "0+0i"]).status.code(), Some(2));
    assert_eq!(hballs(&["extend", "--n", "2", "--points", "0.1+0i"]).status.code(), Some(2));
    assert_eq!(hballs(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(hballs(&["verify", "--m", "0.5"]).status.code(), Some(2));
    assert_eq!(hballs(&["landau", "--alpha", "0"]).status.code(), Some(2));
}

#[test]
fn verify_lemma_b() {
    let o = hballs(&["verify", "--suite", "lemmaB", "--trials", "10000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["schema"], "hballs.verify.v1");
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["summary"]["failed"], 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.trim_start().starts_with("{\n  \"schema\""));
}

#[test]
fn verify_landau_reports_rho() {
    let o = hballs(&["verify", "--suite", "landau", "--n", "1", "--alpha", "1", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rho = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find_map(|c| c["inputs"]["rho"].as_f64())
        .expect("rho in report");
    assert!((rho - 3.0 / 28.0).abs() < 1e-15);
}

#[test]
fn landau_table() {
    let o = hballs(&["landau", "--n", "1", "--alpha", "1", "--m", "1"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("0.1071428571, 0.0535714286, 0.0267857143"));

    let out = scratch("landau.csv");
    let o = hballs(&["landau", "--n", "1..4", "--alpha", "1", "--m", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# hballs.landau.v1"));
    assert_eq!(lines.next(), Some("n,alpha,M,rho,half_rho,R_lower"));
    let rho: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(rho.len(), 4);
    assert!(rho.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn config_file_and_seed_env() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "suite = lemmaB\ntrials = 20\nseed = 5\n").unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_hballs"));
        cmd.args(["verify", "--no-timing", "--config", cfg.to_str().unwrap()]).args(extra);
        match env {
            Some(s) => cmd.env("HBALLS_SEED", s),
            None => cmd.env_remove("HBALLS_SEED"),
        };
        let o = cmd.output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (v["config"]["seed"].as_u64().unwrap(), v["config"]["trials"].as_u64().unwrap())
    };
    assert_eq!(run(&[], None), (5, 20));
    assert_eq!(run(&["--seed", "11"], Some("13")), (11, 20));
    // The environment only replaces the built-in default.
    assert_eq!(run(&[], Some("13")), (5, 20));
    std::fs::write(&cfg, "suite = lemmaB\ntrials = 20\n").unwrap();
    assert_eq!(run(&[], Some("13")), (13, 20));
}
