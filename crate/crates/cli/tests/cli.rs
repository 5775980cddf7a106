use std::path::Path;
use std::process::{Command, Output};

fn estcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_estcomm"))
        .args(args)
        .env_remove("ESTCOMM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    let tail = text.split(&format!("{key}=")).nth(1).expect(key);
    tail.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn run_writes_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eq.csv");
    let o = estcomm(&[
        "run", "--protocol", "eq", "--n", "12", "--epsilon", "0.05", "--trials", "100", "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = estcomm::harness::import_csv(&out).unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r.n == 4096 && r.epsilon == 0.05));
}

#[test]
fn same_seed_same_csv() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("{i}.csv"))).collect();
    for p in &paths {
        let o = estcomm(&["run", "--protocol", "sparse", "--n", "6", "--epsilon", "0.1", "--trials", "10", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["run", "--epsilon", "2.0"],
        vec!["run", "--epsilon", "0"],
        vec!["run", "--delta", "1.5"],
        vec!["run", "--trials", "0"],
        vec!["run", "--protocol", "nonsense"],
        vec!["run", "--family", "nonsense"],
        vec!["run", "--access", "partial"],
        vec!["run", "--unknown-flag"],
        vec!["sweep", "--epsilon", "0.1,0.05"],
        vec!["diag", "discrepancy", "--family", "ip", "--n", "6"],
        vec!["diag", "distance-inverse", "--k", "1"],
        vec!["frobnicate"],
    ] {
        let o = estcomm(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(estcomm(&["--help"]).status.code(), Some(0));
    assert_eq!(estcomm(&["run", "--help"]).status.code(), Some(0));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nprotocol = gt\ntrials = 5\nepsilon = 0.2\nn = 5\n").unwrap();
    let out = dir.path().join("gt.csv");
    let o = estcomm(&["run", "--config", cfg.to_str().unwrap(), "--trials", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = estcomm::harness::import_csv(&out).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.protocol == "gt" && r.epsilon == 0.2 && r.n == 32));

    std::fs::write(&cfg, "protocol = gt\ncolour = blue\n").unwrap();
    assert_eq!(estcomm(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = Path::new("/nonexistent/estcomm.cfg");
    assert_eq!(estcomm(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sweep_recovers_injected_slope() {
    let o = estcomm(&["sweep", "--protocol", "power_law", "--exponent", "1.25", "--epsilon", "0.2,0.1,0.05,0.02", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((field(&s, "slope") - 1.25).abs() <= 0.005, "{s}");
    assert!(field(&s, "r2") >= 0.999);
}

#[test]
fn eq_sweep_slope() {
    let o = estcomm(&["sweep", "--protocol", "eq", "--n", "10", "--epsilon", "0.1,0.05,0.025,0.0125", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let slope = field(&stdout(&o), "slope");
    assert!((0.55..=0.85).contains(&slope), "slope {slope}");
}

#[test]
fn debias_sweep_beats_sampling() {
    let run = |p: &str| {
        let o = estcomm(&["sweep", "--protocol", p, "--n", "5", "--epsilon", "0.2,0.1,0.05", "--trials", "5"]);
        assert_eq!(o.status.code(), Some(0));
        field(&stdout(&o), "slope")
    };
    assert!(run("debias") < run("sampling"));
}

#[test]
fn debias_run_reports_variance() {
    let o = estcomm(&["run", "--protocol", "debias", "--n", "5", "--epsilon", "0.2", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("bound_16_over_k2="), "{s}");
    assert!(s.contains("within=true"), "{s}");
}

#[test]
fn diag_targets() {
    let s = stdout(&estcomm(&["diag", "lambda", "--family", "identity", "--k", "16"]));
    let lambdas: Vec<f64> = s
        .lines()
        .skip_while(|l| !l.starts_with("t,"))
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lambdas.len(), 16);
    for (t, l) in lambdas.iter().enumerate() {
        assert!((l - (t + 1) as f64).abs() < 1e-9);
    }

    let s = stdout(&estcomm(&["diag", "discrepancy", "--family", "ip", "--n", "2"]));
    assert!(field(&s, "value") <= 0.5);

    let s = stdout(&estcomm(&["diag", "distance-inverse", "--k", "32"]));
    assert!(field(&s, "residual") <= 1e-9);
    assert!(s.contains("within_bound=true"));

    let o = estcomm(&["diag", "svd", "--family", "hadamard", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank=8"));
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_estcomm"))
        .args(["diag", "distance-inverse", "--k", "4"])
        .env("ESTCOMM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_estcomm"))
        .args(["diag", "distance-inverse", "--k", "4"])
        .env("ESTCOMM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
