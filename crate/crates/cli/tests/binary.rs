use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodic-loss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_owned()
}

#[test]
fn limit_succeeds_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["limit", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("limit.json")).unwrap()).unwrap();
    assert_eq!(v["command"], "limit");
    assert_eq!(v["seed"], 1);
    assert!(v["result"]["limit"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "lambda = -0.5\n").unwrap();
    let o = run(&[
        "limit",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`lambda`"));

    std::fs::write(&cfg, "lambda = 0.02\nunknown_key = 1\n").unwrap();
    let o = run(&["limit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    // clap usage errors share the config exit code
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn missing_data_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "fit",
        "--tickets",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--cells",
        "10",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn oversized_study_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    std::fs::write(
        &cfg,
        "cycles = 1000000\nreplications = 1000\nmax_work = 1e6\n",
    )
    .unwrap();
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = run(&[
            "simulate",
            "--reps",
            "5",
            "--seed",
            "42",
            "--out",
            &out_arg(dir.path()),
        ]);
        assert!(o.status.success());
    }
    for name in ["series.csv", "stages.csv", "summary.json"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let c = tempfile::tempdir().unwrap();
    run(&[
        "simulate",
        "--reps",
        "5",
        "--seed",
        "43",
        "--out",
        &out_arg(c.path()),
    ]);
    assert_ne!(
        std::fs::read(a.path().join("stages.csv")).unwrap(),
        std::fs::read(c.path().join("stages.csv")).unwrap()
    );
}

#[test]
fn overrides_enter_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let hash = |seed: &str| {
        let o = run(&["limit", "--seed", seed, "--out", &out_arg(dir.path())]);
        assert!(o.status.success());
        let v: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("limit.json")).unwrap()).unwrap();
        v["config_sha256"].as_str().unwrap().to_owned()
    };
    assert_ne!(hash("1"), hash("2"));
    assert_eq!(hash("3"), hash("3"));
}

#[test]
fn printed_config_parses_back() {
    let o = run(&["config", "--seed", "9"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cfg = periodic_loss_cli::StudyConfig::parse(&text).unwrap();
    assert_eq!(cfg.seed, 9);
}
