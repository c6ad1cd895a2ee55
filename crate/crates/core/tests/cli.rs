use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sqg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqg"))
        .args(args)
        .env("SQG_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn small_run(out: &Path) -> Output {
    sqg(&[
        "run",
        "--alpha",
        "0.75",
        "--n",
        "32",
        "--t-end",
        "0.05",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv",
        "--format",
        "json",
    ])
}

#[test]
fn run_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = small_run(d);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["config.txt", "series.csv", "series.json", "final.sqgs"] {
        assert!(a.join(f).exists(), "missing {f}");
    }
    let csv_a = fs::read(a.join("series.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("series.csv")).unwrap());
    let header = String::from_utf8_lossy(&csv_a).lines().next().unwrap().to_string();
    assert!(header.starts_with("t,l2,lp_crit,h_alpha,besov_s0,J,shell_"), "{header}");
}

#[test]
fn analyze_reads_snapshot_and_rejects_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    assert_eq!(small_run(&out).status.code(), Some(0));
    let snap = out.join("final.sqgs");
    let o = sqg(&["analyze", snap.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("l2"), "{text}");

    let bytes = fs::read(&snap).unwrap();
    let cut = dir.path().join("cut.sqgs");
    fs::write(&cut, &bytes[..bytes.len() / 2]).unwrap();
    let o = sqg(&["analyze", cut.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
}

#[test]
fn exponents_for_point_six() {
    let o = sqg(&["exponents", "--alpha", "0.6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for needle in ["0.8", "10", "2.5", "0.75", "2.4", "5"] {
        assert!(text.contains(needle), "{needle} missing from\n{text}");
    }
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(sqg(&["run", "--bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "alpha = 0.75\nkappa = -1\n").unwrap();
    let o = sqg(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quick_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqg(&["verify", "--quick", "--out", dir.path().to_str().unwrap()]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(dir.path().join("reports").read_dir().unwrap().count() > 0);
}

#[test]
fn sweep_writes_one_directory_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqg(&[
        "sweep",
        "--alphas",
        "0.6,0.75",
        "--n",
        "32",
        "--t-end",
        "0.02",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(dir.path().read_dir().unwrap().count(), 2);
}
