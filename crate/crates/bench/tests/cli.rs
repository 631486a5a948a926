use std::path::Path;
use std::process::Command;

fn uwa_est() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uwa-est"))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn run_prints_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = uwa_est()
        .args([
            "run", "--delay-taps", "64", "--doppler-bins", "8", "--sampling", "40", "--snr-db", "15",
            "--norm", "l1", "--group-layout", "cols", "--seed", "3", "--sigma-l1", "oracle", "--eta", "1",
            "--clusters", "2", "--taps-per-cluster", "4", "--doppler-spread", "0", "--max-iters", "500",
            "--tol", "1e-6", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2);
    let file = read(&out);
    let row: Vec<&str> = file.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["3", "l1", "8", "64"]);
    assert_eq!(row[7], "cols");
    assert!(row[8].parse::<f64>().unwrap() < 1.0);
}

#[test]
fn scatter_and_fixed_radius_flags() {
    let o = uwa_est()
        .args(["run", "--scatter", "--clusters", "1", "--taps-per-cluster", "5", "--sigma-l1", "0.5", "--norm", "l1"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[6].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn invalid_arguments_exit_1() {
    for args in [
        vec!["run", "--sampling", "0"],
        vec!["run", "--norm", "l3"],
        vec!["run", "--group-layout", "diag"],
        vec!["run", "--tol", "-1"],
        vec!["run", "--no-such-flag"],
        vec!["sweep", "--preset", "nature", "--out", "/tmp/x.csv"],
        vec!["sweep", "--sampling", "90:10:10", "--out", "/tmp/x.csv"],
        vec![],
    ] {
        let o = uwa_est().args(&args).output().unwrap();
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn runtime_failure_exits_2() {
    let o = uwa_est()
        .args(["run", "--delay-taps", "4", "--doppler-bins", "2", "--sampling", "50", "--out", "/nonexistent/dir/r.csv"])
        .args(["--clusters", "1", "--taps-per-cluster", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let o = uwa_est().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn sweep_writes_records_summary_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let summary = dir.path().join("summary.csv");
    let o = uwa_est()
        .args([
            "sweep", "--sampling", "25:75:25", "--snr-db", "10,20", "--norm", "l1,l21", "--seeds", "2",
            "--delay-taps", "48", "--doppler-bins", "6", "--out",
        ])
        .arg(&out)
        .arg("--summary")
        .arg(&summary)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&out).lines().count(), 1 + 3 * 2 * 2 * 2);
    let s = read(&summary);
    assert!(s.starts_with("norm,sampling_pct,median_mse,median_runtime_seconds,converged_frac"));
    assert_eq!(s.lines().count(), 1 + 2 * 3 * 2);
    for norm in ["l1", "l21"] {
        let dat = read(&dir.path().join(format!("summary_{norm}.dat")));
        assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 6);
    }
}

#[test]
fn sweep_default_summary_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = uwa_est()
        .args(["sweep", "--sampling", "50", "--seeds", "1", "--delay-taps", "32", "--doppler-bins", "4"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("summary_r.csv").exists());
}

#[test]
fn export_channel_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("channel.csv");
    let o = uwa_est()
        .args(["export-channel", "--seed", "4", "--delay-taps", "50", "--doppler-bins", "5", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = read(&out);
    assert_eq!(text.lines().next(), Some("row,col,re,im"));
    assert_eq!(text.lines().count(), 1 + 3 * 5 * 2);
}
