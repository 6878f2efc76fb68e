use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn srspd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srspd")).args(args).current_dir(dir).env_remove("SRSPD_SEED").output().unwrap()
}

#[test]
fn missing_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = srspd(&["metrics", "no-such-file.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-file.txt"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(srspd(&["generate", "--p", "2", "--mode", "partition"], dir.path()).status.code(), Some(2));
    assert_eq!(srspd(&["adapt", "--objective", "rosenbrock", "--strategy", "mmlh"], dir.path()).status.code(), Some(2));
    assert_eq!(srspd(&["adapt", "--objective", "franke", "--strategy", "simplex"], dir.path()).status.code(), Some(2));
}

#[test]
fn malformed_design_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.txt");
    fs::write(&file, "#srspd-design\np\t2\nn\tmany\n").unwrap();
    let out = srspd(&["metrics", file.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = srspd(&["generate", "--p", "1", "--n", "5", "--mode", "partition"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_then_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = srspd(&["generate", "--p", "2", "--n", "30", "--mode", "partition", "--out", "d.txt"], dir.path());
    assert!(out.status.success());
    let summary = String::from_utf8(out.stdout).unwrap();
    let field = |text: &str, key: &str| -> f64 {
        text.lines().find_map(|l| l.strip_prefix(&format!("{key}\t"))).unwrap().parse().unwrap()
    };
    let sep = field(&summary, "separation");
    assert!(sep >= field(&summary, "theoretical_separation") - 1e-9);

    let out = srspd(&["metrics", "d.txt", "--fill-samples", "1000"], dir.path());
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(field(&report, "n"), 30.0);
    assert_eq!(field(&report, "separation"), sep);

    fs::write(dir.path().join("pts.txt"), "0.1 0.1\n0.9 0.9\n").unwrap();
    let out = srspd(&["metrics", "pts.txt", "--fill-samples", "1000"], dir.path());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!((field(&report, "separation") - 0.8 * 2f64.sqrt()).abs() < 1e-12);
    assert!(report.contains("theoretical_separation\tNA"));
}

#[test]
fn stdout_carries_only_the_payload() {
    let dir = tempfile::tempdir().unwrap();
    let out = srspd(&["generate", "--p", "2", "--n", "12", "--mode", "partition"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("#srspd-design"));
    assert!(srspd_cli::design_file::read_design(&text).is_ok());
    assert!(String::from_utf8_lossy(&out.stderr).contains("separation"));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_srspd"));
        c.args(["generate", "--p", "3", "--n", "20", "--mode", "partition", "--w", "5"]).args(args);
        match env {
            Some(v) => c.env("SRSPD_SEED", v),
            None => c.env_remove("SRSPD_SEED"),
        };
        c.current_dir(dir.path()).output().unwrap().stdout
    };
    assert_eq!(run(Some("4"), &[]), run(None, &["--seed", "4"]));
    assert_ne!(run(Some("4"), &[]), run(Some("5"), &[]));
}

#[cfg(unix)]
#[test]
fn failing_evaluator_keeps_partial_trace() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("eval.sh");
    fs::write(
        &script,
        "#!/bin/sh\nread x y\nc=$(cat count 2>/dev/null || echo 0)\nc=$((c + 1))\necho $c > count\n[ $c -gt 6 ] && exit 3\necho $x\n",
    )
    .unwrap();
    fs::set_permissions(&script, fs::Permissions::from_mode(0o755)).unwrap();
    let out = srspd(
        &[
            "adapt",
            "--evaluator",
            script.to_str().unwrap(),
            "--dim",
            "2",
            "--strategy",
            "mmlh",
            "--total",
            "10",
            "--out",
            "t.tsv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("t.tsv")).unwrap();
    let records = trace.lines().filter(|l| l.starts_with(char::is_numeric)).count();
    assert_eq!(records, 6);
}

#[test]
fn external_evaluator_drives_a_session() {
    let dir = tempfile::tempdir().unwrap();
    let out = srspd(
        &[
            "adapt",
            "--evaluator",
            "awk {print($1-0.3)^2+($2-0.6)^2}",
            "--dim",
            "2",
            "--strategy",
            "ei-only",
            "--total",
            "12",
            "--n2",
            "8",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let trace = srspd_core::SessionTrace::from_tsv(&text).unwrap();
    assert_eq!(trace.len(), 12);
}
