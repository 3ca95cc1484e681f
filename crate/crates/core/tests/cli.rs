use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bidir-relay"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bidir-relay-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn schedule_writes_report_and_transcript() {
    let dir = scratch("schedule");
    let cfg = dir.join("s.cfg");
    fs::write(&cfg, "# short run\nm = 3\nblocks = 10\nmodulus = 256\nseed = 5\n").unwrap();
    let out = bin()
        .args(["schedule", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let listed = String::from_utf8(out.stdout).unwrap();
    assert!(listed.lines().count() >= 2, "{listed}");

    let transcript = dir.join("out/schedule_transcript_m3_B10.jsonl");
    let lines: Vec<serde_json::Value> = fs::read_to_string(&transcript)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 53);
    assert!(dir.join("out/schedule_report.json").exists());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_format_and_flags() {
    let dir = scratch("regions");
    let out = bin()
        .args(["regions", "--hull", "--lambda-steps", "5", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(dir.join("regions_summary.csv")).unwrap();
    assert!(summary.starts_with("protocol,p_db,max_sum_rate,within_outer"));
    assert!(summary.lines().any(|l| l.starts_with("df-mhmr,")));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_config_exits_nonzero_with_json_error() {
    let dir = scratch("bad");
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "protocols = df-nonsense\n").unwrap();
    let out = bin().args(["line", "--config"]).arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["scenario"], "line");
    assert!(err["error"].is_string() && err["message"].is_string(), "{err}");

    let missing = bin().args(["asymptotics", "--config", "/nonexistent/cfg"]).output().unwrap();
    assert!(!missing.status.success());
    let err: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["scenario"], "asymptotics");
    fs::remove_dir_all(&dir).unwrap();
}
