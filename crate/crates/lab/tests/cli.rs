use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_condorcet-lab"))
}

#[test]
fn budget_prints_csv() {
    let out = lab().args(["budget", "--pair", "2,1", "--eps", "0.1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u_i,u_j,eps,bound,x_recommended,exact_success_prob");
    assert!(lines[1].starts_with("2.0,1.0,0.1,41.44"));
    assert_eq!(lines[1].split(',').nth(4), Some("43"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "mixing", "base_seed": 1}"#).unwrap();
    assert_eq!(lab().arg("validate").arg(&bad).status().unwrap().code(), Some(2));
    assert_eq!(lab().arg("run").arg(&bad).status().unwrap().code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(lab().arg("run").arg(&missing).status().unwrap().code(), Some(1));
    assert_eq!(lab().args(["budget", "--pair", "1,2"]).status().unwrap().code(), Some(2));
    assert_eq!(lab().args(["stationary", "--utilities", "2,1", "--x", "2"]).status().unwrap().code(), Some(2));
    assert_eq!(lab().args(["stationary", "--format", "json", "--utilities", "2,1"]).status().unwrap().code(), Some(2));
}

#[test]
fn run_writes_outputs_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"kind": "deterministic-search", "base_seed": 1, "n": 8, "replicates": 5}"#).unwrap();
    let out = dir.path().join("o/det.csv");
    let status = lab()
        .arg("run")
        .arg(&cfg)
        .args(["--seed", "9", "--workers", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("9")));
    assert!(dir.path().join("o/det.meta.json").exists());

    let validated = lab().arg("validate").arg(&cfg).output().unwrap();
    let resolved: serde_json::Value = serde_json::from_slice(&validated.stdout).unwrap();
    assert_eq!(resolved["loser_rule"], "first-listed");
}

#[test]
fn stationary_from_env_file() {
    let dir = tempfile::tempdir().unwrap();
    let env = dir.path().join("env.json");
    std::fs::write(&env, r#"{"gamma": {"n": 4, "gamma": 0.25}}"#).unwrap();
    let out = lab().arg("stationary").arg("--env").arg(&env).args(["--eps", "0.01"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 11);
    let pi: f64 = row[5].parse().unwrap();
    assert!((pi - 0.75).abs() < 1e-10);
}
