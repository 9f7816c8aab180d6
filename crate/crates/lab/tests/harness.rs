use condorcet_lab::config::ExperimentConfig;
use condorcet_lab::runner::run_experiment;
use condorcet_lab::schema::*;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).unwrap()
}

fn with_workers(text: &str, workers: usize) -> ExperimentConfig {
    let mut c = config(text);
    c.workers = Some(workers);
    c
}

const KINDS: [&str; 6] = [
    r#"{"kind": "ea-occupancy", "base_seed": 3, "replicates": 6,
        "environment": {"utilities": [4, 2, 1]}, "iterations": 5000, "trace_stride": 500}"#,
    r#"{"kind": "mmas-hitting", "base_seed": 3, "replicates": 6,
        "environment": {"uniform_gap": {"n": 4, "p": 0.1}}, "rho": 0.05, "tau_min": 0.02, "trace_stride": 20}"#,
    r#"{"kind": "mixing", "base_seed": 3, "replicates": 3,
        "environment": {"gamma": {"n": 4, "gamma": 0.3}}, "t_max": 20, "mc_samples": 300}"#,
    r#"{"kind": "boost-grid", "base_seed": 3, "pairs": [[2, 1], [5, 4]]}"#,
    r#"{"kind": "narm-bounds", "base_seed": 3, "utility_sets": [[6, 5, 4], [3, 1]], "x_max": 6, "mc_samples": 500}"#,
    r#"{"kind": "deterministic-search", "base_seed": 3, "replicates": 30, "n": 12}"#,
];

#[test]
fn worker_count_does_not_change_output() {
    for text in KINDS {
        let serial = run_experiment(&with_workers(text, 1)).unwrap();
        let parallel = run_experiment(&with_workers(text, 4)).unwrap();
        assert_eq!(serial.csv, parallel.csv, "{text}");
        assert_eq!(serial.companions, parallel.companions, "{text}");
    }
}

#[test]
fn same_seed_same_bytes_other_seed_differs() {
    let a = run_experiment(&config(KINDS[0])).unwrap();
    let b = run_experiment(&config(KINDS[0])).unwrap();
    assert_eq!(a.csv, b.csv);
    let mut c = config(KINDS[0]);
    c.base_seed = 4;
    assert_ne!(run_experiment(&c).unwrap().csv, a.csv);
}

fn header_of(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn golden_headers() {
    let expected = [
        "replicate,seed,n,x,iterations,burn_in,arm,occupancy,stationary,tv_distance,first_hit",
        "replicate,seed,n,rho,tau_min,threshold,hitting_time,iterations,final_tau_winner,kernel",
        "replicate,seed,t,delta_exact,delta_hat,delta_upper",
        "replicate,seed,u_i,u_j,eps,bound,x_recommended,precondition,exact_success_prob",
        "replicate,seed,u_vector_id,arm,x,lower,upper,exact,monte_carlo,mc_stderr,flags",
        "replicate,seed,n,winner,round_robin_winner,round_robin_queries,random_search_hold",
    ];
    for (text, header) in KINDS.iter().zip(expected) {
        assert_eq!(header_of(&run_experiment(&config(text)).unwrap().csv), header);
    }
    assert_eq!(
        TraceRow::HEADER.join(","),
        "replicate,seed,iteration,incumbent,winner,sampled_i,sampled_j,pheromones"
    );
    assert_eq!(
        MixingSummaryRow::HEADER.join(","),
        "n,x,epsilon,tau_eps_exact,tau_eps_bound,tau_eps_empirical_upper"
    );
    assert_eq!(BudgetRow::HEADER.join(","), "u_i,u_j,eps,bound,x_recommended,exact_success_prob");
    assert_eq!(
        NarmBoundsRow::HEADER.join(","),
        "u_vector_id,arm,x,lower,upper,exact,monte_carlo,mc_stderr,flags"
    );
    assert_eq!(TwoArmLowerRow::HEADER.join(","), "u_i,u_j,x,lower_bound,exact,precondition");
    assert_eq!(WinCountRow::HEADER.join(","), "u_i,u_j,t,x,lower_bound,exact,precondition");
    assert_eq!(
        StationaryRow::HEADER.join(","),
        condorcet_core::markov::STATIONARY_ANALYSIS_HEADER.join(",")
    );
}

#[test]
fn every_row_carries_replicate_and_seed() {
    let out = run_experiment(&config(KINDS[5])).unwrap();
    let text = String::from_utf8(out.csv).unwrap();
    for (r, line) in text.lines().skip(1).enumerate() {
        assert!(line.starts_with(&format!("{r},3,")), "{line}");
    }
    assert_eq!(out.metadata.config.replicates, 30);
    assert!(out.metadata.config.horizon.is_some());
    assert!(out.metadata.config.loser_rule.is_some());
}

#[test]
fn gamma_half_occupancy() {
    let c = config(
        r#"{"kind": "ea-occupancy", "base_seed": 11, "environment": {"gamma": {"n": 3, "gamma": 0.5}},
            "iterations": 1000000, "trace_stride": 0}"#,
    );
    let out = run_experiment(&c).unwrap();
    assert!(out.companions.is_empty());
    let text = String::from_utf8(out.csv).unwrap();
    let winner_row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let occupancy: f64 = winner_row[7].parse().unwrap();
    let stationary: f64 = winner_row[8].parse().unwrap();
    assert!((stationary - 0.5).abs() < 1e-10);
    assert!((occupancy - 0.5).abs() < 0.01, "{occupancy}");
}

#[test]
fn written_files_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(KINDS[1])).unwrap();
    let paths = out.write(&dir.path().join("sub/mmas.csv")).unwrap();
    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["mmas.csv", "mmas.trace.csv", "mmas.meta.json"]);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(&paths[2]).unwrap()).unwrap();
    assert_eq!(meta["kind"], "mmas-hitting");
    assert!(meta["version"].as_str().unwrap().starts_with('v'));
    // The resolved config echoes the default threshold 1 - 3p - n tau_min.
    let threshold = meta["config"]["threshold"].as_f64().unwrap();
    assert!((threshold - (1.0 - 0.3 - 0.08)).abs() < 1e-12);
    let resolved: ExperimentConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    assert_eq!(run_experiment(&resolved).unwrap().csv, out.csv);
}

#[test]
fn config_errors() {
    for bad in [
        r#"{"kind": "ea-occupancy", "base_seed": 1}"#,
        r#"{"kind": "ea-occupancy", "base_seed": 1, "replicates": 0, "environment": {"utilities": [2, 1]}, "iterations": 5000}"#,
        r#"{"kind": "boost-grid", "base_seed": 1, "pairs": [[2, 1]], "rho": 0.1}"#,
        r#"{"kind": "mixing", "base_seed": 1, "environment": {"utilities": [2, 1]}, "x": 2}"#,
        r#"{"kind": "mixing", "base_seed": 1, "environment": {"matrix": [[1, 0.7], [0.2, 1]]}}"#,
    ] {
        let err = ExperimentConfig::from_json(bad).and_then(|c| c.validate().map(|_| ()));
        assert_eq!(err.unwrap_err().exit_code(), 2, "{bad}");
    }
    assert!(ExperimentConfig::from_json(r#"{"kind": "boost-grid", "base_seed": 1, "typo": 1}"#).is_err());
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let c = ExperimentConfig::load(&path).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 6);
}
