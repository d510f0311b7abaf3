//! Integration tests of the command-line surface: exit codes, manifest
//! reproducibility, describe output, and the replay input format.

use std::fs;
use std::path::Path;
use std::process::Command;

use swap_cli::{run_experiment, ExperimentConfig, Grid, InstanceSource, ObjectiveChoice, OracleChoice};

fn swap_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swap"))
}

fn write_config(path: &Path, body: &serde_json::Value) {
    fs::write(path, serde_json::to_string_pretty(body).unwrap()).unwrap();
}

fn base_config(out_dir: &Path) -> serde_json::Value {
    serde_json::json!({
        "instance": {"generated": {"n": 6, "k": 2, "separation": 0.08}},
        "objective": "top_k_linear",
        "oracle": "sort_top_k",
        "delta": 0.1,
        "sigma": 0.4,
        "grid": {"s": [5.0], "j": [2.0]},
        "trials": 5,
        "seed": 11,
        "out_dir": out_dir,
        "plots": false
    })
}

#[test]
fn run_exits_zero_and_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    write_config(&cfg, &base_config(&out));
    let status = swap_bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["cells.csv", "hardness.csv", "zone.csv", "manifest.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    assert!(!out.join(".stage").exists(), "staging directory left behind");
}

#[test]
fn invalid_config_exits_two_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let mut body = base_config(&dir.path().join("out"));
    body["delta"] = serde_json::json!(2.0);
    write_config(&cfg, &body);
    let output = swap_bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("`delta`"), "diagnostic was: {stderr}");
}

#[test]
fn missing_config_file_exits_three() {
    let status = swap_bin()
        .args(["run", "--config", "/nonexistent/cfg.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn rerunning_the_manifest_reproduces_byte_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_a = dir.path().join("a");
    write_config(&cfg, &base_config(&out_a));
    assert!(swap_bin().args(["run", "--config"]).arg(&cfg).status().unwrap().success());

    // Re-run from the emitted manifest into a fresh directory.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("manifest.json")).unwrap()).unwrap();
    let cfg_b = dir.path().join("cfg_b.json");
    write_config(&cfg_b, &manifest);
    let out_b = dir.path().join("b");
    assert!(swap_bin()
        .args(["run", "--config"])
        .arg(&cfg_b)
        .arg("--out")
        .arg(&out_b)
        .status()
        .unwrap()
        .success());
    for name in ["cells.csv", "hardness.csv", "zone.csv"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between manifest re-runs");
    }
}

#[test]
fn seed_override_lands_in_the_manifest_and_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    write_config(&cfg, &base_config(&out));
    assert!(swap_bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--seed", "999"])
        .status()
        .unwrap()
        .success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 999);
}

#[test]
fn noiseless_single_trial_reports_perfect_success() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        instance: InstanceSource::Generated {
            n: 6,
            k: 2,
            separation: 0.08,
            partitions: None,
        },
        objective: ObjectiveChoice::TopKLinear,
        oracle: OracleChoice::SortTopK,
        delta: 0.1,
        epsilon: None,
        sigma: 0.0,
        grid: Grid {
            s: vec![3.0],
            j: vec![2.0],
        },
        trials: 1,
        seed: 5,
        budget_cap: 1e6,
        out_dir: dir.path().join("out"),
        plots: false,
    };
    let output = run_experiment(&config).unwrap();
    let cell = &output.cells[0];
    assert_eq!(cell.swap.success_rate, 1.0);
    assert_eq!(cell.strong.success_rate, 1.0);
    assert_eq!(cell.weak.success_rate, 1.0);
    // With zero radii the loop stops right after initialization.
    assert_eq!(cell.weak.mean_cost, 6.0);
    // Baselines ride along: uniform costs n(1 + j) and the random baseline
    // is capped at the general run's spend.
    assert_eq!(cell.uniform.mean_cost, 6.0 * 3.0);
    assert!(cell.random.mean_cost <= cell.swap.mean_cost);
    assert_eq!(cell.uniform.success_rate, 1.0, "noiseless uniform identifies the optimum");
    let text = fs::read_to_string(config.out_dir.join("cells.csv")).unwrap();
    let success_cols: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(success_cols[7], "1", "success_swap column");
}

#[test]
fn describe_rejects_zero_sigma_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let mut body = base_config(&dir.path().join("out"));
    body["sigma"] = serde_json::json!(0.0);
    write_config(&cfg, &body);
    let output = swap_bin()
        .args(["describe", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("`sigma`"));
}

#[test]
fn describe_prints_the_difficulty_report_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write_config(&cfg, &base_config(&dir.path().join("out")));
    let output = swap_bin()
        .args(["describe", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    for needle in ["gaps:", "hardness H", "width", "h_tilde", "weak =", "strong =", "swap ="] {
        assert!(stdout.contains(needle), "missing `{needle}` in:\n{stdout}");
    }
}

#[test]
fn replay_experiment_runs_from_recorded_scores() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    fs::write(
        &scores,
        "arm_id,base_score,label,scores\n\
         0,0.9,0,0.85;0.92;0.88\n\
         1,0.7,1,0.72;0.66\n\
         2,0.4,0,0.41;0.38\n\
         3,0.2,1,0.25\n",
    )
    .unwrap();
    let config = ExperimentConfig {
        instance: InstanceSource::Replay {
            path: scores,
            k: 2,
            fallback_sigma: Some(0.1),
        },
        objective: ObjectiveChoice::Diversity,
        oracle: OracleChoice::GreedyCardinality,
        delta: 0.1,
        epsilon: None,
        sigma: 0.3,
        grid: Grid {
            s: vec![4.0],
            j: vec![2.0],
        },
        trials: 3,
        seed: 21,
        budget_cap: 1e5,
        out_dir: dir.path().join("out"),
        plots: true,
    };
    let output = run_experiment(&config).unwrap();
    assert_eq!(output.cells.len(), 1);
    // Base scores 0.9/0.7 in different partitions dominate: the diversity
    // optimum is arms {0, 1} and replay noise is mild enough to find it.
    assert!(output.cells[0].swap.success_rate > 0.0);
    assert!(config.out_dir.join("strong_vs_weak_heatmap.svg").exists());
}

#[test]
fn shipped_sample_configs_stay_valid() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            seen += 1;
            let parsed = ExperimentConfig::from_path(&path);
            assert!(parsed.is_ok(), "{} failed: {:?}", path.display(), parsed.err());
        }
    }
    assert!(seen >= 3, "expected the sample configs to be present");
}

#[test]
fn aggregates_are_invariant_to_worker_thread_count() {
    let run_with_threads = |threads: usize, out: std::path::PathBuf| {
        let config = ExperimentConfig {
            instance: InstanceSource::Generated {
                n: 6,
                k: 2,
                separation: 0.08,
                partitions: None,
            },
            objective: ObjectiveChoice::TopKLinear,
            oracle: OracleChoice::SortTopK,
            delta: 0.1,
            epsilon: None,
            sigma: 0.4,
            grid: Grid {
                s: vec![3.0, 5.0],
                j: vec![2.0],
            },
            trials: 8,
            seed: 31,
            budget_cap: 1e6,
            out_dir: out,
            plots: false,
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| run_experiment(&config)).unwrap();
        config.out_dir
    };
    let dir = tempfile::tempdir().unwrap();
    let serial = run_with_threads(1, dir.path().join("serial"));
    let parallel = run_with_threads(4, dir.path().join("parallel"));
    for name in ["cells.csv", "hardness.csv", "zone.csv"] {
        assert_eq!(
            fs::read(serial.join(name)).unwrap(),
            fs::read(parallel.join(name)).unwrap(),
            "{name} depends on the worker count"
        );
    }
}

#[test]
fn describe_reports_the_worked_example_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    fs::write(
        &scores,
        "arm_id,base_score,label,scores\n0,0.6,,\n1,0.5,,\n2,0.3,,\n",
    )
    .unwrap();
    let cfg = dir.path().join("cfg.json");
    write_config(
        &cfg,
        &serde_json::json!({
            "instance": {"replay": {"path": scores, "k": 2}},
            "objective": "top_k_linear",
            "oracle": "sort_top_k",
            "delta": 0.1,
            "sigma": 0.5,
            "grid": {"s": [5.0], "j": [2.0]},
            "trials": 1,
            "seed": 1,
            "out_dir": dir.path().join("out")
        }),
    );
    let output = swap_bin()
        .args(["describe", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("gaps:      0.300000, 0.200000, 0.200000"),
        "gaps missing in:\n{stdout}"
    );
    assert!(
        stdout.contains("hardness H = 61.111111111111"),
        "hardness missing in:\n{stdout}"
    );
    assert!(stdout.contains("width      = 2"));
}

#[test]
fn unwritable_output_directory_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let blocked = dir.path().join("blocked");
    fs::write(&blocked, "a file, not a directory").unwrap();
    let mut body = base_config(&blocked.join("out"));
    body["trials"] = serde_json::json!(1);
    write_config(&cfg, &body);
    let output = swap_bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}
