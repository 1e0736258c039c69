use std::process::Command;

use ftpomdp::certify::run_certificate_report;
use ftpomdp::concentration::run_concentration;
use ftpomdp::output::{episodes_csv, read_episodes_csv, steps_csv, write_benchmark, TelemetryFile, EPISODES_CSV};
use ftpomdp::runner::{mean_and_std, run_benchmark};
use ftpomdp::ExperimentConfig;
use ftpomdp_core::bounds::{build_ladder, certificate, CertificateInputs};
use ftpomdp_core::pomdp::discounted_return;

fn lightdark(solver: &str, episodes: usize, steps: usize) -> ExperimentConfig {
    let widening = if solver == "corrected_pomcp" { "" } else { r#", "widening": { "k_z": 8.0, "alpha_z": 0.5 }"# };
    ExperimentConfig::from_json(&format!(
        r#"{{
            "env": {{ "name": "modified_lightdark" }},
            "solver": {{ "name": "{solver}", "selection": {{ "rule": "practical", "eta": 0.5, "c0": 1.0 }}{widening} }},
            "planning": {{ "gamma": 0.95, "horizon": 3, "r_max": 1.0 }},
            "n_sims": 300,
            "episode_steps": {steps},
            "n_episodes": {episodes},
            "base_seed": 77,
            "n_particles": 200
        }}"#
    ))
    .unwrap()
}

fn tabular_concentration(searches: usize) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "env": {{ "name": "tabular" }},
            "solver": {{ "name": "corrected_pomcp", "selection": {{ "rule": "theoretical", "eta": 0.5, "xi0": 2.0, "beta0": 2.0 }} }},
            "planning": {{ "gamma": 0.95, "horizon": 2, "r_max": 1.0 }},
            "n_sims": 64, "episode_steps": 2, "n_episodes": 1, "base_seed": 5,
            "concentration": {{ "n_schedule": [64], "searches": {searches}, "z_grid": [1.0, 3.0] }}
        }}"#
    ))
    .unwrap()
}

#[test]
fn single_episode_reruns_give_identical_csv_bytes() {
    let cfg = lightdark("voro_pomcpow", 1, 4);
    let a = run_benchmark(&cfg, 1).unwrap();
    let b = run_benchmark(&cfg, 1).unwrap();
    assert_eq!(episodes_csv(&a.episodes).unwrap(), episodes_csv(&b.episodes).unwrap());
    assert_eq!(steps_csv(&a.episodes).unwrap(), steps_csv(&b.episodes).unwrap());
    assert_eq!(a.episodes[0].seed, 77);
}

#[test]
fn results_do_not_depend_on_job_count() {
    let cfg = lightdark("pomcpow", 4, 3);
    assert_eq!(run_benchmark(&cfg, 1).unwrap(), run_benchmark(&cfg, 3).unwrap());
}

#[test]
fn returns_match_recorded_rewards() {
    let result = run_benchmark(&lightdark("corrected_pomcp", 2, 5), 1).unwrap();
    for e in &result.episodes {
        assert_eq!(e.steps.len(), 5);
        assert_eq!(e.discounted_return, discounted_return(&e.rewards(), 0.95));
    }
}

#[test]
fn zero_steps_give_zero_return() {
    let result = run_benchmark(&lightdark("voro_pomcpow", 1, 0), 1).unwrap();
    assert_eq!(result.episodes[0].discounted_return, 0.0);
    assert!(result.episodes[0].steps.is_empty());
    assert_eq!(result.summary.mean, 0.0);
    assert_eq!(result.summary.std, None);
}

#[test]
fn csv_round_trip_reproduces_summary() {
    let cfg = lightdark("voro_pomcpow", 3, 3);
    let result = run_benchmark(&cfg, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_benchmark(&cfg, &result, dir.path()).unwrap();
    let rows = read_episodes_csv(&dir.path().join(EPISODES_CSV)).unwrap();
    let text = std::fs::read_to_string(dir.path().join(EPISODES_CSV)).unwrap();
    assert!(text.starts_with("episode,seed,return,wallclock_s\n"));
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![77, 78, 79]);
    let returns: Vec<f64> = rows.iter().map(|r| r.ret).collect();
    let (mean, std) = mean_and_std(&returns);
    assert_eq!(mean, result.summary.mean);
    assert_eq!(std, result.summary.std);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["std_estimator"], "sample (n-1)");
    assert_eq!(summary["seeds"][2], 79);
}

#[test]
fn sample_std_uses_n_minus_one() {
    let (mean, std) = mean_and_std(&[1.0, 2.0, 3.0, 6.0]);
    assert_eq!(mean, 3.0);
    assert!((std.unwrap() - (14.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn single_decision_report_equals_its_certificate() {
    let cfg = lightdark("voro_pomcpow", 1, 1);
    let result = run_benchmark(&cfg, 1).unwrap();
    let telemetry = TelemetryFile::from_result(&cfg, &result);
    assert_eq!(telemetry.decisions.len(), 1);
    let report = run_certificate_report(&cfg, &telemetry).unwrap();
    let d = &telemetry.decisions[0].decision;
    let ladder = build_ladder(2.0, 0.5, 3, 2.0).unwrap();
    for row in &report.rows {
        let (delta1, delta2) = CertificateInputs::split_delta(1.0 - row.confidence);
        let inputs = CertificateInputs {
            n: 300,
            delta1,
            delta2,
            gamma: 0.95,
            horizon: 3,
            holder: Default::default(),
            c_cov: 20.0,
            k_z: 1.0,
            radius_cap: 1.0,
            m_list: d.m_values.clone(),
            h_l_size: d.h_l_size,
        };
        assert_eq!(row.mean_bound, certificate(&inputs, &ladder).unwrap().bound);
    }
    assert!(report.rows.windows(2).all(|w| w[1].mean_bound >= w[0].mean_bound));
}

#[test]
fn certify_needs_partition_telemetry() {
    let cfg = lightdark("pomcpow", 1, 1);
    let telemetry = TelemetryFile::from_result(&cfg, &run_benchmark(&cfg, 1).unwrap());
    let err = run_certificate_report(&cfg, &telemetry).unwrap_err();
    assert_eq!(err.class(), "MissingTelemetry");
}

#[test]
fn single_search_concentration_is_valid() {
    let report = run_concentration(&tabular_concentration(1)).unwrap();
    let e = &report.entries[0];
    assert_eq!(e.searches, 1);
    assert!(e.tails.iter().all(|t| t.frequency == 0.0 || t.frequency == 1.0));
    assert!(e.quantiles.iter().all(|q| q.value == e.mean_error));
}

#[test]
fn config_errors_name_the_key() {
    let good = r#"{"env":{"name":"tabular"},"solver":{"name":"corrected_pomcp","selection":{"rule":"ucb1","c0":1.0}},
        "planning":{"gamma":0.95,"horizon":2,"r_max":1.0},"n_sims":10,"episode_steps":1,"n_episodes":1,"base_seed":0}"#;
    assert!(ExperimentConfig::from_json(good).is_ok());
    let unknown = good.replace(r#""base_seed":0"#, r#""base_seed":0,"seeed":1"#);
    assert!(ExperimentConfig::from_json(&unknown).unwrap_err().to_string().contains("seeed"));
    let zero = good.replace(r#""n_episodes":1"#, r#""n_episodes":0"#);
    assert!(ExperimentConfig::from_json(&zero).unwrap_err().to_string().contains("n_episodes"));
    let conf = good.replace(r#""base_seed":0"#, r#""base_seed":0,"certificate":{"confidences":[1.2]}"#);
    assert!(ExperimentConfig::from_json(&conf).unwrap_err().to_string().contains("certificate.confidences"));
    let widening = good.replace(
        r#""name":"corrected_pomcp","selection":{"rule":"ucb1","c0":1.0}"#,
        r#""name":"voro_pomcpow","selection":{"rule":"ucb1","c0":1.0},"widening":{"k_z":8.0,"alpha_z":0.5}"#,
    );
    assert!(ExperimentConfig::from_json(&widening).unwrap_err().to_string().contains("solver.name"));
}

#[test]
fn cli_reports_error_class_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"env":{"name":"nowhere"}}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ftpomdp")).args(["bench", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[ConfigError]"));

    let out = Command::new(env!("CARGO_BIN_EXE_ftpomdp")).args(["validate-ladder"]).output().unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["xi"], serde_json::json!([2.0, 12.0, 52.0, 212.0]));
    assert_eq!(json["eta_preserved"], true);
}

#[test]
fn cli_bench_writes_artifacts_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let cfg = lightdark("voro_pomcpow", 5, 2);
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_ftpomdp"))
        .args(["bench", "--episodes", "2", "--seed", "1000", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("over 2 episodes"));
    let rows = read_episodes_csv(&out_dir.join(EPISODES_CSV)).unwrap();
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1000, 1001]);
    assert!(out_dir.join("telemetry.json").exists());
}
