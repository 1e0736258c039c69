//! File formats: per-episode CSV, per-step CSV, summary and telemetry JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::env::DecisionTelemetry;
use crate::error::{BenchError, Result};
use crate::runner::{BenchmarkResult, EpisodeRecord};

pub const EPISODES_CSV: &str = "episodes.csv";
pub const STEPS_CSV: &str = "steps.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const TELEMETRY_JSON: &str = "telemetry.json";
pub const CERTIFICATE_JSON: &str = "certificate.json";
pub const CONCENTRATION_JSON: &str = "concentration.json";

/// One row of `episodes.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode: usize,
    pub seed: u64,
    #[serde(rename = "return")]
    pub ret: f64,
    pub wallclock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StepRow {
    episode: usize,
    seed: u64,
    step: usize,
    action: usize,
    observation: f64,
    reward: f64,
    wallclock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryEntry {
    pub episode: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub decision: DecisionTelemetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryFile {
    pub solver: String,
    pub base_seed: u64,
    pub n_sims: usize,
    pub gamma: f64,
    pub horizon: usize,
    pub decisions: Vec<TelemetryEntry>,
}

impl TelemetryFile {
    pub fn from_result(config: &ExperimentConfig, result: &BenchmarkResult) -> Self {
        let decisions = result
            .episodes
            .iter()
            .flat_map(|e| e.telemetry.iter().map(|d| TelemetryEntry { episode: e.episode, seed: e.seed, decision: d.clone() }))
            .collect();
        Self {
            solver: config.solver.name().to_string(),
            base_seed: config.base_seed,
            n_sims: config.n_sims,
            gamma: config.planning.gamma,
            horizon: config.planning.horizon,
            decisions,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn episodes_csv(episodes: &[EpisodeRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in episodes {
        w.serialize(EpisodeRow { episode: e.episode, seed: e.seed, ret: e.discounted_return, wallclock_s: e.wallclock_s })?;
    }
    if episodes.is_empty() {
        w.write_record(["episode", "seed", "return", "wallclock_s"])?;
    }
    w.into_inner().map_err(|e| BenchError::io("episodes.csv", e.into_error()))
}

pub fn steps_csv(episodes: &[EpisodeRecord]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["episode", "seed", "step", "action", "observation", "reward", "wallclock_s"])?;
    for e in episodes {
        for s in &e.steps {
            w.serialize(StepRow {
                episode: e.episode,
                seed: e.seed,
                step: s.step,
                action: s.action,
                observation: s.observation,
                reward: s.reward,
                wallclock_s: s.wallclock_s,
            })?;
        }
    }
    w.into_inner().map_err(|e| BenchError::io("steps.csv", e.into_error()))
}

pub fn read_episodes_csv(path: &Path) -> Result<Vec<EpisodeRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<EpisodeRow>, _>>()?)
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| BenchError::io(path, e))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

/// Writes every benchmark artifact into `dir`.
pub fn write_benchmark(config: &ExperimentConfig, result: &BenchmarkResult, dir: &Path) -> Result<()> {
    write_file(dir, EPISODES_CSV, &episodes_csv(&result.episodes)?)?;
    if config.output.step_csv {
        write_file(dir, STEPS_CSV, &steps_csv(&result.episodes)?)?;
    }
    write_json(dir, SUMMARY_JSON, &result.summary)?;
    write_json(dir, TELEMETRY_JSON, &TelemetryFile::from_result(config, result))
}
