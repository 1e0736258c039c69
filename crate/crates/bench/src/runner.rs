//! Seeded episode loop and the benchmark summary.

use std::time::Instant;

use ftpomdp_core::pomdp::{discounted_return, particle_filter_step};
use ftpomdp_core::RandomStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::env::{with_env, BenchEnv, DecisionTelemetry, EnvVisitor, SolverSpec};
use crate::error::{BenchError, Result};

/// Stream ids carved out of each episode seed.
const ENV_STREAM: u64 = 0;
const PLAN_STREAM: u64 = 1;
const FILTER_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub action: usize,
    pub observation: f64,
    pub reward: f64,
    pub wallclock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub discounted_return: f64,
    pub wallclock_s: f64,
    /// Filter steps where every particle had zero likelihood.
    pub filter_resets: usize,
    pub telemetry: Vec<DecisionTelemetry>,
}

impl EpisodeRecord {
    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }
}

pub fn episode_seed(base_seed: u64, episode: usize) -> u64 {
    base_seed.wrapping_add(episode as u64)
}

pub fn run_episode<E: BenchEnv>(
    env: &E,
    solver: &SolverSpec,
    config: &ExperimentConfig,
    episode: usize,
) -> Result<EpisodeRecord> {
    let seed = episode_seed(config.base_seed, episode);
    let fail = |source| BenchError::Episode { episode, seed, source };
    let mut env_rng = RandomStream::with_stream(seed, ENV_STREAM);
    let mut plan_rng = RandomStream::with_stream(seed, PLAN_STREAM);
    let mut filter_rng = RandomStream::with_stream(seed, FILTER_STREAM);
    let start = Instant::now();

    let mut state = env.initial_state(&mut env_rng);
    let mut belief = env.root_belief(config.n_particles, &mut filter_rng).map_err(|e| match e {
        BenchError::Core(c) => fail(c),
        other => other,
    })?;
    let mut steps = Vec::with_capacity(config.episode_steps);
    let mut telemetry = Vec::new();
    let mut filter_resets = 0;
    for t in 0..config.episode_steps {
        let clock = Instant::now();
        let decision = env.plan(solver, &belief, config.n_sims, &mut plan_rng).map_err(|e| match e {
            BenchError::Core(c) => fail(c),
            other => other,
        })?;
        let wallclock = clock.elapsed().as_secs_f64();
        let step = env.step(&state, decision.action, &mut env_rng).map_err(fail)?;
        let (next, report) = particle_filter_step(&belief, decision.action, &step.observation, env, config.n_particles, &mut filter_rng)
            .map_err(fail)?;
        filter_resets += report.degenerate as usize;
        steps.push(StepRecord {
            step: t,
            action: decision.action.0,
            observation: E::observation_value(&step.observation),
            reward: step.reward,
            wallclock_s: if config.output.record_wallclock { wallclock } else { 0.0 },
        });
        if let Some(mut d) = decision.telemetry {
            d.step = t;
            telemetry.push(d);
        }
        belief = next;
        state = step.next_state;
    }
    let rewards: Vec<f64> = steps.iter().map(|s| s.reward).collect();
    Ok(EpisodeRecord {
        episode,
        seed,
        discounted_return: discounted_return(&rewards, config.planning.gamma),
        steps,
        wallclock_s: if config.output.record_wallclock { start.elapsed().as_secs_f64() } else { 0.0 },
        filter_resets,
        telemetry,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub env: String,
    pub solver: String,
    pub n_episodes: usize,
    pub episode_steps: usize,
    pub n_sims: usize,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub mean: f64,
    /// Sample standard deviation with the `n - 1` denominator; null for one episode.
    pub std: Option<f64>,
    pub stderr: Option<f64>,
    pub std_estimator: String,
    pub filter_resets: usize,
}

/// Mean and sample standard deviation, summed in slice order.
pub fn mean_and_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, Some((ss / (n - 1.0)).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub summary: Summary,
    pub episodes: Vec<EpisodeRecord>,
}

pub fn summarize(config: &ExperimentConfig, episodes: &[EpisodeRecord]) -> Summary {
    let returns: Vec<f64> = episodes.iter().map(|e| e.discounted_return).collect();
    let (mean, std) = mean_and_std(&returns);
    Summary {
        env: config.env.name().to_string(),
        solver: config.solver.name().to_string(),
        n_episodes: episodes.len(),
        episode_steps: config.episode_steps,
        n_sims: config.n_sims,
        base_seed: config.base_seed,
        seeds: episodes.iter().map(|e| e.seed).collect(),
        mean,
        std,
        stderr: std.map(|s| s / (returns.len() as f64).sqrt()),
        std_estimator: "sample (n-1)".to_string(),
        filter_resets: episodes.iter().map(|e| e.filter_resets).sum(),
    }
}

struct Bench<'c> {
    config: &'c ExperimentConfig,
    solver: SolverSpec,
    jobs: usize,
}

impl EnvVisitor for Bench<'_> {
    type Output = Vec<EpisodeRecord>;

    fn visit<E: BenchEnv>(self, env: &E) -> Result<Vec<EpisodeRecord>> {
        let run = || (0..self.config.n_episodes).into_par_iter().map(|e| run_episode(env, &self.solver, self.config, e)).collect();
        if self.jobs == 1 {
            return (0..self.config.n_episodes).map(|e| run_episode(env, &self.solver, self.config, e)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| BenchError::config("jobs", e.to_string()))?;
        pool.install(run)
    }
}

/// Runs every episode, `jobs` at a time (0 lets rayon choose). Episode
/// `e` uses seed `base_seed + e`, so results do not depend on `jobs`.
pub fn run_benchmark(config: &ExperimentConfig, jobs: usize) -> Result<BenchmarkResult> {
    config.validate()?;
    let solver = SolverSpec::from_config(config)?;
    let episodes = with_env(&config.env, Bench { config, solver, jobs })?;
    Ok(BenchmarkResult { summary: summarize(config, &episodes), episodes })
}
