//! Empirical tail frequencies of the root value error on the tabular model.

use ftpomdp_core::envs::TabularPomdp;
use ftpomdp_core::oracle::{optimal_value, BeliefVector};
use ftpomdp_core::pomcp::CorrectedPomcp;
use ftpomdp_core::RandomStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub z: f64,
    /// Fraction of searches with `n |V_hat - V*| >= n^eta z`.
    pub frequency: f64,
    /// `2 tail_bound(z)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub n: usize,
    pub searches: usize,
    pub mean_error: f64,
    pub quantiles: Vec<Quantile>,
    pub tails: Vec<TailPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub base_seed: u64,
    pub v_star: f64,
    pub eta: f64,
    pub entries: Vec<ScheduleEntry>,
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Search `i` at budget `n` draws from `with_stream(base_seed + i, n)`.
pub fn run_concentration(config: &ExperimentConfig) -> Result<ConcentrationReport> {
    config.validate()?;
    let conc = config
        .concentration
        .as_ref()
        .ok_or_else(|| BenchError::config("concentration", "section is required for this command"))?;
    let model = TabularPomdp::reference();
    let planning = config.planning.to_core()?;
    let rule = config.solver.selection().rule(planning)?;
    let ladder = config.certificate.ladder(planning.horizon)?;
    let b0 = BeliefVector::new(model.initial().to_vec())?;
    let v_star = optimal_value(&model, &b0, planning.horizon, planning.gamma)?;
    let belief = model.initial_belief();
    let solver = CorrectedPomcp::with_rule(&model, rule);

    let mut entries = Vec::with_capacity(conc.n_schedule.len());
    for &n in &conc.n_schedule {
        let errors: Vec<f64> = (0..conc.searches)
            .into_par_iter()
            .map(|i| {
                let mut rng = RandomStream::with_stream(config.base_seed.wrapping_add(i as u64), n as u64);
                Ok((solver.search(&belief, n, &mut rng)?.value_estimate() - v_star).abs())
            })
            .collect::<Result<_>>()?;
        let mut sorted = errors.clone();
        sorted.sort_by(f64::total_cmp);
        let scale = (n as f64).powf(1.0 - ladder.eta());
        let mut tails = Vec::with_capacity(conc.z_grid.len());
        for &z in &conc.z_grid {
            let hits = errors.iter().filter(|&&e| e * scale >= z).count();
            tails.push(TailPoint { z, frequency: hits as f64 / errors.len() as f64, bound: 2.0 * ladder.tail_bound(z)? });
        }
        entries.push(ScheduleEntry {
            n,
            searches: errors.len(),
            mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
            quantiles: conc.quantiles.iter().map(|&q| Quantile { q, value: quantile(&sorted, q) }).collect(),
            tails,
        });
    }
    Ok(ConcentrationReport { base_seed: config.base_seed, v_star, eta: ladder.eta(), entries })
}
