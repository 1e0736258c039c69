//! JSON experiment configuration. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use ftpomdp_core::bonus::{BonusParams, SelectionRule};
use ftpomdp_core::bounds::{build_ladder, HolderConstants, ParameterLadder};
use ftpomdp_core::envs::{ModifiedLightDarkParams, OriginalLightDarkParams};
use ftpomdp_core::pomcpow::Widening;
use ftpomdp_core::PlanningConfig;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub solver: SolverConfig,
    pub planning: PlanningSection,
    pub n_sims: usize,
    pub episode_steps: usize,
    pub n_episodes: usize,
    pub base_seed: u64,
    #[serde(default = "default_particles")]
    pub n_particles: usize,
    #[serde(default)]
    pub certificate: CertificateConfig,
    #[serde(default)]
    pub concentration: Option<ConcentrationConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_particles() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvConfig {
    ModifiedLightdark {
        #[serde(default)]
        overrides: ModifiedLightDarkParams,
    },
    OriginalLightdark {
        #[serde(default)]
        overrides: OriginalLightDarkParams,
    },
    /// The fixed two-state reference model.
    Tabular,
}

impl EnvConfig {
    pub fn name(&self) -> &'static str {
        match self {
            EnvConfig::ModifiedLightdark { .. } => "modified_lightdark",
            EnvConfig::OriginalLightdark { .. } => "original_lightdark",
            EnvConfig::Tabular => "tabular",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    CorrectedPomcp {
        selection: SelectionConfig,
    },
    VoroPomcpow {
        selection: SelectionConfig,
        widening: Widening,
    },
    Pomcpow {
        #[serde(default = "default_baseline_selection")]
        selection: SelectionConfig,
        widening: Widening,
    },
}

fn default_baseline_selection() -> SelectionConfig {
    SelectionConfig::Ucb1 { c0: 1.0 }
}

impl SolverConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SolverConfig::CorrectedPomcp { .. } => "corrected_pomcp",
            SolverConfig::VoroPomcpow { .. } => "voro_pomcpow",
            SolverConfig::Pomcpow { .. } => "pomcpow",
        }
    }

    pub fn selection(&self) -> &SelectionConfig {
        match self {
            SolverConfig::CorrectedPomcp { selection }
            | SolverConfig::VoroPomcpow { selection, .. }
            | SolverConfig::Pomcpow { selection, .. } => selection,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectionConfig {
    Practical { eta: f64, c0: f64 },
    Theoretical { eta: f64, xi0: f64, beta0: f64 },
    Ucb1 { c0: f64 },
}

impl SelectionConfig {
    pub fn rule(&self, planning: PlanningConfig) -> Result<SelectionRule> {
        let at = |e| BenchError::Config { key: "solver.selection".into(), reason: format!("{e}") };
        Ok(match *self {
            SelectionConfig::Practical { eta, c0 } => {
                SelectionRule::Corrected(BonusParams::practical(eta, c0, planning).map_err(at)?)
            }
            SelectionConfig::Theoretical { eta, xi0, beta0 } => {
                let ladder = build_ladder(xi0, eta, planning.horizon, beta0).map_err(at)?;
                SelectionRule::Corrected(BonusParams::theoretical(ladder, planning).map_err(at)?)
            }
            SelectionConfig::Ucb1 { c0 } => {
                if !(c0 > 0.0) {
                    return Err(BenchError::config("solver.selection.c0", "must be positive"));
                }
                SelectionRule::Ucb1 { c0, planning }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningSection {
    pub gamma: f64,
    pub horizon: usize,
    pub r_max: f64,
}

impl PlanningSection {
    pub fn to_core(self) -> Result<PlanningConfig> {
        PlanningConfig::new(self.gamma, self.horizon, self.r_max)
            .map_err(|e| BenchError::Config { key: "planning".into(), reason: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertificateConfig {
    /// Confidence levels `1 - delta`.
    pub confidences: Vec<f64>,
    pub xi0: f64,
    pub beta0: f64,
    pub eta: f64,
    pub c_cov: f64,
    pub k_z: f64,
    pub radius_cap: f64,
    pub holder: HolderConstants,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            confidences: vec![0.8, 0.85, 0.9],
            xi0: 2.0,
            beta0: 2.0,
            eta: 0.5,
            c_cov: 20.0,
            k_z: 1.0,
            radius_cap: 1.0,
            holder: HolderConstants::default(),
        }
    }
}

impl CertificateConfig {
    pub fn ladder(&self, levels: usize) -> Result<ParameterLadder> {
        build_ladder(self.xi0, self.eta, levels, self.beta0)
            .map_err(|e| BenchError::Config { key: "certificate".into(), reason: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub n_schedule: Vec<usize>,
    /// Independent searches per schedule entry.
    pub searches: usize,
    /// Thresholds `z >= 1` of the tail event `n |V_hat - V*| >= n^eta z`.
    pub z_grid: Vec<f64>,
    #[serde(default = "default_quantiles")]
    pub quantiles: Vec<f64>,
}

fn default_quantiles() -> Vec<f64> {
    vec![0.5, 0.9, 0.99]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write measured seconds per episode; when false the column holds 0
    /// so that reruns produce identical bytes.
    pub record_wallclock: bool,
    /// Also write the per-step detail CSV.
    pub step_csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), record_wallclock: false, step_csv: false }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let planning = self.planning.to_core()?;
        if self.n_episodes == 0 {
            return Err(BenchError::config("n_episodes", "must be at least 1"));
        }
        if self.n_sims == 0 {
            return Err(BenchError::config("n_sims", "must be at least 1"));
        }
        if self.n_particles == 0 {
            return Err(BenchError::config("n_particles", "must be at least 1"));
        }
        if let Some(&c) = self.certificate.confidences.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(BenchError::config("certificate.confidences", format!("{c} is outside (0, 1)")));
        }
        self.solver.selection().rule(planning)?;
        if let SolverConfig::VoroPomcpow { widening, .. } | SolverConfig::Pomcpow { widening, .. } = &self.solver {
            widening.validate().map_err(|e| BenchError::config("solver.widening", e.to_string()))?;
            if matches!(self.env, EnvConfig::Tabular) {
                return Err(BenchError::config("solver.name", "widening solvers need a continuous observation space"));
            }
        }
        if let Some(c) = &self.concentration {
            if !matches!(self.env, EnvConfig::Tabular) {
                return Err(BenchError::config("concentration", "needs the tabular env so V* is computable"));
            }
            if c.searches == 0 || c.n_schedule.is_empty() || c.n_schedule.contains(&0) {
                return Err(BenchError::config("concentration", "need searches >= 1 and a nonempty schedule of positive n"));
            }
            if c.z_grid.iter().any(|z| !(*z >= 1.0)) {
                return Err(BenchError::config("concentration.z_grid", "thresholds must be at least 1"));
            }
            if c.quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) {
                return Err(BenchError::config("concentration.quantiles", "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}
