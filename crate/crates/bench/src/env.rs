//! Glue between the config-selected environment and solver.

use ftpomdp_core::bonus::SelectionRule;
use ftpomdp_core::envs::{ModifiedLightDark, OriginalLightDark, TabularPomdp};
use ftpomdp_core::pomcp::{CorrectedPomcp, ObservationKey};
use ftpomdp_core::pomcpow::{Pomcpow, VoroPomcpow, Widening};
use ftpomdp_core::voronoi::{Interval, Metric};
use ftpomdp_core::{ActionId, GenerativeModel, ParticleBelief, RandomStream};
use serde::{Deserialize, Serialize};

use crate::config::{EnvConfig, ExperimentConfig, SolverConfig};
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    CorrectedPomcp,
    VoroPomcpow,
    Pomcpow,
}

/// Solver choice resolved against the planning config.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub rule: SelectionRule,
    pub widening: Option<Widening>,
}

impl SolverSpec {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let rule = config.solver.selection().rule(config.planning.to_core()?)?;
        let (kind, widening) = match &config.solver {
            SolverConfig::CorrectedPomcp { .. } => (SolverKind::CorrectedPomcp, None),
            SolverConfig::VoroPomcpow { widening, .. } => (SolverKind::VoroPomcpow, Some(*widening)),
            SolverConfig::Pomcpow { widening, .. } => (SolverKind::Pomcpow, Some(*widening)),
        };
        Ok(Self { kind, rule, widening })
    }
}

/// Partition summary of one Voro-POMCPOW decision; the inputs of its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTelemetry {
    pub step: usize,
    /// Distinct cell counts over visited history-action nodes above the horizon.
    pub m_values: Vec<u64>,
    /// Size of the union-bound node set: visited history-action nodes.
    pub h_l_size: u64,
    pub depth_l_histories: u64,
    pub total_nodes: u64,
    pub duplicate_centers: u64,
    pub max_covering_radius: f64,
    pub root_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: ActionId,
    pub root_value: f64,
    pub telemetry: Option<DecisionTelemetry>,
}

pub trait BenchEnv: GenerativeModel + Sync {
    fn initial_state(&self, rng: &mut RandomStream) -> Self::State;
    fn root_belief(&self, n_particles: usize, rng: &mut RandomStream) -> Result<ParticleBelief<Self::State>>;
    fn observation_value(obs: &Self::Observation) -> f64;
    fn plan(
        &self,
        solver: &SolverSpec,
        belief: &ParticleBelief<Self::State>,
        n_sims: usize,
        rng: &mut RandomStream,
    ) -> Result<Decision>;
}

fn plan_pomcp<M>(model: &M, rule: &SelectionRule, belief: &ParticleBelief<M::State>, n: usize, rng: &mut RandomStream) -> Result<Decision>
where
    M: GenerativeModel,
    M::Observation: ObservationKey,
{
    let out = CorrectedPomcp::with_rule(model, rule.clone()).search(belief, n, rng)?;
    Ok(Decision { action: out.action, root_value: out.value_estimate(), telemetry: None })
}

fn plan_continuous<M>(
    model: &M,
    space: Interval,
    solver: &SolverSpec,
    belief: &ParticleBelief<M::State>,
    n: usize,
    rng: &mut RandomStream,
) -> Result<Decision>
where
    M: GenerativeModel<Observation = f64>,
    M::Observation: Metric,
{
    let widening = || solver.widening.ok_or_else(|| BenchError::config("solver.widening", "missing"));
    match solver.kind {
        SolverKind::CorrectedPomcp => plan_pomcp(model, &solver.rule, belief, n, rng),
        SolverKind::Pomcpow => {
            let out = Pomcpow::new(model, solver.rule.clone(), widening()?)?.search(belief, n, rng)?;
            Ok(Decision { action: out.action, root_value: out.tree.root().value_estimate(), telemetry: None })
        }
        SolverKind::VoroPomcpow => {
            let out = VoroPomcpow::new(model, solver.rule.clone(), widening()?)?.search(belief, n, rng)?;
            let horizon = solver.rule.planning().horizon;
            let t = out.tree.telemetry(horizon, &space)?;
            let mut m_values = t.m_list.clone();
            m_values.sort_unstable();
            m_values.dedup();
            let root_value = out.value_estimate();
            Ok(Decision {
                action: out.action,
                root_value,
                telemetry: Some(DecisionTelemetry {
                    step: 0,
                    m_values,
                    h_l_size: t.history_action_nodes,
                    depth_l_histories: t.depth_l_histories,
                    total_nodes: t.total_nodes,
                    duplicate_centers: t.duplicate_centers,
                    max_covering_radius: t.covering_radii.iter().cloned().fold(0.0, f64::max),
                    root_value,
                }),
            })
        }
    }
}

impl BenchEnv for ModifiedLightDark {
    fn initial_state(&self, rng: &mut RandomStream) -> f64 {
        self.sample_initial_state(rng)
    }

    fn root_belief(&self, n: usize, rng: &mut RandomStream) -> Result<ParticleBelief<f64>> {
        Ok(self.initial_belief(n, rng)?)
    }

    fn observation_value(obs: &f64) -> f64 {
        *obs
    }

    fn plan(&self, solver: &SolverSpec, belief: &ParticleBelief<f64>, n: usize, rng: &mut RandomStream) -> Result<Decision> {
        plan_continuous(self, self.observation_space(), solver, belief, n, rng)
    }
}

impl BenchEnv for OriginalLightDark {
    fn initial_state(&self, rng: &mut RandomStream) -> f64 {
        self.sample_initial_state(rng)
    }

    fn root_belief(&self, n: usize, rng: &mut RandomStream) -> Result<ParticleBelief<f64>> {
        Ok(self.initial_belief(n, rng)?)
    }

    fn observation_value(obs: &f64) -> f64 {
        *obs
    }

    fn plan(&self, solver: &SolverSpec, belief: &ParticleBelief<f64>, n: usize, rng: &mut RandomStream) -> Result<Decision> {
        plan_continuous(self, self.observation_space(), solver, belief, n, rng)
    }
}

impl BenchEnv for TabularPomdp {
    fn initial_state(&self, rng: &mut RandomStream) -> usize {
        *self.initial_belief().sample(rng)
    }

    fn root_belief(&self, _n: usize, _rng: &mut RandomStream) -> Result<ParticleBelief<usize>> {
        Ok(self.initial_belief())
    }

    fn observation_value(obs: &usize) -> f64 {
        *obs as f64
    }

    fn plan(&self, solver: &SolverSpec, belief: &ParticleBelief<usize>, n: usize, rng: &mut RandomStream) -> Result<Decision> {
        match solver.kind {
            SolverKind::CorrectedPomcp => plan_pomcp(self, &solver.rule, belief, n, rng),
            _ => Err(BenchError::config("solver.name", "widening solvers need a continuous observation space")),
        }
    }
}

/// Runs `f` with the environment named in the config.
pub fn with_env<R>(config: &EnvConfig, f: impl EnvVisitor<Output = R>) -> Result<R> {
    let at = |e: ftpomdp_core::Error| BenchError::Config { key: "env.overrides".into(), reason: e.to_string() };
    match config {
        EnvConfig::ModifiedLightdark { overrides } => f.visit(&ModifiedLightDark::new(overrides.clone()).map_err(at)?),
        EnvConfig::OriginalLightdark { overrides } => f.visit(&OriginalLightDark::new(overrides.clone()).map_err(at)?),
        EnvConfig::Tabular => f.visit(&TabularPomdp::reference()),
    }
}

pub trait EnvVisitor {
    type Output;
    fn visit<E: BenchEnv>(self, env: &E) -> Result<Self::Output>;
}
