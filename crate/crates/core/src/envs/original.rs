use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{normal_pdf, sample_normal};
use crate::pomdp::{ActionId, GenerativeModel, ParticleBelief, Step};
use crate::rng::RandomStream;
use crate::voronoi::Interval;

/// Parameters of the unbounded LightDark 1D model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct OriginalLightDarkParams {
    pub actions: Vec<f64>,
    pub step_size: f64,
    pub sigma_tr: f64,
    pub x_light: f64,
    pub sigma_min: f64,
    pub slope: f64,
    pub goal: f64,
    pub step_cost: f64,
    pub init_mean: f64,
    pub init_sd: f64,
    /// Nominal observation range; only used to measure partition coverage.
    pub obs_lo: f64,
    pub obs_hi: f64,
}

impl Default for OriginalLightDarkParams {
    fn default() -> Self {
        Self {
            actions: vec![-1.0, 0.0, 1.0],
            step_size: 1.0,
            sigma_tr: 0.1,
            x_light: 0.0,
            sigma_min: 0.1,
            slope: 0.5,
            goal: 0.0,
            step_cost: 0.1,
            init_mean: 2.0,
            init_sd: 1.0,
            obs_lo: -10.0,
            obs_hi: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OriginalLightDark {
    params: OriginalLightDarkParams,
}

impl OriginalLightDark {
    pub fn new(params: OriginalLightDarkParams) -> Result<Self> {
        if params.actions.is_empty() {
            return Err(Error::InvalidParameter { name: "actions", reason: "need at least one action" });
        }
        if !(params.sigma_tr > 0.0 && params.sigma_min > 0.0 && params.init_sd > 0.0) {
            return Err(Error::InvalidParameter { name: "sigma", reason: "noise scales must be positive" });
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &OriginalLightDarkParams {
        &self.params
    }

    pub fn observation_space(&self) -> Interval {
        Interval::new(self.params.obs_lo, self.params.obs_hi)
    }

    pub fn sigma_obs(&self, x: f64) -> f64 {
        self.params.sigma_min + self.params.slope * (x - self.params.x_light).abs()
    }

    /// Reward on arrival at `x_next`.
    pub fn reward(&self, x_next: f64) -> f64 {
        -(x_next - self.params.goal).abs() - self.params.step_cost
    }

    pub fn initial_belief(&self, n_particles: usize, rng: &mut RandomStream) -> Result<ParticleBelief<f64>> {
        let p = &self.params;
        ParticleBelief::uniform((0..n_particles).map(|_| sample_normal(rng, p.init_mean, p.init_sd)).collect())
    }

    pub fn sample_initial_state(&self, rng: &mut RandomStream) -> f64 {
        sample_normal(rng, self.params.init_mean, self.params.init_sd)
    }
}

impl GenerativeModel for OriginalLightDark {
    type State = f64;
    type Observation = f64;

    fn num_actions(&self) -> usize {
        self.params.actions.len()
    }

    fn step(&self, x: &f64, a: ActionId, rng: &mut RandomStream) -> Result<Step<f64, f64>> {
        let p = &self.params;
        let disp = *p.actions.get(a.0).ok_or(Error::InvalidIndex {
            what: "action",
            index: a.0,
            size: p.actions.len(),
        })?;
        let next = x + disp * p.step_size + sample_normal(rng, 0.0, p.sigma_tr);
        let observation = sample_normal(rng, next, self.sigma_obs(next));
        Ok(Step { next_state: next, observation, reward: self.reward(next) })
    }

    fn observation_density(&self, next_state: &f64, _action: ActionId, obs: &f64) -> f64 {
        normal_pdf(*obs, *next_state, self.sigma_obs(*next_state))
    }
}
