use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{sample_truncnorm, truncnorm_pdf};
use crate::pomdp::{ActionId, GenerativeModel, ParticleBelief, Step};
use crate::rng::RandomStream;
use crate::voronoi::Interval;

/// Parameters of the bounded-reward LightDark 1D variant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ModifiedLightDarkParams {
    pub state_lo: f64,
    pub state_hi: f64,
    pub obs_lo: f64,
    pub obs_hi: f64,
    /// Displacement of each action.
    pub actions: Vec<f64>,
    /// Tie-break rank `r_a` of each action, scaled by `tau` in the reward.
    pub action_rank: Vec<f64>,
    pub x_light: f64,
    pub x_goal: f64,
    pub sigma_t: f64,
    pub w_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub k_floor: f64,
    pub lambda: f64,
    pub tau: f64,
    pub init_mean: f64,
    pub init_sd: f64,
}

impl Default for ModifiedLightDarkParams {
    fn default() -> Self {
        Self {
            state_lo: -1.0,
            state_hi: 1.0,
            obs_lo: -1.5,
            obs_hi: 1.5,
            actions: vec![-0.4, 0.0, 0.4],
            action_rank: vec![0.0, 1.0, 2.0],
            x_light: 0.0,
            x_goal: 0.8,
            sigma_t: 0.02,
            w_max: 0.06,
            sigma_min: 0.05,
            sigma_max: 0.35,
            k_floor: 0.05,
            lambda: 0.05,
            tau: 1e-4,
            init_mean: -0.6,
            init_sd: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedLightDark {
    params: ModifiedLightDarkParams,
    max_action: f64,
}

impl ModifiedLightDark {
    pub fn new(params: ModifiedLightDarkParams) -> Result<Self> {
        let p = &params;
        if p.actions.is_empty() || p.actions.len() != p.action_rank.len() {
            return Err(Error::InvalidParameter { name: "actions", reason: "need one rank per action" });
        }
        if !(p.state_lo < p.state_hi && p.obs_lo < p.obs_hi) {
            return Err(Error::InvalidParameter { name: "box", reason: "empty state or observation box" });
        }
        if !(p.sigma_min > 0.0 && p.sigma_min < p.sigma_max) {
            return Err(Error::InvalidParameter { name: "sigma", reason: "need 0 < sigma_min < sigma_max" });
        }
        if !(0.0..1.0).contains(&p.k_floor) {
            return Err(Error::InvalidParameter { name: "k_floor", reason: "must lie in [0, 1)" });
        }
        if !(p.sigma_t > 0.0 && p.w_max > 0.0 && p.init_sd > 0.0) {
            return Err(Error::InvalidParameter { name: "noise", reason: "scales must be positive" });
        }
        let max_action = p.actions.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        Ok(Self { params, max_action })
    }

    pub fn params(&self) -> &ModifiedLightDarkParams {
        &self.params
    }

    pub fn observation_space(&self) -> Interval {
        Interval::new(self.params.obs_lo, self.params.obs_hi)
    }

    /// Observation noise scale `sigma_min + (sigma_max - sigma_min) |x - x_light|`.
    pub fn sigma_obs(&self, x: f64) -> f64 {
        let p = &self.params;
        p.sigma_min + (p.sigma_max - p.sigma_min) * (x - p.x_light).abs()
    }

    fn displacement(&self, a: ActionId) -> Result<f64> {
        self.params.actions.get(a.0).copied().ok_or(Error::InvalidIndex {
            what: "action",
            index: a.0,
            size: self.params.actions.len(),
        })
    }

    /// Reward of taking `a` in pre-transition state `x`; always in `[0, 1]`.
    pub fn reward(&self, x: f64, a: ActionId) -> Result<f64> {
        let p = &self.params;
        let disp = self.displacement(a)?;
        let effort = if self.max_action > 0.0 { disp.abs() / self.max_action } else { 0.0 };
        let cost = (x - p.x_goal).abs() / 2.0 + p.lambda * effort + p.tau * p.action_rank[a.0];
        Ok(1.0 - cost.min(1.0))
    }

    /// Mixture density of `z` given the landing state `x`.
    pub fn obs_density(&self, x: f64, z: f64) -> f64 {
        let p = &self.params;
        if z < p.obs_lo || z > p.obs_hi {
            return 0.0;
        }
        let width = p.obs_hi - p.obs_lo;
        (1.0 - p.k_floor) * truncnorm_pdf(z, x, self.sigma_obs(x), p.obs_lo, p.obs_hi) + p.k_floor / width
    }

    fn sample_obs(&self, x: f64, rng: &mut RandomStream) -> f64 {
        let p = &self.params;
        if rng.uniform() < p.k_floor {
            p.obs_lo + rng.uniform() * (p.obs_hi - p.obs_lo)
        } else {
            sample_truncnorm(rng, x, self.sigma_obs(x), p.obs_lo, p.obs_hi)
        }
    }

    pub fn sample_initial_state(&self, rng: &mut RandomStream) -> f64 {
        let p = &self.params;
        sample_truncnorm(rng, p.init_mean, p.init_sd, p.state_lo, p.state_hi)
    }

    pub fn initial_belief(&self, n_particles: usize, rng: &mut RandomStream) -> Result<ParticleBelief<f64>> {
        let particles = (0..n_particles).map(|_| self.sample_initial_state(rng)).collect();
        ParticleBelief::uniform(particles)
    }
}

impl GenerativeModel for ModifiedLightDark {
    type State = f64;
    type Observation = f64;

    fn num_actions(&self) -> usize {
        self.params.actions.len()
    }

    fn step(&self, x: &f64, a: ActionId, rng: &mut RandomStream) -> Result<Step<f64, f64>> {
        let p = &self.params;
        let x = *x;
        if !(p.state_lo..=p.state_hi).contains(&x) {
            return Err(Error::StateOutOfBox(x));
        }
        let reward = self.reward(x, a)?;
        let w = sample_truncnorm(rng, 0.0, p.sigma_t, -p.w_max, p.w_max);
        let next = (x + self.displacement(a)? + w).clamp(p.state_lo, p.state_hi);
        let observation = self.sample_obs(next, rng);
        Ok(Step { next_state: next, observation, reward })
    }

    fn observation_density(&self, next_state: &f64, _action: ActionId, obs: &f64) -> f64 {
        self.obs_density(*next_state, *obs)
    }
}
