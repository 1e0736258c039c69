//! POMDP abstractions shared by every solver and environment.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Index into an environment's finite action list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Horizon, discount and reward bound of a planning problem.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PlanningConfig {
    pub gamma: f64,
    pub horizon: usize,
    pub r_max: f64,
}

impl PlanningConfig {
    pub fn new(gamma: f64, horizon: usize, r_max: f64) -> Result<Self> {
        let cfg = Self { gamma, horizon, r_max };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter { name: "gamma", reason: "must lie in (0, 1]" });
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter { name: "horizon", reason: "must be at least 1" });
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::InvalidParameter { name: "r_max", reason: "must be positive" });
        }
        Ok(())
    }

    /// Largest achievable |value| with `horizon - depth` steps to go:
    /// `r_max (1 - gamma^(L - depth)) / (1 - gamma)`, or `(L - depth) r_max`
    /// when undiscounted.
    pub fn v_max(&self, depth: usize) -> f64 {
        let steps = self.horizon.saturating_sub(depth);
        if self.gamma == 1.0 {
            steps as f64 * self.r_max
        } else {
            self.r_max * (1.0 - libm::pow(self.gamma, steps as f64)) / (1.0 - self.gamma)
        }
    }
}

/// One draw of the generative model.
#[derive(Debug, Clone, PartialEq)]
pub struct Step<S, O> {
    pub next_state: S,
    pub observation: O,
    pub reward: f64,
}

/// Black-box simulator `G(s, a) -> (s', z, r)` plus the observation density
/// needed for particle filtering.
pub trait GenerativeModel {
    type State: Clone;
    type Observation: Clone;

    fn num_actions(&self) -> usize;

    fn step(
        &self,
        state: &Self::State,
        action: ActionId,
        rng: &mut RandomStream,
    ) -> Result<Step<Self::State, Self::Observation>>;

    /// Density (or probability mass) of `obs` after `action` landed in `next_state`.
    fn observation_density(&self, next_state: &Self::State, action: ActionId, obs: &Self::Observation) -> f64;
}

/// Weighted particle approximation of a belief. Immutable once built;
/// the cumulative weights are precomputed for O(log n) sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleBelief<S> {
    particles: Vec<S>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<S: Clone> ParticleBelief<S> {
    /// Builds a belief from raw nonnegative weights, normalizing them.
    pub fn new(particles: Vec<S>, weights: Vec<f64>) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::EmptyBelief);
        }
        if particles.len() != weights.len() {
            return Err(Error::InvalidWeights("particle and weight counts differ"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidWeights("weights sum to zero"));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self { particles, weights, cumulative })
    }

    pub fn uniform(particles: Vec<S>) -> Result<Self> {
        let n = particles.len();
        Self::new(particles, alloc::vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[S] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, f64)> {
        self.particles.iter().zip(self.weights.iter().copied())
    }

    /// Draws particle `i` with probability `weights[i]`.
    pub fn sample(&self, rng: &mut RandomStream) -> &S {
        &self.particles[self.sample_index(rng)]
    }

    fn sample_index(&self, rng: &mut RandomStream) -> usize {
        let u = rng.uniform();
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.particles.len() {
            return i;
        }
        // u landed above a cumulative sum that rounded below 1
        self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }
}

/// Samples a state from `belief`.
pub fn sample_particle<S: Clone>(belief: &ParticleBelief<S>, rng: &mut RandomStream) -> Result<S> {
    if belief.is_empty() {
        return Err(Error::EmptyBelief);
    }
    Ok(belief.sample(rng).clone())
}

/// `sum_t gamma^t rewards[t]`.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    let mut discount = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    total
}

/// Outcome flags of one filter step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FilterReport {
    /// Every propagated particle had zero likelihood; weights were reset to uniform.
    pub degenerate: bool,
}

/// Bootstrap particle filter step with systematic resampling.
///
/// Each particle is pushed through the transition, reweighted by the
/// observation density at `obs`, and the result is resampled to
/// `n_particles` equally weighted particles.
pub fn particle_filter_step<M: GenerativeModel>(
    belief: &ParticleBelief<M::State>,
    action: ActionId,
    obs: &M::Observation,
    model: &M,
    n_particles: usize,
    rng: &mut RandomStream,
) -> Result<(ParticleBelief<M::State>, FilterReport)> {
    if n_particles == 0 {
        return Err(Error::InvalidParameter { name: "n_particles", reason: "must be at least 1" });
    }
    let mut propagated = Vec::with_capacity(belief.len());
    let mut weights = Vec::with_capacity(belief.len());
    for (state, w) in belief.iter() {
        let step = model.step(state, action, rng)?;
        weights.push(w * model.observation_density(&step.next_state, action, obs));
        propagated.push(step.next_state);
    }
    let mut report = FilterReport::default();
    let posterior = match ParticleBelief::new(propagated.clone(), weights) {
        Ok(b) => b,
        Err(Error::InvalidWeights(_)) => {
            report.degenerate = true;
            ParticleBelief::uniform(propagated)?
        }
        Err(e) => return Err(e),
    };
    Ok((systematic_resample(&posterior, n_particles, rng), report))
}

/// Systematic resampling to `n` equally weighted particles.
pub fn systematic_resample<S: Clone>(belief: &ParticleBelief<S>, n: usize, rng: &mut RandomStream) -> ParticleBelief<S> {
    let step = 1.0 / n as f64;
    let start = rng.uniform() * step;
    let last = belief.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    for k in 0..n {
        let u = start + k as f64 * step;
        while i < last && belief.cumulative[i] <= u {
            i += 1;
        }
        out.push(belief.particles[i].clone());
    }
    ParticleBelief::uniform(out).expect("n >= 1 particles")
}
