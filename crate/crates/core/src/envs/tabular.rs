use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pomdp::{ActionId, GenerativeModel, ParticleBelief, PlanningConfig, Step};
use crate::rng::RandomStream;

const ROW_TOL: f64 = 1e-12;

/// Finite POMDP given by explicit tables.
///
/// `transition[x][a][x']`, `observation[x'][z]`, `reward[x][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPomdp {
    n_states: usize,
    n_actions: usize,
    n_obs: usize,
    transition: Vec<Vec<Vec<f64>>>,
    observation: Vec<Vec<f64>>,
    reward: Vec<Vec<f64>>,
    initial: Vec<f64>,
    phi_z: f64,
}

fn check_row(row: &[f64], len: usize, what: &'static str) -> Result<()> {
    if row.len() != len {
        return Err(Error::InvalidModel(what));
    }
    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidModel(what));
    }
    if (row.iter().sum::<f64>() - 1.0).abs() > ROW_TOL {
        return Err(Error::InvalidModel(what));
    }
    Ok(())
}

fn sample_row(row: &[f64], rng: &mut RandomStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

impl TabularPomdp {
    /// Validates every table. `phi_z` is the required floor on positive
    /// observation probabilities.
    pub fn new(
        transition: Vec<Vec<Vec<f64>>>,
        observation: Vec<Vec<f64>>,
        reward: Vec<Vec<f64>>,
        initial: Vec<f64>,
        phi_z: f64,
    ) -> Result<Self> {
        let n_states = transition.len();
        if n_states == 0 {
            return Err(Error::InvalidModel("no states"));
        }
        let n_actions = transition[0].len();
        if n_actions == 0 {
            return Err(Error::InvalidModel("no actions"));
        }
        let n_obs = observation.first().map_or(0, Vec::len);
        if n_obs == 0 {
            return Err(Error::InvalidModel("no observations"));
        }
        for per_action in &transition {
            if per_action.len() != n_actions {
                return Err(Error::InvalidModel("transition action count differs between states"));
            }
            for row in per_action {
                check_row(row, n_states, "transition row must be a distribution over states")?;
            }
        }
        if observation.len() != n_states {
            return Err(Error::InvalidModel("observation table needs one row per state"));
        }
        for row in &observation {
            check_row(row, n_obs, "observation row must be a distribution over observations")?;
            if row.iter().any(|&p| p > 0.0 && p < phi_z) {
                return Err(Error::InvalidModel("positive observation probability below the floor"));
            }
        }
        if reward.len() != n_states || reward.iter().any(|r| r.len() != n_actions || r.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidModel("reward table must be states x actions"));
        }
        check_row(&initial, n_states, "initial belief must be a distribution over states")?;
        Ok(Self { n_states, n_actions, n_obs, transition, observation, reward, initial, phi_z })
    }

    /// Fixed 2-state, 2-action, 2-observation model used by the tests and
    /// the concentration experiment.
    pub fn reference() -> Self {
        Self::new(
            vec![
                vec![vec![0.9, 0.1], vec![0.7, 0.3]],
                vec![vec![0.1, 0.9], vec![0.6, 0.4]],
            ],
            vec![vec![0.8, 0.2], vec![0.3, 0.7]],
            vec![vec![1.0, 0.3], vec![0.0, 0.5]],
            vec![0.5, 0.5],
            0.2,
        )
        .expect("reference tables are valid")
    }

    /// Planning settings used with [`TabularPomdp::reference`].
    pub fn reference_planning() -> PlanningConfig {
        PlanningConfig { gamma: 0.95, horizon: 2, r_max: 1.0 }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn phi_z(&self) -> f64 {
        self.phi_z
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition(&self, x: usize, a: usize, x_next: usize) -> f64 {
        self.transition[x][a][x_next]
    }

    pub fn observation_prob(&self, x_next: usize, z: usize) -> f64 {
        self.observation[x_next][z]
    }

    pub fn reward(&self, x: usize, a: usize) -> f64 {
        self.reward[x][a]
    }

    pub fn max_abs_reward(&self) -> f64 {
        self.reward.iter().flatten().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Exact initial belief as a weighted particle set over state ids.
    pub fn initial_belief(&self) -> ParticleBelief<usize> {
        ParticleBelief::new((0..self.n_states).collect(), self.initial.clone()).expect("validated initial belief")
    }

    pub fn check_state(&self, x: usize) -> Result<()> {
        if x < self.n_states {
            Ok(())
        } else {
            Err(Error::InvalidIndex { what: "state", index: x, size: self.n_states })
        }
    }

    pub fn check_action(&self, a: ActionId) -> Result<()> {
        if a.0 < self.n_actions {
            Ok(())
        } else {
            Err(Error::InvalidIndex { what: "action", index: a.0, size: self.n_actions })
        }
    }

    pub fn check_obs(&self, z: usize) -> Result<()> {
        if z < self.n_obs {
            Ok(())
        } else {
            Err(Error::InvalidIndex { what: "observation", index: z, size: self.n_obs })
        }
    }
}

impl GenerativeModel for TabularPomdp {
    type State = usize;
    type Observation = usize;

    fn num_actions(&self) -> usize {
        self.n_actions
    }

    fn step(&self, x: &usize, a: ActionId, rng: &mut RandomStream) -> Result<Step<usize, usize>> {
        self.check_state(*x)?;
        self.check_action(a)?;
        let next_state = sample_row(&self.transition[*x][a.0], rng);
        let observation = sample_row(&self.observation[next_state], rng);
        Ok(Step { next_state, observation, reward: self.reward[*x][a.0] })
    }

    fn observation_density(&self, next_state: &usize, _action: ActionId, obs: &usize) -> f64 {
        self.observation[*next_state][*obs]
    }
}
