//! Exhaustive finite-horizon optimal values for small tabular POMDPs.
//!
//! The recursion expands every (action, observation) branch, so it is only
//! meant for desk-scale models; inputs whose tree would exceed
//! [`NODE_CAP`] nodes are refused.

use alloc::vec::Vec;

use crate::envs::TabularPomdp;
use crate::error::{Error, Result};
use crate::pomdp::ActionId;

pub const NODE_CAP: f64 = 1e6;

/// Probability vector over the states of a tabular model.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefVector(Vec<f64>);

impl BeliefVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidWeights("belief entries must be finite and nonnegative"));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights("belief must sum to one"));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect())
    }
}

/// Bayes update `b'(x') ∝ P_Z(z|x') sum_x P_T(x'|x,a) b(x)`. Also returns
/// the normalizer `P(z | b, a)`.
pub fn bayes_update(pomdp: &TabularPomdp, b: &BeliefVector, a: ActionId, z: usize) -> Result<(BeliefVector, f64)> {
    pomdp.check_action(a)?;
    pomdp.check_obs(z)?;
    if b.0.len() != pomdp.n_states() {
        return Err(Error::InvalidIndex { what: "belief length", index: b.0.len(), size: pomdp.n_states() });
    }
    let n = pomdp.n_states();
    let mut post: Vec<f64> = (0..n)
        .map(|xn| {
            let prior: f64 = (0..n).map(|x| pomdp.transition(x, a.0, xn) * b.0[x]).sum();
            pomdp.observation_prob(xn, z) * prior
        })
        .collect();
    let p_z: f64 = post.iter().sum();
    if p_z <= 0.0 {
        return Err(Error::ImpossibleObservation);
    }
    post.iter_mut().for_each(|p| *p /= p_z);
    Ok((BeliefVector(post), p_z))
}

/// Expected immediate reward `sum_x b(x) r(x, a)`.
pub fn expected_reward(pomdp: &TabularPomdp, b: &BeliefVector, a: ActionId) -> f64 {
    b.0.iter().enumerate().map(|(x, p)| p * pomdp.reward(x, a.0)).sum()
}

fn check_size(pomdp: &TabularPomdp, depth: usize) -> Result<()> {
    let nodes = libm::pow((pomdp.n_actions() * pomdp.n_obs()) as f64, depth as f64);
    if nodes > NODE_CAP {
        return Err(Error::OracleTooLarge { nodes, cap: NODE_CAP });
    }
    Ok(())
}

/// Optimal action value `r(b,a) + gamma sum_z p_z V*(b', d - 1)`.
pub fn optimal_q(pomdp: &TabularPomdp, b: &BeliefVector, a: ActionId, depth_remaining: usize, gamma: f64) -> Result<f64> {
    check_size(pomdp, depth_remaining)?;
    q_unchecked(pomdp, b, a, depth_remaining, gamma)
}

/// `V*(b, d) = max_a [r(b,a) + gamma sum_{z: p_z > 0} p_z V*(psi(b,a,z), d-1)]`, `V*(., 0) = 0`.
pub fn optimal_value(pomdp: &TabularPomdp, b: &BeliefVector, depth_remaining: usize, gamma: f64) -> Result<f64> {
    check_size(pomdp, depth_remaining)?;
    value_unchecked(pomdp, b, depth_remaining, gamma)
}

/// Optimal root action, lowest index among ties.
pub fn optimal_action(pomdp: &TabularPomdp, b: &BeliefVector, depth_remaining: usize, gamma: f64) -> Result<ActionId> {
    check_size(pomdp, depth_remaining)?;
    let mut best = (ActionId(0), f64::NEG_INFINITY);
    for a in (0..pomdp.n_actions()).map(ActionId) {
        let q = q_unchecked(pomdp, b, a, depth_remaining, gamma)?;
        if q > best.1 {
            best = (a, q);
        }
    }
    Ok(best.0)
}

fn value_unchecked(pomdp: &TabularPomdp, b: &BeliefVector, depth: usize, gamma: f64) -> Result<f64> {
    if depth == 0 {
        return Ok(0.0);
    }
    let mut best = f64::NEG_INFINITY;
    for a in (0..pomdp.n_actions()).map(ActionId) {
        best = best.max(q_unchecked(pomdp, b, a, depth, gamma)?);
    }
    Ok(best)
}

fn q_unchecked(pomdp: &TabularPomdp, b: &BeliefVector, a: ActionId, depth: usize, gamma: f64) -> Result<f64> {
    pomdp.check_action(a)?;
    let mut q = expected_reward(pomdp, b, a);
    if depth <= 1 {
        return Ok(q);
    }
    for z in 0..pomdp.n_obs() {
        match bayes_update(pomdp, b, a, z) {
            Ok((post, p_z)) => q += gamma * p_z * value_unchecked(pomdp, &post, depth - 1, gamma)?,
            Err(Error::ImpossibleObservation) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn belief(p: &[f64]) -> BeliefVector {
        BeliefVector::new(p.to_vec()).unwrap()
    }

    /// Depth-2 value by enumerating every policy tree (a, z -> a').
    fn policy_tree_value(m: &TabularPomdp, b: &[f64], gamma: f64) -> f64 {
        let (ns, na, nz) = (m.n_states(), m.n_actions(), m.n_obs());
        let mut best = f64::NEG_INFINITY;
        for a in 0..na {
            for plan in 0..na.pow(nz as u32) {
                let mut v = 0.0;
                for x in 0..ns {
                    v += b[x] * m.reward(x, a);
                    for xn in 0..ns {
                        for z in 0..nz {
                            let a2 = (plan / na.pow(z as u32)) % na;
                            v += gamma * b[x] * m.transition(x, a, xn) * m.observation_prob(xn, z) * m.reward(xn, a2);
                        }
                    }
                }
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn deterministic_update_is_point_mass() {
        let m = TabularPomdp::new(
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0], vec![0.0]],
            vec![1.0, 0.0],
            0.2,
        )
        .unwrap();
        let (post, p_z) = bayes_update(&m, &belief(&[1.0, 0.0]), ActionId(0), 1).unwrap();
        assert_eq!(post.probs(), &[0.0, 1.0]);
        assert_eq!(p_z, 1.0);
        assert_eq!(bayes_update(&m, &belief(&[1.0, 0.0]), ActionId(0), 0), Err(Error::ImpossibleObservation));
    }

    #[test]
    fn uninformative_observation_propagates_prior() {
        let m = TabularPomdp::new(
            vec![vec![vec![0.9, 0.1]], vec![vec![0.2, 0.8]]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![vec![0.0], vec![0.0]],
            vec![0.5, 0.5],
            0.2,
        )
        .unwrap();
        let (post, p_z) = bayes_update(&m, &belief(&[0.5, 0.5]), ActionId(0), 1).unwrap();
        assert!((post.probs()[0] - 0.55).abs() < 1e-12);
        assert!((post.probs()[1] - 0.45).abs() < 1e-12);
        assert!((p_z - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hand_expanded_bayes_on_reference() {
        let m = TabularPomdp::reference();
        // a = 0, z = 1 from (0.5, 0.5)
        // predicted: x'0 = 0.5*0.9 + 0.5*0.1 = 0.5, x'1 = 0.5
        // joint: 0.5*0.2 = 0.1, 0.5*0.7 = 0.35
        let (post, p_z) = bayes_update(&m, &belief(&[0.5, 0.5]), ActionId(0), 1).unwrap();
        assert!((p_z - 0.45).abs() < 1e-12);
        assert!((post.probs()[0] - 0.1 / 0.45).abs() < 1e-12);
        assert!((post.probs()[1] - 0.35 / 0.45).abs() < 1e-12);
    }

    #[test]
    fn shallow_values() {
        let m = TabularPomdp::reference();
        let b = belief(&[0.5, 0.5]);
        assert_eq!(optimal_value(&m, &b, 0, 0.95).unwrap(), 0.0);
        let one_step = (0..2).map(|a| 0.5 * m.reward(0, a) + 0.5 * m.reward(1, a)).fold(f64::NEG_INFINITY, f64::max);
        assert!((optimal_value(&m, &b, 1, 0.95).unwrap() - one_step).abs() < 1e-15);
    }

    #[test]
    fn depth_two_matches_policy_tree_enumeration() {
        let m = TabularPomdp::reference();
        for b in [[0.5, 0.5], [0.1, 0.9], [1.0, 0.0], [0.37, 0.63]] {
            let rec = optimal_value(&m, &belief(&b), 2, 0.95).unwrap();
            let enumerated = policy_tree_value(&m, &b, 0.95);
            assert!((rec - enumerated).abs() < 1e-10, "{rec} vs {enumerated}");
        }
    }

    #[test]
    fn value_bounds_monotonicity_and_convexity() {
        let m = TabularPomdp::reference();
        let gamma = 0.95;
        let grid: Vec<BeliefVector> = (0..=10).map(|i| belief(&[i as f64 / 10.0, 1.0 - i as f64 / 10.0])).collect();
        for b in &grid {
            for d in 0..5 {
                let v = optimal_value(&m, b, d, gamma).unwrap();
                let cap = (1.0 - libm::pow(gamma, d as f64)) / (1.0 - gamma);
                assert!(v.abs() <= cap + 1e-12);
                assert!(optimal_value(&m, b, d + 1, gamma).unwrap() >= v - 1e-12);
            }
        }
        for b1 in &grid {
            for b2 in &grid {
                let (v1, v2) = (optimal_value(&m, b1, 3, gamma).unwrap(), optimal_value(&m, b2, 3, gamma).unwrap());
                for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    let v = optimal_value(&m, &b1.mix(b2, lambda), 3, gamma).unwrap();
                    assert!(v <= lambda * v1 + (1.0 - lambda) * v2 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn refuses_oversized_trees() {
        let m = TabularPomdp::reference();
        // (2 * 2)^10 > 1e6
        assert!(matches!(optimal_value(&m, &belief(&[0.5, 0.5]), 10, 0.95), Err(Error::OracleTooLarge { .. })));
        assert!(optimal_value(&m, &belief(&[0.5, 0.5]), 9, 0.95).is_ok());
    }
}
