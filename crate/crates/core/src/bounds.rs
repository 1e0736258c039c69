//! Parameter ladders and the finite-time error certificate.
//!
//! The certificate for a root estimate after `n` simulations is
//!
//! ```text
//! n^-(1-eta) (2 beta0 / delta1)^(1/xi0)
//!   + gamma (1 - gamma^L) / (1 - gamma) * L_V * L_psi^beta_H
//!     * max_m [ min(cap, C (log(m |H_L| / delta2) / m)^(1/k_Z)) ]^(alpha_H beta_H)
//! ```
//!
//! holding with probability at least `1 - (delta1 + delta2)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ln, powf};

const REL_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Depth-indexed concentration exponents `xi^(0..=L)` and exploration
/// exponents `alpha^(1..=L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterLadder {
    eta: f64,
    beta0: f64,
    xi: Vec<f64>,
    alpha: Vec<f64>,
}

/// Closed-form ladder `xi^(l+1) = (xi^(l) + 1) / kappa`, `alpha^(l+1) = xi^(l) + 1`
/// with `kappa = eta (1 - eta)`, validated before it is returned.
pub fn build_ladder(xi0: f64, eta: f64, levels: usize, beta0: f64) -> Result<ParameterLadder> {
    if levels == 0 {
        return Err(Error::InvalidLadder { level: 0, reason: "need at least one level" });
    }
    if !(xi0 > 1.0 && xi0.is_finite()) {
        return Err(Error::InvalidLadder { level: 0, reason: "xi0 must exceed 1" });
    }
    if !(0.5..1.0).contains(&eta) {
        return Err(Error::InvalidLadder { level: 0, reason: "eta must lie in [1/2, 1)" });
    }
    let kappa = eta * (1.0 - eta);
    let mut xi = Vec::with_capacity(levels + 1);
    let mut alpha = Vec::with_capacity(levels);
    xi.push(xi0);
    for l in 0..levels {
        alpha.push(xi[l] + 1.0);
        xi.push((xi[l] + 1.0) / kappa);
    }
    let ladder = ParameterLadder { eta, beta0, xi, alpha };
    ladder.validate()?;
    Ok(ladder)
}

impl ParameterLadder {
    /// Assembles a ladder without checking the recursion; use
    /// [`ParameterLadder::validate`] or [`ParameterLadder::eta_preserved`] on it.
    pub fn from_parts(eta: f64, beta0: f64, xi: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if xi.len() < 2 || alpha.len() + 1 != xi.len() {
            return Err(Error::InvalidLadder { level: 0, reason: "need L+1 xi entries and L alpha entries" });
        }
        Ok(Self { eta, beta0, xi, alpha })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn kappa(&self) -> f64 {
        self.eta * (1.0 - self.eta)
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn xi0(&self) -> f64 {
        self.xi[0]
    }

    /// Number of levels `L`.
    pub fn levels(&self) -> usize {
        self.alpha.len()
    }

    pub fn xi(&self, level: usize) -> f64 {
        self.xi[level]
    }

    /// `alpha^(level)` for `level` in `1..=L`.
    pub fn alpha(&self, level: usize) -> f64 {
        self.alpha[level - 1]
    }

    pub fn xi_all(&self) -> &[f64] {
        &self.xi
    }

    pub fn alpha_all(&self) -> &[f64] {
        &self.alpha
    }

    /// Checks the recursion, the per-level constraint
    /// `xi eta (1-eta) <= alpha < xi (1-eta)` and `alpha^(1) > 2`.
    pub fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.eta) {
            return Err(Error::InvalidLadder { level: 0, reason: "eta must lie in [1/2, 1)" });
        }
        if !(self.beta0 > 1.0 && self.beta0.is_finite()) {
            return Err(Error::InvalidLadder { level: 0, reason: "beta0 must exceed 1" });
        }
        if !(self.xi[0] > 1.0) {
            return Err(Error::InvalidLadder { level: 0, reason: "xi0 must exceed 1" });
        }
        let kappa = self.kappa();
        for l in 1..=self.levels() {
            let (xi, alpha) = (self.xi(l), self.alpha(l));
            if !close(xi, (self.xi(l - 1) + 1.0) / kappa) {
                return Err(Error::InvalidLadder { level: l, reason: "xi does not follow (xi_prev + 1) / kappa" });
            }
            if !close(alpha, self.xi(l - 1) + 1.0) {
                return Err(Error::InvalidLadder { level: l, reason: "alpha does not equal xi_prev + 1" });
            }
            let lower = xi * kappa;
            if alpha < lower && !close(alpha, lower) {
                return Err(Error::InvalidLadder { level: l, reason: "alpha below xi eta (1 - eta)" });
            }
            if alpha >= xi * (1.0 - self.eta) {
                return Err(Error::InvalidLadder { level: l, reason: "alpha not below xi (1 - eta)" });
            }
        }
        if !(self.alpha(1) > 2.0) {
            return Err(Error::InvalidLadder { level: 1, reason: "alpha^(1) must exceed 2" });
        }
        Ok(())
    }

    /// Per-level exponent `eta^(h) = alpha^(h+1) / (xi^(h+1) (1 - eta))`.
    pub fn eta_at(&self, level: usize) -> f64 {
        self.alpha(level + 1) / (self.xi(level + 1) * (1.0 - self.eta))
    }

    /// True when every level reproduces the fixed `eta`.
    pub fn eta_preserved(&self) -> bool {
        (0..self.levels()).all(|h| close(self.eta_at(h), self.eta))
    }

    /// One-sided tail bound `min(1, beta0 z^-xi0)` on
    /// `P(n (V_hat - V*) >= n^eta z)`.
    pub fn tail_bound(&self, z: f64) -> Result<f64> {
        if !(z >= 1.0) {
            return Err(Error::InvalidParameter { name: "z", reason: "must be at least 1" });
        }
        Ok((self.beta0 * powf(z, -self.xi[0])).min(1.0))
    }

    /// `n^-(1-eta) (2 beta0 / delta1)^(1/xi0)`.
    pub fn estimation_term(&self, n: u64, delta1: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n", reason: "must be at least 1" });
        }
        if !(delta1 > 0.0 && delta1 <= 1.0) {
            return Err(Error::InvalidParameter { name: "delta1", reason: "must lie in (0, 1]" });
        }
        Ok(powf(n as f64, -(1.0 - self.eta)) * powf(2.0 * self.beta0 / delta1, 1.0 / self.xi[0]))
    }
}

/// Hölder constants of the value function and belief update.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct HolderConstants {
    pub l_v: f64,
    pub l_psi: f64,
    pub alpha_h: f64,
    pub beta_h: f64,
}

impl Default for HolderConstants {
    fn default() -> Self {
        Self { l_v: 1.0, l_psi: 1.0, alpha_h: 1.0, beta_h: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateInputs {
    pub n: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma: f64,
    pub horizon: usize,
    pub holder: HolderConstants,
    /// Covering constant `C`.
    pub c_cov: f64,
    /// Covering exponent `k_Z`.
    pub k_z: f64,
    pub radius_cap: f64,
    /// Realized cell count of every visited history-action node.
    pub m_list: Vec<u64>,
    /// Realized size of the node set the union bound ranges over.
    pub h_l_size: u64,
}

impl CertificateInputs {
    /// Splits `delta` as `delta1 = 0.75 delta`, `delta2 = 0.25 delta`.
    pub fn split_delta(delta: f64) -> (f64, f64) {
        (0.75 * delta, 0.25 * delta)
    }

    pub fn delta(&self) -> f64 {
        self.delta1 + self.delta2
    }

    pub fn validate(&self) -> Result<()> {
        let delta = self.delta();
        if !(delta > 0.0 && delta < 1.0) || !(self.delta1 > 0.0 && self.delta2 > 0.0) {
            return Err(Error::InvalidParameter { name: "delta", reason: "need 0 < delta1, delta2 and delta1 + delta2 < 1" });
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) || self.horizon == 0 {
            return Err(Error::InvalidParameter { name: "planning", reason: "need gamma in (0, 1] and L >= 1" });
        }
        let h = &self.holder;
        if [h.l_v, h.l_psi, h.alpha_h, h.beta_h, self.c_cov].iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidParameter { name: "constants", reason: "Hölder and covering constants must be nonnegative" });
        }
        if !(self.k_z > 0.0 && self.radius_cap > 0.0) {
            return Err(Error::InvalidParameter { name: "k_z", reason: "k_Z and the radius cap must be positive" });
        }
        Ok(())
    }

    /// `gamma (1 - gamma^L) / (1 - gamma)`, or `L` when undiscounted.
    pub fn horizon_factor(&self) -> f64 {
        if self.gamma == 1.0 {
            self.horizon as f64
        } else {
            self.gamma * (1.0 - powf(self.gamma, self.horizon as f64)) / (1.0 - self.gamma)
        }
    }

    /// Capped high-probability covering radius for a node with `m` cells.
    pub fn radius_bound(&self, m: u64) -> Result<f64> {
        if m == 0 {
            return Err(Error::InvalidCounts("cell count must be at least 1"));
        }
        let log_arg = m as f64 * self.h_l_size as f64 / self.delta2;
        if !(log_arg > 1.0) {
            return Err(Error::InvalidCounts("log(m |H_L| / delta2) must be positive"));
        }
        let raw = self.c_cov * powf(ln(log_arg) / m as f64, 1.0 / self.k_z);
        Ok(raw.min(self.radius_cap))
    }
}

/// Partition-loss term of the certificate.
pub fn partition_term(inputs: &CertificateInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.m_list.is_empty() {
        return Err(Error::InvalidCounts("no history-action nodes"));
    }
    let h = &inputs.holder;
    let mut worst = 0.0f64;
    for &m in &inputs.m_list {
        worst = worst.max(inputs.radius_bound(m)?);
    }
    Ok(inputs.horizon_factor() * h.l_v * powf(h.l_psi, h.beta_h) * powf(worst, h.alpha_h * h.beta_h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub bound: f64,
    pub estimation: f64,
    pub partition: f64,
    pub n: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub h_l_size: u64,
    pub node_count: usize,
    /// Smallest realized cell count.
    pub min_cells: u64,
}

/// Estimation term plus partition term; `|V_hat - V*| <= bound` with
/// probability at least `1 - (delta1 + delta2)` under the model assumptions.
pub fn certificate(inputs: &CertificateInputs, ladder: &ParameterLadder) -> Result<Certificate> {
    ladder.validate()?;
    let estimation = ladder.estimation_term(inputs.n, inputs.delta1)?;
    let partition = partition_term(inputs)?;
    Ok(Certificate {
        bound: estimation + partition,
        estimation,
        partition,
        n: inputs.n,
        delta1: inputs.delta1,
        delta2: inputs.delta2,
        h_l_size: inputs.h_l_size,
        node_count: inputs.m_list.len(),
        min_cells: inputs.m_list.iter().copied().min().unwrap_or(0),
    })
}
