//! Polynomial exploration bonus and the argmax action rule.

use crate::bounds::ParameterLadder;
use crate::error::{Error, Result};
use crate::math::{ln, powf, sqrt};
use crate::pomdp::{ActionId, PlanningConfig};

/// Visit count and running mean return of one (history, action) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ActionStats {
    pub visits: u64,
    pub value: f64,
}

impl ActionStats {
    /// `Q <- Q + (total - Q) / N` after incrementing `N`.
    pub fn record(&mut self, total: f64) {
        self.visits += 1;
        self.value += (total - self.value) / self.visits as f64;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BonusMode {
    /// `beta^(1/xi) N(h)^(alpha/xi) / N(h,a)^(1-eta)` with child-level ladder entries.
    Theoretical(ParameterLadder),
    /// `c0 V_max(depth) N(h)^(eta(1-eta)) / N(h,a)^(1-eta)`.
    Practical { c0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BonusParams {
    mode: BonusMode,
    eta: f64,
    planning: PlanningConfig,
}

impl BonusParams {
    pub fn practical(eta: f64, c0: f64, planning: PlanningConfig) -> Result<Self> {
        if !(0.5..1.0).contains(&eta) {
            return Err(Error::InvalidParameter { name: "eta", reason: "must lie in [1/2, 1)" });
        }
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::InvalidParameter { name: "c0", reason: "must be positive" });
        }
        planning.validate()?;
        Ok(Self { mode: BonusMode::Practical { c0 }, eta, planning })
    }

    /// The ladder must be valid and cover at least `planning.horizon` levels.
    pub fn theoretical(ladder: ParameterLadder, planning: PlanningConfig) -> Result<Self> {
        planning.validate()?;
        ladder.validate()?;
        if ladder.levels() < planning.horizon {
            return Err(Error::InvalidLadder { level: ladder.levels(), reason: "ladder is shorter than the planning horizon" });
        }
        Ok(Self { eta: ladder.eta(), mode: BonusMode::Theoretical(ladder), planning })
    }

    pub fn mode(&self) -> &BonusMode {
        &self.mode
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn planning(&self) -> &PlanningConfig {
        &self.planning
    }

    /// Depth scale `c_l = c0 V_max,l` of the practical bonus.
    pub fn depth_scale(&self, depth: usize) -> f64 {
        match &self.mode {
            BonusMode::Practical { c0 } => c0 * self.planning.v_max(depth),
            BonusMode::Theoretical(l) => powf(l.beta0(), 1.0 / l.xi(depth + 1)),
        }
    }

    /// Exploration bonus of an arm at a node of the given depth. Unvisited
    /// arms get `+inf`.
    pub fn bonus(&self, depth: usize, n_h: u64, n_ha: u64) -> Result<f64> {
        if depth >= self.planning.horizon {
            return Err(Error::BonusBelowLeaf { depth, horizon: self.planning.horizon });
        }
        if n_ha == 0 {
            return Ok(f64::INFINITY);
        }
        let (n_h, n_ha) = (n_h as f64, n_ha as f64);
        let decay = powf(n_ha, -(1.0 - self.eta));
        Ok(match &self.mode {
            BonusMode::Practical { c0 } => {
                c0 * self.planning.v_max(depth) * powf(n_h, self.eta * (1.0 - self.eta)) * decay
            }
            BonusMode::Theoretical(ladder) => {
                let (xi, alpha) = (ladder.xi(depth + 1), ladder.alpha(depth + 1));
                powf(ladder.beta0(), 1.0 / xi) * powf(n_h, alpha / xi) * decay
            }
        })
    }
}

/// Action-selection rule used inside the tree.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionRule {
    Corrected(BonusParams),
    /// Logarithmic UCB1 `c0 V_max,l sqrt(ln N(h) / N(h,a))`; baseline only.
    Ucb1 { c0: f64, planning: PlanningConfig },
}

impl SelectionRule {
    pub fn planning(&self) -> &PlanningConfig {
        match self {
            SelectionRule::Corrected(p) => p.planning(),
            SelectionRule::Ucb1 { planning, .. } => planning,
        }
    }

    pub fn bonus(&self, depth: usize, n_h: u64, n_ha: u64) -> Result<f64> {
        match self {
            SelectionRule::Corrected(p) => p.bonus(depth, n_h, n_ha),
            SelectionRule::Ucb1 { c0, planning } => {
                if depth >= planning.horizon {
                    return Err(Error::BonusBelowLeaf { depth, horizon: planning.horizon });
                }
                if n_ha == 0 {
                    return Ok(f64::INFINITY);
                }
                Ok(c0 * planning.v_max(depth) * sqrt(ln(n_h.max(1) as f64) / n_ha as f64))
            }
        }
    }
}

/// `argmax_a Q(h,a) + bonus`, lowest index among ties.
pub fn select_action(actions: &[ActionStats], n_h: u64, depth: usize, rule: &SelectionRule) -> Result<ActionId> {
    let mut best = ActionId(0);
    let mut best_score = f64::NEG_INFINITY;
    for (i, stats) in actions.iter().enumerate() {
        let score = stats.value + rule.bonus(depth, n_h, stats.visits)?;
        if score > best_score {
            best = ActionId(i);
            best_score = score;
        }
    }
    Ok(best)
}

/// `argmax_a Q(h,a)`, lowest index among ties.
pub fn greedy_action(actions: &[ActionStats]) -> ActionId {
    let mut best = 0;
    for (i, s) in actions.iter().enumerate().skip(1) {
        if s.value > actions[best].value {
            best = i;
        }
    }
    ActionId(best)
}
