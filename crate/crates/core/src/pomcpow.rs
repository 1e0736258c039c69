//! Voro-POMCPOW and the raw-observation POMCPOW baseline.
//!
//! Both grow the observation branching of each (history, action) node by
//! progressive widening. Voro-POMCPOW keeps a nearest-center partition per
//! node: a new sample either founds a cell (centered on itself) or is
//! mapped to its nearest existing center and discarded, so children are
//! keyed by stored centers only. The baseline keeps raw observations as
//! children and revisits them in proportion to their visit counts.

use alloc::vec;
use alloc::vec::Vec;

use crate::bonus::{greedy_action, select_action, ActionStats, SelectionRule};
use crate::error::{Error, Result};
use crate::pomcp::{rollout, NodeId};
use crate::pomdp::{ActionId, GenerativeModel, ParticleBelief, PlanningConfig};
use crate::rng::RandomStream;
use crate::voronoi::{pw_allows, Metric, ObservationSpace, VoronoiPartition};

/// Progressive-widening budget `m <= k_z N(ha)^alpha_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Widening {
    pub k_z: f64,
    pub alpha_z: f64,
}

impl Widening {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_z > 0.0 && self.alpha_z >= 0.0) {
            return Err(Error::InvalidParameter { name: "widening", reason: "need k_z > 0 and alpha_z >= 0" });
        }
        Ok(())
    }

    pub fn allows(&self, m: usize, n_ha: u64) -> bool {
        pw_allows(m, n_ha, self.k_z, self.alpha_z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub child: NodeId,
    pub visits: u64,
    pub value: f64,
    /// `(m, N(ha))` at the moment the cell was created.
    pub created_at: (usize, u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoroAction<O> {
    pub stats: ActionStats,
    pub partition: VoronoiPartition<O>,
    /// Parallel to the partition's centers.
    pub cells: Vec<CellStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoroNode<S, O> {
    pub visits: u64,
    pub depth: usize,
    pub actions: Vec<VoroAction<O>>,
    /// Propagated states that reached this node.
    pub particles: Vec<S>,
}

impl<S, O> VoroNode<S, O> {
    pub fn value_estimate(&self) -> f64 {
        if self.visits == 0 {
            return 0.0;
        }
        self.actions.iter().map(|a| a.stats.visits as f64 * a.stats.value).sum::<f64>() / self.visits as f64
    }

    pub fn is_count_consistent(&self) -> bool {
        self.visits == self.actions.iter().map(|a| a.stats.visits).sum::<u64>()
    }

    pub fn action_stats(&self) -> Vec<ActionStats> {
        self.actions.iter().map(|a| a.stats).collect()
    }
}

/// Realized partition data of one search, the run-time inputs of the
/// certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTelemetry {
    /// Cell count `m` of every visited history-action node above the horizon.
    pub m_list: Vec<u64>,
    /// Covering radius of each of those nodes, parallel to `m_list`.
    pub covering_radii: Vec<f64>,
    /// Visited history-action nodes above the horizon. Rollouts stop the
    /// tree short of depth `L`, so this is the node set the covering-radius
    /// union bound ranges over.
    pub history_action_nodes: u64,
    /// History nodes that exist at depth `L` itself.
    pub depth_l_histories: u64,
    pub total_nodes: u64,
    /// Samples that hit an existing center bit-exactly while widening.
    pub duplicate_centers: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoroTree<S, O> {
    nodes: Vec<VoroNode<S, O>>,
    duplicates: u64,
}

impl<S: Clone, O: Metric> VoroTree<S, O> {
    pub fn root(&self) -> &VoroNode<S, O> {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &VoroNode<S, O> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[VoroNode<S, O>] {
        &self.nodes
    }

    fn insert(&mut self, n_actions: usize, depth: usize, particles: Vec<S>) -> NodeId {
        let actions = (0..n_actions)
            .map(|_| VoroAction { stats: ActionStats::default(), partition: VoronoiPartition::new(), cells: Vec::new() })
            .collect();
        self.nodes.push(VoroNode { visits: 0, depth, actions, particles });
        self.nodes.len() - 1
    }

    pub fn telemetry(&self, horizon: usize, space: &impl ObservationSpace<O>) -> Result<PartitionTelemetry> {
        let mut t = PartitionTelemetry {
            m_list: Vec::new(),
            covering_radii: Vec::new(),
            history_action_nodes: 0,
            depth_l_histories: 0,
            total_nodes: self.nodes.len() as u64,
            duplicate_centers: self.duplicates,
        };
        for node in &self.nodes {
            if node.depth >= horizon {
                t.depth_l_histories += 1;
                continue;
            }
            for a in node.actions.iter().filter(|a| a.stats.visits > 0) {
                t.history_action_nodes += 1;
                t.m_list.push(a.partition.len() as u64);
                t.covering_radii.push(space.covering_radius(a.partition.centers())?);
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoroOutcome<S, O> {
    pub action: ActionId,
    pub tree: VoroTree<S, O>,
}

impl<S: Clone, O: Metric> VoroOutcome<S, O> {
    pub fn value_estimate(&self) -> f64 {
        self.tree.root().value_estimate()
    }
}

pub struct VoroPomcpow<'a, M> {
    model: &'a M,
    rule: SelectionRule,
    widening: Widening,
}

impl<'a, M> VoroPomcpow<'a, M>
where
    M: GenerativeModel,
    M::Observation: Metric,
{
    pub fn new(model: &'a M, rule: SelectionRule, widening: Widening) -> Result<Self> {
        widening.validate()?;
        Ok(Self { model, rule, widening })
    }

    fn planning(&self) -> &PlanningConfig {
        self.rule.planning()
    }

    fn simulate(
        &self,
        tree: &mut VoroTree<M::State, M::Observation>,
        id: NodeId,
        state: &M::State,
        rng: &mut RandomStream,
    ) -> Result<f64> {
        let planning = *self.planning();
        let depth = tree.nodes[id].depth;
        if depth >= planning.horizon {
            return Ok(0.0);
        }
        let node = &tree.nodes[id];
        let action = select_action(&node.action_stats(), node.visits, depth, &self.rule)?;
        let step = self.model.step(state, action, rng)?;
        let slot = &tree.nodes[id].actions[action.0];
        let (m, n_ha) = (slot.partition.len(), slot.stats.visits);

        let mut cell = None;
        if self.widening.allows(m, n_ha) {
            let added = tree.nodes[id].actions[action.0].partition.add_center(step.observation.clone());
            if added.duplicate {
                tree.duplicates += 1;
                cell = Some(added.index);
            }
        } else {
            cell = Some(tree.nodes[id].actions[action.0].partition.assign(&step.observation)?);
        }

        let total = match cell {
            None => {
                let child = tree.insert(self.model.num_actions(), depth + 1, vec![step.next_state.clone()]);
                let total = step.reward + planning.gamma * rollout(self.model, &planning, &step.next_state, depth + 1, rng)?;
                let mut stats = CellStats { child, visits: 0, value: 0.0, created_at: (m, n_ha) };
                record(&mut stats, total);
                tree.nodes[id].actions[action.0].cells.push(stats);
                total
            }
            Some(i) => {
                let child = tree.nodes[id].actions[action.0].cells[i].child;
                tree.nodes[child].particles.push(step.next_state.clone());
                let total = step.reward + planning.gamma * self.simulate(tree, child, &step.next_state, rng)?;
                record(&mut tree.nodes[id].actions[action.0].cells[i], total);
                total
            }
        };
        let node = &mut tree.nodes[id];
        node.visits += 1;
        node.actions[action.0].stats.record(total);
        Ok(total)
    }

    pub fn search(
        &self,
        belief: &ParticleBelief<M::State>,
        n_sims: usize,
        rng: &mut RandomStream,
    ) -> Result<VoroOutcome<M::State, M::Observation>> {
        if n_sims == 0 {
            return Err(Error::InvalidParameter { name: "n_sims", reason: "must be at least 1" });
        }
        let mut tree = VoroTree { nodes: Vec::new(), duplicates: 0 };
        tree.insert(self.model.num_actions(), 0, Vec::new());
        for _ in 0..n_sims {
            let state = belief.sample(rng).clone();
            self.simulate(&mut tree, 0, &state, rng)?;
        }
        let action = greedy_action(&tree.root().action_stats());
        Ok(VoroOutcome { action, tree })
    }
}

fn record(cell: &mut CellStats, total: f64) {
    cell.visits += 1;
    cell.value += (total - cell.value) / cell.visits as f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowChild<O> {
    pub observation: O,
    pub node: NodeId,
    pub visits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowAction<O> {
    pub stats: ActionStats,
    pub children: Vec<PowChild<O>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowNode<S, O> {
    pub visits: u64,
    pub depth: usize,
    pub actions: Vec<PowAction<O>>,
    /// Weighted particle set `B(hao)`.
    pub particles: Vec<S>,
    pub weights: Vec<f64>,
}

impl<S, O> PowNode<S, O> {
    pub fn value_estimate(&self) -> f64 {
        if self.visits == 0 {
            return 0.0;
        }
        self.actions.iter().map(|a| a.stats.visits as f64 * a.stats.value).sum::<f64>() / self.visits as f64
    }

    pub fn is_count_consistent(&self) -> bool {
        self.visits == self.actions.iter().map(|a| a.stats.visits).sum::<u64>()
    }

    pub fn action_stats(&self) -> Vec<ActionStats> {
        self.actions.iter().map(|a| a.stats).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowTree<S, O> {
    nodes: Vec<PowNode<S, O>>,
}

impl<S: Clone, O: Clone> PowTree<S, O> {
    pub fn root(&self) -> &PowNode<S, O> {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[PowNode<S, O>] {
        &self.nodes
    }

    fn insert(&mut self, n_actions: usize, depth: usize) -> NodeId {
        let actions = (0..n_actions).map(|_| PowAction { stats: ActionStats::default(), children: Vec::new() }).collect();
        self.nodes.push(PowNode { visits: 0, depth, actions, particles: Vec::new(), weights: Vec::new() });
        self.nodes.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowOutcome<S, O> {
    pub action: ActionId,
    pub tree: PowTree<S, O>,
}

/// Baseline POMCPOW over raw observations.
pub struct Pomcpow<'a, M> {
    model: &'a M,
    rule: SelectionRule,
    widening: Widening,
}

impl<'a, M: GenerativeModel> Pomcpow<'a, M> {
    pub fn new(model: &'a M, rule: SelectionRule, widening: Widening) -> Result<Self> {
        widening.validate()?;
        Ok(Self { model, rule, widening })
    }

    fn simulate(
        &self,
        tree: &mut PowTree<M::State, M::Observation>,
        id: NodeId,
        state: &M::State,
        rng: &mut RandomStream,
    ) -> Result<f64> {
        let planning = *self.rule.planning();
        let depth = tree.nodes[id].depth;
        if depth >= planning.horizon {
            return Ok(0.0);
        }
        let node = &tree.nodes[id];
        let action = select_action(&node.action_stats(), node.visits, depth, &self.rule)?;
        let step = self.model.step(state, action, rng)?;
        let slot = &tree.nodes[id].actions[action.0];

        let total = if self.widening.allows(slot.children.len(), slot.stats.visits) {
            let child = tree.insert(self.model.num_actions(), depth + 1);
            let w = self.model.observation_density(&step.next_state, action, &step.observation);
            tree.nodes[child].particles.push(step.next_state.clone());
            tree.nodes[child].weights.push(w);
            tree.nodes[id].actions[action.0].children.push(PowChild { observation: step.observation, node: child, visits: 1 });
            step.reward + planning.gamma * rollout(self.model, &planning, &step.next_state, depth + 1, rng)?
        } else {
            let j = pick_by_visits(&slot.children, rng);
            let PowChild { node: child, observation, .. } = &tree.nodes[id].actions[action.0].children[j];
            let (child, w) = (*child, self.model.observation_density(&step.next_state, action, observation));
            tree.nodes[id].actions[action.0].children[j].visits += 1;
            let target = &mut tree.nodes[child];
            target.particles.push(step.next_state.clone());
            target.weights.push(w);
            let next = weighted_pick(&target.particles, &target.weights, rng).unwrap_or(&step.next_state).clone();
            step.reward + planning.gamma * self.simulate(tree, child, &next, rng)?
        };
        let node = &mut tree.nodes[id];
        node.visits += 1;
        node.actions[action.0].stats.record(total);
        Ok(total)
    }

    pub fn search(
        &self,
        belief: &ParticleBelief<M::State>,
        n_sims: usize,
        rng: &mut RandomStream,
    ) -> Result<PowOutcome<M::State, M::Observation>> {
        if n_sims == 0 {
            return Err(Error::InvalidParameter { name: "n_sims", reason: "must be at least 1" });
        }
        let mut tree = PowTree { nodes: Vec::new() };
        tree.insert(self.model.num_actions(), 0);
        for _ in 0..n_sims {
            let state = belief.sample(rng).clone();
            self.simulate(&mut tree, 0, &state, rng)?;
        }
        let action = greedy_action(&tree.root().action_stats());
        Ok(PowOutcome { action, tree })
    }
}

fn pick_by_visits<O>(children: &[PowChild<O>], rng: &mut RandomStream) -> usize {
    let total: u64 = children.iter().map(|c| c.visits).sum();
    let mut target = rng.uniform() * total as f64;
    for (i, c) in children.iter().enumerate() {
        target -= c.visits as f64;
        if target < 0.0 {
            return i;
        }
    }
    children.len() - 1
}

fn weighted_pick<'s, S>(particles: &'s [S], weights: &[f64], rng: &mut RandomStream) -> Option<&'s S> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut target = rng.uniform() * total;
    for (p, w) in particles.iter().zip(weights) {
        target -= w;
        if target < 0.0 {
            return Some(p);
        }
    }
    particles.last()
}
