//! Corrected-POMCP: POMCP with the polynomial exploration bonus, for
//! discrete observation spaces.
//!
//! History nodes live in an arena; a child is keyed by the action taken and
//! the raw observation token.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::bonus::{greedy_action, select_action, ActionStats, BonusParams, SelectionRule};
use crate::error::{Error, Result};
use crate::pomdp::{ActionId, GenerativeModel, ParticleBelief, PlanningConfig};
use crate::rng::RandomStream;

pub type NodeId = usize;

/// Exact-equality token of a discrete observation.
pub trait ObservationKey {
    type Key: Ord + Clone + Debug;
    fn key(&self) -> Self::Key;
}

impl ObservationKey for usize {
    type Key = usize;
    fn key(&self) -> usize {
        *self
    }
}

impl ObservationKey for u32 {
    type Key = u32;
    fn key(&self) -> u32 {
        *self
    }
}

/// Bit pattern; every distinct float is its own observation.
impl ObservationKey for f64 {
    type Key = u64;
    fn key(&self) -> u64 {
        self.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode<K> {
    pub visits: u64,
    pub actions: Vec<ActionStats>,
    pub children: BTreeMap<(ActionId, K), NodeId>,
    pub depth: usize,
}

impl<K> TreeNode<K> {
    fn new(n_actions: usize, depth: usize) -> Self {
        Self { visits: 0, actions: vec![ActionStats::default(); n_actions], children: BTreeMap::new(), depth }
    }

    /// Visit-weighted value `sum_a N(h,a) Q(h,a) / N(h)`, zero when unvisited.
    pub fn value_estimate(&self) -> f64 {
        if self.visits == 0 {
            return 0.0;
        }
        self.actions.iter().map(|s| s.visits as f64 * s.value).sum::<f64>() / self.visits as f64
    }

    pub fn is_count_consistent(&self) -> bool {
        self.visits == self.actions.iter().map(|s| s.visits).sum::<u64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTree<K> {
    nodes: Vec<TreeNode<K>>,
}

impl<K> Default for SearchTree<K> {
    fn default() -> Self {
        Self { nodes: Vec::new() }
    }
}

impl<K: Ord + Clone> SearchTree<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn root(&self) -> Option<&TreeNode<K>> {
        self.nodes.first()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode<K> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode<K>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn insert(&mut self, node: TreeNode<K>) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

/// Result of one [`CorrectedPomcp::search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<K> {
    pub action: ActionId,
    pub tree: SearchTree<K>,
}

impl<K: Ord + Clone> SearchOutcome<K> {
    pub fn root(&self) -> &TreeNode<K> {
        self.tree.root().expect("search always creates the root")
    }

    pub fn value_estimate(&self) -> f64 {
        self.root().value_estimate()
    }
}

/// Uniform-random default policy to the horizon, discounted per step.
pub fn rollout<M: GenerativeModel>(
    model: &M,
    planning: &PlanningConfig,
    state: &M::State,
    depth: usize,
    rng: &mut RandomStream,
) -> Result<f64> {
    let mut total = 0.0;
    let mut discount = 1.0;
    let mut s = state.clone();
    for _ in depth..planning.horizon {
        let a = ActionId(rng.index(model.num_actions()));
        let step = model.step(&s, a, rng)?;
        total += discount * step.reward;
        discount *= planning.gamma;
        s = step.next_state;
    }
    Ok(total)
}

pub struct CorrectedPomcp<'a, M> {
    model: &'a M,
    rule: SelectionRule,
}

impl<'a, M> CorrectedPomcp<'a, M>
where
    M: GenerativeModel,
    M::Observation: ObservationKey,
{
    pub fn new(model: &'a M, params: BonusParams) -> Self {
        Self { model, rule: SelectionRule::Corrected(params) }
    }

    /// Same tree search with an arbitrary selection rule.
    pub fn with_rule(model: &'a M, rule: SelectionRule) -> Self {
        Self { model, rule }
    }

    pub fn planning(&self) -> &PlanningConfig {
        self.rule.planning()
    }

    pub fn rollout(&self, state: &M::State, depth: usize, rng: &mut RandomStream) -> Result<f64> {
        rollout(self.model, self.planning(), state, depth, rng)
    }

    /// One simulate pass from the root. On an empty tree the root is
    /// created and a rollout value is returned without touching any count.
    pub fn simulate_root(
        &self,
        tree: &mut SearchTree<<M::Observation as ObservationKey>::Key>,
        state: &M::State,
        rng: &mut RandomStream,
    ) -> Result<f64> {
        if self.planning().horizon == 0 {
            return Ok(0.0);
        }
        if tree.is_empty() {
            tree.insert(TreeNode::new(self.model.num_actions(), 0));
            return self.rollout(state, 0, rng);
        }
        self.simulate(tree, 0, state, rng)
    }

    fn simulate(
        &self,
        tree: &mut SearchTree<<M::Observation as ObservationKey>::Key>,
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
        let action = select_action(&node.actions, node.visits, depth, &self.rule)?;
        let step = self.model.step(state, action, rng)?;
        let future = if depth + 1 >= planning.horizon {
            0.0
        } else {
            let key = (action, step.observation.key());
            match tree.nodes[id].children.get(&key) {
                Some(&child) => self.simulate(tree, child, &step.next_state, rng)?,
                None => {
                    let child = tree.insert(TreeNode::new(self.model.num_actions(), depth + 1));
                    tree.nodes[id].children.insert(key, child);
                    self.rollout(&step.next_state, depth + 1, rng)?
                }
            }
        };
        let total = step.reward + planning.gamma * future;
        let node = &mut tree.nodes[id];
        node.visits += 1;
        node.actions[action.0].record(total);
        Ok(total)
    }

    /// Runs `n_sims` simulate passes from root particles and returns
    /// `argmax_a Q(root, a)`. The root is initialized before the first
    /// pass, so every pass updates root counts and `N(root) = n_sims`.
    pub fn search(
        &self,
        belief: &ParticleBelief<M::State>,
        n_sims: usize,
        rng: &mut RandomStream,
    ) -> Result<SearchOutcome<<M::Observation as ObservationKey>::Key>> {
        if n_sims == 0 {
            return Err(Error::InvalidParameter { name: "n_sims", reason: "must be at least 1" });
        }
        let mut tree = SearchTree::new();
        tree.insert(TreeNode::new(self.model.num_actions(), 0));
        for _ in 0..n_sims {
            let state = belief.sample(rng).clone();
            self.simulate(&mut tree, 0, &state, rng)?;
        }
        let action = greedy_action(&tree.nodes[0].actions);
        Ok(SearchOutcome { action, tree })
    }
}
