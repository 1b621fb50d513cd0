//! Two-player zero-sum extensive-form games.
//!
//! A [`Game`] is an immutable arena of [`GameNode`]s built once from a
//! [`TreeSpec`]. Decision nodes point at an [`InfoSet`] by index; the index
//! order is the depth-first first-visit order, children in action order, and
//! every solver and evaluator in the crate uses it for dense tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub const NUM_PLAYERS: usize = 2;

/// Tolerance on chance distributions at construction.
const CHANCE_TOLERANCE: f64 = 1e-12;

/// Canonical string naming an information set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoSetKey(String);

impl InfoSetKey {
    pub fn new(key: impl Into<String>) -> Self {
        InfoSetKey(key.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InfoSetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for InfoSetKey {
    fn from(s: &str) -> Self {
        InfoSetKey(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Chance { probs: Vec<f64> },
    Decision { player: usize, infoset: usize },
    Terminal { utilities: [f64; NUM_PLAYERS] },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameNode {
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfoSet {
    pub player: usize,
    pub key: InfoSetKey,
    pub actions: Vec<String>,
    /// Number of the owner's own decisions on any path before this infoset.
    pub own_depth: usize,
}

impl InfoSet {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Recursive description of a game tree, consumed by [`Game::from_tree`].
#[derive(Clone, Debug)]
pub enum TreeSpec {
    Chance(Vec<(f64, TreeSpec)>),
    Decision {
        player: usize,
        key: InfoSetKey,
        actions: Vec<(String, TreeSpec)>,
    },
    Terminal([f64; NUM_PLAYERS]),
}

#[derive(Clone, Debug)]
pub struct Game {
    name: String,
    nodes: Vec<GameNode>,
    infosets: Vec<InfoSet>,
    infoset_nodes: Vec<Vec<usize>>,
    index: HashMap<InfoSetKey, usize>,
    utility_range: f64,
}

type OwnHistory = Vec<(usize, usize)>;

struct Builder {
    nodes: Vec<GameNode>,
    infosets: Vec<InfoSet>,
    infoset_nodes: Vec<Vec<usize>>,
    histories: Vec<OwnHistory>,
    index: HashMap<InfoSetKey, usize>,
    min_utility: f64,
    max_utility: f64,
}

impl Builder {
    fn add(&mut self, spec: TreeSpec, own: &mut [OwnHistory; NUM_PLAYERS]) -> Result<usize> {
        let id = self.nodes.len();
        match spec {
            TreeSpec::Terminal(utilities) => {
                if utilities[0] + utilities[1] != 0.0 {
                    return Err(Error::InvalidGame(format!(
                        "terminal utilities {utilities:?} are not zero-sum"
                    )));
                }
                if !utilities.iter().all(|u| u.is_finite()) {
                    return Err(Error::InvalidGame("non-finite terminal utility".into()));
                }
                self.min_utility = self.min_utility.min(utilities[0]).min(utilities[1]);
                self.max_utility = self.max_utility.max(utilities[0]).max(utilities[1]);
                self.nodes.push(GameNode {
                    kind: NodeKind::Terminal { utilities },
                    children: Vec::new(),
                });
            }
            TreeSpec::Chance(outcomes) => {
                if outcomes.is_empty() {
                    return Err(Error::InvalidGame("chance node without outcomes".into()));
                }
                let probs: Vec<f64> = outcomes.iter().map(|(p, _)| *p).collect();
                if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
                    return Err(Error::InvalidGame("negative chance probability".into()));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > CHANCE_TOLERANCE {
                    return Err(Error::InvalidGame(format!(
                        "chance probabilities sum to {total}"
                    )));
                }
                self.nodes.push(GameNode {
                    kind: NodeKind::Chance { probs },
                    children: Vec::new(),
                });
                let mut children = Vec::with_capacity(outcomes.len());
                for (_, child) in outcomes {
                    children.push(self.add(child, own)?);
                }
                self.nodes[id].children = children;
            }
            TreeSpec::Decision {
                player,
                key,
                actions,
            } => {
                if player >= NUM_PLAYERS {
                    return Err(Error::InvalidGame(format!("player index {player}")));
                }
                if actions.is_empty() {
                    return Err(Error::InvalidGame(format!("infoset {key} has no actions")));
                }
                let labels: Vec<String> = actions.iter().map(|(a, _)| a.clone()).collect();
                let infoset = match self.index.get(&key) {
                    Some(&i) => {
                        let info = &self.infosets[i];
                        if info.player != player || info.actions != labels {
                            return Err(Error::InvalidGame(format!(
                                "infoset {key} has inconsistent player or actions"
                            )));
                        }
                        if self.histories[i] != own[player] {
                            return Err(Error::InvalidGame(format!(
                                "infoset {key} violates perfect recall"
                            )));
                        }
                        self.infoset_nodes[i].push(id);
                        i
                    }
                    None => {
                        let i = self.infosets.len();
                        self.infosets.push(InfoSet {
                            player,
                            key: key.clone(),
                            actions: labels,
                            own_depth: own[player].len(),
                        });
                        self.infoset_nodes.push(vec![id]);
                        self.histories.push(own[player].clone());
                        self.index.insert(key, i);
                        i
                    }
                };
                self.nodes.push(GameNode {
                    kind: NodeKind::Decision { player, infoset },
                    children: Vec::new(),
                });
                let mut children = Vec::with_capacity(actions.len());
                for (a, (_, child)) in actions.into_iter().enumerate() {
                    own[player].push((infoset, a));
                    let child_id = self.add(child, own);
                    own[player].pop();
                    children.push(child_id?);
                }
                self.nodes[id].children = children;
            }
        }
        Ok(id)
    }
}

impl Game {
    /// Builds and validates a game. Fails on non-zero-sum terminals, bad
    /// chance distributions, inconsistent infosets and imperfect recall.
    pub fn from_tree(name: impl Into<String>, root: TreeSpec) -> Result<Game> {
        let mut builder = Builder {
            nodes: Vec::new(),
            infosets: Vec::new(),
            infoset_nodes: Vec::new(),
            histories: Vec::new(),
            index: HashMap::new(),
            min_utility: f64::INFINITY,
            max_utility: f64::NEG_INFINITY,
        };
        let mut own: [OwnHistory; NUM_PLAYERS] = Default::default();
        builder.add(root, &mut own)?;
        Ok(Game {
            name: name.into(),
            nodes: builder.nodes,
            infosets: builder.infosets,
            infoset_nodes: builder.infoset_nodes,
            index: builder.index,
            utility_range: builder.max_utility - builder.min_utility,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> &GameNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[GameNode] {
        &self.nodes
    }

    pub fn infosets(&self) -> &[InfoSet] {
        &self.infosets
    }

    pub fn infoset(&self, id: usize) -> &InfoSet {
        &self.infosets[id]
    }

    /// Decision nodes belonging to an infoset.
    pub fn infoset_nodes(&self, id: usize) -> &[usize] {
        &self.infoset_nodes[id]
    }

    pub fn infoset_index(&self, key: &InfoSetKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Max minus min terminal utility.
    pub fn utility_range(&self) -> f64 {
        self.utility_range
    }

    /// Infosets in depth-first first-visit order as `(player, key, action_count)`.
    pub fn enumerate_infosets(&self) -> Vec<(usize, InfoSetKey, usize)> {
        self.infosets
            .iter()
            .map(|i| (i.player, i.key.clone(), i.num_actions()))
            .collect()
    }

    /// Dense uniform policy indexed by infoset id.
    pub fn uniform_policy(&self) -> Vec<Vec<f64>> {
        self.infosets
            .iter()
            .map(|i| vec![1.0 / i.num_actions() as f64; i.num_actions()])
            .collect()
    }
}

/// Behavioral strategy for both players, keyed by infoset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyProfile {
    players: [BTreeMap<InfoSetKey, Vec<f64>>; NUM_PLAYERS],
}

impl StrategyProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn uniform(game: &Game) -> Self {
        Self::from_dense(game, &game.uniform_policy())
    }

    /// Converts a dense policy (indexed by infoset id) to a keyed profile.
    /// Rows left empty are skipped, which lets a one-sided policy convert.
    pub fn from_dense(game: &Game, policy: &[Vec<f64>]) -> Self {
        let mut profile = Self::new();
        for (info, probs) in game.infosets().iter().zip(policy) {
            if !probs.is_empty() {
                profile.insert(info.player, info.key.clone(), probs.clone());
            }
        }
        profile
    }

    pub fn insert(&mut self, player: usize, key: InfoSetKey, probs: Vec<f64>) {
        self.players[player].insert(key, probs);
    }

    pub fn player(&self, player: usize) -> &BTreeMap<InfoSetKey, Vec<f64>> {
        &self.players[player]
    }

    pub fn get(&self, player: usize, key: &InfoSetKey) -> Option<&[f64]> {
        self.players[player].get(key).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.players.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every entry as `(player, key, probs)`, player-major then key order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &InfoSetKey, &[f64])> {
        self.players
            .iter()
            .enumerate()
            .flat_map(|(p, m)| m.iter().map(move |(k, v)| (p, k, v.as_slice())))
    }

    /// Player 1's half of `first` combined with player 2's half of `second`.
    pub fn combine(first: &StrategyProfile, second: &StrategyProfile) -> Self {
        StrategyProfile {
            players: [first.players[0].clone(), second.players[1].clone()],
        }
    }

    /// Dense policy indexed by infoset id. Every infoset must be present.
    pub fn to_dense(&self, game: &Game) -> Result<Vec<Vec<f64>>> {
        game.infosets()
            .iter()
            .map(|info| {
                let probs = self.players[info.player]
                    .get(&info.key)
                    .ok_or_else(|| Error::MissingInfoSet(info.key.to_string()))?;
                if probs.len() != info.num_actions() {
                    return Err(Error::LengthMismatch {
                        expected: info.num_actions(),
                        actual: probs.len(),
                    });
                }
                Ok(probs.clone())
            })
            .collect()
    }

    /// Checks every stored vector is a distribution within `tolerance`.
    pub fn validate(&self, tolerance: f64) -> Result<()> {
        for (_, key, probs) in self.iter() {
            if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
                return Err(Error::InvalidStrategy {
                    key: key.to_string(),
                    reason: "negative or NaN probability".into(),
                });
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > tolerance {
                return Err(Error::InvalidStrategy {
                    key: key.to_string(),
                    reason: format!("probabilities sum to {total}"),
                });
            }
        }
        Ok(())
    }
}

/// Reach probabilities of a node: each player's own contribution and chance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reach {
    pub players: [f64; NUM_PLAYERS],
    pub chance: f64,
}

impl Reach {
    pub const ROOT: Reach = Reach {
        players: [1.0; NUM_PLAYERS],
        chance: 1.0,
    };

    /// Opponent times chance reach, the counterfactual weight for `player`.
    pub fn counterfactual(&self, player: usize) -> f64 {
        self.players[1 - player] * self.chance
    }

    pub fn total(&self) -> f64 {
        self.players[0] * self.players[1] * self.chance
    }
}

pub trait ReachVisitor {
    fn visit(&mut self, game: &Game, node: usize, reach: &Reach);
}

impl<F: FnMut(&Game, usize, &Reach)> ReachVisitor for F {
    fn visit(&mut self, game: &Game, node: usize, reach: &Reach) {
        self(game, node, reach)
    }
}

/// Visits every node once in pre-order with its exact reach probabilities.
pub fn reach_traverse<V: ReachVisitor>(
    game: &Game,
    profile: &StrategyProfile,
    mut visitor: V,
) -> Result<V> {
    let policy = profile.to_dense(game)?;
    reach_traverse_dense(game, &policy, &mut visitor);
    Ok(visitor)
}

pub fn reach_traverse_dense<V: ReachVisitor>(game: &Game, policy: &[Vec<f64>], visitor: &mut V) {
    let mut stack = vec![(game.root(), Reach::ROOT)];
    while let Some((id, reach)) = stack.pop() {
        visitor.visit(game, id, &reach);
        let node = game.node(id);
        // Reverse push keeps children in action order.
        for (i, &child) in node.children.iter().enumerate().rev() {
            let mut next = reach;
            match &node.kind {
                NodeKind::Chance { probs } => next.chance *= probs[i],
                NodeKind::Decision { player, infoset } => {
                    next.players[*player] *= policy[*infoset][i]
                }
                NodeKind::Terminal { .. } => unreachable!("terminal with children"),
            }
            stack.push((child, next));
        }
    }
}

/// Exact expected utility of both players under `profile`.
pub fn expected_value(game: &Game, profile: &StrategyProfile) -> Result<[f64; NUM_PLAYERS]> {
    let policy = profile.to_dense(game)?;
    Ok(expected_value_dense(game, &policy))
}

pub fn expected_value_dense(game: &Game, policy: &[Vec<f64>]) -> [f64; NUM_PLAYERS] {
    let u1 = subtree_value(game, policy, game.root());
    [u1, -u1]
}

fn subtree_value(game: &Game, policy: &[Vec<f64>], id: usize) -> f64 {
    let node = game.node(id);
    match &node.kind {
        NodeKind::Terminal { utilities } => utilities[0],
        NodeKind::Chance { probs } => node
            .children
            .iter()
            .zip(probs)
            .map(|(&c, &p)| p * subtree_value(game, policy, c))
            .sum(),
        NodeKind::Decision { infoset, .. } => node
            .children
            .iter()
            .zip(&policy[*infoset])
            .map(|(&c, &p)| p * subtree_value(game, policy, c))
            .sum(),
    }
}
