//! Full-width counterfactual regret minimization.

use std::time::Instant;

use crate::efg::{Game, InfoSetKey, NodeKind, StrategyProfile, NUM_PLAYERS};
use crate::error::{Error, Result};
use crate::eval::exploitability_dense;
use crate::regret::regret_match_into;

/// Per-infoset action vectors indexed by infoset id.
#[derive(Clone, Debug, PartialEq)]
pub struct InfosetTable {
    rows: Vec<Vec<f64>>,
}

impl InfosetTable {
    pub fn zeros(game: &Game) -> Self {
        InfosetTable {
            rows: game.infosets().iter().map(|i| vec![0.0; i.num_actions()]).collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, infoset: usize) -> &[f64] {
        &self.rows[infoset]
    }

    pub fn by_key(&self, game: &Game, key: &InfoSetKey) -> Result<&[f64]> {
        let i = game
            .infoset_index(key)
            .ok_or_else(|| Error::UnknownInfoSet(key.to_string()))?;
        Ok(&self.rows[i])
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.rows
    }

    fn add(&mut self, other: &InfosetTable) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

/// Cumulative counterfactual regrets `R^T(I, a)`.
pub type RegretTable = InfosetTable;
/// Reach-weighted strategy sums, the average-strategy numerator.
pub type StrategySumTable = InfosetTable;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateMode {
    #[default]
    Simultaneous,
    Alternating,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfrConfig {
    pub iterations: u64,
    pub update_mode: UpdateMode,
    pub log_every: u64,
}

impl Default for CfrConfig {
    fn default() -> Self {
        CfrConfig {
            iterations: 1000,
            update_mode: UpdateMode::Simultaneous,
            log_every: 10,
        }
    }
}

impl CfrConfig {
    fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.log_every == 0 {
            return Err(Error::InvalidArgument("iterations and log_every must be positive".into()));
        }
        Ok(())
    }
}

/// One row of `t,exploitability,max_pos_regret_sum,wall_ms`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfrLogRow {
    pub t: u64,
    pub exploitability: f64,
    /// `sum over players and infosets of max_a R^t(I, a)_+`.
    pub max_pos_regret_sum: f64,
    pub wall_ms: f64,
}

pub const CFR_CSV_HEADER: &str = "t,exploitability,max_pos_regret_sum,wall_ms";

/// One full-tree counterfactual pass under `policy`.
///
/// For every infoset of a player in `update`, adds the immediate
/// counterfactual regrets into `regrets` and `pi_i(I) * sigma(I, a)` into
/// `strategy_sum`. Returns player 1's expected utility.
pub(crate) fn counterfactual_pass(
    game: &Game,
    policy: &[Vec<f64>],
    update: [bool; NUM_PLAYERS],
    regrets: &mut [Vec<f64>],
    strategy_sum: &mut [Vec<f64>],
) -> f64 {
    let mut pass = Pass {
        game,
        policy,
        update,
        regrets,
        strategy_sum,
    };
    pass.walk(game.root(), [1.0; NUM_PLAYERS], 1.0)
}

struct Pass<'a> {
    game: &'a Game,
    policy: &'a [Vec<f64>],
    update: [bool; NUM_PLAYERS],
    regrets: &'a mut [Vec<f64>],
    strategy_sum: &'a mut [Vec<f64>],
}

impl Pass<'_> {
    /// Player 1's expected utility of the subtree at `id`.
    fn walk(&mut self, id: usize, reach: [f64; NUM_PLAYERS], chance: f64) -> f64 {
        let game = self.game;
        let node = game.node(id);
        match &node.kind {
            NodeKind::Terminal { utilities } => utilities[0],
            NodeKind::Chance { probs } => node
                .children
                .iter()
                .zip(probs)
                .map(|(&c, &p)| p * self.walk(c, reach, chance * p))
                .sum(),
            &NodeKind::Decision { player, infoset } => {
                let sigma = &self.policy[infoset];
                let mut values = Vec::with_capacity(sigma.len());
                let mut value = 0.0;
                for (a, &child) in node.children.iter().enumerate() {
                    let mut next = reach;
                    next[player] *= sigma[a];
                    let v = self.walk(child, next, chance);
                    value += sigma[a] * v;
                    values.push(v);
                }
                if self.update[player] {
                    // Utilities are stored for player 1; flip for player 2.
                    let sign = if player == 0 { 1.0 } else { -1.0 };
                    let cf_reach = reach[1 - player] * chance;
                    let regrets = &mut self.regrets[infoset];
                    let sums = &mut self.strategy_sum[infoset];
                    for a in 0..sigma.len() {
                        regrets[a] += cf_reach * sign * (values[a] - value);
                        sums[a] += reach[player] * sigma[a];
                    }
                }
                value
            }
        }
    }
}

/// Regret-matched policy for every infoset.
pub(crate) fn policy_from_regrets(regrets: &[Vec<f64>]) -> Vec<Vec<f64>> {
    regrets
        .iter()
        .map(|r| {
            let mut out = vec![0.0; r.len()];
            regret_match_into(r, &mut out);
            out
        })
        .collect()
}

/// Normalized strategy sums; infosets with no mass get uniform.
pub(crate) fn normalize_sums(sums: &[Vec<f64>]) -> Vec<Vec<f64>> {
    sums.iter()
        .map(|s| {
            let total: f64 = s.iter().sum();
            if total > 0.0 {
                s.iter().map(|x| x / total).collect()
            } else {
                vec![1.0 / s.len() as f64; s.len()]
            }
        })
        .collect()
}

/// `sum over infosets of max_a R(I, a)_+`.
pub(crate) fn max_positive_regret_sum(regrets: &[Vec<f64>]) -> f64 {
    regrets
        .iter()
        .map(|r| r.iter().copied().fold(0.0, f64::max))
        .sum()
}

/// Tabular CFR state over one game.
#[derive(Clone, Debug)]
pub struct CfrSolver<'a> {
    game: &'a Game,
    mode: UpdateMode,
    regrets: RegretTable,
    strategy_sum: StrategySumTable,
    t: u64,
}

impl<'a> CfrSolver<'a> {
    pub fn new(game: &'a Game, mode: UpdateMode) -> Self {
        CfrSolver {
            game,
            mode,
            regrets: InfosetTable::zeros(game),
            strategy_sum: InfosetTable::zeros(game),
            t: 0,
        }
    }

    pub fn game(&self) -> &'a Game {
        self.game
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    pub fn regrets(&self) -> &RegretTable {
        &self.regrets
    }

    pub fn strategy_sum(&self) -> &StrategySumTable {
        &self.strategy_sum
    }

    /// Regret matching at one infoset, looked up by key.
    pub fn current_policy(&self, player: usize, key: &InfoSetKey) -> Result<Vec<f64>> {
        let i = self
            .game
            .infoset_index(key)
            .filter(|&i| self.game.infoset(i).player == player)
            .ok_or_else(|| Error::UnknownInfoSet(key.to_string()))?;
        let mut out = vec![0.0; self.regrets.row(i).len()];
        regret_match_into(self.regrets.row(i), &mut out);
        Ok(out)
    }

    /// Dense current policy for every infoset.
    pub fn current_policy_table(&self) -> Vec<Vec<f64>> {
        policy_from_regrets(self.regrets.rows())
    }

    /// One iteration; returns the immediate regrets added to the table.
    pub fn iterate(&mut self) -> RegretTable {
        let mut immediate = InfosetTable::zeros(self.game);
        match self.mode {
            UpdateMode::Simultaneous => {
                let policy = self.current_policy_table();
                counterfactual_pass(
                    self.game,
                    &policy,
                    [true, true],
                    immediate.rows_mut(),
                    self.strategy_sum.rows_mut(),
                );
                self.regrets.add(&immediate);
            }
            UpdateMode::Alternating => {
                for player in 0..NUM_PLAYERS {
                    let policy = self.current_policy_table();
                    let mut step = InfosetTable::zeros(self.game);
                    let mut update = [false; NUM_PLAYERS];
                    update[player] = true;
                    counterfactual_pass(
                        self.game,
                        &policy,
                        update,
                        step.rows_mut(),
                        self.strategy_sum.rows_mut(),
                    );
                    self.regrets.add(&step);
                    immediate.add(&step);
                }
            }
        }
        self.t += 1;
        immediate
    }

    pub fn average_policy_table(&self) -> Vec<Vec<f64>> {
        normalize_sums(self.strategy_sum.rows())
    }

    pub fn average_strategy(&self) -> StrategyProfile {
        StrategyProfile::from_dense(self.game, &self.average_policy_table())
    }

    pub fn max_positive_regret_sum(&self) -> f64 {
        max_positive_regret_sum(self.regrets.rows())
    }
}

/// Runs CFR and logs the average strategy's exploitability every
/// `log_every` iterations and at the last one.
pub fn solve(game: &Game, config: &CfrConfig) -> Result<(StrategyProfile, Vec<CfrLogRow>)> {
    config.validate()?;
    let start = Instant::now();
    let mut solver = CfrSolver::new(game, config.update_mode);
    let mut log = Vec::new();
    for t in 1..=config.iterations {
        solver.iterate();
        if t % config.log_every == 0 || t == config.iterations {
            log.push(CfrLogRow {
                t,
                exploitability: exploitability_dense(game, &solver.average_policy_table()),
                max_pos_regret_sum: solver.max_positive_regret_sum(),
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    Ok((solver.average_strategy(), log))
}
