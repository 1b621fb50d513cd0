//! Regression CFR: the current policy at every infoset comes from a
//! regressor's estimate of the cumulative counterfactual regrets, refit on
//! a per-player target store after each iteration.

use std::time::Instant;

use crate::cfr::{counterfactual_pass, max_positive_regret_sum, normalize_sums};
use crate::efg::{Game, InfoSetKey, StrategyProfile, NUM_PLAYERS};
use crate::error::{Error, Result};
use crate::estimator::{Dataset, EstimatorKind, FeatureVector, Featurizer, RegretEstimator};
use crate::eval::exploitability_dense;
use crate::games::GameId;
use crate::regret::regret_match_into;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TargetMode {
    /// Targets are the true cumulative regrets.
    #[default]
    Exact,
    /// Targets are the previous prediction plus the new immediate regret.
    Bootstrap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcfrConfig {
    pub iterations: u64,
    pub estimator: EstimatorKind,
    pub target_mode: TargetMode,
    pub refit_every: u64,
    pub log_every: u64,
    pub seed: u64,
}

impl Default for RcfrConfig {
    fn default() -> Self {
        RcfrConfig {
            iterations: 1000,
            estimator: EstimatorKind::Tree(Default::default()),
            target_mode: TargetMode::Exact,
            refit_every: 1,
            log_every: 10,
            seed: 0,
        }
    }
}

/// One row of `t,exploitability,mse_p1,mse_p2,leaves_p1,leaves_p2,wall_ms`.
/// MSE and leaf counts describe the most recent refit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcfrLogRow {
    pub t: u64,
    pub exploitability: f64,
    pub mse: [f64; NUM_PLAYERS],
    pub leaves: [usize; NUM_PLAYERS],
    pub wall_ms: f64,
}

pub const RCFR_CSV_HEADER: &str = "t,exploitability,mse_p1,mse_p2,leaves_p1,leaves_p2,wall_ms";

pub struct RcfrSolver<'a> {
    game: &'a Game,
    config: RcfrConfig,
    features: Vec<Vec<FeatureVector>>,
    estimators: [Box<dyn RegretEstimator>; NUM_PLAYERS],
    /// Regret targets per infoset (dense over all infosets; each player's
    /// estimator trains on its own rows).
    targets: Vec<Vec<f64>>,
    predictions: Vec<Vec<f64>>,
    strategy_sum: Vec<Vec<f64>>,
    last_mse: [f64; NUM_PLAYERS],
    t: u64,
}

impl<'a> RcfrSolver<'a> {
    pub fn new(game: &'a Game, config: RcfrConfig) -> Result<Self> {
        if config.iterations == 0 || config.refit_every == 0 || config.log_every == 0 {
            return Err(Error::InvalidArgument(
                "iterations, refit_every and log_every must be positive".into(),
            ));
        }
        let id = GameId::of(game)?;
        let featurizer = if config.estimator.is_tabular() {
            Featurizer::tabular(id)
        } else {
            Featurizer::new(id)
        };
        let features = game
            .infosets()
            .iter()
            .map(|info| {
                (0..info.num_actions())
                    .map(|a| featurizer.featurize(&info.key, a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let zeros: Vec<Vec<f64>> = game.infosets().iter().map(|i| vec![0.0; i.num_actions()]).collect();
        let mut estimators = [config.estimator.build(), config.estimator.build()];
        if let EstimatorKind::Ensemble { tree, n_trees, seed } = config.estimator {
            // Distinct bootstrap streams per player.
            for (p, est) in estimators.iter_mut().enumerate() {
                *est = EstimatorKind::Ensemble {
                    tree,
                    n_trees,
                    seed: seed ^ config.seed.wrapping_add(p as u64),
                }
                .build();
            }
        }
        Ok(RcfrSolver {
            game,
            config,
            features,
            estimators,
            targets: zeros.clone(),
            predictions: zeros.clone(),
            strategy_sum: zeros,
            last_mse: [0.0; NUM_PLAYERS],
            t: 0,
        })
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// The regret target store, dense over infosets.
    pub fn targets(&self) -> &[Vec<f64>] {
        &self.targets
    }

    pub fn features(&self, infoset: usize) -> &[FeatureVector] {
        &self.features[infoset]
    }

    pub fn estimator(&self, player: usize) -> &dyn RegretEstimator {
        self.estimators[player].as_ref()
    }

    pub fn last_mse(&self) -> [f64; NUM_PLAYERS] {
        self.last_mse
    }

    pub fn leaf_counts(&self) -> [usize; NUM_PLAYERS] {
        [
            self.estimators[0].model_complexity(),
            self.estimators[1].model_complexity(),
        ]
    }

    /// Regret matching over the estimator's predictions at one infoset.
    pub fn policy(&self, player: usize, key: &InfoSetKey) -> Result<Vec<f64>> {
        let i = self
            .game
            .infoset_index(key)
            .filter(|&i| self.game.infoset(i).player == player)
            .ok_or_else(|| Error::UnknownInfoSet(key.to_string()))?;
        let mut predicted = Vec::with_capacity(self.features[i].len());
        for phi in &self.features[i] {
            predicted.push(self.estimators[player].predict(phi)?);
        }
        let mut out = vec![0.0; predicted.len()];
        regret_match_into(&predicted, &mut out);
        Ok(out)
    }

    /// Current policy for every infoset from the cached predictions.
    pub fn current_policy_table(&self) -> Vec<Vec<f64>> {
        self.predictions
            .iter()
            .map(|p| {
                let mut out = vec![0.0; p.len()];
                regret_match_into(p, &mut out);
                out
            })
            .collect()
    }

    pub fn iterate(&mut self) -> Result<()> {
        let policy = self.current_policy_table();
        let mut immediate: Vec<Vec<f64>> = self.targets.iter().map(|r| vec![0.0; r.len()]).collect();
        counterfactual_pass(self.game, &policy, [true, true], &mut immediate, &mut self.strategy_sum);
        for (i, imm) in immediate.iter().enumerate() {
            for (a, &r) in imm.iter().enumerate() {
                self.targets[i][a] = match self.config.target_mode {
                    TargetMode::Exact => self.targets[i][a] + r,
                    TargetMode::Bootstrap => self.predictions[i][a] + r,
                };
            }
        }
        self.t += 1;
        if self.t.is_multiple_of(self.config.refit_every) {
            self.refit()?;
        }
        Ok(())
    }

    fn refit(&mut self) -> Result<()> {
        for player in 0..NUM_PLAYERS {
            let mut data = Dataset::new(self.features[0].first().map_or(0, Vec::len));
            for (i, info) in self.game.infosets().iter().enumerate() {
                if info.player != player {
                    continue;
                }
                for (phi, &target) in self.features[i].iter().zip(&self.targets[i]) {
                    data.push(phi.clone(), target, 1.0)?;
                }
            }
            if data.is_empty() {
                continue;
            }
            self.estimators[player].fit(&data)?;
            let mut sse = 0.0;
            for (i, info) in self.game.infosets().iter().enumerate() {
                if info.player != player {
                    continue;
                }
                for (a, phi) in self.features[i].iter().enumerate() {
                    let p = self.estimators[player].predict(phi)?;
                    self.predictions[i][a] = p;
                    sse += (p - self.targets[i][a]).powi(2);
                }
            }
            self.last_mse[player] = sse / data.len() as f64;
        }
        Ok(())
    }

    pub fn average_policy_table(&self) -> Vec<Vec<f64>> {
        normalize_sums(&self.strategy_sum)
    }

    pub fn average_strategy(&self) -> StrategyProfile {
        StrategyProfile::from_dense(self.game, &self.average_policy_table())
    }

    /// `sum over infosets of max_a target(I, a)_+`.
    pub fn max_positive_target_sum(&self) -> f64 {
        max_positive_regret_sum(&self.targets)
    }
}

/// Runs RCFR, logging every `log_every` iterations and at the last one.
pub fn rcfr_solve(game: &Game, config: &RcfrConfig) -> Result<(StrategyProfile, Vec<RcfrLogRow>)> {
    let start = Instant::now();
    let mut solver = RcfrSolver::new(game, *config)?;
    let mut log = Vec::new();
    for t in 1..=config.iterations {
        solver.iterate()?;
        if t % config.log_every == 0 || t == config.iterations {
            log.push(RcfrLogRow {
                t,
                exploitability: exploitability_dense(game, &solver.average_policy_table()),
                mse: solver.last_mse(),
                leaves: solver.leaf_counts(),
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    Ok((solver.average_strategy(), log))
}
