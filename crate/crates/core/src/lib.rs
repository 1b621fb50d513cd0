//! Counterfactual regret minimization with function approximation for
//! two-player zero-sum extensive-form games.
//!
//! The crate provides an immutable game-tree representation ([`efg`]), Kuhn
//! and Leduc poker builders ([`games`]), regret matching with approximate
//! regrets ([`regret`]), tabular CFR ([`cfr`]), regression-tree regret
//! estimators ([`estimator`]), regression CFR ([`rcfr`]), exact and sampled
//! evaluation ([`eval`]), file formats ([`io`]) and the `fregret` CLI
//! ([`cli`]).

pub mod cfr;
pub mod cli;
pub mod efg;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod games;
pub mod io;
pub mod rcfr;
pub mod regret;

pub use cfr::{solve as cfr_solve, CfrConfig, CfrSolver, UpdateMode};
pub use efg::{Game, InfoSet, InfoSetKey, StrategyProfile};
pub use error::{Error, Result};
pub use estimator::{EstimatorKind, RegressionTree, RegretEstimator, TreeConfig};
pub use eval::{best_response, exact_ev, exploitability, sampled_match, MatchResult};
pub use games::{build_kuhn, build_leduc, GameId, MatrixGame};
pub use rcfr::{rcfr_solve, RcfrConfig, RcfrSolver, TargetMode};
pub use regret::{regret_bound, regret_match, RegretMatcher};
