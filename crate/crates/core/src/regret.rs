//! Regret matching on a single decision, driven either by exact cumulative
//! regrets or by an estimator of them (regression regret-matching).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimator::{Dataset, EstimatorKind, RegretEstimator};
use crate::games::MatrixGame;

/// Play in proportion to the positive part of `regrets`; uniform when no
/// entry is positive.
pub fn regret_match(regrets: &[f64]) -> Result<Vec<f64>> {
    if regrets.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut out = vec![0.0; regrets.len()];
    regret_match_into(regrets, &mut out);
    Ok(out)
}

pub(crate) fn regret_match_into(regrets: &[f64], out: &mut [f64]) {
    let total: f64 = regrets.iter().map(|&r| r.max(0.0)).sum();
    if total > 0.0 {
        for (o, &r) in out.iter_mut().zip(regrets) {
            *o = r.max(0.0) / total;
        }
    } else {
        out.fill(1.0 / regrets.len() as f64);
    }
}

/// Bound on the average regret `max_a R^T(a) / T` of regret matching played
/// from estimates whose per-action error on the cumulative regret before
/// round `t` is at most `(t - 1) * epsilon` (an `epsilon`-accurate estimate of
/// the average regret):
///
/// ```text
/// sqrt( n * delta^2 / T  +  n * delta * epsilon * (T - 1) / T )
/// ```
///
/// With exact regrets this is the classical `delta * sqrt(n / T)`; for
/// `epsilon > 0` it levels off at `sqrt(n * delta * epsilon)`.
///
/// Derivation: the played strategy is proportional to the positive part of
/// the estimate `y`, so `y_+ . r = 0` for the instantaneous regret `r`, and
/// `R_+ . r = (R_+ - y_+) . r <= n (t - 1) epsilon delta` (this also covers
/// the uniform fallback, where `R <= (t - 1) epsilon`). Summing
/// `|(R + r)_+|^2 <= |R_+|^2 + 2 R_+ . r + |r|^2` over rounds and using
/// `|r|^2 <= n delta^2` gives the bound on `max_a R^T(a) <= |R^T_+|`.
pub fn regret_bound(iterations: u64, delta: f64, n_actions: usize, epsilon: f64) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be positive".into()));
    }
    if delta.is_nan() || epsilon.is_nan() || delta < 0.0 || epsilon < 0.0 {
        return Err(Error::InvalidArgument("delta and epsilon must be nonnegative".into()));
    }
    let t = iterations as f64;
    let n = n_actions as f64;
    Ok((n * delta * delta / t + n * delta * epsilon * (t - 1.0) / t).sqrt())
}

/// Regret-matching state for one decision.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretMatcher {
    regrets: Vec<f64>,
    t: u64,
    cumulative_strategy: Vec<f64>,
}

impl RegretMatcher {
    pub fn new(n_actions: usize) -> Result<Self> {
        if n_actions == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(RegretMatcher {
            regrets: vec![0.0; n_actions],
            t: 0,
            cumulative_strategy: vec![0.0; n_actions],
        })
    }

    pub fn num_actions(&self) -> usize {
        self.regrets.len()
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    pub fn cumulative_strategy(&self) -> &[f64] {
        &self.cumulative_strategy
    }

    pub fn current_strategy(&self) -> Vec<f64> {
        regret_match(&self.regrets).expect("nonempty")
    }

    /// One round of plain regret matching. Returns the strategy played.
    pub fn update(&mut self, payoff: &[f64]) -> Result<Vec<f64>> {
        let sigma = self.current_strategy();
        self.apply(&sigma, payoff)?;
        Ok(sigma)
    }

    /// One round played from `oracle`'s regret estimate; true regrets are
    /// accumulated as in [`update`](Self::update) and the oracle is refit.
    pub fn rrm_step(&mut self, payoff: &[f64], oracle: &mut RrmOracle) -> Result<Vec<f64>> {
        let estimate = oracle.estimate(self)?;
        let sigma = regret_match(&estimate)?;
        self.apply(&sigma, payoff)?;
        oracle.refit(self)?;
        Ok(sigma)
    }

    fn apply(&mut self, sigma: &[f64], payoff: &[f64]) -> Result<()> {
        if payoff.len() != self.regrets.len() {
            return Err(Error::LengthMismatch {
                expected: self.regrets.len(),
                actual: payoff.len(),
            });
        }
        let value: f64 = sigma.iter().zip(payoff).map(|(s, u)| s * u).sum();
        for (r, &u) in self.regrets.iter_mut().zip(payoff) {
            *r += u - value;
        }
        for (c, &s) in self.cumulative_strategy.iter_mut().zip(sigma) {
            *c += s;
        }
        self.t += 1;
        Ok(())
    }

    pub fn average_strategy(&self) -> Result<Vec<f64>> {
        if self.t == 0 {
            return Err(Error::InvalidArgument("no rounds played".into()));
        }
        let total: f64 = self.cumulative_strategy.iter().sum();
        Ok(self.cumulative_strategy.iter().map(|c| c / total).collect())
    }

    /// `max_a R(a) / t`.
    pub fn average_regret(&self) -> f64 {
        let max = self.regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max / self.t.max(1) as f64
    }
}

/// Error injected into predicted regrets, scaled by the number of rounds
/// already accumulated so the magnitude is per unit of average regret.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    None,
    /// Uniform on `[-eps, eps]` per action.
    BoundedLinf(f64),
    /// Normal with this standard deviation per action. Unbounded, so
    /// [`regret_bound`] does not apply.
    Gaussian(f64),
}

impl NoiseModel {
    /// Per-round l-infinity error bound, when one exists.
    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            NoiseModel::None => Some(0.0),
            NoiseModel::BoundedLinf(eps) => Some(eps),
            NoiseModel::Gaussian(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RrmConfig {
    pub noise: NoiseModel,
    pub estimator: EstimatorKind,
    pub seed: u64,
}

impl RrmConfig {
    pub fn exact(noise: NoiseModel, seed: u64) -> Self {
        RrmConfig {
            noise,
            estimator: EstimatorKind::Tabular,
            seed,
        }
    }
}

/// Regret oracle for one decision: an estimator over one-hot action
/// features plus optional injected noise.
pub struct RrmOracle {
    noise: NoiseModel,
    estimator: Box<dyn RegretEstimator>,
    rng: ChaCha8Rng,
    features: Vec<Vec<f64>>,
}

impl RrmOracle {
    pub fn new(config: &RrmConfig, n_actions: usize) -> Result<Self> {
        match config.noise {
            NoiseModel::BoundedLinf(x) | NoiseModel::Gaussian(x) if x.is_nan() || x < 0.0 => {
                return Err(Error::InvalidArgument(format!("noise magnitude {x}")))
            }
            _ => {}
        }
        let features = (0..n_actions)
            .map(|a| (0..n_actions).map(|b| f64::from(u8::from(a == b))).collect())
            .collect();
        Ok(RrmOracle {
            noise: config.noise,
            estimator: config.estimator.build(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            features,
        })
    }

    fn estimate(&mut self, matcher: &RegretMatcher) -> Result<Vec<f64>> {
        if self.features.len() != matcher.num_actions() {
            return Err(Error::LengthMismatch {
                expected: matcher.num_actions(),
                actual: self.features.len(),
            });
        }
        let scale = matcher.iterations() as f64;
        let mut out = Vec::with_capacity(self.features.len());
        for phi in &self.features {
            let predicted = self.estimator.predict(phi)?;
            let noise = match self.noise {
                NoiseModel::None => 0.0,
                NoiseModel::BoundedLinf(eps) => eps * scale * self.rng.random_range(-1.0..=1.0),
                NoiseModel::Gaussian(sd) => {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    sd * scale * z
                }
            };
            out.push(predicted + noise);
        }
        Ok(out)
    }

    fn refit(&mut self, matcher: &RegretMatcher) -> Result<()> {
        let mut data = Dataset::new(self.features.len());
        for (phi, &r) in self.features.iter().zip(matcher.regrets()) {
            data.push(phi.clone(), r, 1.0)?;
        }
        self.estimator.fit(&data)
    }
}

/// One logged point of a self-play run: `t,avg_regret,bound,epsilon,seed`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RrmLogRow {
    pub t: u64,
    /// Larger of the two players' `max_a R^t(a) / t`.
    pub avg_regret: f64,
    /// Infinite for unbounded noise models.
    pub bound: f64,
    pub epsilon: f64,
    pub seed: u64,
}

pub const RRM_CSV_HEADER: &str = "t,avg_regret,bound,epsilon,seed";

/// Both players of a matrix game run regression regret-matching against
/// each other for `iterations` rounds; a row is logged every `log_every`
/// rounds and at the last one.
pub fn rrm_self_play(
    game: &MatrixGame,
    iterations: u64,
    config: &RrmConfig,
    log_every: u64,
) -> Result<Vec<RrmLogRow>> {
    if iterations == 0 || log_every == 0 {
        return Err(Error::InvalidArgument("iterations and log_every must be positive".into()));
    }
    let n = game.num_actions();
    let mut players = [RegretMatcher::new(n[0])?, RegretMatcher::new(n[1])?];
    let mut oracles = [
        RrmOracle::new(&RrmConfig { seed: config.seed.wrapping_mul(2), ..*config }, n[0])?,
        RrmOracle::new(&RrmConfig { seed: config.seed.wrapping_mul(2) + 1, ..*config }, n[1])?,
    ];
    let delta = game.utility_range();
    let epsilon = config.noise.epsilon();
    let magnitude = match config.noise {
        NoiseModel::None => 0.0,
        NoiseModel::BoundedLinf(x) | NoiseModel::Gaussian(x) => x,
    };
    let mut log = Vec::new();
    for t in 1..=iterations {
        let estimates = [oracles[0].estimate(&players[0])?, oracles[1].estimate(&players[1])?];
        let sigmas = [regret_match(&estimates[0])?, regret_match(&estimates[1])?];
        for p in 0..2 {
            let payoff = game.action_values(p, &sigmas[1 - p]);
            players[p].apply(&sigmas[p], &payoff)?;
            oracles[p].refit(&players[p])?;
        }
        if t % log_every == 0 || t == iterations {
            let avg_regret = players[0].average_regret().max(players[1].average_regret());
            let n_max = n[0].max(n[1]);
            let bound = match epsilon {
                Some(eps) => regret_bound(t, delta, n_max, eps)?,
                None => f64::INFINITY,
            };
            log.push(RrmLogRow {
                t,
                avg_regret,
                bound,
                epsilon: magnitude,
                seed: config.seed,
            });
        }
    }
    Ok(log)
}
