//! Python bindings. Strategies cross the boundary as `dict[str, list[float]]`
//! keyed by infoset key.

use std::collections::HashMap;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fregret::cfr::{CfrConfig, UpdateMode};
use fregret::estimator::Dataset;
use fregret::{
    EstimatorKind, GameId, InfoSetKey, RcfrConfig, StrategyProfile, TargetMode, TreeConfig,
};

type Strategy = HashMap<String, Vec<f64>>;

fn err(e: fregret::Error) -> PyErr {
    match e {
        fregret::Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(frozen, module = "fregret")]
struct Game {
    id: GameId,
    inner: fregret::Game,
}

#[pymethods]
impl Game {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let id: GameId = name.parse().map_err(err)?;
        Ok(Game { id, inner: id.build() })
    }

    #[staticmethod]
    fn kuhn() -> Self {
        Game { id: GameId::Kuhn, inner: GameId::Kuhn.build() }
    }

    #[staticmethod]
    fn leduc() -> Self {
        Game { id: GameId::Leduc, inner: GameId::Leduc.build() }
    }

    #[getter]
    fn name(&self) -> &str {
        self.id.as_str()
    }

    #[getter]
    fn utility_range(&self) -> f64 {
        self.inner.utility_range()
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.nodes().len()
    }

    /// `(player, key, actions)` for every infoset, player 0 or 1.
    fn infosets(&self) -> Vec<(usize, String, Vec<String>)> {
        self.inner
            .infosets()
            .iter()
            .map(|i| (i.player, i.key.to_string(), i.actions.clone()))
            .collect()
    }

    fn uniform(&self) -> Strategy {
        to_py(&StrategyProfile::uniform(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Game({:?}, infosets={})", self.id.as_str(), self.inner.infosets().len())
    }
}

fn to_py(profile: &StrategyProfile) -> Strategy {
    profile.iter().map(|(_, k, v)| (k.to_string(), v.to_vec())).collect()
}

fn from_py(game: &Game, strategy: &Strategy) -> PyResult<StrategyProfile> {
    let mut profile = StrategyProfile::new();
    for (key, probs) in strategy {
        let key = InfoSetKey::new(key.as_str());
        let i = game
            .inner
            .infoset_index(&key)
            .ok_or_else(|| PyValueError::new_err(format!("unknown infoset {key}")))?;
        profile.insert(game.inner.infoset(i).player, key, probs.clone());
    }
    Ok(profile)
}

fn log_rows<'py, T>(py: Python<'py>, rows: &[T], fields: impl Fn(&T, &Bound<'py, PyDict>) -> PyResult<()>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            fields(r, &d)?;
            Ok(d)
        })
        .collect()
}

/// Vanilla CFR. Returns `(average_strategy, log)`.
#[pyfunction]
#[pyo3(signature = (game, iterations, alternating = false, log_every = 10))]
fn cfr_solve<'py>(
    py: Python<'py>,
    game: &Game,
    iterations: u64,
    alternating: bool,
    log_every: u64,
) -> PyResult<(Strategy, Vec<Bound<'py, PyDict>>)> {
    let config = CfrConfig {
        iterations,
        update_mode: if alternating { UpdateMode::Alternating } else { UpdateMode::Simultaneous },
        log_every,
    };
    let (profile, log) = py.detach(|| fregret::cfr_solve(&game.inner, &config)).map_err(err)?;
    let rows = log_rows(py, &log, |r, d| {
        d.set_item("t", r.t)?;
        d.set_item("exploitability", r.exploitability)?;
        d.set_item("max_pos_regret_sum", r.max_pos_regret_sum)
    })?;
    Ok((to_py(&profile), rows))
}

/// Regression CFR. `estimator` is "tabular", "tree" or "ensemble";
/// `target_mode` is "exact" or "bootstrap".
#[pyfunction]
#[pyo3(signature = (
    game, iterations, estimator = "tree", min_leaf_weight = 1.0, max_depth = None,
    n_trees = 10, target_mode = "exact", refit_every = 1, log_every = 10, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn rcfr_solve<'py>(
    py: Python<'py>,
    game: &Game,
    iterations: u64,
    estimator: &str,
    min_leaf_weight: f64,
    max_depth: Option<usize>,
    n_trees: usize,
    target_mode: &str,
    refit_every: u64,
    log_every: u64,
    seed: u64,
) -> PyResult<(Strategy, Vec<Bound<'py, PyDict>>)> {
    let tree = TreeConfig { min_leaf_weight, max_depth };
    let estimator = match estimator {
        "tabular" => EstimatorKind::Tabular,
        "tree" => EstimatorKind::Tree(tree),
        "ensemble" => EstimatorKind::Ensemble { tree, n_trees, seed },
        other => return Err(PyValueError::new_err(format!("unknown estimator {other:?}"))),
    };
    let target_mode = match target_mode {
        "exact" => TargetMode::Exact,
        "bootstrap" => TargetMode::Bootstrap,
        other => return Err(PyValueError::new_err(format!("unknown target mode {other:?}"))),
    };
    let config = RcfrConfig { iterations, estimator, target_mode, refit_every, log_every, seed };
    let (profile, log) = py.detach(|| fregret::rcfr_solve(&game.inner, &config)).map_err(err)?;
    let rows = log_rows(py, &log, |r, d| {
        d.set_item("t", r.t)?;
        d.set_item("exploitability", r.exploitability)?;
        d.set_item("mse", r.mse.to_vec())?;
        d.set_item("leaves", r.leaves.to_vec())
    })?;
    Ok((to_py(&profile), rows))
}

#[pyfunction]
fn exploitability(game: &Game, strategy: Strategy) -> PyResult<f64> {
    fregret::exploitability(&game.inner, &from_py(game, &strategy)?).map_err(err)
}

/// `(value, response)` for `responder` (0 or 1) against `strategy`.
#[pyfunction]
fn best_response(game: &Game, strategy: Strategy, responder: usize) -> PyResult<(f64, Strategy)> {
    let br = fregret::best_response(&game.inner, &from_py(game, &strategy)?, responder).map_err(err)?;
    Ok((br.value, to_py(&br.response)))
}

#[pyfunction]
fn exact_ev(game: &Game, a: Strategy, b: Strategy) -> PyResult<f64> {
    fregret::exact_ev(&game.inner, &from_py(game, &a)?, &from_py(game, &b)?).map_err(err)
}

/// Returns `(mean, stderr)` in chips per hand for `a`.
#[pyfunction]
#[pyo3(signature = (game, a, b, hands, seed = 0, duplicate = true))]
fn sampled_match(game: &Game, a: Strategy, b: Strategy, hands: u64, seed: u64, duplicate: bool) -> PyResult<(f64, f64)> {
    let m = fregret::sampled_match(&game.inner, &from_py(game, &a)?, &from_py(game, &b)?, hands, seed, duplicate)
        .map_err(err)?;
    Ok((m.mean, m.stderr))
}

#[pyfunction]
fn write_strategy(game: &Game, strategy: Strategy) -> PyResult<String> {
    Ok(fregret::io::write_strategy(game.id.as_str(), &from_py(game, &strategy)?))
}

#[pyfunction]
fn read_strategy(game: &Game, text: &str) -> PyResult<Strategy> {
    fregret::io::read_strategy(&game.inner, text).map(|p| to_py(&p)).map_err(err)
}

#[pyfunction]
fn regret_match(regrets: Vec<f64>) -> PyResult<Vec<f64>> {
    fregret::regret_match(&regrets).map_err(err)
}

#[pyfunction]
fn regret_bound(iterations: u64, delta: f64, n_actions: usize, epsilon: f64) -> PyResult<f64> {
    fregret::regret_bound(iterations, delta, n_actions, epsilon).map_err(err)
}

#[pyclass(module = "fregret")]
struct RegretMatcher(fregret::RegretMatcher);

#[pymethods]
impl RegretMatcher {
    #[new]
    fn new(n_actions: usize) -> PyResult<Self> {
        fregret::RegretMatcher::new(n_actions).map(RegretMatcher).map_err(err)
    }

    /// Plays the current strategy against `payoff` and returns it.
    fn update(&mut self, payoff: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.update(&payoff).map_err(err)
    }

    #[getter]
    fn regrets(&self) -> Vec<f64> {
        self.0.regrets().to_vec()
    }

    #[getter]
    fn iterations(&self) -> u64 {
        self.0.iterations()
    }

    fn current_strategy(&self) -> Vec<f64> {
        self.0.current_strategy()
    }

    fn average_strategy(&self) -> PyResult<Vec<f64>> {
        self.0.average_strategy().map_err(err)
    }
}

#[pyclass(frozen, module = "fregret")]
struct RegressionTree(fregret::RegressionTree);

#[pymethods]
impl RegressionTree {
    #[staticmethod]
    #[pyo3(signature = (features, targets, weights = None, min_leaf_weight = 1.0, max_depth = None))]
    fn fit(
        features: Vec<Vec<f64>>,
        targets: Vec<f64>,
        weights: Option<Vec<f64>>,
        min_leaf_weight: f64,
        max_depth: Option<usize>,
    ) -> PyResult<Self> {
        if features.len() != targets.len() || weights.as_ref().is_some_and(|w| w.len() != targets.len()) {
            return Err(PyValueError::new_err("features, targets and weights must have equal length"));
        }
        let mut data = Dataset::new(features.first().map_or(0, Vec::len));
        for (i, (x, y)) in features.into_iter().zip(targets).enumerate() {
            let w = weights.as_ref().map_or(1.0, |w| w[i]);
            data.push(x, y, w).map_err(err)?;
        }
        fregret::RegressionTree::fit(&data, &TreeConfig { min_leaf_weight, max_depth })
            .map(RegressionTree)
            .map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        fregret::RegressionTree::from_text(text).map(RegressionTree).map_err(err)
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.predict(&x).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn leaves(&self) -> usize {
        self.0.model_complexity()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }
}

#[pymodule]
#[pyo3(name = "fregret")]
fn fregret_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_class::<RegretMatcher>()?;
    m.add_class::<RegressionTree>()?;
    m.add_function(wrap_pyfunction!(cfr_solve, m)?)?;
    m.add_function(wrap_pyfunction!(rcfr_solve, m)?)?;
    m.add_function(wrap_pyfunction!(exploitability, m)?)?;
    m.add_function(wrap_pyfunction!(best_response, m)?)?;
    m.add_function(wrap_pyfunction!(exact_ev, m)?)?;
    m.add_function(wrap_pyfunction!(sampled_match, m)?)?;
    m.add_function(wrap_pyfunction!(write_strategy, m)?)?;
    m.add_function(wrap_pyfunction!(read_strategy, m)?)?;
    m.add_function(wrap_pyfunction!(regret_match, m)?)?;
    m.add_function(wrap_pyfunction!(regret_bound, m)?)?;
    Ok(())
}
