//! Regret estimators: a fit/predict interface over feature vectors with an
//! exact tabular memorizer, a single regression tree and a bagged ensemble.

mod features;
mod tree;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use features::{featurize, Featurizer, ParsedKey, FEATURE_DIM};
pub use tree::{best_split, RegressionTree, SplitChoice, TreeConfig, TreeNode};

use crate::error::{Error, Result};

pub type FeatureVector = Vec<f64>;

/// Weighted regression rows sharing one feature dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    dim: usize,
    features: Vec<FeatureVector>,
    targets: Vec<f64>,
    weights: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Dataset {
            dim,
            ..Default::default()
        }
    }

    pub fn push(&mut self, features: FeatureVector, target: f64, weight: f64) -> Result<()> {
        if features.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                actual: features.len(),
            });
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidArgument(format!("row weight {weight}")));
        }
        if !target.is_finite() {
            return Err(Error::InvalidArgument(format!("row target {target}")));
        }
        self.features.push(features);
        self.targets.push(target);
        self.weights.push(weight);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted variance of the targets: the MSE of the best constant.
    pub fn target_variance(&self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        let mean = self.weighted(|y| y) / total;
        self.weighted(|y| (y - mean).powi(2)) / total
    }

    fn weighted(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.targets.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }
}

/// Learns a real-valued regret function over feature vectors.
pub trait RegretEstimator: Send {
    /// Replaces the model with one trained on `data`.
    fn fit(&mut self, data: &Dataset) -> Result<()>;

    /// Predicted regret; zero before the first fit.
    fn predict(&self, features: &[f64]) -> Result<f64>;

    /// Leaf count for tree models, stored entries for the tabular one.
    fn model_complexity(&self) -> usize;
}

/// Exact memorizer keyed by the bit pattern of the whole feature vector.
#[derive(Clone, Debug, Default)]
pub struct TabularEstimator {
    table: HashMap<Vec<u64>, f64>,
}

fn bits(features: &[f64]) -> Vec<u64> {
    // Normalise -0.0 so it shares a key with 0.0.
    features.iter().map(|&x| (x + 0.0).to_bits()).collect()
}

impl TabularEstimator {
    pub fn new() -> Self {
        Self::default()
    }
}

impl RegretEstimator for TabularEstimator {
    fn fit(&mut self, data: &Dataset) -> Result<()> {
        let mut table = HashMap::with_capacity(data.len());
        for (x, &y) in data.features().iter().zip(data.targets()) {
            if let Some(&prev) = table.get(&bits(x)) {
                if prev != y {
                    return Err(Error::FeatureCollision {
                        first: prev,
                        second: y,
                    });
                }
            }
            table.insert(bits(x), y);
        }
        self.table = table;
        Ok(())
    }

    fn predict(&self, features: &[f64]) -> Result<f64> {
        Ok(self.table.get(&bits(features)).copied().unwrap_or(0.0))
    }

    fn model_complexity(&self) -> usize {
        self.table.len()
    }
}

#[derive(Clone, Debug, Default)]
pub struct TreeEstimator {
    config: TreeConfig,
    tree: Option<RegressionTree>,
}

impl TreeEstimator {
    pub fn new(config: TreeConfig) -> Self {
        TreeEstimator { config, tree: None }
    }

    pub fn tree(&self) -> Option<&RegressionTree> {
        self.tree.as_ref()
    }
}

impl RegretEstimator for TreeEstimator {
    fn fit(&mut self, data: &Dataset) -> Result<()> {
        self.tree = Some(RegressionTree::fit(data, &self.config)?);
        Ok(())
    }

    fn predict(&self, features: &[f64]) -> Result<f64> {
        self.tree.as_ref().map_or(Ok(0.0), |t| t.predict(features))
    }

    fn model_complexity(&self) -> usize {
        self.tree.as_ref().map_or(0, RegressionTree::model_complexity)
    }
}

/// Bagged trees: each fit on a bootstrap resample drawn from a fixed seed,
/// resampling expressed as integer multiples of the row weights.
#[derive(Clone, Debug)]
pub struct EnsembleEstimator {
    config: TreeConfig,
    n_trees: usize,
    seed: u64,
    trees: Vec<RegressionTree>,
}

impl EnsembleEstimator {
    pub fn new(config: TreeConfig, n_trees: usize, seed: u64) -> Self {
        EnsembleEstimator {
            config,
            n_trees: n_trees.max(1),
            seed,
            trees: Vec::new(),
        }
    }
}

impl RegretEstimator for EnsembleEstimator {
    fn fit(&mut self, data: &Dataset) -> Result<()> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut trees = Vec::with_capacity(self.n_trees);
        for _ in 0..self.n_trees {
            let mut counts = vec![0u32; data.len()];
            for _ in 0..data.len() {
                counts[rng.random_range(0..data.len())] += 1;
            }
            let mut sample = Dataset::new(data.dim());
            for (r, &n) in counts.iter().enumerate() {
                if n > 0 {
                    sample.push(data.features()[r].clone(), data.targets()[r], data.weights()[r] * f64::from(n))?;
                }
            }
            if sample.weights().iter().sum::<f64>() <= 0.0 {
                continue;
            }
            trees.push(RegressionTree::fit(&sample, &self.config)?);
        }
        self.trees = trees;
        Ok(())
    }

    fn predict(&self, features: &[f64]) -> Result<f64> {
        if self.trees.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for t in &self.trees {
            total += t.predict(features)?;
        }
        Ok(total / self.trees.len() as f64)
    }

    fn model_complexity(&self) -> usize {
        self.trees.iter().map(RegressionTree::model_complexity).sum()
    }
}

/// Estimator choice carried by solver configs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimatorKind {
    Tabular,
    Tree(TreeConfig),
    Ensemble {
        tree: TreeConfig,
        n_trees: usize,
        seed: u64,
    },
}

impl EstimatorKind {
    pub fn build(&self) -> Box<dyn RegretEstimator> {
        match *self {
            EstimatorKind::Tabular => Box::new(TabularEstimator::new()),
            EstimatorKind::Tree(config) => Box::new(TreeEstimator::new(config)),
            EstimatorKind::Ensemble {
                tree,
                n_trees,
                seed,
            } => Box::new(EnsembleEstimator::new(tree, n_trees, seed)),
        }
    }

    pub fn is_tabular(&self) -> bool {
        matches!(self, EstimatorKind::Tabular)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabular_memorizes() {
        let mut est = TabularEstimator::new();
        let mut d = Dataset::new(2);
        d.push(vec![1.0, 0.0], 3.0, 1.0).unwrap();
        est.fit(&d).unwrap();
        assert_eq!(est.predict(&[1.0, 0.0]).unwrap(), 3.0);
        assert_eq!(est.predict(&[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(est.model_complexity(), 1);
    }

    #[test]
    fn tabular_collision() {
        let mut est = TabularEstimator::new();
        let mut d = Dataset::new(1);
        d.push(vec![1.0], 3.0, 1.0).unwrap();
        d.push(vec![1.0], 3.0, 1.0).unwrap();
        est.fit(&d).unwrap();
        d.push(vec![1.0], 4.0, 1.0).unwrap();
        assert!(matches!(est.fit(&d), Err(Error::FeatureCollision { .. })));
    }

    #[test]
    fn unfitted_estimators_predict_zero() {
        for kind in [
            EstimatorKind::Tabular,
            EstimatorKind::Tree(TreeConfig::default()),
            EstimatorKind::Ensemble {
                tree: TreeConfig::default(),
                n_trees: 3,
                seed: 1,
            },
        ] {
            assert_eq!(kind.build().predict(&[1.0, 2.0]).unwrap(), 0.0);
        }
    }

    #[test]
    fn dataset_rejects_bad_rows() {
        let mut d = Dataset::new(2);
        assert!(d.push(vec![1.0], 0.0, 1.0).is_err());
        assert!(d.push(vec![1.0, 2.0], 0.0, -1.0).is_err());
        assert!(d.push(vec![1.0, 2.0], f64::NAN, 1.0).is_err());
    }

    #[test]
    fn ensemble_is_deterministic() {
        let mut d = Dataset::new(1);
        for i in 0..20 {
            d.push(vec![i as f64], (i * i) as f64, 1.0).unwrap();
        }
        let kind = EstimatorKind::Ensemble {
            tree: TreeConfig::default(),
            n_trees: 5,
            seed: 9,
        };
        let (mut a, mut b) = (kind.build(), kind.build());
        a.fit(&d).unwrap();
        b.fit(&d).unwrap();
        for i in 0..20 {
            let x = [i as f64 + 0.5];
            assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
        }
    }
}
