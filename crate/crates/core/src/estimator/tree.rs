//! Greedy CART-style regression trees.

use std::fmt::Write as _;
use std::str::FromStr;

use super::Dataset;
use crate::error::{Error, Result};

const FORMAT_HEADER: &str = "# fregret-tree v1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeConfig {
    /// Minimum total row weight on each side of a split.
    pub min_leaf_weight: f64,
    pub max_depth: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            min_leaf_weight: 1.0,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Fitted regression tree, nodes stored in pre-order.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionTree {
    dim: usize,
    nodes: Vec<TreeNode>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

struct Moments {
    weight: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn of(data: &Dataset, rows: &[usize]) -> Moments {
        let mut m = Moments {
            weight: 0.0,
            sum: 0.0,
            sum_sq: 0.0,
        };
        for &r in rows {
            let (w, y) = (data.weights()[r], data.targets()[r]);
            m.weight += w;
            m.sum += w * y;
            m.sum_sq += w * y * y;
        }
        m
    }

    fn mean(&self) -> f64 {
        self.sum / self.weight
    }
}

/// Best variance-reducing split of `rows`, or `None` when no admissible
/// split reduces the weighted squared error. Ties keep the lowest feature
/// index, then the lowest threshold.
pub fn best_split(data: &Dataset, rows: &[usize], min_leaf_weight: f64) -> Option<SplitChoice> {
    let parent = Moments::of(data, rows);
    if parent.weight <= 0.0 {
        return None;
    }
    let parent_proxy = parent.sum * parent.sum / parent.weight;
    // Below this the gain is indistinguishable from rounding error.
    let noise_floor = 1e-12 * parent.sum_sq.abs().max(f64::MIN_POSITIVE);
    let mut best: Option<SplitChoice> = None;
    let mut order = rows.to_vec();
    for feature in 0..data.dim() {
        let x = |r: usize| data.features()[r][feature];
        order.sort_by(|&a, &b| x(a).total_cmp(&x(b)).then(a.cmp(&b)));
        let (mut w_left, mut s_left) = (0.0, 0.0);
        for i in 0..order.len() - 1 {
            let r = order[i];
            w_left += data.weights()[r];
            s_left += data.weights()[r] * data.targets()[r];
            let (lo, hi) = (x(r), x(order[i + 1]));
            if lo == hi {
                continue;
            }
            let w_right = parent.weight - w_left;
            if w_left < min_leaf_weight
                || w_right < min_leaf_weight
                || w_left <= 0.0
                || w_right <= 0.0
            {
                continue;
            }
            let s_right = parent.sum - s_left;
            let gain = s_left * s_left / w_left + s_right * s_right / w_right - parent_proxy;
            if gain > noise_floor && best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitChoice {
                    feature,
                    threshold: midpoint(lo, hi),
                    gain,
                });
            }
        }
    }
    best
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = (lo + hi) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

impl RegressionTree {
    /// Greedy top-down fit. Fails on an empty dataset.
    pub fn fit(data: &Dataset, config: &TreeConfig) -> Result<RegressionTree> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if data.weights().iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidArgument("dataset has zero total weight".into()));
        }
        let mut tree = RegressionTree {
            dim: data.dim(),
            nodes: Vec::new(),
        };
        let rows: Vec<usize> = (0..data.len()).collect();
        tree.grow(data, config, rows, 0);
        Ok(tree)
    }

    fn grow(&mut self, data: &Dataset, config: &TreeConfig, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let leaf = TreeNode::Leaf {
            value: Moments::of(data, &rows).mean(),
        };
        self.nodes.push(leaf);
        if config.max_depth.is_some_and(|d| depth >= d) {
            return id;
        }
        let Some(split) = best_split(data, &rows, config.min_leaf_weight) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| data.features()[r][split.feature] <= split.threshold);
        let left = self.grow(data, config, left_rows, depth + 1);
        let right = self.grow(data, config, right_rows, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    pub fn constant(dim: usize, value: f64) -> RegressionTree {
        RegressionTree {
            dim,
            nodes: vec![TreeNode::Leaf { value }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Leaf count; the size of the feature-space partition.
    pub fn model_complexity(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn depth_of(nodes: &[TreeNode], id: usize) -> usize {
            match nodes[id] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + depth_of(nodes, left).max(depth_of(nodes, right))
                }
            }
        }
        depth_of(&self.nodes, 0)
    }

    /// Weighted mean squared training error.
    pub fn training_mse(&self, data: &Dataset) -> f64 {
        let total: f64 = data.weights().iter().sum();
        let sse: f64 = (0..data.len())
            .map(|r| data.weights()[r] * (self.predict_unchecked(&data.features()[r]) - data.targets()[r]).powi(2))
            .sum();
        sse / total
    }

    /// Pre-order text form: a header, then `node,<feature>,<threshold>` or
    /// `leaf,<value>` per line. Floats use shortest round-trip notation.
    pub fn to_text(&self) -> String {
        let mut out = format!("{FORMAT_HEADER} dim={}\n", self.dim);
        self.write_node(0, &mut out);
        out
    }

    fn write_node(&self, id: usize, out: &mut String) {
        match self.nodes[id] {
            TreeNode::Leaf { value } => writeln!(out, "leaf,{value:?}").unwrap(),
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                writeln!(out, "node,{feature},{threshold:?}").unwrap();
                self.write_node(left, out);
                self.write_node(right, out);
            }
        }
    }

    pub fn from_text(text: &str) -> Result<RegressionTree> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty tree file".into(),
        })?;
        let dim = header
            .strip_prefix(FORMAT_HEADER)
            .and_then(|rest| rest.trim().strip_prefix("dim="))
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: format!("expected `{FORMAT_HEADER} dim=<n>`"),
            })?;
        let mut tree = RegressionTree {
            dim,
            nodes: Vec::new(),
        };
        let mut lines = lines.filter(|(_, l)| !l.trim().is_empty());
        tree.read_node(&mut lines)?;
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                reason: "trailing lines after the tree".into(),
            });
        }
        Ok(tree)
    }

    fn read_node<'a>(&mut self, lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<usize> {
        let (line, text) = lines.next().ok_or(Error::Parse {
            line: 0,
            reason: "truncated tree".into(),
        })?;
        let bad = |reason: &str| Error::Parse {
            line,
            reason: reason.to_owned(),
        };
        let fields: Vec<&str> = text.trim().split(',').collect();
        let id = self.nodes.len();
        match fields.as_slice() {
            ["leaf", value] => {
                let value = parse_f64(value).ok_or_else(|| bad("bad leaf value"))?;
                self.nodes.push(TreeNode::Leaf { value });
            }
            ["node", feature, threshold] => {
                let feature = feature.parse::<usize>().map_err(|_| bad("bad feature index"))?;
                if feature >= self.dim {
                    return Err(bad("feature index out of range"));
                }
                let threshold = parse_f64(threshold).ok_or_else(|| bad("bad threshold"))?;
                self.nodes.push(TreeNode::Leaf { value: 0.0 });
                let left = self.read_node(lines)?;
                let right = self.read_node(lines)?;
                self.nodes[id] = TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
            }
            _ => return Err(bad("expected `node,<feature>,<threshold>` or `leaf,<value>`")),
        }
        Ok(id)
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    f64::from_str(s).ok()
}
