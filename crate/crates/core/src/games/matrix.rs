use crate::error::{Error, Result};

/// Zero-sum normal-form game; `payoffs[a][b]` is the row player's utility.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGame {
    name: String,
    payoffs: Vec<Vec<f64>>,
}

impl MatrixGame {
    pub fn new(name: impl Into<String>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let cols = payoffs.first().map_or(0, Vec::len);
        if cols == 0 {
            return Err(Error::InvalidArgument("empty payoff matrix".into()));
        }
        if payoffs.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidArgument("ragged payoff matrix".into()));
        }
        if payoffs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite payoff".into()));
        }
        Ok(MatrixGame {
            name: name.into(),
            payoffs,
        })
    }

    pub fn rps() -> Self {
        let payoffs = vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ];
        Self::new("rps", payoffs).unwrap()
    }

    /// Matching pennies with an asymmetric payoff for the (tails, tails) cell.
    pub fn biased_mp() -> Self {
        Self::new("biased_mp", vec![vec![1.0, -1.0], vec![-1.0, 2.0]]).unwrap()
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "rps" => Ok(Self::rps()),
            "biased_mp" => Ok(Self::biased_mp()),
            other => Err(Error::InvalidArgument(format!("unknown matrix game {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_actions(&self) -> [usize; 2] {
        [self.payoffs.len(), self.payoffs[0].len()]
    }

    pub fn payoff(&self, row: usize, col: usize) -> f64 {
        self.payoffs[row][col]
    }

    /// Max minus min entry.
    pub fn utility_range(&self) -> f64 {
        let entries = self.payoffs.iter().flatten();
        let max = entries.clone().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = entries.copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Per-action utilities for `player` when the other plays `opponent`.
    pub fn action_values(&self, player: usize, opponent: &[f64]) -> Vec<f64> {
        let [rows, cols] = self.num_actions();
        match player {
            0 => (0..rows)
                .map(|a| (0..cols).map(|b| self.payoffs[a][b] * opponent[b]).sum())
                .collect(),
            _ => (0..cols)
                .map(|b| (0..rows).map(|a| -self.payoffs[a][b] * opponent[a]).sum())
                .collect(),
        }
    }
}
