//! Bundled games: Kuhn poker, Leduc Hold'em and small matrix games.

mod kuhn;
mod leduc;
mod matrix;

use std::fmt;
use std::str::FromStr;

pub use kuhn::{build_kuhn, KuhnRules};
pub use leduc::{build_leduc, LeducRules};
pub use matrix::MatrixGame;

use crate::efg::Game;
use crate::error::{Error, Result};

/// Rank characters shared by both poker games, lowest first.
pub const RANKS: [char; 3] = ['J', 'Q', 'K'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameId {
    Kuhn,
    Leduc,
}

impl GameId {
    pub fn as_str(self) -> &'static str {
        match self {
            GameId::Kuhn => "kuhn",
            GameId::Leduc => "leduc",
        }
    }

    pub fn build(self) -> Game {
        match self {
            GameId::Kuhn => build_kuhn(),
            GameId::Leduc => build_leduc(),
        }
    }

    /// Identifies a bundled game by its name.
    pub fn of(game: &Game) -> Result<GameId> {
        game.name().parse()
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kuhn" => Ok(GameId::Kuhn),
            "leduc" => Ok(GameId::Leduc),
            other => Err(Error::InvalidArgument(format!("unknown game {other:?}"))),
        }
    }
}
