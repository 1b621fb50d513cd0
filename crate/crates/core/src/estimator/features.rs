//! Features of (infoset, action) pairs for the bundled poker games.
//!
//! Layout, 19 entries:
//!
//! | index | feature |
//! |-------|---------|
//! | 0     | betting round (0 or 1) |
//! | 1     | pot size in chips before acting |
//! | 2     | wagers made so far this round |
//! | 3..6  | private rank one-hot (J, Q, K) |
//! | 6..10 | board rank one-hot (J, Q, K, none) |
//! | 10    | private card pairs the board |
//! | 11    | acting seat (0 for player 1, 1 for player 2) |
//! | 12..15| action one-hot (fold, check/call, bet/raise) |
//! | 15..19| opponent's last action this round (fold, call, raise, none) |
//!
//! The schema sees the current round only plus the pot, so different
//! first-round lines with equal pots share features in the second round.
//! [`Featurizer::tabular`] appends a code of the full action history, which
//! makes the map injective for exact memorization.

use super::FeatureVector;
use crate::efg::InfoSetKey;
use crate::error::{Error, Result};
use crate::games::{GameId, KuhnRules, LeducRules, RANKS};

pub const FEATURE_DIM: usize = 19;

struct Betting {
    ante: f64,
    bet_sizes: Vec<f64>,
    max_raises: usize,
    rounds: usize,
}

impl Betting {
    fn of(game: GameId) -> Betting {
        match game {
            GameId::Kuhn => {
                let r = KuhnRules::default();
                Betting {
                    ante: r.ante,
                    bet_sizes: vec![r.bet],
                    max_raises: 1,
                    rounds: 1,
                }
            }
            GameId::Leduc => {
                let r = LeducRules::default();
                Betting {
                    ante: r.ante,
                    bet_sizes: r.bet_sizes.to_vec(),
                    max_raises: r.max_raises,
                    rounds: 2,
                }
            }
        }
    }
}

/// An infoset key split into its fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedKey {
    pub seat: usize,
    pub rank: usize,
    pub board: Option<usize>,
    pub rounds: Vec<String>,
}

impl ParsedKey {
    pub fn parse(game: GameId, key: &InfoSetKey) -> Result<ParsedKey> {
        let bad = |reason: &str| Error::MalformedKey {
            key: key.to_string(),
            reason: reason.to_owned(),
        };
        let fields: Vec<&str> = key.as_str().split(':').collect();
        let [seat, rank, board, history] = fields[..] else {
            return Err(bad("expected four ':'-separated fields"));
        };
        let seat = match seat {
            "p1" => 0,
            "p2" => 1,
            _ => return Err(bad("seat must be p1 or p2")),
        };
        let rank_of = |s: &str| {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => RANKS.iter().position(|&r| r == c),
                _ => None,
            }
        };
        let rank = rank_of(rank).ok_or_else(|| bad("unknown private rank"))?;
        let board = match board {
            "-" => None,
            b => Some(rank_of(b).ok_or_else(|| bad("unknown board rank"))?),
        };
        let rounds: Vec<String> = history.split('/').map(str::to_owned).collect();
        let betting = Betting::of(game);
        if rounds.len() > betting.rounds {
            return Err(bad("too many betting rounds"));
        }
        if (rounds.len() == 2) != board.is_some() {
            return Err(bad("board must be present exactly in the second round"));
        }
        if rounds.iter().flat_map(|r| r.chars()).any(|c| !matches!(c, 'c' | 'r')) {
            return Err(bad("history may contain only c and r before a decision"));
        }
        let current = rounds.last().expect("split yields at least one item");
        if current.len() % 2 != seat {
            return Err(bad("seat does not match the acting player"));
        }
        if rounds.iter().any(|r| r.matches('r').count() > betting.max_raises) {
            return Err(bad("too many wagers in a round"));
        }
        Ok(ParsedKey {
            seat,
            rank,
            board,
            rounds,
        })
    }

    fn current(&self) -> &str {
        self.rounds.last().unwrap()
    }

    fn raises(&self) -> usize {
        self.current().matches('r').count()
    }

    fn legal_actions(&self, max_raises: usize) -> Vec<char> {
        let mut labels = Vec::with_capacity(3);
        let facing = self.current().ends_with('r');
        if facing {
            labels.push('f');
        }
        labels.push('c');
        if self.raises() < max_raises {
            labels.push('r');
        }
        labels
    }
}

/// Maps (infoset, action index) pairs of one game to feature vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Featurizer {
    game: GameId,
    disambiguate: bool,
}

impl Featurizer {
    pub fn new(game: GameId) -> Self {
        Featurizer {
            game,
            disambiguate: false,
        }
    }

    /// Schema with an extra history-code feature; no two infoset-actions collide.
    pub fn tabular(game: GameId) -> Self {
        Featurizer {
            game,
            disambiguate: true,
        }
    }

    pub fn game(&self) -> GameId {
        self.game
    }

    pub fn dim(&self) -> usize {
        FEATURE_DIM + usize::from(self.disambiguate)
    }

    pub fn featurize(&self, key: &InfoSetKey, action: usize) -> Result<FeatureVector> {
        let parsed = ParsedKey::parse(self.game, key)?;
        let betting = Betting::of(self.game);
        let legal = parsed.legal_actions(betting.max_raises);
        let label = *legal.get(action).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "action {action} out of range for {key} ({} actions)",
                legal.len()
            ))
        })?;

        let mut contributions = [betting.ante; 2];
        for (round, actions) in parsed.rounds.iter().enumerate() {
            for (i, a) in actions.chars().enumerate() {
                let (p, o) = (i % 2, 1 - i % 2);
                contributions[p] = match a {
                    'r' => contributions[o] + betting.bet_sizes[round],
                    _ => contributions[o],
                };
            }
        }

        let mut phi = vec![0.0; self.dim()];
        phi[0] = (parsed.rounds.len() - 1) as f64;
        phi[1] = contributions[0] + contributions[1];
        phi[2] = parsed.raises() as f64;
        phi[3 + parsed.rank] = 1.0;
        phi[6 + parsed.board.unwrap_or(3)] = 1.0;
        phi[10] = f64::from(u8::from(parsed.board == Some(parsed.rank)));
        phi[11] = parsed.seat as f64;
        phi[12 + action_slot(label)] = 1.0;
        let last_opponent = parsed.current().chars().last().map_or(3, action_slot);
        phi[15 + last_opponent] = 1.0;
        if self.disambiguate {
            phi[FEATURE_DIM] = history_code(&parsed.rounds);
        }
        Ok(phi)
    }
}

/// Convenience wrapper for the coarse schema.
pub fn featurize(game: GameId, key: &InfoSetKey, action: usize) -> Result<FeatureVector> {
    Featurizer::new(game).featurize(key, action)
}

fn action_slot(label: char) -> usize {
    match label {
        'f' => 0,
        'c' => 1,
        _ => 2,
    }
}

/// Base-4 digits c=1, r=2, separator=3, read as an integer. Exact in f64
/// for every history of the bundled games.
fn history_code(rounds: &[String]) -> f64 {
    let mut code: u64 = 0;
    for (i, round) in rounds.iter().enumerate() {
        if i > 0 {
            code = code * 4 + 3;
        }
        for c in round.chars() {
            code = code * 4 + if c == 'c' { 1 } else { 2 };
        }
    }
    code as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: &str) -> InfoSetKey {
        InfoSetKey::from(s)
    }

    #[test]
    fn opening_infoset() {
        let phi = featurize(GameId::Leduc, &key("p1:K:-:"), 1).unwrap();
        assert_eq!(phi.len(), FEATURE_DIM);
        assert_eq!(phi[0], 0.0);
        assert_eq!(phi[1], 2.0);
        assert_eq!(&phi[6..10], &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(&phi[12..15], &[0.0, 0.0, 1.0]);
        assert_eq!(&phi[15..19], &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn second_round_pot_and_pair() {
        // c r c leaves 3 + 3 in the pot; in round two P2 bets 4 after a check.
        let phi = featurize(GameId::Leduc, &key("p1:Q:Q:crc/cr"), 0).unwrap();
        assert_eq!(phi[0], 1.0);
        assert_eq!(phi[1], 3.0 + 3.0 + 4.0);
        assert_eq!(phi[2], 1.0);
        assert_eq!(phi[10], 1.0);
        assert_eq!(phi[11], 0.0);
        assert_eq!(&phi[12..15], &[1.0, 0.0, 0.0]);
        assert_eq!(&phi[15..19], &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn aliased_histories_share_features_unless_tabular() {
        let a = key("p1:J:K:rc/");
        let b = key("p1:J:K:crc/");
        assert_eq!(featurize(GameId::Leduc, &a, 1).unwrap(), featurize(GameId::Leduc, &b, 1).unwrap());
        let tab = Featurizer::tabular(GameId::Leduc);
        assert_ne!(tab.featurize(&a, 1).unwrap(), tab.featurize(&b, 1).unwrap());
    }

    #[test]
    fn deterministic() {
        let k = key("p2:K:J:rrc/r");
        assert_eq!(featurize(GameId::Leduc, &k, 1).unwrap(), featurize(GameId::Leduc, &k, 1).unwrap());
    }

    #[test]
    fn malformed_keys() {
        for bad in [
            "p3:K:-:",
            "p1:X:-:",
            "p1:K:-:c",
            "p1:K:Q:cc",
            "p1:K:-:cc/",
            "p2:K:-:f",
            "p1:K:-:rrr",
            "nonsense",
        ] {
            assert!(
                matches!(featurize(GameId::Leduc, &key(bad), 0), Err(Error::MalformedKey { .. })),
                "{bad} should be rejected"
            );
        }
        assert!(featurize(GameId::Kuhn, &key("p1:K:Q:c/"), 0).is_err());
        assert!(featurize(GameId::Leduc, &key("p1:K:-:"), 1).is_ok());
        assert!(featurize(GameId::Leduc, &key("p1:K:-:"), 2).is_err());
        assert!(featurize(GameId::Leduc, &key("p2:K:-:r"), 2).is_ok());
    }

    #[test]
    fn kuhn_infosets() {
        let phi = featurize(GameId::Kuhn, &key("p1:J:-:cr"), 1).unwrap();
        assert_eq!(phi[1], 3.0);
        assert_eq!(&phi[12..15], &[0.0, 1.0, 0.0]);
        // Kuhn allows one wager, so facing a bet there is no raise.
        assert!(featurize(GameId::Kuhn, &key("p2:Q:-:r"), 2).is_err());
    }
}
