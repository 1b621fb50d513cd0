use crate::efg::{Game, InfoSetKey, TreeSpec};

use super::RANKS;

/// Leduc Hold'em parameters. Two suits of J, Q, K; one private card each,
/// one board card dealt between the two betting rounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeducRules {
    pub ante: f64,
    pub bet_sizes: [f64; 2],
    /// Wagers allowed per round, counting the opening bet.
    pub max_raises: usize,
    pub suits: usize,
}

impl Default for LeducRules {
    fn default() -> Self {
        LeducRules {
            ante: 1.0,
            bet_sizes: [2.0, 4.0],
            max_raises: 2,
            suits: 2,
        }
    }
}

impl LeducRules {
    pub fn deck_size(&self) -> usize {
        RANKS.len() * self.suits
    }

    fn rank(&self, card: usize) -> usize {
        card / self.suits
    }

    /// Utility of player 1 at showdown for a pot where each side put in `stake`.
    pub fn showdown(&self, private: [usize; 2], board: usize, stake: f64) -> f64 {
        let ranks = [self.rank(private[0]), self.rank(private[1])];
        let board = self.rank(board);
        let paired = [ranks[0] == board, ranks[1] == board];
        if paired[0] && !paired[1] {
            stake
        } else if paired[1] && !paired[0] {
            -stake
        } else if ranks[0] > ranks[1] {
            stake
        } else if ranks[1] > ranks[0] {
            -stake
        } else {
            0.0
        }
    }
}

/// Builds the full Leduc tree.
///
/// The root deals both private cards (30 ordered outcomes); a second chance
/// node deals the board (4 outcomes). Keys are
/// `p{seat}:{rank}:{board rank or -}:{round 1}[/{round 2}]`; suits never
/// appear since they cannot affect a showdown.
pub fn build_leduc() -> Game {
    build_leduc_with(LeducRules::default())
}

pub(crate) fn build_leduc_with(rules: LeducRules) -> Game {
    let n = rules.deck_size();
    let deals_count = (n * (n - 1)) as f64;
    let mut deals = Vec::new();
    for c1 in 0..n {
        for c2 in 0..n {
            if c1 != c2 {
                let deal = Deal {
                    rules,
                    private: [c1, c2],
                    board: None,
                };
                let round = RoundState::opening(&rules, 0);
                deals.push((1.0 / deals_count, deal.betting(String::new(), round)));
            }
        }
    }
    Game::from_tree("leduc", TreeSpec::Chance(deals)).expect("leduc tree is valid")
}

#[derive(Clone, Copy)]
struct Deal {
    rules: LeducRules,
    private: [usize; 2],
    board: Option<usize>,
}

#[derive(Clone)]
struct RoundState {
    round: usize,
    actions: String,
    contributions: [f64; 2],
    raises: usize,
}

impl RoundState {
    fn opening(rules: &LeducRules, round: usize) -> Self {
        RoundState {
            round,
            actions: String::new(),
            contributions: [rules.ante; 2],
            raises: 0,
        }
    }
}

impl Deal {
    fn key(&self, player: usize, round1: &str, state: &RoundState) -> InfoSetKey {
        let rank = RANKS[self.rules.rank(self.private[player])];
        let board = self
            .board
            .map_or('-', |b| RANKS[self.rules.rank(b)]);
        let history = if state.round == 0 {
            state.actions.clone()
        } else {
            format!("{round1}/{}", state.actions)
        };
        InfoSetKey::new(format!("p{}:{rank}:{board}:{history}", player + 1))
    }

    /// Betting subtree; `round1` holds the completed first-round actions once
    /// the second round has started.
    fn betting(&self, round1: String, state: RoundState) -> TreeSpec {
        let player = state.actions.len() % 2;
        let facing = state.actions.ends_with('r');
        let mut labels = Vec::with_capacity(3);
        if facing {
            labels.push('f');
        }
        labels.push('c');
        if state.raises < self.rules.max_raises {
            labels.push('r');
        }
        let key = self.key(player, &round1, &state);
        let actions = labels
            .into_iter()
            .map(|a| (a.to_string(), self.after(player, a, facing, &round1, &state)))
            .collect();
        TreeSpec::Decision {
            player,
            key,
            actions,
        }
    }

    fn after(
        &self,
        player: usize,
        action: char,
        facing: bool,
        round1: &str,
        state: &RoundState,
    ) -> TreeSpec {
        let opponent = 1 - player;
        let mut next = state.clone();
        next.actions.push(action);
        match action {
            'f' => {
                let lost = state.contributions[player];
                let u1 = if player == 0 { -lost } else { lost };
                TreeSpec::Terminal([u1, -u1])
            }
            'c' => {
                next.contributions[player] = next.contributions[opponent];
                let closes = facing || !state.actions.is_empty();
                if !closes {
                    self.betting(round1.to_owned(), next)
                } else if state.round == 0 {
                    self.deal_board(next)
                } else {
                    let stake = next.contributions[0];
                    let board = self.board.expect("second round has a board");
                    let u1 = self.rules.showdown(self.private, board, stake);
                    TreeSpec::Terminal([u1, -u1])
                }
            }
            'r' => {
                next.contributions[player] =
                    next.contributions[opponent] + self.rules.bet_sizes[state.round];
                next.raises += 1;
                self.betting(round1.to_owned(), next)
            }
            _ => unreachable!(),
        }
    }

    fn deal_board(&self, finished: RoundState) -> TreeSpec {
        let n = self.rules.deck_size();
        let remaining: Vec<usize> = (0..n).filter(|c| !self.private.contains(c)).collect();
        let p = 1.0 / remaining.len() as f64;
        let outcomes = remaining
            .into_iter()
            .map(|board| {
                let deal = Deal {
                    board: Some(board),
                    ..*self
                };
                let state = RoundState {
                    round: 1,
                    actions: String::new(),
                    contributions: finished.contributions,
                    raises: 0,
                };
                (p, deal.betting(finished.actions.clone(), state))
            })
            .collect();
        TreeSpec::Chance(outcomes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::NodeKind;

    fn rank_card(rank: usize, suit: usize) -> usize {
        rank * 2 + suit
    }

    /// Follows action labels from a given private deal and board.
    fn play(game: &Game, private: [usize; 2], board: usize, actions: &[&str]) -> f64 {
        let root = game.node(game.root());
        let deal = private[0] * 5 + if private[1] > private[0] { private[1] - 1 } else { private[1] };
        let mut id = root.children[deal];
        let mut round2 = false;
        for &a in actions {
            if a == "/" {
                let node = game.node(id);
                assert!(matches!(node.kind, NodeKind::Chance { .. }));
                let remaining: Vec<usize> = (0..6).filter(|c| !private.contains(c)).collect();
                let idx = remaining.iter().position(|&c| c == board).unwrap();
                id = node.children[idx];
                round2 = true;
                continue;
            }
            let node = game.node(id);
            let NodeKind::Decision { infoset, .. } = node.kind else {
                panic!("expected a decision at {a}, round2={round2}");
            };
            let idx = game.infoset(infoset).actions.iter().position(|l| l == a).unwrap();
            id = node.children[idx];
        }
        match game.node(id).kind {
            NodeKind::Terminal { utilities } => utilities[0],
            ref k => panic!("not terminal: {k:?}"),
        }
    }

    #[test]
    fn traces() {
        let game = build_leduc();
        let (j, q, k) = (0, 1, 2);
        // P1=K, P2=J, board=Q; c r c / c c.
        let u = play(
            &game,
            [rank_card(k, 0), rank_card(j, 0)],
            rank_card(q, 1),
            &["c", "r", "c", "/", "c", "c"],
        );
        assert_eq!(u, 3.0);
        // P1 bets, P2 folds.
        let u = play(&game, [rank_card(j, 0), rank_card(k, 0)], 0, &["r", "f"]);
        assert_eq!(u, 1.0);
        // P1=J pairs the board against P2=K after r r c / r r c: 1 + 4 + 8.
        let u = play(
            &game,
            [rank_card(j, 0), rank_card(k, 0)],
            rank_card(j, 1),
            &["r", "r", "c", "/", "r", "r", "c"],
        );
        assert_eq!(u, 13.0);
        // Same rank splits.
        let u = play(
            &game,
            [rank_card(q, 0), rank_card(q, 1)],
            rank_card(k, 0),
            &["c", "c", "/", "c", "c"],
        );
        assert_eq!(u, 0.0);
    }

    #[test]
    fn utility_range_and_deals() {
        let game = build_leduc();
        assert_eq!(game.utility_range(), 26.0);
        let NodeKind::Chance { probs } = &game.node(game.root()).kind else {
            panic!()
        };
        assert_eq!(probs.len(), 30);
    }

    #[test]
    fn showdown_rules() {
        let rules = LeducRules::default();
        // Pair beats higher card.
        assert_eq!(rules.showdown([0, 4], 1, 5.0), 5.0);
        assert_eq!(rules.showdown([4, 2], 0, 5.0), 5.0);
        assert_eq!(rules.showdown([2, 4], 0, 5.0), -5.0);
        assert_eq!(rules.showdown([2, 3], 0, 5.0), 0.0);
    }
}
