//! Best response, exploitability and head-to-head evaluation.
//!
//! Exploitability is the SUM of both players' best-response values, which
//! is zero exactly at an equilibrium of a zero-sum game. Halve it to compare
//! with per-player conventions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::efg::{Game, NodeKind, StrategyProfile, NUM_PLAYERS};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponseResult {
    /// Responder's expected utility in chips.
    pub value: f64,
    /// Pure strategy over the responder's infosets; uniform where the
    /// opponent never reaches.
    pub response: StrategyProfile,
}

pub fn best_response(
    game: &Game,
    opponent: &StrategyProfile,
    responder: usize,
) -> Result<BestResponseResult> {
    if responder >= NUM_PLAYERS {
        return Err(Error::InvalidArgument(format!("responder {responder}")));
    }
    // Only the opponent's half has to be present.
    let mut policy = Vec::with_capacity(game.infosets().len());
    for info in game.infosets() {
        if info.player == responder {
            policy.push(Vec::new());
            continue;
        }
        let probs = opponent
            .get(info.player, &info.key)
            .ok_or_else(|| Error::MissingInfoSet(info.key.to_string()))?;
        if probs.len() != info.num_actions() {
            return Err(Error::LengthMismatch {
                expected: info.num_actions(),
                actual: probs.len(),
            });
        }
        policy.push(probs.to_vec());
    }
    let (value, response) = best_response_dense(game, &policy, responder);
    Ok(BestResponseResult {
        value,
        response: StrategyProfile::from_dense(game, &response),
    })
}

/// Dense best response. Rows of `policy` for the responder are ignored.
/// Returns the value and a table filled only at responder infosets.
pub fn best_response_dense(game: &Game, policy: &[Vec<f64>], responder: usize) -> (f64, Vec<Vec<f64>>) {
    let nodes = game.nodes();

    // Opponent-times-chance reach of every node, in one forward sweep.
    // Children always have larger ids than their parent.
    let mut opp_reach = vec![0.0; nodes.len()];
    opp_reach[game.root()] = 1.0;
    for (id, node) in nodes.iter().enumerate() {
        let here = opp_reach[id];
        match &node.kind {
            NodeKind::Terminal { .. } => {}
            NodeKind::Chance { probs } => {
                for (&c, &p) in node.children.iter().zip(probs) {
                    opp_reach[c] = here * p;
                }
            }
            &NodeKind::Decision { player, infoset } => {
                for (a, &c) in node.children.iter().enumerate() {
                    opp_reach[c] = if player == responder {
                        here
                    } else {
                        here * policy[infoset][a]
                    };
                }
            }
        }
    }

    // Deeper own decisions first: under perfect recall every responder
    // infoset below another has a larger own depth.
    let mut order: Vec<usize> = (0..game.infosets().len())
        .filter(|&i| game.infoset(i).player == responder)
        .collect();
    order.sort_by_key(|&i| std::cmp::Reverse(game.infoset(i).own_depth));

    let mut response: Vec<Vec<f64>> = vec![Vec::new(); game.infosets().len()];
    let mut memo: Vec<Option<f64>> = vec![None; nodes.len()];
    for infoset in order {
        let n = game.infoset(infoset).num_actions();
        let mut action_values = vec![0.0; n];
        let mut mass = 0.0;
        for &h in game.infoset_nodes(infoset) {
            mass += opp_reach[h];
            for (a, &c) in nodes[h].children.iter().enumerate() {
                action_values[a] += opp_reach[h] * subtree(game, policy, &response, responder, &mut memo, c);
            }
        }
        let row = if mass > 0.0 {
            let mut best = 0;
            for a in 1..n {
                if action_values[a] > action_values[best] {
                    best = a;
                }
            }
            let mut row = vec![0.0; n];
            row[best] = 1.0;
            row
        } else {
            vec![1.0 / n as f64; n]
        };
        response[infoset] = row;
    }
    let value = subtree(game, policy, &response, responder, &mut memo, game.root());
    (value, response)
}

/// Responder's expected utility below `id`, chance and opponent weighted
/// from `id` down. Responder infosets below must already be decided.
fn subtree(
    game: &Game,
    policy: &[Vec<f64>],
    response: &[Vec<f64>],
    responder: usize,
    memo: &mut [Option<f64>],
    id: usize,
) -> f64 {
    if let Some(v) = memo[id] {
        return v;
    }
    let node = game.node(id);
    let v = match &node.kind {
        NodeKind::Terminal { utilities } => utilities[responder],
        NodeKind::Chance { probs } => node
            .children
            .iter()
            .zip(probs)
            .map(|(&c, &p)| p * subtree(game, policy, response, responder, memo, c))
            .sum(),
        &NodeKind::Decision { player, infoset } => {
            let probs = if player == responder {
                &response[infoset]
            } else {
                &policy[infoset]
            };
            debug_assert!(!probs.is_empty(), "responder infoset evaluated before it was decided");
            node.children
                .iter()
                .zip(probs)
                .map(|(&c, &p)| p * subtree(game, policy, response, responder, memo, c))
                .sum()
        }
    };
    memo[id] = Some(v);
    v
}

/// Sum of both best-response values.
pub fn exploitability(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    let policy = profile.to_dense(game)?;
    Ok(exploitability_dense(game, &policy))
}

pub fn exploitability_dense(game: &Game, policy: &[Vec<f64>]) -> f64 {
    (0..NUM_PLAYERS)
        .map(|p| best_response_dense(game, policy, p).0)
        .sum()
}

/// Expected chips per hand for `a` against `b`, averaged over both seats.
pub fn exact_ev(game: &Game, a: &StrategyProfile, b: &StrategyProfile) -> Result<f64> {
    let (a, b) = (a.to_dense(game)?, b.to_dense(game)?);
    Ok(exact_ev_dense(game, &a, &b))
}

pub fn exact_ev_dense(game: &Game, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let a_first = crate::efg::expected_value_dense(game, &seat_mix(game, a, b))[0];
    let a_second = crate::efg::expected_value_dense(game, &seat_mix(game, b, a))[1];
    0.5 * (a_first + a_second)
}

/// Player 1 rows from `first`, player 2 rows from `second`.
fn seat_mix(game: &Game, first: &[Vec<f64>], second: &[Vec<f64>]) -> Vec<Vec<f64>> {
    game.infosets()
        .iter()
        .enumerate()
        .map(|(i, info)| if info.player == 0 { first[i].clone() } else { second[i].clone() })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchResult {
    /// Sampled units: one deal in both seats (duplicate) or two independent
    /// deals with swapped seats (plain).
    pub hands: u64,
    /// Chips per hand for `a`.
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
    pub duplicate: bool,
}

pub const MATCH_CSV_HEADER: &str = "hands,mean,stderr,seed,duplicate";

/// Monte-Carlo match between `a` and `b`.
///
/// Every unit plays `a` once in each seat and scores the average of the two
/// hands. With `duplicate`, both hands see the same chance outcomes; without
/// it they are dealt independently. Actions come from a separate stream, so
/// the two modes share their deal-seed sequence for a given seed.
pub fn sampled_match(
    game: &Game,
    a: &StrategyProfile,
    b: &StrategyProfile,
    hands: u64,
    seed: u64,
    duplicate: bool,
) -> Result<MatchResult> {
    if hands == 0 {
        return Err(Error::InvalidArgument("hands must be at least 1".into()));
    }
    let (a, b) = (a.to_dense(game)?, b.to_dense(game)?);
    let mut deal_seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut actions = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let first_seat = seat_mix(game, &a, &b);
    let second_seat = seat_mix(game, &b, &a);

    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..hands {
        let s1 = deal_seeds.random::<u64>();
        let s2 = if duplicate { s1 } else { deal_seeds.random::<u64>() };
        let u_first = play_hand(game, &first_seat, &mut ChaCha8Rng::seed_from_u64(s1), &mut actions)[0];
        let u_second = play_hand(game, &second_seat, &mut ChaCha8Rng::seed_from_u64(s2), &mut actions)[1];
        let x = 0.5 * (u_first + u_second);
        // Welford's running variance.
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let stderr = if hands > 1 {
        (m2 / (hands - 1) as f64 / hands as f64).sqrt()
    } else {
        0.0
    };
    Ok(MatchResult {
        hands,
        mean,
        stderr,
        seed,
        duplicate,
    })
}

fn play_hand(game: &Game, policy: &[Vec<f64>], chance: &mut ChaCha8Rng, actions: &mut ChaCha8Rng) -> [f64; NUM_PLAYERS] {
    let mut id = game.root();
    loop {
        let node = game.node(id);
        let pick = match &node.kind {
            NodeKind::Terminal { utilities } => return *utilities,
            NodeKind::Chance { probs } => sample(probs, chance),
            NodeKind::Decision { infoset, .. } => sample(&policy[*infoset], actions),
        };
        id = node.children[pick];
    }
}

fn sample(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` short of 1; take the last action with mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::{expected_value, TreeSpec};
    use crate::games::build_kuhn;

    /// Player 1 picks a row, player 2 picks a column without seeing it.
    fn matching_game() -> Game {
        let reply = |pay: [f64; 2]| TreeSpec::Decision {
            player: 1,
            key: "col".into(),
            actions: vec![
                ("l".into(), TreeSpec::Terminal([pay[0], -pay[0]])),
                ("r".into(), TreeSpec::Terminal([pay[1], -pay[1]])),
            ],
        };
        let spec = TreeSpec::Decision {
            player: 0,
            key: "row".into(),
            actions: vec![("u".into(), reply([3.0, -1.0])), ("d".into(), reply([0.0, 1.0]))],
        };
        Game::from_tree("m", spec).unwrap()
    }

    #[test]
    fn counters_a_pure_strategy() {
        let game = matching_game();
        let mut p = StrategyProfile::new();
        p.insert(0, "row".into(), vec![1.0, 0.0]);
        let br = best_response(&game, &p, 1).unwrap();
        assert_eq!(br.value, 1.0);
        assert_eq!(br.response.get(1, &"col".into()).unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn missing_opponent_infoset() {
        let game = matching_game();
        assert!(matches!(
            best_response(&game, &StrategyProfile::new(), 1),
            Err(Error::MissingInfoSet(k)) if k == "row"
        ));
    }

    #[test]
    fn mixed_opponent() {
        let game = matching_game();
        let mut p = StrategyProfile::new();
        p.insert(1, "col".into(), vec![0.25, 0.75]);
        // u: 0, d: 0.75.
        let br = best_response(&game, &p, 0).unwrap();
        assert_eq!(br.response.get(0, &"row".into()).unwrap(), &[0.0, 1.0]);
        assert_eq!(br.value, 0.75);
    }

    #[test]
    fn ties_pick_lowest_index() {
        let spec = TreeSpec::Decision {
            player: 0,
            key: "row".into(),
            actions: (0..3).map(|a| (a.to_string(), TreeSpec::Terminal([2.0, -2.0]))).collect(),
        };
        let game = Game::from_tree("tie", spec).unwrap();
        let br = best_response(&game, &StrategyProfile::new(), 0).unwrap();
        assert_eq!(br.response.get(0, &"row".into()).unwrap(), &[1.0, 0.0, 0.0]);
        assert_eq!(br.value, 2.0);
    }

    #[test]
    fn best_response_value_is_achieved() {
        let game = build_kuhn();
        let uniform = StrategyProfile::uniform(&game);
        for responder in 0..2 {
            let br = best_response(&game, &uniform, responder).unwrap();
            let combined = if responder == 0 {
                StrategyProfile::combine(&br.response, &uniform)
            } else {
                StrategyProfile::combine(&uniform, &br.response)
            };
            let v = expected_value(&game, &combined).unwrap()[responder];
            assert!((v - br.value).abs() < 1e-12);
            assert!(br.value >= 0.0);
        }
    }

    #[test]
    fn exact_ev_symmetry() {
        let game = build_kuhn();
        let uniform = StrategyProfile::uniform(&game);
        assert_eq!(exact_ev(&game, &uniform, &uniform).unwrap(), 0.0);
    }

    #[test]
    fn sampled_match_reproducible() {
        let game = build_kuhn();
        let uniform = StrategyProfile::uniform(&game);
        let a = sampled_match(&game, &uniform, &uniform, 500, 3, true).unwrap();
        let b = sampled_match(&game, &uniform, &uniform, 500, 3, true).unwrap();
        assert_eq!(a, b);
        assert!(sampled_match(&game, &uniform, &uniform, 0, 3, true).is_err());
        let one = sampled_match(&game, &uniform, &uniform, 1, 3, false).unwrap();
        assert_eq!(one.stderr, 0.0);
    }

    #[test]
    fn duplicate_self_play_of_pure_strategy_is_zero() {
        let game = build_kuhn();
        let uniform = StrategyProfile::uniform(&game);
        let pure = best_response(&game, &uniform, 0).unwrap().response;
        let other = best_response(&game, &uniform, 1).unwrap().response;
        let pure = StrategyProfile::combine(&pure, &other);
        let r = sampled_match(&game, &pure, &pure, 1000, 11, true).unwrap();
        assert_eq!(r.mean, 0.0);
        assert_eq!(r.stderr, 0.0);
    }
}
