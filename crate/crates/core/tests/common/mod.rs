//! Independent reference implementations used as test oracles. Nothing here
//! touches the crate's game tree: Kuhn poker is re-modelled from its rules
//! with string histories, and Leduc infosets are enumerated from the betting
//! grammar directly.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Policy = BTreeMap<String, Vec<f64>>;

const KUHN_CARDS: [char; 3] = ['J', 'Q', 'K'];

/// Kuhn decision points by history, with their legal actions.
pub fn kuhn_actions(history: &str) -> Option<[char; 2]> {
    match history {
        "" | "c" => Some(['c', 'r']),
        "r" | "cr" => Some(['f', 'c']),
        _ => None,
    }
}

/// Player-1 payoff at a terminal history.
pub fn kuhn_payoff(history: &str, cards: [usize; 2]) -> f64 {
    let showdown = |stake: f64| if cards[0] > cards[1] { stake } else { -stake };
    match history {
        "cc" => showdown(1.0),
        "rf" => 1.0,
        "crf" => -1.0,
        "rc" | "crc" => showdown(2.0),
        h => panic!("not terminal: {h}"),
    }
}

pub fn kuhn_key(history: &str, cards: [usize; 2]) -> String {
    let seat = history.len() % 2;
    format!("p{}:{}:-:{}", seat + 1, KUHN_CARDS[cards[seat]], history)
}

/// All 12 keys, player 1's first.
pub fn kuhn_keys() -> Vec<String> {
    let mut keys = Vec::new();
    for hist in ["", "c", "r", "cr"] {
        for card in KUHN_CARDS {
            keys.push(format!("p{}:{card}:-:{hist}", hist.len() % 2 + 1));
        }
    }
    keys.sort_by_key(|k| (k[1..2].to_owned(), k.clone()));
    keys
}

fn kuhn_deals() -> Vec<[usize; 2]> {
    let mut deals = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                deals.push([a, b]);
            }
        }
    }
    deals
}

/// Player-1 expected value of a Kuhn profile.
pub fn kuhn_ev(policy: &Policy) -> f64 {
    fn walk(policy: &Policy, history: &str, cards: [usize; 2]) -> f64 {
        let Some(actions) = kuhn_actions(history) else {
            return kuhn_payoff(history, cards);
        };
        let probs = &policy[&kuhn_key(history, cards)];
        actions
            .iter()
            .zip(probs)
            .map(|(a, p)| p * walk(policy, &format!("{history}{a}"), cards))
            .sum()
    }
    kuhn_deals().iter().map(|&d| walk(policy, "", d)).sum::<f64>() / 6.0
}

/// Best-response value for `seat` by trying all 64 pure strategies.
pub fn kuhn_best_response_brute(policy: &Policy, seat: usize) -> f64 {
    let mine: Vec<String> = kuhn_keys()
        .into_iter()
        .filter(|k| k.starts_with(if seat == 0 { "p1" } else { "p2" }))
        .collect();
    assert_eq!(mine.len(), 6);
    let mut best = f64::NEG_INFINITY;
    for mask in 0..(1u32 << mine.len()) {
        let mut trial = policy.clone();
        for (i, k) in mine.iter().enumerate() {
            let pick = ((mask >> i) & 1) as usize;
            let mut row = vec![0.0, 0.0];
            row[pick] = 1.0;
            trial.insert(k.clone(), row);
        }
        let ev = kuhn_ev(&trial);
        best = best.max(if seat == 0 { ev } else { -ev });
    }
    best
}

pub fn kuhn_exploitability_brute(policy: &Policy) -> f64 {
    kuhn_best_response_brute(policy, 0) + kuhn_best_response_brute(policy, 1)
}

pub fn kuhn_uniform() -> Policy {
    kuhn_keys().into_iter().map(|k| (k, vec![0.5, 0.5])).collect()
}

pub fn kuhn_random_policy(rng: &mut ChaCha8Rng) -> Policy {
    kuhn_keys()
        .into_iter()
        .map(|k| {
            let p: f64 = rng.random();
            (k, vec![p, 1.0 - p])
        })
        .collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Straightforward recursive vanilla CFR on the string model of Kuhn, with
/// simultaneous updates and unfloored regrets.
pub struct KuhnCfr {
    pub regrets: Policy,
    pub strategy_sum: Policy,
}

impl KuhnCfr {
    pub fn new() -> Self {
        let zeros: Policy = kuhn_keys().into_iter().map(|k| (k, vec![0.0, 0.0])).collect();
        KuhnCfr {
            regrets: zeros.clone(),
            strategy_sum: zeros,
        }
    }

    pub fn current(&self) -> Policy {
        self.regrets
            .iter()
            .map(|(k, r)| {
                let pos = [r[0].max(0.0), r[1].max(0.0)];
                let s = pos[0] + pos[1];
                let row = if s > 0.0 { vec![pos[0] / s, pos[1] / s] } else { vec![0.5, 0.5] };
                (k.clone(), row)
            })
            .collect()
    }

    pub fn average(&self) -> Policy {
        self.strategy_sum
            .iter()
            .map(|(k, s)| {
                let t = s[0] + s[1];
                let row = if t > 0.0 { vec![s[0] / t, s[1] / t] } else { vec![0.5, 0.5] };
                (k.clone(), row)
            })
            .collect()
    }

    pub fn iterate(&mut self) {
        let sigma = self.current();
        let mut d_regret: Policy = self.regrets.keys().map(|k| (k.clone(), vec![0.0, 0.0])).collect();
        for cards in kuhn_deals() {
            self.walk(&sigma, &mut d_regret, "", cards, [1.0, 1.0], 1.0 / 6.0);
        }
        for (k, d) in d_regret {
            let r = self.regrets.get_mut(&k).unwrap();
            r[0] += d[0];
            r[1] += d[1];
        }
    }

    /// Returns player-1 utility of the subtree.
    fn walk(&mut self, sigma: &Policy, d: &mut Policy, h: &str, cards: [usize; 2], reach: [f64; 2], chance: f64) -> f64 {
        let Some(actions) = kuhn_actions(h) else {
            return kuhn_payoff(h, cards);
        };
        let p = h.len() % 2;
        let key = kuhn_key(h, cards);
        let s = sigma[&key].clone();
        let mut values = [0.0; 2];
        for (i, a) in actions.iter().enumerate() {
            let mut r = reach;
            r[p] *= s[i];
            values[i] = self.walk(sigma, d, &format!("{h}{a}"), cards, r, chance);
        }
        let v = s[0] * values[0] + s[1] * values[1];
        let sign = if p == 0 { 1.0 } else { -1.0 };
        let cf = reach[1 - p] * chance;
        let row = d.get_mut(&key).unwrap();
        let sums = self.strategy_sum.get_mut(&key).unwrap();
        for i in 0..2 {
            row[i] += cf * sign * (values[i] - v);
            sums[i] += reach[p] * chance * s[i];
        }
        v
    }
}

/// Every Leduc infoset key, generated from the betting grammar: in each
/// round the legal continuations after a history are c and r (while fewer
/// than two wagers), plus f when facing a wager; c after a wager or after a
/// check closes the round.
pub fn leduc_keys() -> BTreeSet<String> {
    fn round_prefixes() -> (Vec<String>, Vec<String>) {
        // (decision prefixes, histories that close the round without a fold)
        let mut decisions = Vec::new();
        let mut closed = Vec::new();
        let mut frontier = vec![String::new()];
        while let Some(h) = frontier.pop() {
            decisions.push(h.clone());
            let facing = h.ends_with('r');
            let raises = h.matches('r').count();
            let call = format!("{h}c");
            if facing || !h.is_empty() {
                closed.push(call);
            } else {
                frontier.push(call);
            }
            if raises < 2 {
                frontier.push(format!("{h}r"));
            }
        }
        (decisions, closed)
    }
    let (decisions, closed) = round_prefixes();
    let mut keys = BTreeSet::new();
    for card in KUHN_CARDS {
        for h in &decisions {
            keys.insert(format!("p{}:{card}:-:{h}", h.len() % 2 + 1));
        }
        for board in KUHN_CARDS {
            for r1 in &closed {
                for h in &decisions {
                    keys.insert(format!("p{}:{card}:{board}:{r1}/{h}", h.len() % 2 + 1));
                }
            }
        }
    }
    keys
}

/// Converts an oracle policy to the crate's profile type.
pub fn to_profile(policy: &Policy) -> fregret::StrategyProfile {
    let mut profile = fregret::StrategyProfile::new();
    for (k, v) in policy {
        let seat = if k.starts_with("p1") { 0 } else { 1 };
        profile.insert(seat, fregret::InfoSetKey::new(k.as_str()), v.clone());
    }
    profile
}

pub fn from_profile(profile: &fregret::StrategyProfile) -> Policy {
    profile.iter().map(|(_, k, v)| (k.to_string(), v.to_vec())).collect()
}
