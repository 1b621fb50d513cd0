use crate::efg::{Game, InfoSetKey, TreeSpec};

use super::RANKS;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KuhnRules {
    pub ante: f64,
    pub bet: f64,
}

impl Default for KuhnRules {
    fn default() -> Self {
        KuhnRules { ante: 1.0, bet: 1.0 }
    }
}

/// Kuhn poker: three cards, one each, a single check/bet round.
///
/// Keys are `p{seat}:{card}:-:{actions}` with `c` for check/call, `r` for
/// bet and `f` for fold.
pub fn build_kuhn() -> Game {
    let rules = KuhnRules::default();
    let mut deals = Vec::with_capacity(6);
    for c1 in 0..3 {
        for c2 in 0..3 {
            if c1 != c2 {
                deals.push((1.0 / 6.0, betting(&rules, [c1, c2], String::new())));
            }
        }
    }
    Game::from_tree("kuhn", TreeSpec::Chance(deals)).expect("kuhn tree is valid")
}

fn betting(rules: &KuhnRules, cards: [usize; 2], history: String) -> TreeSpec {
    let showdown = |stake: f64| {
        let u = if cards[0] > cards[1] { stake } else { -stake };
        TreeSpec::Terminal([u, -u])
    };
    match history.as_str() {
        "cc" => return showdown(rules.ante),
        "rc" | "crc" => return showdown(rules.ante + rules.bet),
        "rf" => return TreeSpec::Terminal([rules.ante, -rules.ante]),
        "crf" => return TreeSpec::Terminal([-rules.ante, rules.ante]),
        _ => {}
    }
    let player = history.len() % 2;
    let labels: &[char] = if history.ends_with('r') { &['f', 'c'] } else { &['c', 'r'] };
    let key = InfoSetKey::new(format!("p{}:{}:-:{}", player + 1, RANKS[cards[player]], history));
    let actions = labels
        .iter()
        .map(|&a| {
            let mut next = history.clone();
            next.push(a);
            (a.to_string(), betting(rules, cards, next))
        })
        .collect();
    TreeSpec::Decision { player, key, actions }
}
