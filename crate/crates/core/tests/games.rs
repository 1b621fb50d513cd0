mod common;

use std::collections::BTreeSet;

use fregret::efg::{expected_value, NodeKind, TreeSpec};
use fregret::{build_kuhn, build_leduc, Error, Game, GameId, StrategyProfile};

fn keys(game: &Game) -> BTreeSet<String> {
    game.infosets().iter().map(|i| i.key.to_string()).collect()
}

#[test]
fn kuhn_infosets_match_rules() {
    let game = build_kuhn();
    let expected: BTreeSet<String> = common::kuhn_keys().into_iter().collect();
    assert_eq!(keys(&game), expected);
    assert_eq!(game.infosets().len(), 12);
    assert_eq!(game.utility_range(), 4.0);
}

#[test]
fn leduc_infosets_match_betting_grammar() {
    let game = build_leduc();
    let expected = common::leduc_keys();
    assert_eq!(expected.len(), 288);
    assert_eq!(keys(&game), expected);
    assert_eq!(game.utility_range(), 26.0);
}

#[test]
fn infoset_actions_follow_betting_state() {
    let game = build_leduc();
    for info in game.infosets() {
        let history = info.key.as_str().rsplit(':').next().unwrap();
        let current = history.rsplit('/').next().unwrap();
        let mut expected = Vec::new();
        if current.ends_with('r') {
            expected.push("f");
        }
        expected.push("c");
        if current.matches('r').count() < 2 {
            expected.push("r");
        }
        assert_eq!(info.actions, expected, "{}", info.key);
        assert_eq!(info.player, current.len() % 2);
    }
}

#[test]
fn kuhn_uniform_value_matches_oracle() {
    let game = build_kuhn();
    let ev = expected_value(&game, &StrategyProfile::uniform(&game)).unwrap();
    assert!((ev[0] - common::kuhn_ev(&common::kuhn_uniform())).abs() < 1e-12);
    assert_eq!(ev[0], -ev[1]);
}

#[test]
fn kuhn_random_values_match_oracle() {
    let game = build_kuhn();
    let mut rng = common::seeded(11);
    for _ in 0..20 {
        let policy = common::kuhn_random_policy(&mut rng);
        let ev = expected_value(&game, &common::to_profile(&policy)).unwrap();
        assert!((ev[0] - common::kuhn_ev(&policy)).abs() < 1e-12);
    }
}

#[test]
fn chance_nodes_are_distributions_and_ids_grow() {
    for id in [GameId::Kuhn, GameId::Leduc] {
        let game = id.build();
        for (n, node) in game.nodes().iter().enumerate() {
            if let NodeKind::Chance { probs } = &node.kind {
                assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert_eq!(probs.len(), node.children.len());
            }
            assert!(node.children.iter().all(|&c| c > n));
        }
        assert_eq!(GameId::of(&game).unwrap(), id);
    }
}

#[test]
fn leduc_uniform_values_are_zero_sum() {
    let game = build_leduc();
    let ev = expected_value(&game, &StrategyProfile::uniform(&game)).unwrap();
    assert_eq!(ev[0], -ev[1]);
}

#[test]
fn imperfect_recall_is_rejected() {
    // Player 1 forgets their own first move.
    let leaf = || TreeSpec::Terminal([0.0, 0.0]);
    let second = || TreeSpec::Decision {
        player: 0,
        key: "again".into(),
        actions: vec![("x".into(), leaf()), ("y".into(), leaf())],
    };
    let spec = TreeSpec::Decision {
        player: 0,
        key: "first".into(),
        actions: vec![("a".into(), second()), ("b".into(), second())],
    };
    assert!(matches!(Game::from_tree("forgetful", spec), Err(Error::InvalidGame(_))));
}

#[test]
fn non_zero_sum_and_bad_chance_are_rejected() {
    assert!(Game::from_tree("nzs", TreeSpec::Terminal([1.0, 1.0])).is_err());
    let chance = TreeSpec::Chance(vec![(0.5, TreeSpec::Terminal([0.0, 0.0])), (0.4, TreeSpec::Terminal([0.0, 0.0]))]);
    assert!(Game::from_tree("short", chance).is_err());
}
