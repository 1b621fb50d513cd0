use fregret::estimator::TreeConfig;
use fregret::eval::exploitability;
use fregret::rcfr::{rcfr_solve, RcfrConfig, RcfrSolver, TargetMode};
use fregret::{build_kuhn, build_leduc, EstimatorKind};

#[test]
fn exact_targets_equal_cfr_regrets_on_leduc() {
    let game = build_leduc();
    let config = RcfrConfig {
        estimator: EstimatorKind::Tree(TreeConfig::default()),
        ..Default::default()
    };
    let mut rcfr = RcfrSolver::new(&game, config).unwrap();
    // Exact targets are the CFR regrets of the policy actually played.
    let mut regrets: Vec<Vec<f64>> = game.infosets().iter().map(|i| vec![0.0; i.num_actions()]).collect();
    for _ in 0..15 {
        let policy = rcfr.current_policy_table();
        let before = rcfr.targets().to_vec();
        rcfr.iterate().unwrap();
        for (i, row) in rcfr.targets().iter().enumerate() {
            for (a, &r) in row.iter().enumerate() {
                regrets[i][a] += r - before[i][a];
            }
        }
        assert_eq!(rcfr.targets(), &regrets[..]);
        assert_eq!(policy.len(), game.infosets().len());
    }
}

#[test]
fn bootstrap_and_exact_agree_when_tabular() {
    let game = build_kuhn();
    let run = |target_mode| {
        let config = RcfrConfig {
            iterations: 200,
            estimator: EstimatorKind::Tabular,
            target_mode,
            log_every: 50,
            ..Default::default()
        };
        let (profile, log) = rcfr_solve(&game, &config).unwrap();
        (profile, log.iter().map(|r| r.exploitability).collect::<Vec<_>>())
    };
    assert_eq!(run(TargetMode::Exact), run(TargetMode::Bootstrap));
}

#[test]
fn logs_are_valid_profiles_and_reproducible() {
    let game = build_kuhn();
    let config = RcfrConfig {
        iterations: 60,
        estimator: EstimatorKind::Ensemble {
            tree: TreeConfig { min_leaf_weight: 2.0, max_depth: Some(4) },
            n_trees: 4,
            seed: 3,
        },
        log_every: 20,
        seed: 1,
        ..Default::default()
    };
    let (profile, log) = rcfr_solve(&game, &config).unwrap();
    let (again, log2) = rcfr_solve(&game, &config).unwrap();
    assert_eq!(profile, again);
    assert_eq!(log.iter().map(|r| r.exploitability).collect::<Vec<_>>(), log2.iter().map(|r| r.exploitability).collect::<Vec<_>>());
    profile.validate(1e-12).unwrap();
    assert_eq!(log.len(), 3);
    assert!((exploitability(&game, &profile).unwrap() - log[2].exploitability).abs() < 1e-12);
    for row in &log {
        // Four trees over 12 rows per player.
        assert!(row.leaves.iter().all(|&l| (4..=48).contains(&l)));
    }
}
