"""Smoke test for the fregret Python extension.

Build and install first:  pip install ./crates/python --no-build-isolation
"""

import fregret


def main():
    kuhn = fregret.Game.kuhn()
    assert len(kuhn.infosets()) == 12
    assert kuhn.utility_range == 4.0

    uniform = kuhn.uniform()
    assert fregret.exploitability(kuhn, uniform) > 0.0
    assert fregret.exact_ev(kuhn, uniform, uniform) == 0.0

    strategy, log = fregret.cfr_solve(kuhn, 2000, log_every=500)
    assert len(log) == 4
    e = fregret.exploitability(kuhn, strategy)
    assert abs(e - log[-1]["exploitability"]) < 1e-12
    value, response = fregret.best_response(kuhn, strategy, 1)
    assert abs(-value + 1.0 / 18.0) < 0.02
    assert set(response) == {k for p, k, _ in kuhn.infosets() if p == 1}

    tabular, _ = fregret.rcfr_solve(kuhn, 2000, estimator="tabular", log_every=2000)
    assert tabular == strategy

    text = fregret.write_strategy(kuhn, strategy)
    assert fregret.read_strategy(kuhn, text) == strategy

    leduc = fregret.Game("leduc")
    tree_strategy, tree_log = fregret.rcfr_solve(leduc, 50, min_leaf_weight=3.0, log_every=25)
    assert tree_log[-1]["leaves"][0] >= 1
    mean, stderr = fregret.sampled_match(leduc, tree_strategy, leduc.uniform(), 2000, seed=1)
    assert stderr > 0.0 and abs(mean) < 10.0

    assert fregret.regret_match([3.0, 1.0, 0.0]) == [0.75, 0.25, 0.0]
    assert fregret.regret_bound(100, 2.0, 3, 0.0) > 0.0
    m = fregret.RegretMatcher(2)
    assert m.update([1.0, 0.0]) == [0.5, 0.5]
    assert m.regrets == [0.5, -0.5]

    tree = fregret.RegressionTree.fit([[0.0], [1.0], [2.0], [3.0]], [1.0, 1.0, 5.0, 5.0])
    assert tree.leaves == 2 and tree.predict([2.5]) == 5.0
    assert fregret.RegressionTree.from_text(tree.to_text()).to_text() == tree.to_text()

    try:
        fregret.exploitability(kuhn, {"p1:J:-:": [1.0, 0.0]})
    except ValueError:
        pass
    else:
        raise AssertionError("incomplete strategy accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
