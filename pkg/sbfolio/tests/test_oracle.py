"""Test oracle.py"""

import numpy
import pytest

from sbfolio import encoding, ising, market, oracle, solver
from sbfolio.encoding import MarketScenario, PortfolioSpec


def small_market(n_assets, horizon, seed=0):
    config = market.MarketConfig(n_assets=n_assets, horizon=horizon,
                                 n_increments=200, drift=0.005,
                                 volatility=0.05, seed=seed)
    return market.generate_scenario(config)


def test_enumeration_ranks_every_trajectory():
    """N = 3, cap 3 and T = 3 spans 2^18 trajectories"""
    scenario = small_market(3, 3, seed=1)
    spec = PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=0.01)

    best, values = oracle.enumerate_best_trajectory(scenario, spec,
                                                    values=True)

    assert len(values) == 2 ** 18
    assert numpy.all(numpy.diff(values) <= 0), "Values are not sorted"
    assert abs(values[0] - best.total_value) < 1e-10
    assert best.exact


def test_enumeration_keeps_largest_values(monkeypatch):
    """Values are trimmed while enumerating, keeping the largest"""
    scenario = small_market(3, 3, seed=1)
    spec = PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=0.01)

    every = numpy.concatenate([
        values for _, values in oracle.gray_code_values(scenario, spec)])
    expected = numpy.sort(every)[::-1][:5000]

    monkeypatch.setattr(oracle, "MAX_VALUES", 5000)

    for threads in (1, 3):
        _, ranked = oracle.enumerate_best_trajectory(
            scenario, spec, values=True, threads=threads)

        assert len(ranked) == 5000, threads
        assert numpy.allclose(ranked, expected, rtol=0, atol=1e-12), threads


def test_enumeration_threads():
    scenario = small_market(2, 3, seed=2)
    spec = PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=0.01)

    single, ranked = oracle.enumerate_best_trajectory(
        scenario, spec, values=True, threads=1)
    multi, ranked_multi = oracle.enumerate_best_trajectory(
        scenario, spec, values=True, threads=3)

    assert single.weights.tolist() == multi.weights.tolist()
    assert numpy.allclose(ranked, ranked_multi, atol=1e-12)


def test_enumeration_bound():
    scenario = small_market(3, 1)

    with pytest.raises(ValueError):
        oracle.enumerate_best_trajectory(scenario, PortfolioSpec(1.0, 511))

    with pytest.raises(ValueError):
        next(oracle.gray_code_values(scenario, PortfolioSpec(1.0, 511)))


def test_without_risk_or_cost():
    """gamma = 0 and c = 0 hold the cap exactly where mu is positive"""
    mu = [[0.02, -0.01, 0.004], [-0.03, 0.01, 0.002]]
    scenario = MarketScenario(mu, numpy.tile(numpy.eye(3), (2, 1, 1)))
    spec = PortfolioSpec(gamma=0.0, unit_cap=7)

    best, _ = oracle.enumerate_best_trajectory(scenario, spec)

    expected = numpy.where(numpy.array(mu).T > 0, 7, 0)
    assert best.weights.tolist() == expected.tolist()
    assert best.total_value == pytest.approx(7 * (0.02 + 0.004 +
                                                  0.01 + 0.002))


def test_single_bit():
    """One asset, one bit, one period: the better of 0 and 1 unit"""
    scenario = MarketScenario([0.01], [[0.04]])

    for gamma, expected in ((0.1, 1), (1.0, 0)):
        best, values = oracle.enumerate_best_trajectory(
            scenario, PortfolioSpec(gamma, 1), values=True)

        assert best.weights.tolist() == [[expected]], gamma
        assert numpy.allclose(sorted(values),
                              sorted([0.0, 0.01 - gamma / 2 * 0.04]))


def test_gray_code_values_match_objective():
    scenario = small_market(2, 2, seed=3)
    spec = PortfolioSpec(gamma=2.0, unit_cap=3, trade_cost=0.02)
    layout = encoding.build_layout(scenario, spec)

    for codes, values in oracle.gray_code_values(scenario, spec):
        for code, value in zip(codes[::5], values[::5]):
            spins = ising.spins_from_code(int(code), layout.total_spins)
            weights = encoding.decode(spins, layout)
            direct = encoding.objective(weights, scenario, spec)
            assert abs(direct.total_value - value) < 1e-10, code


def test_random_portfolios():
    scenario = small_market(4, 1, seed=4)
    scenario = market.add_risk_free(scenario, 0.01, 2)
    spec = PortfolioSpec(gamma=1.0, unit_cap=15)

    cloud = oracle.random_portfolios(scenario, spec, 100, seed=5)

    assert cloud.shape == (100 + 4 + 2, 2)
    assert numpy.array_equal(
        cloud, oracle.random_portfolios(scenario, spec, 100, seed=5))

    # Zero portfolio, then all-cap, then every asset alone at cap
    assert cloud[100].tolist() == [0.0, 0.0]
    assert cloud[104][0] == 0.0
    assert cloud[104][1] == pytest.approx(0.15)

    with pytest.raises(ValueError):
        oracle.random_portfolios(scenario, spec, -1)


def test_random_portfolios_over_time():
    """Several periods give one value per period, costs included"""
    scenario = small_market(2, 3, seed=6)
    spec = PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=0.01)

    values = oracle.random_portfolios(scenario, spec, 10, seed=7)
    assert values.shape == (10 + 2 + 2, 3)

    capped = encoding.objective(numpy.full((2, 3), 3), scenario, spec)
    assert numpy.allclose(values[11], capped.period_value)


def test_local_equals_global_without_cost():
    scenario = small_market(2, 3, seed=8)
    spec = PortfolioSpec(gamma=1.0, unit_cap=3)

    best, _ = oracle.enumerate_best_trajectory(scenario, spec)
    local = oracle.per_time_local_optimal(scenario, spec)

    assert local.exact
    assert abs(best.total_value - local.total_value) < 1e-12


def test_gap_shrinks_with_cost():
    """The advantage of the global optimum vanishes as c goes to 0"""
    scenario = small_market(2, 3, seed=9)
    gaps = list()

    for cost in (0.02, 0.01, 0.005, 0.001, 0.0):
        spec = PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=cost)
        best, _ = oracle.enumerate_best_trajectory(scenario, spec)
        local = oracle.per_time_local_optimal(scenario, spec)
        gaps.append(best.total_value - local.total_value)

    print("Gaps: %s" % gaps)
    assert all(gap >= -1e-12 for gap in gaps)
    assert all(a >= b - 1e-12 for a, b in zip(gaps, gaps[1:]))
    assert abs(gaps[-1]) < 1e-12


def test_local_optimum_bounds():
    scenario = small_market(3, 2)
    spec = PortfolioSpec(gamma=1.0, unit_cap=511)

    with pytest.raises(ValueError):
        oracle.per_time_local_optimal(scenario, spec, exact=True)


def test_local_optimum_heuristic_fallback():
    scenario = small_market(2, 2, seed=10)
    spec = PortfolioSpec(gamma=1.0, unit_cap=3)
    params = solver.SBParams(pump_step=0.01, dt=0.05)

    exact = oracle.per_time_local_optimal(scenario, spec)
    heuristic = oracle.per_time_local_optimal(scenario, spec, exact=False,
                                              params=params, restarts=5)

    assert not heuristic.exact
    assert heuristic.total_value <= exact.total_value + 1e-12


def test_sweep_monotonic():
    """Risk of the exact optimum never grows with gamma"""
    scenario = small_market(3, 1, seed=11)
    spec = PortfolioSpec(gamma=0.0, unit_cap=7)

    rows = oracle.sweep_monotonic(scenario, spec, [0, 0.5, 1, 5, 50, 500])
    risks = [risk for _, risk, _, _ in rows]

    print("Risks: %s" % risks)
    assert [gamma for gamma, _, _, _ in rows] == [0, 0.5, 1, 5, 50, 500]
    assert all(a >= b - 1e-12 for a, b in zip(risks, risks[1:]))
