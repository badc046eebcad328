"""End to end behaviour of the solver on portfolio problems

Sizes follow the presets where affordable and are scaled down where not.

"""

import os
import json
import time
import shutil
import logging
import tempfile

import numpy
import pandas

from sbfolio import encoding, ising, market, oracle, pipeline, solver
from sbfolio.encoding import PortfolioSpec

log = logging.getLogger("sbfolio")

FAST = solver.SBParams(pump_step=0.01, dt=0.05)


def solve_portfolio(scenario, spec, params, restarts=10):
    enc = encoding.encode(scenario, spec)
    result = solver.solve(enc.problem, params, restarts=restarts)
    return encoding.objective(enc.decode(result.spins), scenario, spec)


def test_best_of_ten_matches_enumeration():
    """3 assets, cap 3, 3 periods: exact optimum on 9 of 10 markets"""
    spec = PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=0.01)
    matches = 0
    started = time.time()

    for seed in range(10):
        scenario = market.generate_scenario(
            market.MarketConfig(n_assets=3, horizon=3, seed=seed))

        best, _ = oracle.enumerate_best_trajectory(scenario, spec)
        solution = solve_portfolio(scenario, spec,
                                   solver.SBParams(seed=seed))

        gap = best.total_value - solution.total_value
        print("Market %d: gap %.3g" % (seed, gap))

        assert gap >= -1e-9, "Solver beat the exact optimum"
        matches += gap <= 1e-9

    print("%d of 10 in %.1fs" % (matches, time.time() - started))
    assert matches >= 9, "Only %d of 10 optima found" % matches


def test_cost_sweep_approaches_local_optimum():
    """10 periods: solver trajectories close on independent periods

    60 spins are beyond enumeration, the global side is the solver.

    """

    preset = os.path.join(os.path.dirname(pipeline.__file__),
                          "presets", "fig6.json")
    config = pipeline.resolve_config(preset, environ={})
    dirname = tempfile.mkdtemp()

    try:
        pipeline.cmd_verify(config, dirname)
        frame = pandas.read_csv(os.path.join(dirname, "csweep.csv"))

        with open(os.path.join(dirname, "report.json")) as f:
            report = json.load(f)

    finally:
        shutil.rmtree(dirname)

    print(frame)
    assert not report["exact_global"]
    assert frame["c"].tolist() == [0.02, 0.01, 0.005, 0.001, 0.0]

    gaps = frame["gap"].tolist()
    assert all(a >= b - 1e-9 for a, b in zip(gaps, gaps[1:])), gaps
    assert gaps[-1] <= 1e-9, "Gap of %g without trading cost" % gaps[-1]
    assert report["non_increasing"]


def test_risk_free_limit():
    """Extreme risk aversion holds the risk free asset at cap alone"""
    scenario = market.generate_scenario(
        market.MarketConfig(n_assets=5, drift=0.0, seed=2,
                            risk_free_return=0.01, risk_free_index=2))
    spec = PortfolioSpec(gamma=10000.0, unit_cap=15)

    solution = solve_portfolio(scenario, spec, solver.SBParams())

    assert solution.weights[:, 0].tolist() == [0, 0, 15, 0, 0]
    assert solution.risk_term.sum() == 0.0
    assert abs(solution.return_term.sum() - 0.15) < 1e-12


def test_without_risk_or_cost_holds_positive_returns():
    for seed in range(3):
        scenario = market.generate_scenario(
            market.MarketConfig(n_assets=4, horizon=3, seed=seed))
        spec = PortfolioSpec(gamma=0.0, unit_cap=7)

        solution = solve_portfolio(scenario, spec, FAST, restarts=1)
        expected = numpy.where(scenario.mu.T > 0, 7, 0)

        assert solution.weights.tolist() == expected.tolist(), seed


def test_ground_state_recovery():
    """Best of 10 finds the ground state of 19 in 20 random problems"""
    matches = 0

    for seed in range(20):
        problem = ising.random_problem(10, seed=1000 + seed)
        _, exact = ising.brute_force_ground_state(problem)
        result = solver.solve(problem, FAST.replace(seed=seed), restarts=10)

        matches += abs(result.energy - exact) <= 1e-9 * max(1, abs(exact))

    print("%d of 20 ground states found" % matches)
    assert matches >= 19, "Only %d of 20 ground states found" % matches


def test_single_solve_timing():
    """Timing is logged, not asserted"""
    scenario = market.generate_scenario(market.MarketConfig(n_assets=128))
    problem = encoding.encode(scenario, PortfolioSpec(1.0, 15)).problem

    result = solver.evolve(problem, solver.SBParams(pump_step=0.01,
                                                    dt=0.01))

    log.info("%d spins solved in %.2fs" % (problem.n, result.seconds))
    assert result.steps_taken == 22000


def test_trading_activity_falls_with_cost():
    """Expensive trading trades less on 4 of 5 markets"""
    fewer = 0

    for seed in range(5):
        scenario = market.generate_scenario(market.MarketConfig(
            n_assets=2, horizon=20, seasonal_amplitude=0.01,
            seasonal_period=5, seed=seed))

        changes = [
            solve_portfolio(
                scenario,
                PortfolioSpec(gamma=1.0, unit_cap=3, trade_cost=cost),
                FAST.replace(seed=seed), restarts=3).unit_changes
            for cost in (0.001, 0.04)
        ]

        print("Market %d: %d vs %d unit changes" % (seed, *changes))
        fewer += changes[1] < changes[0]

    assert fewer >= 4, "Only %d of 5 markets traded less" % fewer
