"""Independent references for portfolio solutions

Nothing in here relies on the simulated bifurcation dynamics, except
the heuristic fallback of :func:`per_time_local_optimal` on problems
too large to enumerate.

"""

import logging
import concurrent.futures

import numpy

from . import ising, solver
from .encoding import (
    encode,
    decode,
    objective,
    build_layout,
)

_log = logging.getLogger("sbfolio")

# Longest sorted value list kept by enumerate_best_trajectory
MAX_VALUES = 2 ** 20


def _check_enumerable(layout):
    if layout.total_spins > ising.MAX_ENUMERATION:
        raise ValueError(
            "Cannot enumerate %d assets x %d bits x %d periods = %d spins, "
            "the bound is %d" % (layout.n_assets, layout.bits_per_asset,
                                 layout.horizon, layout.total_spins,
                                 ising.MAX_ENUMERATION))


def gray_code_values(scenario, spec, start=0, stop=None, encoding=None):
    """Yield (codes, values) of every trajectory, block by block

    Values are maintained incrementally by the Gray code walk of
    :func:`ising.enumerate_energies`, read as trajectory values
    through the encoding. `codes` are spin codes in layout order.

    Example:
        >>> from sbfolio.encoding import MarketScenario, PortfolioSpec
        >>> scenario = MarketScenario([0.025], [[0.04]])
        >>> codes, values = next(gray_code_values(scenario,
        ...                                       PortfolioSpec(0.5, 3)))
        >>> codes.tolist(), numpy.allclose(values, [0, 0.01, 0.015, -0.015])
        ([0, 1, 2, 3], True)

    """

    encoding = encoding or encode(scenario, spec)
    _check_enumerable(encoding.layout)

    problem = encoding.problem
    for codes, energies in ising.enumerate_energies(problem, start, stop):
        yield codes, -(energies + problem.offset) / encoding.scale


def _largest(values):
    """Return the MAX_VALUES largest of `values`, unordered"""
    if len(values) > MAX_VALUES:
        values = numpy.partition(values, -MAX_VALUES)[-MAX_VALUES:]
    return values


def _sorted_values(encoding, threads):
    ranges = ising.partition(ising.enumeration_size(encoding.problem),
                             threads)

    def collect(bounds):
        kept = numpy.empty(0)
        pending = list()
        size = 0

        # Never more than 2 * MAX_VALUES waiting to be trimmed
        for _, values in gray_code_values(None, None, *bounds,
                                          encoding=encoding):
            pending.append(values)
            size += len(values)

            if size >= 2 * MAX_VALUES:
                kept = _largest(numpy.concatenate([kept] + pending))
                pending = list()
                size = len(kept)

        return _largest(numpy.concatenate([kept] + pending))

    with concurrent.futures.ThreadPoolExecutor(len(ranges)) as pool:
        values = numpy.concatenate(list(pool.map(collect, ranges)))

    values = numpy.sort(values)[::-1]
    return values[:MAX_VALUES]


def enumerate_best_trajectory(scenario, spec, values=False, threads=1):
    """Return the exact best trajectory by enumerating every spin vector

    Arguments:
        scenario (MarketScenario): Returns and covariances
        spec (PortfolioSpec): Risk aversion, cap and trading cost
        values (bool, optional): Also return all values, sorted
            descending and capped at MAX_VALUES entries
        threads (int, optional): Worker threads, defaults to 1

    Returns:
        (TrajectorySolution, numpy.ndarray or None)

    Raises:
        ValueError when N * B * T exceeds ising.MAX_ENUMERATION

    Example:
        >>> from sbfolio.encoding import MarketScenario, PortfolioSpec
        >>> scenario = MarketScenario([0.025], [[0.04]])
        >>> best, ranked = enumerate_best_trajectory(
        ...     scenario, PortfolioSpec(0.5, 3), values=True)
        >>> best.weights.tolist(), len(ranked)
        ([[1]], 4)

    """

    layout = build_layout(scenario, spec)
    _check_enumerable(layout)

    encoding = encode(scenario, spec)
    spins, _ = ising.brute_force_ground_state(encoding.problem, threads)
    solution = objective(decode(spins, layout), scenario, spec)

    _log.info("Enumerated %d trajectories, best value %.6g"
              % (2 ** layout.total_spins, solution.total_value))

    if not values:
        return solution, None

    return solution, _sorted_values(encoding, threads)


def _edge_weights(n_assets, horizon, unit_cap):
    edges = [numpy.zeros((n_assets, horizon), dtype=numpy.int64),
             numpy.full((n_assets, horizon), unit_cap, dtype=numpy.int64)]

    for asset in range(n_assets):
        weights = numpy.zeros((n_assets, horizon), dtype=numpy.int64)
        weights[asset] = unit_cap
        edges.append(weights)

    return numpy.stack(edges)


def _batch_values(weights, scenario, spec):
    """Return (return_term, risk_term, period_value) of M x N x T weights"""
    w = weights.astype(float)
    return_term = numpy.einsum("mit,ti->mt", w, scenario.mu)
    risk_term = numpy.einsum("mit,tij,mjt->mt", w, scenario.sigma, w,
                              optimize=True)

    horizon = scenario.horizon
    charged = numpy.zeros_like(return_term)

    if horizon > 1:
        costs = spec.costs(scenario.n_assets, horizon)
        shifts = numpy.arange(spec.bits_per_asset)
        bits = (weights[..., None] >> shifts) & 1
        flipped = numpy.abs(numpy.diff(bits, axis=2))
        bit_changes = flipped @ (2 ** shifts)
        charged[:, :-1] = numpy.einsum("mit,ti->mt", bit_changes, costs)

    period_value = return_term - 0.5 * spec.gamma * risk_term - charged
    return return_term, risk_term, period_value


def random_portfolios(scenario, spec, count, seed=0):
    """Return reference values of `count` random portfolios plus edges

    Weights are uniform integers in [0, unit_cap]. Appended are the
    all-zero portfolio, the all-cap portfolio and each single asset
    held at cap.

    Arguments:
        scenario (MarketScenario): Returns and covariances
        spec (PortfolioSpec): Risk aversion, cap and trading cost
        count (int): Number of random portfolios
        seed (int, optional): Seed of the generator

    Returns:
        (count + N + 2) x 2 array of (risk, return) for a single period,
        or (count + N + 2) x T array of period values otherwise.

    Example:
        >>> from sbfolio.encoding import MarketScenario, PortfolioSpec
        >>> scenario = MarketScenario([0.025], [[0.04]])
        >>> cloud = random_portfolios(scenario, PortfolioSpec(0.5, 3), 0)
        >>> numpy.allclose(cloud, [[0, 0], [0.36, 0.075], [0.36, 0.075]])
        True

    """

    if count < 0:
        raise ValueError("count must be non-negative, got %d" % count)

    n_assets, horizon = scenario.n_assets, scenario.horizon
    rng = numpy.random.default_rng(seed)

    samples = rng.integers(0, spec.unit_cap, size=(count, n_assets, horizon),
                           endpoint=True, dtype=numpy.int64)
    weights = numpy.concatenate(
        [samples, _edge_weights(n_assets, horizon, spec.unit_cap)])

    return_term, risk_term, period_value = _batch_values(
        weights, scenario, spec)

    if horizon == 1:
        return numpy.column_stack([risk_term[:, 0], return_term[:, 0]])

    return period_value


def per_time_local_optimal(scenario, spec, exact=None, params=None,
                           restarts=10, threads=1):
    """Return the trajectory of independently optimal periods

    Each period is optimised on its own, ignoring trading cost, and the
    resulting trajectory is valued with the trading cost of `spec`.

    Arguments:
        scenario (MarketScenario): Returns and covariances
        spec (PortfolioSpec): Risk aversion, cap and trading cost
        exact (bool, optional): True demands enumeration, False forces
            the solver, None enumerates whenever N * B allows it
        params (SBParams, optional): Dynamics of the solver fallback
        restarts (int, optional): Restarts of the solver fallback
        threads (int, optional): Worker threads

    Returns:
        TrajectorySolution, with `exact` False when any period was
        solved heuristically

    Raises:
        ValueError when `exact` is True and a period is too large

    """

    layout = build_layout(scenario.block(0), spec)
    enumerable = layout.total_spins <= ising.MAX_ENUMERATION

    if exact and not enumerable:
        raise ValueError("Cannot enumerate %d spins per period, the bound "
                         "is %d" % (layout.total_spins,
                                    ising.MAX_ENUMERATION))

    use_enumeration = enumerable if exact is None else bool(exact)

    if not use_enumeration:
        _log.warning("Per-period optimum of %d spins found heuristically, "
                     "best of %d restarts" % (layout.total_spins, restarts))

    local_spec = spec.replace(trade_cost=0.0, cost_matrix=None)
    params = params or solver.SBParams()

    weights = numpy.zeros((scenario.n_assets, scenario.horizon),
                          dtype=numpy.int64)

    for t in range(scenario.horizon):
        block = scenario.block(t)

        if use_enumeration:
            best, _ = enumerate_best_trajectory(block, local_spec,
                                                threads=threads)
            weights[:, t] = best.weights[:, 0]

        else:
            encoding = encode(block, local_spec)
            result = solver.solve(encoding.problem, params,
                                  restarts=restarts, threads=threads)
            weights[:, t] = encoding.decode(result.spins)[:, 0]

    solution = objective(weights, scenario, spec)
    solution.exact = use_enumeration
    return solution


def sweep_monotonic(scenario, spec, gammas, threads=1):
    """Return exact (gamma, risk, return, value) rows over `gammas`

    The risk of the exact optimum never increases with gamma, which
    makes the rows a reference for the frontier a solver traces.

    """

    rows = list()
    for gamma in gammas:
        best, _ = enumerate_best_trajectory(
            scenario, spec.replace(gamma=float(gamma)), threads=threads)
        rows.append((float(gamma),
                     float(best.risk_term.sum()),
                     float(best.return_term.sum()),
                     best.total_value))

    return rows
