"""Integer portfolio trajectories as Ising problems

A trajectory holds w_it units of asset i at period t and is valued

    sum_t [w_t^T mu_t - gamma/2 w_t^T Sigma_t w_t] - trading cost

Each weight is spelled with B bits, w_it = sum_k 2^k b_ikt, and every bit
is a spin, b = (s + 1) / 2. With a cap of 2^B - 1 units per asset the
quantity constraints hold for every spin configuration, no penalty terms
needed.

Spins are laid out per period, and within a period bundled by bit
significance:

     ______________________________ ______________________________
    |         |         |          |         |         |          |
    | bit 0   | bit 1   | bit B-1  | bit 0   | bit 1   | bit B-1  |
    | i=0..N  | i=0..N  | i=0..N   | i=0..N  | i=0..N  | i=0..N   |
    |_________|_________|__________|_________|_________|__________|
    |                              |                              |
    |           t = 0              |            t = 1             |
    |______________________________|______________________________|

Trading cost is charged per bit: a bit of significance 2^k that differs
between neighbouring periods costs c * 2^k. This is what a ferromagnetic
coupling between the two spins expresses; it equals c * |dw| whenever no
carry is involved, and exceeds it otherwise (7 -> 8 costs 15c). Both
measures are reported by :func:`objective`.

"""

import json
import logging
import dataclasses

import numpy
import pandas

from . import ising, lib, schema

_log = logging.getLogger("sbfolio")


class MarketScenario(object):
    """Expected returns and covariances of N assets over T periods

    Arguments:
        mu (array-like): T x N expected returns, or N for a single period
        sigma (array-like): T x N x N covariances, or N x N

    Example:
        >>> scenario = MarketScenario([0.01, 0.02], [[0.04, 0.01], [0, 0.09]])
        >>> scenario.n_assets, scenario.horizon
        (2, 1)
        >>> scenario.sigma[0].tolist()
        [[0.04, 0.005], [0.005, 0.09]]

    """

    def __init__(self, mu, sigma):
        mu = numpy.array(mu, dtype=float)
        sigma = numpy.array(sigma, dtype=float)

        if mu.ndim == 1:
            mu = mu[None, :]
        if sigma.ndim == 2:
            sigma = sigma[None, :, :]

        if mu.ndim != 2 or mu.shape[1] < 1 or mu.shape[0] < 1:
            raise ValueError("mu must be T x N, got shape %s" % (mu.shape,))

        horizon, n_assets = mu.shape

        if sigma.shape != (horizon, n_assets, n_assets):
            raise ValueError("sigma must have shape %s, got %s"
                             % ((horizon, n_assets, n_assets), sigma.shape))

        if not (numpy.all(numpy.isfinite(mu)) and
                numpy.all(numpy.isfinite(sigma))):
            raise ValueError("Scenario contains non-finite values")

        sigma = (sigma + sigma.transpose(0, 2, 1)) / 2

        if numpy.any(numpy.diagonal(sigma, axis1=1, axis2=2) < 0):
            raise ValueError("Covariances must have non-negative variances")

        mu.flags.writeable = False
        sigma.flags.writeable = False

        self._mu = mu
        self._sigma = sigma

    @property
    def mu(self):
        return self._mu

    @property
    def sigma(self):
        return self._sigma

    @property
    def n_assets(self):
        return self._mu.shape[1]

    @property
    def horizon(self):
        return self._mu.shape[0]

    def block(self, t):
        """Return single-period scenario of period `t`"""
        return MarketScenario(self._mu[t], self._sigma[t])

    def window(self, start, stop):
        """Return scenario of periods [start, stop)"""
        return MarketScenario(self._mu[start:stop], self._sigma[start:stop])

    def to_dict(self):
        return {
            "schema": schema.identifier("scenario"),
            "mu": self._mu.tolist(),
            "sigma": self._sigma.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        schema.validate(data, "scenario")
        schema.check_identifier(data, "scenario")
        return cls(data["mu"], data["sigma"])

    def dump(self, fname):
        with open(fname, "w") as f:
            json.dump(self.to_dict(), f, indent=4)

    @classmethod
    def load(cls, fname):
        with open(fname) as f:
            return cls.from_dict(json.load(f))

    def __eq__(self, other):
        return (isinstance(other, MarketScenario) and
                numpy.array_equal(self._mu, other._mu) and
                numpy.array_equal(self._sigma, other._sigma))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "MarketScenario(n_assets=%d, horizon=%d)" % (
            self.n_assets, self.horizon)


@dataclasses.dataclass(frozen=True)
class PortfolioSpec(object):
    """Risk aversion, per-asset cap and trading cost

    Attributes:
        gamma (float): Risk aversion
        unit_cap (int): Maximum units per asset, of the form 2^B - 1
        trade_cost (float): Cost c per bit-aligned unit change
        cost_matrix (tuple, optional): (T - 1) rows of N per-asset costs
            c_i(t, t + 1), replacing the uniform `trade_cost`

    Example:
        >>> spec = PortfolioSpec(gamma=0.5, unit_cap=15)
        >>> spec.bits_per_asset, spec.total_units(5)
        (4, 75)
        >>> PortfolioSpec(gamma=0.5, unit_cap=10)
        Traceback (most recent call last):
        ...
        ValueError: unit_cap + 1 must be a power of two, got unit_cap=10

    """

    gamma: float
    unit_cap: int
    trade_cost: float = 0.0
    cost_matrix: object = None

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError("gamma must be non-negative, got %r"
                             % self.gamma)

        if int(self.unit_cap) != self.unit_cap or self.unit_cap < 1:
            raise ValueError("unit_cap must be a positive integer, got %r"
                             % self.unit_cap)

        if not lib.is_power_of_two(int(self.unit_cap) + 1):
            raise ValueError("unit_cap + 1 must be a power of two, got "
                             "unit_cap=%d" % self.unit_cap)

        if not self.trade_cost >= 0:
            raise ValueError("trade_cost must be non-negative, got %r"
                             % self.trade_cost)

        if self.cost_matrix is not None:
            matrix = numpy.array(self.cost_matrix, dtype=float)
            if matrix.ndim != 2 or numpy.any(matrix < 0):
                raise ValueError("cost_matrix must be a 2-D array of "
                                 "non-negative costs")
            object.__setattr__(self, "cost_matrix",
                               tuple(map(tuple, matrix.tolist())))

        object.__setattr__(self, "unit_cap", int(self.unit_cap))

    @property
    def bits_per_asset(self):
        return (self.unit_cap + 1).bit_length() - 1

    def total_units(self, n_assets):
        return n_assets * self.unit_cap

    def costs(self, n_assets, horizon):
        """Return (T - 1) x N array of costs c_i(t, t + 1)"""
        if self.cost_matrix is None:
            return numpy.full((max(horizon - 1, 0), n_assets),
                              float(self.trade_cost))

        matrix = numpy.array(self.cost_matrix, dtype=float)
        if matrix.shape != (horizon - 1, n_assets):
            raise ValueError("cost_matrix has shape %s, expected %s"
                             % (matrix.shape, (horizon - 1, n_assets)))
        return matrix

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        data = dataclasses.asdict(self)
        if self.cost_matrix is not None:
            data["cost_matrix"] = [list(row) for row in self.cost_matrix]
        data["schema"] = schema.identifier("portfolio")
        return data

    @classmethod
    def from_dict(cls, data):
        schema.validate(data, "portfolio")
        data = dict(data)
        data.pop("schema", None)
        return cls(**data)


@dataclasses.dataclass(frozen=True)
class SpinLayout(object):
    """Flat spin index of (asset i, bit k, period t)

    Example:
        >>> layout = SpinLayout(n_assets=2, bits_per_asset=2, horizon=1)
        >>> layout.index(1, 1, 0), layout.total_spins
        (3, 4)
        >>> layout.unravel(3)
        (1, 1, 0)

    """

    n_assets: int
    bits_per_asset: int
    horizon: int

    @property
    def block_size(self):
        return self.n_assets * self.bits_per_asset

    @property
    def total_spins(self):
        return self.block_size * self.horizon

    def index(self, i, k, t):
        return t * self.block_size + k * self.n_assets + i

    def unravel(self, flat):
        t, rest = divmod(flat, self.block_size)
        k, i = divmod(rest, self.n_assets)
        return i, k, t

    def significance(self):
        """Return 2^k for every spin of one period, in layout order"""
        return numpy.repeat(2.0 ** numpy.arange(self.bits_per_asset),
                            self.n_assets)

    def assets(self):
        """Return asset index of every spin of one period"""
        return numpy.tile(numpy.arange(self.n_assets), self.bits_per_asset)


@dataclasses.dataclass(frozen=True)
class Encoding(object):
    """Ising problem of a trajectory problem, and how to read it

    total_energy(problem, s) == -scale * value(s), where value is the
    trajectory value of the decoded weights with bit trading costs.

    """

    problem: ising.IsingProblem
    layout: SpinLayout
    scale: float = 2.0

    def objective(self, spins):
        """Return trajectory value of `spins`"""
        return -ising.total_energy(self.problem, spins) / self.scale

    def decode(self, spins):
        return decode(spins, self.layout)


@dataclasses.dataclass
class TrajectorySolution(object):
    """Integer weights and the decomposition of their value

    Attributes:
        weights (numpy.ndarray): N x T integer units
        return_term (numpy.ndarray): w_t^T mu_t per period
        risk_term (numpy.ndarray): w_t^T Sigma_t w_t per period
        unit_trade_cost (float): sum c * |dw|
        bit_trade_cost (float): sum c * 2^k over changed bits
        total_value (float): Returns less gamma/2 risk less bit costs
        period_value (numpy.ndarray): Value per period; the cost of
            moving from t to t + 1 is charged to t
        unit_changes (int): sum |dw|
        gamma (float): Risk aversion the value was computed with
        exact (bool): False when produced by a heuristic fallback

    """

    weights: numpy.ndarray
    return_term: numpy.ndarray
    risk_term: numpy.ndarray
    unit_trade_cost: float
    bit_trade_cost: float
    total_value: float
    period_value: numpy.ndarray
    unit_changes: int
    gamma: float = 0.0
    exact: bool = True

    def to_frame(self):
        """Return holdings as rows of (t, asset, weight)"""
        n_assets, horizon = self.weights.shape
        return pandas.DataFrame({
            "t": numpy.repeat(numpy.arange(horizon), n_assets),
            "asset": numpy.tile(numpy.arange(n_assets), horizon),
            "weight": self.weights.T.ravel(),
        })

    def periods_frame(self):
        """Return rows of (t, value, return_term, risk_term)"""
        return pandas.DataFrame({
            "t": numpy.arange(len(self.return_term)),
            "value": self.period_value,
            "return_term": self.return_term,
            "risk_term": self.risk_term,
        })

    def summary(self):
        return {
            "return": float(self.return_term.sum()),
            "risk": float(self.risk_term.sum()),
            "unit_trade_cost": float(self.unit_trade_cost),
            "bit_trade_cost": float(self.bit_trade_cost),
            "unit_changes": int(self.unit_changes),
            "total_value": float(self.total_value),
        }


def build_layout(scenario, spec):
    """Return spin layout of `scenario` under `spec`

    Example:
        >>> scenario = MarketScenario(numpy.zeros((3, 3)),
        ...                           numpy.zeros((3, 3, 3)))
        >>> build_layout(scenario, PortfolioSpec(0.0, 3)).total_spins
        18

    """

    return SpinLayout(n_assets=scenario.n_assets,
                      bits_per_asset=spec.bits_per_asset,
                      horizon=scenario.horizon)


def encode(scenario, spec):
    """Return the Ising encoding of trajectory problem `scenario`, `spec`

    Within period t, distinct spins (i, k) and (j, l) couple with
    -gamma/2 2^k 2^l Sigma_ijt and spin (i, k) sees the field
    gamma/2 sum_jl 2^k 2^l Sigma_ijt - 2^k mu_it. Spin (i, k) at t couples
    ferromagnetically with its counterpart at t + 1 with c_i(t, t+1) 2^k.

    Arguments:
        scenario (MarketScenario): Returns and covariances
        spec (PortfolioSpec): Risk aversion, cap and trading cost

    Returns:
        Encoding

    """

    layout = build_layout(scenario, spec)
    costs = spec.costs(scenario.n_assets, scenario.horizon)

    size = layout.total_spins
    block = layout.block_size
    significance = layout.significance()
    assets = layout.assets()

    # Minimise -value(b) = b^T Q b + q^T b
    Q = numpy.zeros((size, size))
    q = numpy.zeros(size)

    for t in range(layout.horizon):
        span = slice(t * block, (t + 1) * block)
        sigma = scenario.sigma[t][numpy.ix_(assets, assets)]

        Q[span, span] = (0.5 * spec.gamma *
                         numpy.outer(significance, significance) * sigma)
        q[span] = -significance * scenario.mu[t][assets]

    # A bit differing between t and t + 1 costs w = c * 2^k, which is
    # w (b + b' - 2 b b')
    for t in range(layout.horizon - 1):
        here = numpy.arange(t * block, (t + 1) * block)
        there = here + block
        weight = costs[t][assets] * significance

        q[here] += weight
        q[there] += weight
        Q[here, there] -= weight
        Q[there, here] -= weight

    problem = ising.from_qubo(Q, q)

    _log.debug("Encoded %r with %s into %r" % (scenario, spec, problem))

    return Encoding(problem=problem, layout=layout, scale=2.0)


def decode(spins, layout):
    """Return N x T integer weights of `spins`

    Example:
        >>> layout = SpinLayout(n_assets=1, bits_per_asset=2, horizon=1)
        >>> decode([1, -1], layout).tolist()
        [[1]]

    """

    spins = ising.check_spins(spins, layout.total_spins)
    bits = ((spins + 1) / 2).reshape(layout.horizon,
                                     layout.bits_per_asset,
                                     layout.n_assets)
    powers = 2 ** numpy.arange(layout.bits_per_asset)
    return numpy.einsum("tki,k->it", bits, powers).round().astype(int)


def encode_weights(weights, layout):
    """Return spin vector spelling N x T integer `weights`

    Example:
        >>> layout = SpinLayout(n_assets=1, bits_per_asset=2, horizon=1)
        >>> encode_weights([[1]], layout).tolist()
        [1.0, -1.0]

    """

    weights = _check_weights(weights, layout.n_assets, layout.horizon,
                             2 ** layout.bits_per_asset - 1)
    shifts = numpy.arange(layout.bits_per_asset)
    bits = (weights.T[:, None, :] >> shifts[None, :, None]) & 1
    return 2.0 * bits.ravel() - 1.0


def _check_weights(weights, n_assets, horizon, unit_cap):
    weights = numpy.asarray(weights)

    if weights.shape != (n_assets, horizon):
        raise ValueError("Weights must be %d x %d, got shape %s"
                         % (n_assets, horizon, weights.shape))

    if not numpy.all(weights == numpy.round(weights)):
        raise ValueError("Weights must be integers")

    weights = numpy.round(weights).astype(numpy.int64)

    if numpy.any(weights < 0) or numpy.any(weights > unit_cap):
        raise ValueError("Weights must lie within [0, %d], got [%d, %d]"
                         % (unit_cap, weights.min(), weights.max()))

    return weights


def objective(weights, scenario, spec):
    """Return value decomposition of integer `weights`

    Arguments:
        weights (array-like): N x T integer units within [0, unit_cap]
        scenario (MarketScenario): Returns and covariances
        spec (PortfolioSpec): Risk aversion, cap and trading cost

    Returns:
        TrajectorySolution

    Raises:
        ValueError on weights outside [0, unit_cap]

    Example:
        >>> scenario = MarketScenario([0.01], [[0.04]])
        >>> solution = objective([[2]], scenario, PortfolioSpec(0.5, 3))
        >>> round(solution.total_value, 12)
        -0.02

    """

    n_assets, horizon = scenario.n_assets, scenario.horizon
    weights = _check_weights(weights, n_assets, horizon, spec.unit_cap)
    costs = spec.costs(n_assets, horizon)

    w = weights.astype(float)
    return_term = numpy.einsum("it,ti->t", w, scenario.mu)
    risk_term = numpy.einsum("it,tij,jt->t", w, scenario.sigma, w)

    changes = numpy.abs(numpy.diff(weights, axis=1))        # N x (T - 1)
    unit_costs = numpy.sum(costs.T * changes, axis=0)

    shifts = numpy.arange(spec.bits_per_asset)
    bits = (weights[:, :, None] >> shifts) & 1               # N x T x B
    flipped = numpy.abs(numpy.diff(bits, axis=1))            # N x (T-1) x B
    bit_changes = flipped @ (2 ** shifts)                    # N x (T - 1)
    bit_costs = numpy.sum(costs.T * bit_changes, axis=0)

    charged = numpy.zeros(horizon)
    charged[:horizon - 1] = bit_costs

    period_value = return_term - 0.5 * spec.gamma * risk_term - charged

    return TrajectorySolution(
        weights=weights,
        return_term=return_term,
        risk_term=risk_term,
        unit_trade_cost=float(unit_costs.sum()),
        bit_trade_cost=float(bit_costs.sum()),
        total_value=float(period_value.sum()),
        period_value=period_value,
        unit_changes=int(changes.sum()),
        gamma=spec.gamma,
    )


def objective_of_spins(spins, scenario, spec, encoding=None):
    """Return trajectory value of `spins` read through the Ising energy

    Equals objective(decode(spins)).total_value.

    Arguments:
        spins (array-like): Spin vector in layout order
        scenario (MarketScenario): Returns and covariances
        spec (PortfolioSpec): Risk aversion, cap and trading cost
        encoding (Encoding, optional): Reuse an existing encoding

    """

    encoding = encoding or encode(scenario, spec)
    return encoding.objective(spins)
