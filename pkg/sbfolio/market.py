"""Synthetic market scenarios

Every period gets an independent geometric Brownian motion resample
of all assets. The sample mean of the log returns becomes the expected
return of the period, shifted such that the average over assets equals
the configured drift; the sample covariance becomes its risk.

"""

import math
import logging
import dataclasses

import numpy

from . import schema
from .encoding import MarketScenario

_log = logging.getLogger("sbfolio")


@dataclasses.dataclass(frozen=True)
class MarketConfig(object):
    """Knobs of :func:`generate_scenario`

    Attributes:
        n_assets (int): Number of assets N
        horizon (int): Number of periods T
        n_increments (int): GBM increments sampled per period
        drift (float): Average expected return across assets
        volatility (float): Volatility scale per increment
        seasonal_amplitude (float): Amplitude of the seasonal component
        seasonal_period (int): Periods per seasonal cycle
        risk_free_return (float, optional): Replace one asset with a
            risk free asset of this return
        risk_free_index (int): Asset replaced by the risk free asset
        seed (int): Seed of the generator

    """

    n_assets: int
    horizon: int = 1
    n_increments: int = 1000
    drift: float = 0.0
    volatility: float = 0.02
    seasonal_amplitude: float = 0.0
    seasonal_period: int = 12
    risk_free_return: object = None
    risk_free_index: int = 0
    seed: int = 0

    def __post_init__(self):
        for key in ("n_assets", "horizon", "seasonal_period"):
            if getattr(self, key) < 1:
                raise ValueError("%s must be positive, got %r"
                                 % (key, getattr(self, key)))

        if self.n_increments < 2:
            raise ValueError("At least 2 increments are needed to "
                             "estimate a covariance, got %d"
                             % self.n_increments)

        if not self.volatility > 0:
            raise ValueError("volatility must be positive, got %r"
                             % self.volatility)

        if self.seasonal_amplitude < 0:
            raise ValueError("seasonal_amplitude must be non-negative")

        if (self.risk_free_return is not None and
                not 0 <= self.risk_free_index < self.n_assets):
            raise ValueError("risk_free_index %d outside [0, %d)"
                             % (self.risk_free_index, self.n_assets))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        data = dataclasses.asdict(self)
        data["schema"] = schema.identifier("market")
        return data

    @classmethod
    def from_dict(cls, data):
        schema.validate(data, "market")
        data = dict(data)
        data.pop("schema", None)
        return cls(**data)


def seasonal(config, t):
    """Return seasonal term of every asset at period `t`

    A sinusoid per asset, phase shifted by i / N of a cycle.

    """

    if config.seasonal_amplitude == 0:
        return numpy.zeros(config.n_assets)

    phase = (t / float(config.seasonal_period) +
             numpy.arange(config.n_assets) / float(config.n_assets))
    return config.seasonal_amplitude * numpy.sin(2 * math.pi * phase)


def _sample_period(config, rng):
    """Return (means, covariance) of one GBM resample"""
    n = config.n_assets

    # Correlated Brownian increments with unit variance
    mixing = rng.normal(size=(n, n))
    mixing /= numpy.linalg.norm(mixing, axis=1, keepdims=True)
    noise = rng.standard_normal((config.n_increments, n)) @ mixing.T

    vols = config.volatility * rng.uniform(0.5, 1.5, n)
    drifts = rng.normal(0.0, 0.25 * config.volatility, n)

    log_returns = (drifts - 0.5 * vols ** 2) + vols * noise

    means = log_returns.mean(axis=0)
    covariance = numpy.atleast_2d(numpy.cov(log_returns, rowvar=False))
    return means, (covariance + covariance.T) / 2


def generate_scenario(config):
    """Return market scenario sampled from `config`

    Example:
        >>> scenario = generate_scenario(MarketConfig(4, horizon=2,
        ...                                           drift=0.005))
        >>> numpy.allclose(scenario.mu.mean(axis=1), 0.005, atol=1e-12)
        True

    """

    rng = numpy.random.default_rng(config.seed)

    mu = numpy.empty((config.horizon, config.n_assets))
    sigma = numpy.empty((config.horizon, config.n_assets, config.n_assets))

    for t in range(config.horizon):
        means, covariance = _sample_period(config, rng)
        mu[t] = means - means.mean() + config.drift + seasonal(config, t)
        sigma[t] = covariance

    scenario = MarketScenario(mu, sigma)

    if config.risk_free_return is not None:
        scenario = add_risk_free(scenario,
                                 config.risk_free_return,
                                 config.risk_free_index)

    _log.debug("Generated %r from seed %d" % (scenario, config.seed))
    return scenario


def add_risk_free(scenario, rate, asset_index):
    """Return copy of `scenario` with a risk free asset

    The asset returns `rate` in every period and has zero covariance
    with everything, itself included.

    Example:
        >>> scenario = MarketScenario([0.02, 0.03], [[0.04, 0.01],
        ...                                          [0.01, 0.09]])
        >>> riskless = add_risk_free(scenario, 0.01, 1)
        >>> riskless.mu.tolist(), riskless.sigma[0].tolist()
        ([[0.02, 0.01]], [[0.04, 0.0], [0.0, 0.0]])

    """

    if not 0 <= asset_index < scenario.n_assets:
        raise ValueError("Asset index %d outside [0, %d)"
                         % (asset_index, scenario.n_assets))

    mu = numpy.array(scenario.mu)
    sigma = numpy.array(scenario.sigma)

    mu[:, asset_index] = rate
    sigma[:, asset_index, :] = 0.0
    sigma[:, :, asset_index] = 0.0

    return MarketScenario(mu, sigma)


def is_psd(matrix, tol=1e-10):
    """Return whether symmetric `matrix` has no eigenvalue below -tol

    Example:
        >>> is_psd([[1.0, 0.0], [0.0, 0.0]]), is_psd([[0.0, 1.0], [1.0, 0.0]])
        (True, False)

    """

    matrix = numpy.asarray(matrix, dtype=float)
    return bool(numpy.linalg.eigvalsh(matrix).min() >= -tol)
