"""Simulated bifurcation of Kerr parametric oscillator networks

Each spin of an Ising problem is represented by an oscillator with
position x_i and momentum y_i. The pump amplitude p is ramped from zero
past the detuning, at which point every oscillator bifurcates into one
of two branches; the sign of x_i is read off as the spin.

The main integrator, :func:`evolve`, runs the simplified separable
dynamics with symplectic Euler. :func:`evolve_full` integrates the
unsimplified equations of motion for cross-validation, and
:func:`classical_hamiltonian` evaluates the energy those equations derive
from.

"""

import sys
import math
import time
import logging
import dataclasses
import concurrent.futures

import numpy
import pandas

from . import ising, schema

self = sys.modules[__name__]
self.log = logging.getLogger("sbfolio")

# Steps between checks for non-finite state
_CHECK_EVERY = 64

TRACE_COLUMNS = ["step", "t", "p", "mean_abs_x", "mean_abs_y",
                 "energy", "objective"]


def _ceil(value):
    """Ceiling that ignores rounding noise in `value`

    Example:
        >>> _ceil(2.0 / (0.01 * 0.01)), _ceil(10.2)
        (20000, 11)

    """

    nearest = round(value)
    if abs(value - nearest) <= 1e-9 * max(1.0, abs(value)):
        return int(nearest)
    return int(math.ceil(value))


@dataclasses.dataclass(frozen=True)
class SBParams(object):
    """Knobs of the bifurcation dynamics

    Attributes:
        kerr (float): Kerr coefficient K
        detuning (float or tuple): Detuning, uniform or per oscillator
        xi0 (float or None): Coupling scale, None for :func:`default_xi0`
        pump_step (float): Pump increment per unit simulated time
        p_max (float): Final pump amplitude
        dt (float): Time increment
        init_scale (float): Half width of the uniform initial x and y
        seed (int): Seed of the initial state
        record_trace (bool): Record a trace while evolving
        trace_every (int): Steps between trace samples
        settle_fraction (float): Settle steps at p_max, as a fraction
            of ramp steps
        settle_damping (float): Momentum damping rate while settling,
            0 keeps the settle phase Hamiltonian

    """

    kerr: float = 1.0
    detuning: object = 1.0
    xi0: object = None
    pump_step: float = 0.01
    p_max: float = 2.0
    dt: float = 0.01
    init_scale: float = 0.1
    seed: int = 0
    record_trace: bool = False
    trace_every: int = 1
    settle_fraction: float = 0.1
    settle_damping: float = 1.0

    def __post_init__(self):
        if isinstance(self.detuning, (list, tuple, numpy.ndarray)):
            object.__setattr__(self, "detuning",
                               tuple(float(d) for d in self.detuning))

        for key in ("kerr", "pump_step", "p_max", "dt"):
            if not getattr(self, key) > 0:
                raise ValueError("%s must be positive, got %r"
                                 % (key, getattr(self, key)))

        if self.xi0 is not None and not self.xi0 > 0:
            raise ValueError("xi0 must be positive, got %r" % self.xi0)

        detuning = numpy.atleast_1d(self.detuning)
        if detuning.size == 0 or not numpy.all(detuning > 0):
            raise ValueError("Detuning must be positive, got %r"
                             % (self.detuning,))

        if not self.p_max > detuning.max():
            raise ValueError("p_max (%g) must exceed the largest detuning "
                             "(%g) for the oscillators to bifurcate"
                             % (self.p_max, detuning.max()))

        for key in ("init_scale", "settle_fraction", "settle_damping"):
            if not getattr(self, key) >= 0:
                raise ValueError("%s must be non-negative, got %r"
                                 % (key, getattr(self, key)))

        if self.trace_every < 1:
            raise ValueError("trace_every must be at least 1")

    def detuning_vector(self, n):
        detuning = numpy.atleast_1d(numpy.asarray(self.detuning, float))

        if detuning.size == 1:
            return numpy.full(n, detuning[0])

        if detuning.size != n:
            raise ValueError("Detuning has %d entries for %d oscillators"
                             % (detuning.size, n))

        return detuning

    @property
    def mean_detuning(self):
        return float(numpy.mean(self.detuning))

    @property
    def ramp_steps(self):
        """Steps until the pump saturates at p_max

        Example:
            >>> SBParams(pump_step=0.01, dt=0.01, p_max=2.0).ramp_steps
            20000

        """

        return _ceil(self.p_max / (self.pump_step * self.dt))

    @property
    def settle_steps(self):
        return _ceil(self.settle_fraction * self.ramp_steps)

    @property
    def total_steps(self):
        return self.ramp_steps + self.settle_steps

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        data = dataclasses.asdict(self)
        if isinstance(self.detuning, tuple):
            data["detuning"] = list(self.detuning)
        data["schema"] = schema.identifier("params")
        return data

    @classmethod
    def from_dict(cls, data):
        schema.validate(data, "params")
        data = dict(data)
        data.pop("schema", None)
        return cls(**data)


@dataclasses.dataclass
class OscillatorState(object):
    """Positions, momenta, pump amplitude and time of a network"""

    x: numpy.ndarray
    y: numpy.ndarray
    p: float = 0.0
    t: float = 0.0


@dataclasses.dataclass
class SolveResult(object):
    """Outcome of one run, or the best of several

    Attributes:
        spins (numpy.ndarray): Spins read by :func:`read_spins`
        energy (float): Ising energy of `spins`
        steps_taken (int): Integration steps performed
        trace (list or None): Samples in TRACE_COLUMNS order
        diverged (bool): Whether any |x| left the divergence bound
        x (numpy.ndarray): Final positions
        y (numpy.ndarray): Final momenta
        seed (int): Seed of the run
        seconds (float): Wall time of the run
        energies (list or None): Energy per restart, from :func:`solve`

    """

    spins: numpy.ndarray
    energy: float
    steps_taken: int
    trace: object = None
    diverged: bool = False
    x: object = None
    y: object = None
    seed: int = 0
    seconds: float = 0.0
    energies: object = None


def pump_schedule(params, step_index):
    """Return pump amplitude after `step_index` steps

    A linear ramp of `pump_step` per unit time, saturating at p_max.

    Example:
        >>> params = SBParams(pump_step=0.01, dt=1.0, p_max=1.0,
        ...                   detuning=0.5)
        >>> pump_schedule(params, 0), pump_schedule(params, 50)
        (0.0, 0.5)
        >>> pump_schedule(params, 1000)
        1.0

    """

    if step_index < 0:
        raise ValueError("Step index must be non-negative")

    return _pump_at(params, step_index * params.dt)


def _pump_at(params, t):
    return min(params.pump_step * t, params.p_max)


def a_of_p(params, p):
    """Return field amplitude A at pump amplitude `p`

    Zero below the mean detuning, sqrt((p - detuning) / K) above it.

    Example:
        >>> params = SBParams(kerr=1.0, detuning=1.0, p_max=6.0)
        >>> a_of_p(params, 0.0), a_of_p(params, 1.0), a_of_p(params, 5.0)
        (0.0, 0.0, 2.0)

    """

    return math.sqrt(max(p - params.mean_detuning, 0.0) / params.kerr)


def default_xi0(problem, detuning):
    """Return the default coupling scale of `problem`

    0.5 * detuning / sqrt(n * sigma_J^2 + 4 * mean(h^2)), where sigma_J
    is the standard deviation of the off-diagonal couplings. Without a
    field this is 0.5 * detuning / (sigma_J * sqrt(n)); the field term
    keeps the forcing bounded when h dominates J.

    """

    n = problem.n
    mean_detuning = float(numpy.mean(detuning))

    if n > 1:
        off_diagonal = problem.J[~numpy.eye(n, dtype=bool)]
        sigma = float(numpy.std(off_diagonal))
    else:
        sigma = 0.0

    scale = math.sqrt(n * sigma ** 2 + 4 * float(numpy.mean(problem.h ** 2)))

    if scale == 0:
        # Nothing couples to the oscillators, any scale will do
        return 0.5 * mean_detuning / math.sqrt(n)

    return 0.5 * mean_detuning / scale


def _resolve(problem, params):
    delta = params.detuning_vector(problem.n)
    xi0 = params.xi0 if params.xi0 is not None else default_xi0(problem,
                                                                delta)
    return delta, xi0


def _initial_state(problem, params, initial):
    if initial is not None:
        x, y = initial
        x = numpy.array(x, dtype=float)
        y = numpy.array(y, dtype=float)

        if x.shape != (problem.n,) or y.shape != (problem.n,):
            raise ValueError("Initial state must have %d entries"
                             % problem.n)
        return x, y

    rng = numpy.random.default_rng(params.seed)
    scale = params.init_scale
    x = rng.uniform(-scale, scale, problem.n)
    y = rng.uniform(-scale, scale, problem.n)
    return x, y


def symplectic_step(problem, params, x, y, p, xi0=None,
                    detuning=None, damping=0.0):
    """Return (x, y) one symplectic Euler step later

    Position first with the old momentum, then momentum with the
    freshly updated position.

    Arguments:
        problem (IsingProblem): Problem being solved
        params (SBParams): Dynamics
        x, y (numpy.ndarray): Current positions and momenta
        p (float): Pump amplitude at the end of the step
        xi0 (float, optional): Coupling scale, defaults to params'
        detuning (numpy.ndarray, optional): Per-oscillator detuning
        damping (float, optional): Momentum damping rate

    """

    if xi0 is None or detuning is None:
        detuning, xi0 = _resolve(problem, params)

    dt = params.dt
    x = x + detuning * y * dt

    force = (params.kerr * x ** 3 + (detuning - p) * x -
             xi0 * (problem.J @ x) +
             2 * xi0 * a_of_p(params, p) * problem.h)

    y = y - (force + damping * y) * dt
    return x, y


def _full_derivatives(problem, params, x, y, p, xi0, detuning, damping):
    r = params.kerr * (x ** 2 + y ** 2)
    dx = (r + p + detuning) * y - 0.5 * xi0 * (problem.J @ y)
    dy = (-(r - p + detuning) * x + xi0 * (problem.J @ x) -
          2 * xi0 * a_of_p(params, p) * problem.h - damping * y)
    return dx, dy


def full_step(problem, params, x, y, t, xi0=None, detuning=None,
              damping=0.0):
    """Return (x, y) one explicit midpoint step of the full dynamics"""
    if xi0 is None or detuning is None:
        detuning, xi0 = _resolve(problem, params)

    dt = params.dt
    dx, dy = _full_derivatives(problem, params, x, y,
                               _pump_at(params, t), xi0, detuning, damping)

    xm = x + 0.5 * dt * dx
    ym = y + 0.5 * dt * dy
    dx, dy = _full_derivatives(problem, params, xm, ym,
                               _pump_at(params, t + 0.5 * dt),
                               xi0, detuning, damping)

    return x + dt * dx, y + dt * dy


def spins_of(x):
    """Return sign(x) with sign(0) = +1

    Example:
        >>> spins_of(numpy.array([0.3, 0.0, -2.0])).tolist()
        [1.0, 1.0, -1.0]

    """

    return numpy.where(x >= 0, 1.0, -1.0)


def read_spins(problem, x, uncoupled=None):
    """Return spins of positions `x`

    Spins without any coupling but with a field take -sign(h), which
    is their exact optimum; the rest take sign(x).

    Example:
        >>> problem = ising.IsingProblem(numpy.zeros((2, 2)), [0.5, 0.0])
        >>> read_spins(problem, numpy.array([0.3, 0.2])).tolist()
        [-1.0, 1.0]

    """

    if uncoupled is None:
        uncoupled = ~numpy.any(problem.J, axis=1)

    fixed = uncoupled & (problem.h != 0)

    spins = spins_of(x)
    spins[fixed] = numpy.where(problem.h[fixed] < 0, 1.0, -1.0)
    return spins


def _sample(problem, step, t, p, x, y, objective, uncoupled):
    spins = read_spins(problem, x, uncoupled)
    value = objective(spins) if objective is not None else float("nan")
    return (step, t, p,
            float(numpy.mean(numpy.abs(x))),
            float(numpy.mean(numpy.abs(y))),
            ising.energy(problem, spins),
            value)


def _run(problem, params, advance, objective, initial):
    """Shared driver of both integrators"""
    started = time.time()

    delta, xi0 = _resolve(problem, params)
    x, y = _initial_state(problem, params, initial)

    ramp = params.ramp_steps
    total = params.total_steps
    bound = 10 * math.sqrt(params.p_max / params.kerr)

    trace = list() if params.record_trace else None
    diverged = False
    uncoupled = ~numpy.any(problem.J, axis=1)

    if trace is not None:
        trace.append(_sample(problem, 0, 0.0, 0.0, x, y,
                             objective, uncoupled))

    for step in range(1, total + 1):
        damping = params.settle_damping if step > ramp else 0.0
        x, y = advance(x, y, step, xi0, delta, damping)

        if not diverged and numpy.abs(x).max() > bound:
            diverged = True
            self.log.warning("Oscillators diverged at step %d "
                             "(|x| > %g)" % (step, bound))

        if step % _CHECK_EVERY == 0 or step == total:
            if not (numpy.all(numpy.isfinite(x)) and
                    numpy.all(numpy.isfinite(y))):
                index = int(numpy.flatnonzero(
                    ~(numpy.isfinite(x) & numpy.isfinite(y)))[0])
                raise RuntimeError(
                    "Non-finite oscillator state at step %d "
                    "(t=%g, p=%g), oscillator %d; reduce dt or pump_step"
                    % (step, step * params.dt,
                       pump_schedule(params, step), index))

        if trace is not None and (step % params.trace_every == 0 or
                                  step == total):
            trace.append(_sample(problem, step, step * params.dt,
                                 pump_schedule(params, step),
                                 x, y, objective, uncoupled))

    spins = read_spins(problem, x, uncoupled)

    return SolveResult(
        spins=spins,
        energy=ising.energy(problem, spins),
        steps_taken=total,
        trace=trace,
        diverged=diverged,
        x=x,
        y=y,
        seed=params.seed,
        seconds=time.time() - started,
    )


def evolve(problem, params, objective=None, initial=None):
    """Drive `problem` towards its ground state with symplectic Euler

    Once the pump saturates, momenta are damped at `settle_damping`.
    Amplitudes reach sqrt((p_max - detuning) / K) to within 1% only
    with damping; with `settle_damping=0` they keep oscillating about
    it, several percent off.

    Arguments:
        problem (IsingProblem): Problem to solve
        params (SBParams): Dynamics
        objective (callable, optional): Maps spins to a value recorded
            in the trace, such as a portfolio value
        initial (tuple, optional): Initial (x, y), in place of the
            seeded uniform start

    Returns:
        SolveResult

    Raises:
        RuntimeError on non-finite oscillator state

    """

    def advance(x, y, step, xi0, delta, damping):
        return symplectic_step(problem, params, x, y,
                               pump_schedule(params, step),
                               xi0, delta, damping)

    return _run(problem, params, advance, objective, initial)


def evolve_full(problem, params, objective=None, initial=None):
    """Like :func:`evolve`, integrating the full equations of motion

    The full pair is not separable, so the explicit midpoint rule is
    used in place of symplectic Euler.

    """

    def advance(x, y, step, xi0, delta, damping):
        return full_step(problem, params, x, y, (step - 1) * params.dt,
                         xi0, delta, damping)

    return _run(problem, params, advance, objective, initial)


def classical_hamiltonian(problem, state, params, xi0=None):
    """Return the classical energy of oscillator `state`

    Example:
        >>> problem = ising.IsingProblem([[0.0]])
        >>> state = OscillatorState(numpy.array([1.0]), numpy.array([0.0]))
        >>> classical_hamiltonian(problem, state, SBParams())
        0.75

    """

    x = numpy.asarray(state.x, dtype=float)
    y = numpy.asarray(state.y, dtype=float)

    if x.shape != (problem.n,) or y.shape != (problem.n,):
        raise ValueError("State must have %d entries, got %s and %s"
                         % (problem.n, x.shape, y.shape))

    if xi0 is None:
        delta, xi0 = _resolve(problem, params)
    else:
        delta = params.detuning_vector(problem.n)

    r = x ** 2 + y ** 2
    p = state.p

    local = numpy.sum(0.25 * params.kerr * r ** 2 -
                      0.5 * p * (x ** 2 - y ** 2) +
                      0.5 * delta * r)
    coupling = -0.5 * xi0 * (x @ problem.J @ x + y @ problem.J @ y)
    field = 2 * xi0 * a_of_p(params, p) * (problem.h @ x)

    return float(local + coupling + field)


def local_descent(problem, spins):
    """Return `spins` after greedy descent over single and pair flips

    Each pass applies the one flip, or pair of flips, lowering the
    energy the most, until no such move is left. Every spin vector
    returned is a local minimum with respect to flipping any one or
    two spins.

    Example:
        >>> problem = ising.IsingProblem([[0, 1], [1, 0]], [0.5, 0.5])
        >>> local_descent(problem, [1, 1]).tolist()
        [-1.0, -1.0]

    """

    spins = numpy.array(ising.check_spins(spins, problem.n), dtype=float)
    J, h = problem.J, problem.h

    scale = max(numpy.abs(J).max(initial=0.0), numpy.abs(h).max(initial=0.0))
    tolerance = 1e-12 * scale
    flips = 0

    while problem.n:
        single = 2 * spins * (J @ spins - h)

        pair = (single[:, None] + single[None, :] -
                4 * J * numpy.outer(spins, spins))
        numpy.fill_diagonal(pair, numpy.inf)

        i = int(numpy.argmin(single))
        j, k = numpy.unravel_index(int(numpy.argmin(pair)), pair.shape)

        if min(single[i], pair[j, k]) >= -tolerance:
            break

        if single[i] <= pair[j, k]:
            spins[i] *= -1
            flips += 1
        else:
            spins[[j, k]] *= -1
            flips += 2

    self.log.debug("Polished with %d flips" % flips)
    return spins


def solve(problem, params, restarts=1, threads=1, objective=None,
          integrator=evolve, polish=False):
    """Return the best of `restarts` independent runs

    Restart r is seeded with params.seed + r. The lowest energy wins,
    ties going to the lowest restart. Runs are isolated, such that the
    result does not depend on `threads`.

    Arguments:
        problem (IsingProblem): Problem to solve
        params (SBParams): Dynamics, including the base seed
        restarts (int, optional): Number of runs, defaults to 1
        threads (int, optional): Worker threads, defaults to 1
        objective (callable, optional): Passed on to the integrator
        integrator (callable, optional): :func:`evolve` or
            :func:`evolve_full`
        polish (bool, optional): Descend from the spins of every run
            with :func:`local_descent` before picking the best

    """

    if restarts < 1:
        raise ValueError("At least one restart is required")

    seeds = [params.seed + restart for restart in range(restarts)]

    def run(seed):
        result = integrator(problem, params.replace(seed=seed), objective)

        if polish:
            spins = local_descent(problem, result.spins)
            result = dataclasses.replace(
                result, spins=spins, energy=ising.energy(problem, spins))

        return result

    with concurrent.futures.ThreadPoolExecutor(max(1, threads)) as pool:
        results = list(pool.map(run, seeds))

    best = min(range(restarts), key=lambda r: (results[r].energy, r))
    energies = [result.energy for result in results]

    diverged = sum(result.diverged for result in results)
    if diverged:
        self.log.warning("%d of %d restarts diverged" % (diverged, restarts))

    self.log.debug("Best of %d restarts: seed %d, energy %g"
                   % (restarts, seeds[best], energies[best]))

    return dataclasses.replace(
        results[best],
        energies=energies,
        seconds=sum(result.seconds for result in results),
    )


def trace_frame(result):
    """Return the trace of `result` as a pandas DataFrame"""
    if result.trace is None:
        raise ValueError("Result has no trace, set record_trace")

    return pandas.DataFrame(result.trace, columns=TRACE_COLUMNS)
