"""Fully connected Ising problems

An Ising problem over spins s in {-1, +1}^n has the energy

    E(s) = -1/2 sum_ij J_ij s_i s_j + sum_i h_i s_i

with J symmetric and zero on the diagonal. Problems are dense; every
instance this package produces is fully connected.

Spin configurations are addressed by an integer code in which spin 0
is the most significant bit and a set bit means +1. Ordering codes as
integers therefore orders spin vectors lexicographically, -1 before +1.

"""

import json
import logging
import concurrent.futures

import numpy

from . import lib, schema

_log = logging.getLogger("sbfolio")

# Exhaustive enumeration bound, in spins
MAX_ENUMERATION = 26

# Spins enumerated as one vectorised block per Gray code step
_BLOCK_BITS = 12

# Relative tolerance below which two energies are considered tied
_TIE_TOLERANCE = 1e-10


class IsingProblem(object):
    """Immutable Ising problem

    The constructor symmetrizes `J` via (J + J^T) / 2 and moves its
    diagonal into `offset`; with s_i^2 = 1 the diagonal only ever
    contributes the constant -1/2 trace(J).

    Arguments:
        J (array-like): n x n coupling matrix
        h (array-like, optional): Field of length n, defaults to zeros
        offset (float, optional): Constant carried by :func:`total_energy`

    Example:
        >>> problem = IsingProblem([[2, 1], [0, 2]], [0.5, 0])
        >>> problem.J.tolist()
        [[0.0, 0.5], [0.5, 0.0]]
        >>> problem.offset
        -2.0

    """

    def __init__(self, J, h=None, offset=0.0):
        J = numpy.array(J, dtype=float)

        if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] < 1:
            raise ValueError("J must be a non-empty square matrix, got "
                             "shape %s" % (J.shape,))

        n = J.shape[0]
        h = numpy.zeros(n) if h is None else numpy.array(h, dtype=float)

        if h.shape != (n,):
            raise ValueError("h must have length %d, got shape %s"
                             % (n, h.shape))

        if not (numpy.all(numpy.isfinite(J)) and
                numpy.all(numpy.isfinite(h)) and
                numpy.isfinite(offset)):
            raise ValueError("Ising problem contains non-finite values")

        J = (J + J.T) / 2
        offset = float(offset) - 0.5 * float(numpy.trace(J))
        numpy.fill_diagonal(J, 0.0)

        J = numpy.ascontiguousarray(J)
        J.flags.writeable = False
        h.flags.writeable = False

        self._J = J
        self._h = h
        self._offset = offset

    @property
    def n(self):
        return self._J.shape[0]

    @property
    def J(self):
        return self._J

    @property
    def h(self):
        return self._h

    @property
    def offset(self):
        return self._offset

    def scaled(self, factor):
        """Return copy with J, h and offset multiplied by `factor`"""
        return IsingProblem(self._J * factor,
                            self._h * factor,
                            self._offset * factor)

    def to_dict(self):
        return {
            "schema": schema.identifier("ising"),
            "n": self.n,
            "J": self._J.ravel().tolist(),
            "h": self._h.tolist(),
            "offset": self._offset,
        }

    @classmethod
    def from_dict(cls, data):
        schema.validate(data, "ising")
        schema.check_identifier(data, "ising")

        n = data["n"]
        if len(data["J"]) != n * n:
            raise ValueError("J has %d entries, expected %d"
                             % (len(data["J"]), n * n))

        J = numpy.array(data["J"], dtype=float).reshape(n, n)
        problem = cls(J, data["h"])

        # The stored offset already accounts for the dropped diagonal
        problem._offset = float(data.get("offset", 0.0))
        return problem

    def dump(self, fname):
        with open(fname, "w") as f:
            json.dump(self.to_dict(), f, indent=4)

    @classmethod
    def load(cls, fname):
        with open(fname) as f:
            return cls.from_dict(json.load(f))

    def __eq__(self, other):
        return (isinstance(other, IsingProblem) and
                numpy.array_equal(self._J, other._J) and
                numpy.array_equal(self._h, other._h) and
                self._offset == other._offset)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "IsingProblem(n=%d, offset=%g)" % (self.n, self._offset)


def check_spins(spins, n):
    """Return `spins` as a float array after checking shape and values

    Arguments:
        spins (array-like): One spin vector, or a 2-D array of rows
        n (int): Expected number of spins

    Raises:
        ValueError on dimension mismatch or entries other than -1 and +1

    Example:
        >>> check_spins([1, -1], 2).tolist()
        [1.0, -1.0]
        >>> check_spins([1, 0], 2)
        Traceback (most recent call last):
        ...
        ValueError: Spins must be exactly -1 or +1

    """

    spins = numpy.asarray(spins, dtype=float)

    if spins.shape[-1:] != (n,) or spins.ndim > 2:
        raise ValueError("Expected spins of length %d, got shape %s"
                         % (n, spins.shape))

    if not numpy.all(numpy.abs(spins) == 1):
        raise ValueError("Spins must be exactly -1 or +1")

    return spins


def energy(problem, spins):
    """Return the Ising energy of `spins`

    Arguments:
        problem (IsingProblem): Problem to evaluate
        spins (array-like): Spin vector, or 2-D array with one per row

    Returns:
        float, or array of floats for 2-D input

    Example:
        >>> problem = IsingProblem([[0, 1], [1, 0]])
        >>> energy(problem, [1, 1])
        -1.0
        >>> energy(problem, [[1, 1], [1, -1]]).tolist()
        [-1.0, 1.0]

    """

    spins = check_spins(spins, problem.n)
    local = spins @ problem.J
    values = -0.5 * numpy.sum(local * spins, axis=-1) + spins @ problem.h

    if spins.ndim == 1:
        return float(values)

    return values


def total_energy(problem, spins):
    """Return :func:`energy` plus the constant offset of `problem`"""
    return energy(problem, spins) + problem.offset


def from_qubo(Q, q=None, constant=0.0):
    """Return the Ising problem of minimising b^T Q b + q^T b + constant

    Substituting b = (s + 1) / 2 yields J = -Q off the diagonal and
    h = Q 1 + q, with every energy doubled:

        total_energy(s) == 2 * (b^T Q b + q^T b + constant)

    Arguments:
        Q (array-like): n x n quadratic term, symmetrized internally
        q (array-like, optional): Linear term of length n
        constant (float, optional): Constant term

    Example:
        >>> problem = from_qubo([[1.0, -2.0], [-2.0, 3.0]], [0.5, 0.0])
        >>> b = numpy.array([1, 1])
        >>> total_energy(problem, 2 * b - 1)
        1.0
        >>> float(2 * (b @ numpy.array([[1.0, -2.0], [-2.0, 3.0]]) @ b + 0.5))
        1.0

    """

    Q = numpy.array(Q, dtype=float)
    Q = (Q + Q.T) / 2
    n = Q.shape[0]
    q = numpy.zeros(n) if q is None else numpy.asarray(q, dtype=float)

    ones = numpy.ones(n)

    # The constructor adds -1/2 trace(-Q) for the dropped diagonal
    offset = 0.5 * ones @ Q @ ones + q.sum() + 2 * constant

    return IsingProblem(-Q, Q @ ones + q, offset)


def random_problem(n, seed=0, field=False):
    """Return problem with couplings uniform in [-1, 1]

    Arguments:
        n (int): Number of spins
        seed (int, optional): Seed of the generator
        field (bool, optional): Draw h uniform in [-1, 1] as well,
            defaults to a zero field.

    """

    rng = numpy.random.default_rng(seed)
    upper = numpy.triu(rng.uniform(-1.0, 1.0, size=(n, n)), 1)
    h = rng.uniform(-1.0, 1.0, size=n) if field else None
    return IsingProblem(upper + upper.T, h)


def spins_from_code(code, n):
    """Return spin vector of integer `code`

    Example:
        >>> spins_from_code(1, 3).tolist()
        [-1.0, -1.0, 1.0]

    """

    shifts = numpy.arange(n - 1, -1, -1, dtype=numpy.int64)
    bits = (numpy.int64(code) >> shifts) & 1
    return 2.0 * bits - 1.0


def code_from_spins(spins):
    """Return integer code of `spins`

    Example:
        >>> code_from_spins([-1, 1, 1])
        3

    """

    code = 0
    for spin in spins:
        code = (code << 1) | int(spin > 0)
    return code


def _split(n):
    low = min(n, _BLOCK_BITS)
    return n - low, low


def enumeration_size(problem):
    """Return number of Gray code steps used to enumerate `problem`"""
    high, _ = _split(problem.n)
    return 2 ** high


def enumerate_energies(problem, start=0, stop=None):
    """Yield (codes, energies) covering every configuration once

    The leading spins of `problem` are walked in Gray code order, one
    flip per step, while the trailing spins are evaluated as a block of
    all their configurations at once. Each step updates the block
    energies in O(n) plus a single matrix-vector product.

    Arguments:
        problem (IsingProblem): Problem to enumerate
        start (int, optional): First Gray code step, defaults to 0
        stop (int, optional): One past the last step, defaults to
            :func:`enumeration_size`

    Raises:
        ValueError when the problem exceeds MAX_ENUMERATION spins

    """

    if problem.n > MAX_ENUMERATION:
        raise ValueError("Cannot enumerate %d spins, the bound is %d"
                         % (problem.n, MAX_ENUMERATION))

    high, low = _split(problem.n)
    stop = 2 ** high if stop is None else stop

    J, h = problem.J, problem.h
    J_hh, J_lh, J_ll = J[:high, :high], J[high:, :high], J[high:, high:]
    h_h, h_l = h[:high], h[high:]

    block = 2.0 * lib.bit_table(low) - 1.0
    block_energies = (-0.5 * numpy.sum((block @ J_ll) * block, axis=1) +
                      block @ h_l)
    low_codes = numpy.arange(2 ** low, dtype=numpy.int64)

    # State of the leading spins at step `start`
    s_h = spins_from_code(lib.to_gray_code(start), high)
    field = J_hh @ s_h
    coupling = -(J_lh @ s_h)
    constant = -0.5 * s_h @ field + h_h @ s_h

    for step in range(start, stop):
        if step > start:
            i = high - 1 - lib.flipped_bit(step)
            change = -2.0 * s_h[i]
            constant += change * (h_h[i] - field[i])
            field += J_hh[:, i] * change
            coupling -= J_lh[:, i] * change
            s_h[i] = -s_h[i]

        codes = (numpy.int64(lib.to_gray_code(step)) << low) + low_codes
        yield codes, block_energies + block @ coupling + constant


def partition(size, threads):
    """Return `threads` contiguous (start, stop) ranges covering `size`

    Example:
        >>> partition(10, 3)
        [(0, 4), (4, 7), (7, 10)]

    """

    threads = max(1, min(threads, size))
    bounds = numpy.linspace(0, size, threads + 1)
    bounds = numpy.ceil(bounds).astype(int).tolist()
    return list(zip(bounds[:-1], bounds[1:]))


def _is_tie(a, b):
    return abs(a - b) <= _TIE_TOLERANCE * (1.0 + abs(a) + abs(b))


def _merge(best, candidate):
    """Keep lowest energy, and lowest code among ties"""
    if best is None:
        return candidate
    if _is_tie(candidate[0], best[0]):
        return min(best[0], candidate[0]), min(best[1], candidate[1])
    return candidate if candidate[0] < best[0] else best


def _scan_minimum(problem, start, stop):
    best = None
    for codes, energies in enumerate_energies(problem, start, stop):
        lowest = energies.min()
        tied = energies <= lowest + _TIE_TOLERANCE * (1.0 + 2 * abs(lowest))
        best = _merge(best, (float(lowest), int(codes[tied].min())))
    return best


def brute_force_ground_state(problem, threads=1):
    """Return exact ground state of `problem` and its energy

    Ties are broken towards the lowest lexicographic spin vector,
    with -1 ordered before +1. The result does not depend on `threads`.

    Arguments:
        problem (IsingProblem): Problem with at most MAX_ENUMERATION spins
        threads (int, optional): Worker threads, defaults to 1

    Raises:
        ValueError when the problem exceeds MAX_ENUMERATION spins

    Example:
        >>> problem = IsingProblem([[0, -1], [-1, 0]])
        >>> spins, value = brute_force_ground_state(problem)
        >>> spins.tolist(), value
        ([-1.0, 1.0], -1.0)

    """

    if problem.n > MAX_ENUMERATION:
        raise ValueError("Cannot enumerate %d spins, the bound is %d"
                         % (problem.n, MAX_ENUMERATION))

    ranges = partition(enumeration_size(problem), threads)

    with concurrent.futures.ThreadPoolExecutor(len(ranges)) as pool:
        results = list(pool.map(
            lambda bounds: _scan_minimum(problem, *bounds), ranges))

    best = None
    for result in results:
        best = _merge(best, result)

    spins = spins_from_code(best[1], problem.n)
    _log.debug("Ground state of %r: %g" % (problem, best[0]))

    # Recompute from scratch, free of incremental rounding
    return spins, energy(problem, spins)
