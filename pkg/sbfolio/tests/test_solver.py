"""Test solver.py"""

import math

import numpy
import pytest

from sbfolio import ising, solver
from sbfolio.solver import SBParams, OscillatorState

# Coarse but reliable dynamics for small problems
FAST = SBParams(pump_step=0.01, dt=0.05)


def test_params_validation():
    """Parameters outside their domain are rejected"""
    for changes in ({"kerr": 0},
                    {"dt": -0.1},
                    {"pump_step": 0},
                    {"xi0": 0.0},
                    {"detuning": 0.0},
                    {"detuning": [1.0, -1.0]},
                    {"p_max": 1.0, "detuning": 1.0},
                    {"init_scale": -1},
                    {"settle_damping": -0.5},
                    {"trace_every": 0}):
        with pytest.raises(ValueError):
            SBParams(**changes)


def test_params_serialisation():
    params = SBParams(detuning=[1.0, 1.5], xi0=0.2, seed=4)
    assert SBParams.from_dict(params.to_dict()) == params


def test_pump_schedule():
    params = SBParams(pump_step=0.01, dt=1.0, p_max=1.0, detuning=0.5)

    assert solver.pump_schedule(params, 0) == 0.0
    assert solver.pump_schedule(params, 50) == 0.5
    assert solver.pump_schedule(params, 101) == 1.0
    assert solver.pump_schedule(params, 10 ** 6) == 1.0


def test_a_of_p():
    params = SBParams(kerr=1.0, detuning=1.0, p_max=6.0)

    assert solver.a_of_p(params, 0.0) == 0.0
    assert solver.a_of_p(params, 1.0) == 0.0
    assert solver.a_of_p(params, 5.0) == 2.0


def test_step_counts():
    params = SBParams(pump_step=0.01, dt=0.01, p_max=2.0,
                      settle_fraction=0.1)

    assert params.ramp_steps == 20000
    assert params.settle_steps == 2000
    assert params.total_steps == 22000


def test_classical_hamiltonian():
    problem = ising.IsingProblem([[0.0]])
    params = SBParams()

    vacuum = OscillatorState(numpy.zeros(1), numpy.zeros(1))
    assert solver.classical_hamiltonian(problem, vacuum, params) == 0.0

    state = OscillatorState(numpy.array([1.0]), numpy.array([0.0]))
    assert solver.classical_hamiltonian(problem, state, params) == 0.75

    with pytest.raises(ValueError):
        solver.classical_hamiltonian(
            problem, OscillatorState(numpy.zeros(2), numpy.zeros(2)), params)


def test_bifurcation_fixed_point():
    """Without couplings every amplitude settles on sqrt((p - delta) / K)"""
    problem = ising.IsingProblem(numpy.zeros((6, 6)))
    params = SBParams(kerr=1.0, detuning=1.0, p_max=2.0)

    result = solver.evolve(problem, params)
    amplitude = numpy.abs(result.x)

    print("Final amplitudes: %s" % amplitude)
    assert numpy.all(numpy.abs(amplitude - 1.0) < 0.01), amplitude
    assert not result.diverged
    assert result.steps_taken == params.total_steps


def test_bifurcation_fixed_point_per_oscillator():
    """Each oscillator settles on its own detuning"""
    problem = ising.IsingProblem(numpy.zeros((3, 3)))
    params = SBParams(detuning=[0.5, 1.0, 1.5], p_max=2.0)

    result = solver.evolve(problem, params)
    expected = numpy.sqrt(2.0 - numpy.array([0.5, 1.0, 1.5]))

    assert numpy.all(numpy.abs(numpy.abs(result.x) / expected - 1) < 0.01)


def test_ferromagnetic_pair():
    problem = ising.IsingProblem([[0, 1], [1, 0]])

    for seed in range(5):
        result = solver.evolve(problem, FAST.replace(seed=seed))
        assert result.spins[0] == result.spins[1], seed
        assert result.energy == ising.energy(problem, result.spins)


def test_ground_state_recovery():
    """Best of 10 seeds finds the exact ground state of 12 spins"""
    matches = 0

    for seed in range(3):
        problem = ising.random_problem(12, seed=100 + seed)
        _, exact = ising.brute_force_ground_state(problem)
        result = solver.solve(problem, FAST, restarts=10)

        print("Problem %d: %g vs %g" % (seed, result.energy, exact))
        matches += abs(result.energy - exact) < 1e-9

    assert matches >= 2, "Only %d of 3 ground states found" % matches


def test_symplectic_conservation():
    """Frozen pump keeps the classical energy within bounds"""
    problem = ising.random_problem(10, seed=12)
    params = SBParams(dt=0.01)
    delta = params.detuning_vector(problem.n)
    xi0 = 0.1

    rng = numpy.random.default_rng(0)
    x = rng.uniform(-0.1, 0.1, problem.n)
    y = rng.uniform(-0.1, 0.1, problem.n)

    def hamiltonian(x, y):
        return solver.classical_hamiltonian(
            problem, OscillatorState(x, y, p=0.0), params, xi0=xi0)

    initial = hamiltonian(x, y)
    worst = 0.0

    for step in range(1, 10001):
        x, y = solver.symplectic_step(problem, params, x, y, 0.0,
                                      xi0=xi0, detuning=delta)
        if step % 50 == 0:
            worst = max(worst, abs(hamiltonian(x, y) - initial))

    print("H(0) = %g, max drift %g" % (initial, worst))
    assert worst <= 0.05 * abs(initial) + 0.05


def test_determinism():
    """Identical inputs give bit-identical results across threads"""
    problem = ising.random_problem(10, seed=13, field=True)

    single = solver.solve(problem, FAST, restarts=4, threads=1)
    multi = solver.solve(problem, FAST, restarts=4, threads=4)

    assert single.spins.tolist() == multi.spins.tolist()
    assert single.energy == multi.energy
    assert single.energies == multi.energies
    assert single.seed == multi.seed
    assert numpy.array_equal(single.x, multi.x)


def test_sign_symmetry():
    """Without a field, negating the start negates the outcome"""
    problem = ising.random_problem(8, seed=14)
    rng = numpy.random.default_rng(1)
    x = rng.uniform(-0.1, 0.1, 8)
    y = rng.uniform(-0.1, 0.1, 8)

    positive = solver.evolve(problem, FAST, initial=(x, y))
    negative = solver.evolve(problem, FAST, initial=(-x, -y))

    assert negative.spins.tolist() == (-positive.spins).tolist()


def test_sign_symmetry_with_uncoupled_spin():
    """A spin without couplings or field follows its own oscillator"""
    J = numpy.zeros((3, 3))
    J[0, 1] = J[1, 0] = 1.0
    problem = ising.IsingProblem(J)

    x = numpy.array([0.05, -0.02, 0.07])
    y = numpy.array([-0.01, 0.03, 0.02])

    positive = solver.evolve(problem, FAST, initial=(x, y))
    negative = solver.evolve(problem, FAST, initial=(-x, -y))

    print("%s vs %s" % (positive.spins, negative.spins))
    assert negative.spins.tolist() == (-positive.spins).tolist()


def test_restart_seeds():
    """Restart r runs with seed + r and the best is reported"""
    problem = ising.random_problem(6, seed=15, field=True)
    params = FAST.replace(seed=20)

    result = solver.solve(problem, params, restarts=3)

    assert len(result.energies) == 3
    assert result.energy == min(result.energies)
    assert result.seed == 20 + result.energies.index(result.energy)

    with pytest.raises(ValueError):
        solver.solve(problem, params, restarts=0)


def test_trace():
    """Trace starts within the initial box and ends at the result"""
    problem = ising.random_problem(5, seed=16)
    params = FAST.replace(record_trace=True, trace_every=100)

    result = solver.evolve(problem, params,
                           objective=lambda spins: float(spins.sum()))
    frame = solver.trace_frame(result)

    assert list(frame.columns) == solver.TRACE_COLUMNS
    assert frame["step"].iloc[0] == 0
    assert frame["mean_abs_x"].iloc[0] <= params.init_scale
    assert frame["step"].iloc[-1] == params.total_steps
    assert frame["energy"].iloc[-1] == result.energy
    assert frame["objective"].iloc[-1] == result.spins.sum()
    assert frame["p"].iloc[-1] == params.p_max

    with pytest.raises(ValueError):
        solver.trace_frame(solver.evolve(problem, FAST))


def test_divergence_flag():
    """Amplitudes beyond the bound flag the run, spins are still read"""
    problem = ising.IsingProblem([[0.0, 1.0], [1.0, 0.0]])
    params = FAST.replace(xi0=50.0)

    result = solver.evolve(problem, params)

    bound = 10 * math.sqrt(params.p_max / params.kerr)
    if numpy.any(numpy.abs(result.x) > bound):
        assert result.diverged
    assert set(result.spins.tolist()) <= {-1.0, 1.0}


def test_brief_excursion_flags_divergence():
    """A single step beyond the bound is enough"""
    problem = ising.IsingProblem([[0.0, 1.0], [1.0, 0.0]])

    def advance(x, y, step, xi0, delta, damping):
        x = numpy.full(2, 100.0) if step == 1 else numpy.full(2, 0.5)
        return x, y

    result = solver._run(problem, FAST, advance, None, None)

    assert result.diverged
    assert numpy.all(numpy.abs(result.x) < 1.0)


def test_non_finite_state_aborts():
    problem = ising.IsingProblem([[0.0, 1.0], [1.0, 0.0]])
    params = SBParams(dt=10.0, pump_step=0.01)

    with pytest.raises(RuntimeError):
        solver.evolve(problem, params, initial=([1e200, 1e200], [0.0, 0.0]))


def test_full_dynamics_fixed_point():
    """The unsimplified dynamics settle on the same fixed point"""
    problem = ising.IsingProblem(numpy.zeros((4, 4)))
    params = SBParams(detuning=1.0, p_max=2.0)

    result = solver.evolve_full(problem, params)

    print("x = %s, y = %s" % (result.x, result.y))
    assert numpy.all(numpy.abs(numpy.abs(result.x) - 1.0) < 0.05)
    assert numpy.all(numpy.abs(result.y) < 0.05)


def test_full_dynamics_ferromagnetic_pair():
    problem = ising.IsingProblem([[0, 1], [1, 0]])

    for seed in range(3):
        result = solver.evolve_full(problem, FAST.replace(seed=seed))
        assert result.spins[0] == result.spins[1], seed


def test_full_dynamics_agree():
    """Both integrators reach the exact ground state of a small problem"""
    problem = ising.random_problem(8, seed=17)
    _, exact = ising.brute_force_ground_state(problem)

    simple = solver.solve(problem, FAST, restarts=10)
    full = solver.solve(problem, FAST, restarts=10,
                        integrator=solver.evolve_full)

    print("exact %g, symplectic %g, full %g"
          % (exact, simple.energy, full.energy))
    assert abs(simple.energy - exact) < 1e-9
    assert abs(full.energy - exact) < 1e-9


def test_field_dominated_problem():
    """A pure field problem aligns every spin against its field"""
    h = numpy.array([0.3, -0.5, 0.4, -0.6])
    problem = ising.IsingProblem(numpy.zeros((4, 4)), h)

    result = solver.evolve(problem, FAST)

    assert result.spins.tolist() == (-numpy.sign(h)).tolist()


def test_uncoupled_spins_follow_their_field():
    """Spins without couplings are read from the field alone"""
    J = numpy.zeros((3, 3))
    J[0, 1] = J[1, 0] = 1.0
    problem = ising.IsingProblem(J, [0.0, 0.0, -1e-6])

    spins = solver.read_spins(problem, numpy.array([-0.5, -0.4, -0.1]))
    assert spins.tolist() == [-1.0, -1.0, 1.0]

    for seed in range(3):
        result = solver.evolve(problem, FAST.replace(seed=seed))
        assert result.spins[2] == 1.0, seed

    # Without a field the oscillator decides
    problem = ising.IsingProblem(numpy.zeros((2, 2)), [0.0, 0.5])
    spins = solver.read_spins(problem, numpy.array([-0.3, 0.3]))
    assert spins.tolist() == [-1.0, -1.0]


def test_local_descent():
    """No single or pair flip improves on a descended spin vector"""
    problem = ising.random_problem(10, seed=18, field=True)
    rng = numpy.random.default_rng(2)
    start = rng.choice([-1.0, 1.0], problem.n)

    spins = solver.local_descent(problem, start)
    energy = ising.energy(problem, spins)

    assert energy <= ising.energy(problem, start)

    for i in range(problem.n):
        for j in range(i, problem.n):
            neighbour = spins.copy()
            neighbour[[i, j]] *= -1
            assert ising.energy(problem, neighbour) >= energy - 1e-12, (i, j)


def test_local_descent_leaves_ground_state():
    problem = ising.random_problem(8, seed=19, field=True)
    ground, _ = ising.brute_force_ground_state(problem)

    spins = solver.local_descent(problem, ground)
    assert spins.tolist() == numpy.asarray(ground, dtype=float).tolist()


def test_solve_with_polish():
    """Descending from every restart never does worse"""
    problem = ising.random_problem(12, seed=20, field=True)

    plain = solver.solve(problem, FAST, restarts=3)
    polished = solver.solve(problem, FAST, restarts=3, polish=True)

    print("plain %g, polished %g" % (plain.energy, polished.energy))
    assert polished.energy <= plain.energy
    assert polished.energy == ising.energy(problem, polished.spins)
    assert all(a <= b for a, b in zip(polished.energies, plain.energies))
