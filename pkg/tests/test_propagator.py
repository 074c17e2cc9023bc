import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from qubitsync import (EvolutionConfig, Frame, FrameMismatch, QubitState, SystemParams,
                       ValidationError, build_dressed_frame, evolve, halve_step_convergence,
                       master_rhs)
from qubitsync.bath import MemoryCoefficients
from qubitsync.propagator import default_max_step
from oracles import master_rhs_literal, random_density_matrix


def random_inputs(rng):
    rho = random_density_matrix(rng)
    g = rng.normal(size=3) + 1j * rng.normal(size=3)
    delta, eps = rng.uniform(-3, 3), rng.uniform(0, 3)
    frame = build_dressed_frame(SystemParams(delta_detuning=delta, epsilon_drive=eps,
                                             omega_qubit=10.0))
    return rho, MemoryCoefficients(*g), frame


def test_closed_system_precession():
    rng = np.random.default_rng(1)
    rho = random_density_matrix(rng)
    frame = build_dressed_frame(SystemParams(delta_detuning=0.4, epsilon_drive=0.9))
    d = master_rhs(QubitState(rho, Frame.DRESSED), MemoryCoefficients.zero(), frame)
    assert_allclose(np.diag(d), 0, atol=1e-16)
    assert abs(d[0, 1]) == pytest.approx(frame.delta_rabi * abs(rho[0, 1]), rel=1e-14)


def test_rhs_matches_literal_pauli_products():
    rng = np.random.default_rng(2)
    for _ in range(100):
        rho, g, frame = random_inputs(rng)
        fast = master_rhs(QubitState(rho, Frame.DRESSED), g, frame)
        slow = master_rhs_literal(rho, g.gamma1, g.gamma2, g.gamma3, frame.delta_rabi,
                                  frame.p0, frame.p_plus, frame.p_minus)
        assert np.max(np.abs(fast - slow)) < 1e-13
        assert abs(np.trace(fast)) < 1e-13


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.floats(-2, 3))
def test_rhs_is_linear(seed, a):
    rng = np.random.default_rng(seed)
    rho1, g, frame = random_inputs(rng)
    rho2 = random_density_matrix(rng)
    b = 1 - a
    mix = a * rho1 + b * rho2

    def f(r):
        # bypass QubitState validation: affine mixtures need not be positive
        return master_rhs(QubitState(r, Frame.DRESSED), g, frame)

    assert np.max(np.abs(f(mix) - (a * f(rho1) + b * f(rho2)))) < 1e-13 * (1 + abs(a) + abs(b))


def test_rhs_needs_dressed_state():
    frame = build_dressed_frame(SystemParams())
    with pytest.raises(FrameMismatch):
        master_rhs(QubitState.plus(), MemoryCoefficients.zero(), frame)


def test_default_max_step():
    p = SystemParams(delta_detuning=1, epsilon_drive=1, lambda_cutoff=5, omega_qubit=5)
    assert default_max_step(p, 500) == pytest.approx(0.01 / (4 + np.sqrt(2)))
    assert default_max_step(p, 0.01) == pytest.approx(1e-4)


def test_config_validation():
    with pytest.raises(ValidationError):
        EvolutionConfig(t_end=10, sample_times=(0, 5, 3))
    with pytest.raises(ValidationError):
        EvolutionConfig(t_end=10, sample_times=(0, 11))
    with pytest.raises(ValidationError):
        EvolutionConfig(t_end=10, rel_tol=0)


def test_no_bath_resonant_plus_is_stationary():
    p = SystemParams(delta_detuning=0, epsilon_drive=1, gamma_coupling=0)
    tr = evolve(QubitState.plus(), p, EvolutionConfig.uniform(50, 101))
    assert_allclose(np.abs(tr.bare_rho()[:, 0, 1]), 0.5, atol=1e-10)


def test_no_bath_dressed_populations_constant():
    p = SystemParams(delta_detuning=0.6, epsilon_drive=1.1, gamma_coupling=0)
    tr = evolve(QubitState.from_bloch(0.2, 0.5, -0.3), p, EvolutionConfig.uniform(40, 81))
    pops = tr.rho[:, 0, 0].real
    assert np.max(np.abs(pops - pops[0])) < 1e-10


def test_evolve_matches_independent_solver():
    p = SystemParams(delta_detuning=1, epsilon_drive=1, gamma_coupling=0.1, lambda_cutoff=5)
    frame = build_dressed_frame(p)
    times = np.linspace(0, 8, 17)
    tr = evolve(QubitState.plus(), p, EvolutionConfig(t_end=8, sample_times=tuple(times)))

    def f(t, y):
        rho = y[:4].reshape(2, 2)
        s = (t - 0j)
        c = 0.1 * 25 / (1 + 5j * s) ** 2
        wl, d = p.omega_laser, frame.delta_rabi
        g = [c * np.exp(1j * wl * t), c * np.exp(1j * (wl - d) * t), c * np.exp(1j * (wl + d) * t)]
        drho = master_rhs_literal(rho, *y[4:], frame.delta_rabi, frame.p0, frame.p_plus,
                                  frame.p_minus)
        return np.concatenate([drho.ravel(), g])

    r = frame.rotation
    rho0 = r.T @ np.full((2, 2), 0.5) @ r
    sol = solve_ivp(f, (0, 8), np.concatenate([rho0.ravel(), np.zeros(3)]).astype(complex),
                    method="DOP853", t_eval=times, rtol=1e-12, atol=1e-14)
    ref = sol.y.T
    assert np.max(np.abs(tr.rho.reshape(-1, 4) - ref[:, :4])) < 1e-7
    assert np.max(np.abs(tr.gammas - ref[:, 4:])) < 1e-7


def test_trajectory_samples_and_invariants(markov):
    cfg = EvolutionConfig(t_end=20, sample_times=(0.0, 0.5, 7.25, 20.0))
    tr = evolve(QubitState.plus(), markov, cfg)
    assert_allclose(tr.times, cfg.sample_times)
    assert tr.gammas[0].tolist() == [0, 0, 0]
    for t, state, coeffs in tr.samples:
        assert state.frame is Frame.DRESSED and state.is_valid
        assert coeffs.time == t
    assert tr.diagnostics["steps_rejected"] >= 0
    assert not tr.diagnostics["positivity_warning"]


def test_dressed_initial_state_is_used_as_is(markov):
    cfg = EvolutionConfig(t_end=1, sample_times=(0.0, 1.0))
    tr = evolve(QubitState.excited(Frame.DRESSED), markov, cfg)
    assert_allclose(tr.rho[0], [[1, 0], [0, 0]])


def test_convergence_improves_with_tolerance(markov):
    cfg = EvolutionConfig(t_end=30, sample_times=tuple(np.linspace(0, 30, 31)), rel_tol=1e-5,
                          abs_tol=1e-7, max_step=1.0)
    loose = halve_step_convergence(QubitState.plus(), markov, cfg, factor=10)
    tight = halve_step_convergence(QubitState.plus(), markov, cfg.tightened(10), factor=10)
    assert tight.max_deviation < loose.max_deviation * 2
    assert tight.steps[0] > loose.steps[0]


def test_markov_default_convergence(markov):
    cfg = EvolutionConfig.uniform(100, 51)
    rep = halve_step_convergence(QubitState.plus(), markov, cfg)
    assert rep.max_deviation < 1e-6


def test_no_bath_energy_check():
    p = SystemParams(delta_detuning=1, epsilon_drive=1, gamma_coupling=0, lambda_cutoff=5)
    tr = evolve(QubitState.plus(), p, EvolutionConfig.uniform(100, 101))
    assert np.max(np.abs(tr.rho[:, 0, 0] - tr.rho[0, 0, 0])) < 1e-10


@pytest.mark.slow
def test_markov_coherence_saturates_below_resonant_value(markov):
    cfg = EvolutionConfig.uniform(500, 51)
    detuned = np.abs(evolve(QubitState.plus(), markov, cfg).bare_rho()[:, 0, 1])
    resonant = np.abs(evolve(QubitState.plus(), markov.replace(delta_detuning=0.0), cfg)
                      .bare_rho()[:, 0, 1])
    # early-time oscillation, late-time plateau
    assert np.ptp(detuned[-10:]) < 1e-6
    assert 0 < detuned[-1] < resonant[-1] < 0.5


@pytest.mark.parametrize("lam", [5.0, 0.01])
def test_halving_max_step_converges(lam):
    p = SystemParams(delta_detuning=1, epsilon_drive=1, gamma_coupling=0.1, lambda_cutoff=lam)
    cfg = EvolutionConfig.uniform(100, 101)
    h = default_max_step(p, cfg.t_end)
    coarse = evolve(QubitState.plus(), p, cfg)
    fine = evolve(QubitState.plus(), p, EvolutionConfig(cfg.t_end, cfg.sample_times,
                                                        max_step=h / 2))
    assert np.max(np.abs(coarse.rho - fine.rho)) < 1e-6
    assert np.max(np.abs(coarse.gammas - fine.gammas)) < 1e-6
