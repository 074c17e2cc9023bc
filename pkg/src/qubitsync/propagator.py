"""Time-local master equation in the dressed basis and its integrator.

The density matrix and the three memory coefficients are co-evolved as one
7-component complex system by an adaptive Dormand-Prince 5(4) stepper that
lands exactly on every requested sample time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .bath import MemoryCoefficients
from .errors import (FrameMismatch, IntegrationFailure, PositivityWarning,
                     ToleranceFailure, ValidationError)
from .model import (DressedFrame, Frame, QubitState, SystemParams,
                    build_dressed_frame, rotate_to_dressed)

POSITIVITY_THRESHOLD = -1e-6
MAX_STEPS = 50_000_000


def default_max_step(params: SystemParams, t_end: float) -> float:
    """0.01 * shortest time scale among 1/delta, 1/(omega_L + delta), 1/lambda."""
    frame = build_dressed_frame(params)
    rates = [frame.delta_rabi, params.omega_laser + frame.delta_rabi, params.lambda_cutoff]
    step = 0.01 * min(1.0 / r for r in rates)
    if t_end > 0:
        step = min(step, t_end / 100)
    return step


@dataclass(frozen=True)
class EvolutionConfig:
    t_end: float = 500.0
    sample_times: tuple | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float | None = None

    def __post_init__(self):
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ValidationError("t_end must be finite and >= 0")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValidationError("tolerances must be > 0")
        if self.max_step is not None and not self.max_step > 0:
            raise ValidationError("max_step must be > 0")
        if self.sample_times is None:
            times = np.linspace(0.0, self.t_end, 501)
        else:
            times = np.asarray(self.sample_times, dtype=float).ravel()
            if times.size == 0:
                raise ValidationError("sample_times must not be empty")
            if np.any(np.diff(times) <= 0):
                raise ValidationError("sample_times must be strictly increasing")
            if times[0] < 0 or times[-1] > self.t_end * (1 + 1e-12):
                raise ValidationError("sample_times must lie in [0, t_end]")
        object.__setattr__(self, "sample_times", tuple(float(t) for t in times))

    @classmethod
    def uniform(cls, t_end, n_samples, **kwargs):
        return cls(t_end=t_end, sample_times=tuple(np.linspace(0.0, t_end, n_samples)), **kwargs)

    def resolved_max_step(self, params: SystemParams) -> float:
        if self.max_step is not None:
            return self.max_step
        return default_max_step(params, self.t_end)

    def tightened(self, factor: float) -> "EvolutionConfig":
        return EvolutionConfig(self.t_end, self.sample_times, self.rel_tol / factor,
                               self.abs_tol / factor, self.max_step)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: dressed-frame density matrices and memory coefficients."""

    times: np.ndarray
    rho: np.ndarray  # (n, 2, 2), dressed basis
    gammas: np.ndarray  # (n, 3)
    params: SystemParams
    frame: DressedFrame
    config: EvolutionConfig
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def state(self, i) -> QubitState:
        return QubitState(self.rho[i], Frame.DRESSED, float(self.times[i]))

    def coefficients(self, i) -> MemoryCoefficients:
        g = self.gammas[i]
        return MemoryCoefficients(complex(g[0]), complex(g[1]), complex(g[2]), float(self.times[i]))

    @property
    def samples(self):
        return [(float(t), self.state(i), self.coefficients(i)) for i, t in enumerate(self.times)]

    def bare_rho(self) -> np.ndarray:
        """Samples rotated to the bare rotating frame, shape (n, 2, 2)."""
        r = self.frame.rotation
        return r @ self.rho @ r.T

    def bare_state(self, i) -> QubitState:
        r = self.frame.rotation
        return QubitState(r @ self.rho[i] @ r.T, Frame.BARE_ROTATING, float(self.times[i]))

    def at(self, t) -> int:
        """Index of the sample at time t (exact match within 1e-9)."""
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no sample at t={t}")
        return i


def _coef_vector(params: SystemParams, frame: DressedFrame) -> np.ndarray:
    return np.array([frame.delta_rabi, frame.p0, frame.p_plus, frame.p_minus,
                     params.gamma_coupling, params.lambda_cutoff, params.omega_laser])


def master_rhs(state: QubitState, coeffs: MemoryCoefficients, frame: DressedFrame) -> np.ndarray:
    """d(rho)/dt of the time-local master equation, dressed basis."""
    if state.frame is not Frame.DRESSED:
        raise FrameMismatch(f"master_rhs needs a dressed state, got {state.frame.value}")
    rho = state.rho
    y = np.array([rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1],
                  coeffs.gamma1, coeffs.gamma2, coeffs.gamma3], dtype=complex)
    coef = np.array([frame.delta_rabi, frame.p0, frame.p_plus, frame.p_minus, 0.0, 1.0, 0.0])
    out = np.empty(_kernel.N_STATE, dtype=complex)
    _kernel.rhs(0.0, y, coef, out)
    return np.array([[out[0], out[1]], [out[2], out[3]]])


def evolve(initial: QubitState, params: SystemParams, config: EvolutionConfig) -> Trajectory:
    """Integrate the master equation from t=0, sampling at ``config.sample_times``.

    ``initial`` is normally given in the bare rotating frame and rotated into the
    dressed basis; a dressed-frame state is used as is.
    """
    initial.validate()
    frame = build_dressed_frame(params)
    if initial.frame is Frame.BARE_ROTATING:
        start = rotate_to_dressed(initial, frame)
    elif initial.frame is Frame.DRESSED:
        start = initial
    else:
        raise FrameMismatch("initial state must be in the bare rotating or dressed frame")

    rho0 = start.rho
    y0 = np.array([rho0[0, 0], rho0[0, 1], rho0[1, 0], rho0[1, 1], 0, 0, 0], dtype=complex)
    times = np.asarray(config.sample_times, dtype=float)
    max_step = config.resolved_max_step(params)
    samples, status, n_acc, n_rej, min_eig, max_dev, t_reached = _kernel.integrate(
        y0, _coef_vector(params, frame), times, config.rel_tol, config.abs_tol,
        max_step, MAX_STEPS)

    if status == _kernel.STATUS_TRACE_DRIFT:
        raise IntegrationFailure(
            f"trace drift {max_dev:.3e} exceeds renormalization limit at t={t_reached:.6g}")
    if status != _kernel.STATUS_OK:
        reason = {
            _kernel.STATUS_STEP_UNDERFLOW: "step size underflow",
            _kernel.STATUS_MAX_STEPS: "step budget exhausted",
            _kernel.STATUS_NONFINITE: "non-finite error estimate",
        }[status]
        raise ToleranceFailure(f"{reason} at t={t_reached:.6g} (rtol={config.rel_tol:g})")

    rho = np.empty((len(times), 2, 2), dtype=complex)
    rho[:, 0, 0] = samples[:, 0]
    rho[:, 0, 1] = samples[:, 1]
    rho[:, 1, 0] = samples[:, 2]
    rho[:, 1, 1] = samples[:, 3]
    positivity = bool(min_eig < POSITIVITY_THRESHOLD)
    if positivity:
        warnings.warn(f"minimum eigenvalue {min_eig:.3e} below {POSITIVITY_THRESHOLD:g}",
                      PositivityWarning, stacklevel=2)
    diagnostics = {
        "steps_accepted": int(n_acc),
        "steps_rejected": int(n_rej),
        "max_step": max_step,
        "min_eigenvalue": float(min_eig),
        "max_trace_deviation": float(max_dev),
        "positivity_warning": positivity,
    }
    return Trajectory(times, rho, samples[:, 4:].copy(), params, frame, config, diagnostics)


@dataclass(frozen=True)
class ConvergenceReport:
    max_deviation: float
    element_deviation: np.ndarray  # max over samples of |delta rho_ij|, (2, 2)
    coefficient_deviation: float
    steps: tuple
    factor: float


def halve_step_convergence(initial: QubitState, params: SystemParams,
                           config: EvolutionConfig, factor: float = 10.0) -> ConvergenceReport:
    """Compare runs at the configured tolerances and at tolerances / ``factor``."""
    coarse = evolve(initial, params, config)
    fine = evolve(initial, params, config.tightened(factor))
    diff = np.abs(coarse.rho - fine.rho)
    return ConvergenceReport(
        max_deviation=float(diff.max()),
        element_deviation=diff.max(axis=0),
        coefficient_deviation=float(np.abs(coarse.gammas - fine.gammas).max()),
        steps=(coarse.diagnostics["steps_accepted"], fine.diagnostics["steps_accepted"]),
        factor=factor,
    )
