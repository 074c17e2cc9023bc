"""Driven-qubit parameters, dressed-basis diagonalization and frame changes.

Matrices use the ordering (|1>, |0>): row/column 0 is the excited state, so
``rho[0, 1]`` is rho_10 and sigma_z = diag(1, -1).  All frequencies are in
units of the reference rate gamma_0 and times in units of 1/gamma_0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateFrame, FrameMismatch, ValidationError

DEFAULT_OMEGA_QUBIT = 5.0

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


class Frame(str, enum.Enum):
    DRESSED = "dressed"
    BARE_ROTATING = "bare_rotating"
    LAB = "lab"


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven qubit and its Ohmic bath.

    ``omega_qubit`` is not fixed by the model equations but the memory
    coefficients depend on the laser frequency derived from it, so it acts
    as a calibration knob.
    """

    delta_detuning: float = 1.0
    epsilon_drive: float = 1.0
    omega_qubit: float = DEFAULT_OMEGA_QUBIT
    gamma_coupling: float = 0.1
    lambda_cutoff: float = 5.0

    def __post_init__(self):
        for name in ("delta_detuning", "epsilon_drive", "omega_qubit",
                     "gamma_coupling", "lambda_cutoff"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.epsilon_drive < 0:
            raise ValidationError("epsilon_drive >= 0 violated")
        if self.gamma_coupling < 0:
            raise ValidationError("gamma_coupling >= 0 violated")
        if self.lambda_cutoff <= 0:
            raise ValidationError("lambda_cutoff > 0 violated")
        if self.omega_qubit <= 0:
            raise ValidationError("omega_qubit > 0 violated")
        if self.omega_laser <= 0:
            raise ValidationError(
                "omega_laser = omega_qubit - delta_detuning > 0 violated "
                f"({self.omega_qubit} - {self.delta_detuning})")

    @property
    def omega_laser(self) -> float:
        return self.omega_qubit - self.delta_detuning

    @property
    def regime(self) -> str:
        return "Markov" if self.lambda_cutoff > 2 * self.gamma_coupling else "non-Markov"

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DressedFrame:
    delta_rabi: float
    theta_mix: float
    p0: float
    p_plus: float
    p_minus: float

    @property
    def rotation(self) -> np.ndarray:
        """Columns are the dressed states |1bar>, |0bar> in the bare basis."""
        c = math.cos(self.theta_mix / 2)
        s = math.sin(self.theta_mix / 2)
        return np.array([[c, -s], [s, c]], dtype=float)


def build_dressed_frame(params: SystemParams) -> DressedFrame:
    delta = params.delta_detuning
    eps = params.epsilon_drive
    rabi = math.hypot(delta, eps)
    if rabi == 0.0:
        raise DegenerateFrame("delta = epsilon = 0: dressed basis undefined")
    # atan2 keeps theta in [0, pi] and is regular at delta = 0
    theta = math.atan2(eps, delta)
    return DressedFrame(
        delta_rabi=rabi,
        theta_mix=theta,
        p0=eps / (2 * rabi),
        p_plus=(delta + rabi) / (2 * rabi),
        p_minus=(delta - rabi) / (2 * rabi),
    )


@dataclass(frozen=True)
class QubitState:
    rho: np.ndarray
    frame: Frame = Frame.BARE_ROTATING
    time: float = 0.0
    _issues: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValidationError(f"density matrix must be 2x2, got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "frame", Frame(self.frame))
        issues = []
        if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
            issues.append("not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-9:
            issues.append(f"trace {np.trace(rho).real!r} != 1")
        if self.min_eigenvalue < -1e-9:
            issues.append(f"negative eigenvalue {self.min_eigenvalue:.3e}")
        object.__setattr__(self, "_issues", tuple(issues))

    @property
    def rho11(self) -> complex:
        return self.rho[0, 0]

    @property
    def rho10(self) -> complex:
        return self.rho[0, 1]

    @property
    def rho01(self) -> complex:
        return self.rho[1, 0]

    @property
    def rho00(self) -> complex:
        return self.rho[1, 1]

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    @property
    def issues(self) -> tuple:
        """Violated density-matrix invariants (empty for a valid state)."""
        return self._issues

    @property
    def is_valid(self) -> bool:
        return not self._issues

    def validate(self) -> "QubitState":
        if self._issues:
            raise ValidationError("invalid density matrix: " + "; ".join(self._issues))
        return self

    @classmethod
    def from_bloch(cls, mx, my, mz, frame=Frame.BARE_ROTATING, time=0.0):
        rho = 0.5 * (np.eye(2) + mx * SIGMA_X + my * SIGMA_Y + mz * SIGMA_Z)
        return cls(rho, frame, time)

    @classmethod
    def plus(cls, frame=Frame.BARE_ROTATING):
        """(|0> + |1>)/sqrt(2)."""
        return cls(np.full((2, 2), 0.5, dtype=complex), frame)

    @classmethod
    def excited(cls, frame=Frame.BARE_ROTATING):
        return cls(np.array([[1, 0], [0, 0]], dtype=complex), frame)

    @classmethod
    def ground(cls, frame=Frame.BARE_ROTATING):
        return cls(np.array([[0, 0], [0, 1]], dtype=complex), frame)


def _expect_frame(state: QubitState, frame: Frame):
    if state.frame is not frame:
        raise FrameMismatch(f"expected a {frame.value} state, got {state.frame.value}")


def rotate_to_dressed(state: QubitState, frame: DressedFrame) -> QubitState:
    _expect_frame(state, Frame.BARE_ROTATING)
    r = frame.rotation
    return QubitState(r.T @ state.rho @ r, Frame.DRESSED, state.time)


def rotate_to_bare(state: QubitState, frame: DressedFrame) -> QubitState:
    _expect_frame(state, Frame.DRESSED)
    r = frame.rotation
    return QubitState(r @ state.rho @ r.T, Frame.BARE_ROTATING, state.time)
