"""Phase-space and Bloch-sphere observables of a single qubit state.

Everything here takes a bare rotating-frame state (or its 2x2 matrix).  The
spin-coherent state is |theta, phi> = cos(theta/2)|1> + sin(theta/2) e^{i phi}|0>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, FrameMismatch, ValidationError
from .model import Frame, QubitState

UNIFORM_PHASE = 1.0 / (2.0 * math.pi)


def _rho(state):
    if isinstance(state, QubitState):
        if state.frame is not Frame.BARE_ROTATING:
            raise FrameMismatch(f"observables expect a bare rotating state, got {state.frame.value}")
        return state.rho
    rho = np.asarray(state, dtype=complex)
    if rho.shape != (2, 2):
        raise ValidationError("expected a 2x2 density matrix")
    return rho


def husimi_q(state, theta, phi):
    """Husimi Q(theta, phi) = <theta,phi| rho |theta,phi> / 2 pi.

    Broadcasts over array-valued ``theta`` and ``phi``.
    """
    rho = _rho(state)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(theta < 0) or np.any(theta > math.pi):
        raise DomainError("theta must lie in [0, pi]")
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    cross = c * s * (np.exp(1j * phi) * rho[0, 1] + np.exp(-1j * phi) * rho[1, 0])
    q = (c * c * rho[0, 0] + cross + s * s * rho[1, 1]) / (2 * math.pi)
    # the imaginary part is a rounding residue for Hermitian rho
    q = q.real
    return float(q) if q.ndim == 0 else q


def phase_distribution(state, phi):
    """P(phi) = int_0^pi Q sin(theta) d theta, in closed form."""
    rho = _rho(state)
    phi = np.asarray(phi, dtype=float)
    out = UNIFORM_PHASE + (np.exp(1j * phi) * rho[0, 1] + np.exp(-1j * phi) * rho[1, 0]).real / 8
    return float(out) if out.ndim == 0 else out


def shifted_phase(state, phi):
    """S(phi) = P(phi) - 1/(2 pi) = |rho_10| cos(phi + arg rho_10) / 4."""
    rho = _rho(state)
    phi = np.asarray(phi, dtype=float)
    out = (np.exp(1j * phi) * rho[0, 1] + np.exp(-1j * phi) * rho[1, 0]).real / 8
    return float(out) if out.ndim == 0 else out


def s_max(state):
    """Maximum of the shifted phase distribution and its location.

    Returns ``(S_m, phi_star)`` with S_m = |rho_10| / 4 (one eighth of the l1
    coherence) and phi_star = -arg(rho_10) wrapped to [-pi, pi).
    """
    rho = _rho(state)
    r10 = rho[0, 1]
    phi_star = -np.angle(r10)
    phi_star = (phi_star + math.pi) % (2 * math.pi) - math.pi
    return abs(r10) / 4, float(phi_star)


def l1_coherence(state) -> float:
    rho = _rho(state)
    return float(abs(rho[0, 1]) + abs(rho[1, 0]))


@dataclass(frozen=True)
class BlochVector:
    mx: float
    my: float
    mz: float
    frame: str = "rotating"

    def __post_init__(self):
        if self.frame not in ("rotating", "lab"):
            raise ValidationError(f"unknown Bloch frame {self.frame!r}")
        if self.norm > 1 + 1e-9:
            raise ValidationError(f"Bloch vector norm {self.norm} exceeds 1")

    @property
    def norm(self) -> float:
        return math.sqrt(self.mx**2 + self.my**2 + self.mz**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.mx, self.my, self.mz])


def bloch_components(rho) -> np.ndarray:
    """(Tr sx rho, Tr sy rho, Tr sz rho) for one matrix or a stack (..., 2, 2)."""
    rho = np.asarray(rho, dtype=complex)
    r10 = rho[..., 0, 1]
    # Tr(sy rho) = -2 Im rho_10 for sy = [[0, -i], [i, 0]]
    return np.stack([2 * r10.real, -2 * r10.imag, (rho[..., 0, 0] - rho[..., 1, 1]).real], axis=-1)


def bloch_rotating(state) -> BlochVector:
    mx, my, mz = bloch_components(_rho(state))
    return BlochVector(float(mx), float(my), float(mz), "rotating")


def rotate_about_z(m, angle):
    """Rotate Bloch components ``m`` (..., 3) by ``angle`` about z."""
    m = np.asarray(m, dtype=float)
    c = np.cos(angle)
    s = np.sin(angle)
    return np.stack([m[..., 0] * c - m[..., 1] * s, m[..., 0] * s + m[..., 1] * c, m[..., 2]],
                    axis=-1)


def bloch_lab(v: BlochVector, t: float, omega_laser: float) -> BlochVector:
    if v.frame != "rotating":
        raise FrameMismatch("bloch_lab expects a rotating-frame Bloch vector")
    mx, my, mz = rotate_about_z(v.as_array(), omega_laser * t)
    return BlochVector(float(mx), float(my), float(mz), "lab")


@dataclass(frozen=True)
class QGrid:
    theta_axis: np.ndarray
    phi_axis: np.ndarray
    values: np.ndarray  # (n_theta, n_phi)
    time: float = 0.0

    def normalization(self) -> float:
        """Sphere integral of Q: Simpson in theta, rectangle rule in (periodic) phi."""
        dphi = 2 * math.pi / len(self.phi_axis)
        over_theta = simpson(self.values * np.sin(self.theta_axis)[:, None],
                             x=self.theta_axis, axis=0)
        return float(over_theta.sum() * dphi)


def q_grid(state, n_theta=181, n_phi=360, time=None) -> QGrid:
    """Evaluate Q on a uniform (theta in [0, pi]) x (phi in [-pi, pi)) grid."""
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = -math.pi + 2 * math.pi * np.arange(n_phi) / n_phi
    values = husimi_q(state, theta[:, None], phi[None, :])
    if time is None:
        time = state.time if isinstance(state, QubitState) else 0.0
    return QGrid(theta, phi, values, float(time))
