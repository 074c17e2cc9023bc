"""Ohmic bath: spectral density, correlation function and memory-coefficient rates.

The memory coefficients are double integrals over (tau, omega).  Substituting
s = t - tau turns each into a single integral over s of the bath correlation
function C(s) = int_0^inf J(w) exp(-i w s) dw times a phase, so their time
derivatives are local in t and the coefficients can be co-integrated with the
density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .model import DressedFrame, SystemParams


@dataclass(frozen=True)
class MemoryCoefficients:
    gamma1: complex
    gamma2: complex
    gamma3: complex
    time: float = 0.0

    @classmethod
    def zero(cls, time=0.0):
        return cls(0j, 0j, 0j, time)

    def as_array(self) -> np.ndarray:
        return np.array([self.gamma1, self.gamma2, self.gamma3], dtype=complex)


def spectral_density(omega, params: SystemParams):
    """J(w) = gamma * w * exp(-w / lambda); accepts scalars or arrays."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise DomainError("spectral density is defined for omega >= 0")
    out = params.gamma_coupling * w * np.exp(-w / params.lambda_cutoff)
    return float(out) if out.ndim == 0 else out


def correlation(s, params: SystemParams):
    """Closed form of int_0^inf J(w) exp(-i w s) dw = gamma lambda^2 / (1 + i lambda s)^2."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("correlation is evaluated for s >= 0")
    lam = params.lambda_cutoff
    out = params.gamma_coupling * lam**2 / (1 + 1j * lam * s) ** 2
    return complex(out) if out.ndim == 0 else out


def memory_rhs(t, params: SystemParams, frame: DressedFrame):
    """Time derivatives (dGamma1/dt, dGamma2/dt, dGamma3/dt) at time t."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("memory_rhs requires t >= 0")
    c = correlation(t, params)
    wl = params.omega_laser
    d = frame.delta_rabi
    return (
        c * np.exp(1j * wl * t),
        c * np.exp(1j * (wl - d) * t),
        c * np.exp(1j * (wl + d) * t),
    )


def integrate_memory(times, params: SystemParams, frame: DressedFrame,
                     rtol=1e-11, atol=1e-13) -> list[MemoryCoefficients]:
    """Gamma_k at the requested times, integrating memory_rhs on its own.

    Useful when only the bath coefficients are wanted; ``evolve`` co-integrates
    the same equations alongside the density matrix.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return []
    t_end = float(times.max())
    if t_end == 0.0:
        return [MemoryCoefficients.zero(float(t)) for t in times]

    def f(t, y):
        return np.array(memory_rhs(t, params, frame))

    fastest = params.omega_laser + frame.delta_rabi + params.lambda_cutoff
    sol = solve_ivp(f, (0.0, t_end), np.zeros(3, dtype=complex), method="DOP853",
                    t_eval=np.sort(times), rtol=rtol, atol=atol,
                    max_step=min(t_end, 0.5 / fastest))
    by_time = dict(zip(sol.t, sol.y.T))
    out = []
    for t in times:
        g = by_time[float(t)]
        out.append(MemoryCoefficients(complex(g[0]), complex(g[1]), complex(g[2]), float(t)))
    return out
