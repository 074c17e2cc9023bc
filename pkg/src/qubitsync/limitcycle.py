"""Lab-frame Bloch trajectories and fixed-point / limit-cycle classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, InsufficientData, ValidationError
from .observables import bloch_components, rotate_about_z
from .propagator import Trajectory

ALIASING_LIMIT = math.pi / 8


@dataclass(frozen=True)
class LabTrajectory:
    times: np.ndarray
    rotating: np.ndarray  # (n, 3)
    lab: np.ndarray  # (n, 3)
    omega_laser: float

    def rows(self):
        """(t, mx, my, mz, mx', my', mz') per sample."""
        return np.column_stack([self.times, self.rotating, self.lab])


def lab_trajectory(traj: Trajectory, n_samples: int | None = None) -> LabTrajectory:
    """Bloch vectors of ``traj`` in the rotating and non-rotating frames.

    With ``n_samples`` set, that many evenly spaced trajectory samples are used.
    """
    if len(traj) == 0:
        raise InsufficientData("empty trajectory")
    n = len(traj) if n_samples is None else int(n_samples)
    if n < 2:
        raise ValidationError("n_samples must be >= 2")
    idx = np.unique(np.round(np.linspace(0, len(traj) - 1, min(n, len(traj)))).astype(int))
    times = traj.times[idx]
    wl = traj.params.omega_laser
    if len(times) > 1:
        worst = wl * float(np.max(np.diff(times)))
        if worst > ALIASING_LIMIT * (1 + 1e-12):
            raise AliasingError(
                f"omega_L * dt = {worst:.4g} exceeds pi/8; sample the trajectory more densely")
    rotating = bloch_components(traj.bare_rho()[idx])
    lab = rotate_about_z(rotating, wl * times)
    return LabTrajectory(times, rotating, lab, wl)


class Verdict(str, enum.Enum):
    FIXED_POINT = "fixed_point"
    LIMIT_CYCLE = "limit_cycle"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class TrajectoryClass:
    verdict: Verdict
    recurrence_distance: float
    period_estimate: float | None
    transient_cut: float
    lag_spread: float | None = None


def _refine_minimum(times, d2, k):
    """Sub-sample location and value of a local minimum of squared distance."""
    if 0 < k < len(d2) - 1:
        y0, y1, y2 = d2[k - 1], d2[k], d2[k + 1]
        denom = y0 - 2 * y1 + y2
        if denom > 0:
            off = 0.5 * (y0 - y2) / denom
            if abs(off) <= 1:
                # uniform spacing assumed locally
                h = 0.5 * (times[k + 1] - times[k - 1])
                return times[k] + off * h, max(y1 - 0.25 * (y0 - y2) * off, 0.0)
    return times[k], d2[k]


def _first_recurrence(times, pts, k, start, eps):
    """Most recent earlier return of the curve to within ``eps`` of pts[k].

    Walks backwards from k: first out of the eps-ball, then to the first
    re-entry, then to the bottom of that dip.  Returns (lag, distance) or None.
    """
    d2 = np.sum((pts[start:k + 1] - pts[k]) ** 2, axis=1)
    eps2 = eps * eps
    m = len(d2) - 1
    while m >= 0 and d2[m] < eps2:
        m -= 1
    while m >= 0 and d2[m] >= eps2:
        m -= 1
    if m < 0:
        return None
    while m > 0 and d2[m - 1] <= d2[m]:
        m -= 1
    t_min, dmin2 = _refine_minimum(times[start:k + 1], d2, m)
    return times[k] - t_min, math.sqrt(dmin2)


def classify(times, points, window: float, eps_fp: float = 1e-3, eps_rec: float = 1e-2,
             transient_cut: float | None = None, max_spread: float = 0.1) -> TrajectoryClass:
    """Classify the long-time behavior of a sampled 3-D curve.

    ``fixed_point`` if the final ``window`` stays within ``eps_fp``;
    ``limit_cycle`` if every final-window point recurs within ``eps_rec`` at a
    consistent lag; ``undecided`` otherwise.
    """
    times = np.asarray(times, dtype=float)
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != times.shape[0]:
        raise ValidationError("points must be (n, d) matching times")
    if window <= 0:
        raise ValidationError("window must be > 0")
    if len(times) < 3:
        raise InsufficientData("need at least 3 samples")
    if transient_cut is None:
        transient_cut = times[0] + 0.5 * (times[-1] - times[0])
    start = int(np.searchsorted(times, transient_cut, side="left"))
    if times[-1] - transient_cut < 3 * window * (1 - 1e-12) or len(times) - start < 3:
        raise InsufficientData(
            f"post-transient span {times[-1] - transient_cut:.4g} < 3 * window ({window:g})")

    final = np.flatnonzero(times >= times[-1] - window)
    tail = pts[final]
    spread = np.max(np.linalg.norm(tail[:, None, :] - tail[None, :, :], axis=-1))
    if spread < eps_fp:
        return TrajectoryClass(Verdict.FIXED_POINT, float(spread), None, float(transient_cut))

    lags = []
    dists = []
    for k in final:
        hit = _first_recurrence(times, pts, k, start, eps_rec)
        if hit is None:
            return TrajectoryClass(Verdict.UNDECIDED, math.inf, None, float(transient_cut))
        lags.append(hit[0])
        dists.append(hit[1])
    lags = np.array(lags)
    period = float(np.median(lags))
    rel_spread = float((lags.max() - lags.min()) / period) if period > 0 else math.inf
    rec = float(max(dists))
    if period > 0 and rel_spread < max_spread:
        return TrajectoryClass(Verdict.LIMIT_CYCLE, rec, period, float(transient_cut), rel_spread)
    return TrajectoryClass(Verdict.UNDECIDED, rec, None, float(transient_cut), rel_spread)
