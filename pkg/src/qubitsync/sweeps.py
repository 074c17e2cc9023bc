"""Parameter-grid engine for S_m maps (Arnold-tongue plots).

Each grid cell is an independent evolution; results are written to slots keyed
by (i, j), so the grid does not depend on scheduling or worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import QubitSyncError, ValidationError
from .model import QubitState, SystemParams
from .observables import s_max
from .propagator import EvolutionConfig, evolve

AXIS_FIELDS = {
    "delta": "delta_detuning",
    "epsilon": "epsilon_drive",
    "gamma": "gamma_coupling",
}
S_MAX_BOUND = 1 / 8 + 1e-9


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    n_points: int

    def __post_init__(self):
        if self.name not in AXIS_FIELDS:
            raise ValidationError(f"axis name must be one of {sorted(AXIS_FIELDS)}, got {self.name!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValidationError(f"axis {self.name} range must be finite")
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise ValidationError(f"axis {self.name} needs n_points >= 1")

    @property
    def values(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([float(self.min)])
        return np.linspace(self.min, self.max, int(self.n_points))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:min:max:n``."""
        parts = text.strip().split(":")
        if len(parts) != 4:
            raise ValidationError(f"axis spec {text!r} is not name:min:max:n")
        try:
            return cls(parts[0].strip(), float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise ValidationError(f"axis spec {text!r}: {exc}") from None

    def __str__(self):
        return f"{self.name}:{self.min!r}:{self.max!r}:{self.n_points}"


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: SystemParams = field(default_factory=SystemParams)
    t_eval: float = 500.0
    evolution: EvolutionConfig | None = None

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ValidationError("sweep axes must differ")
        if not (self.t_eval >= 0 and math.isfinite(self.t_eval)):
            raise ValidationError("t_eval must be finite and >= 0")
        evo = self.evolution
        if evo is None:
            evo = EvolutionConfig(t_end=self.t_eval, sample_times=(0.0, self.t_eval)
                                  if self.t_eval > 0 else (0.0,))
            object.__setattr__(self, "evolution", evo)
        if not np.any(np.isclose(evo.sample_times, self.t_eval, rtol=0, atol=1e-12)):
            raise ValidationError("t_eval must be one of the evolution sample times")

    def cell_params(self, i: int, j: int) -> SystemParams:
        changes = {
            AXIS_FIELDS[self.axis1.name]: float(self.axis1.values[i]),
            AXIS_FIELDS[self.axis2.name]: float(self.axis2.values[j]),
        }
        return self.fixed.replace(**changes)

    @property
    def shape(self):
        return (self.axis1.n_points, self.axis2.n_points)


@dataclass(frozen=True)
class SweepGrid:
    spec: SweepSpec
    values: np.ndarray  # (n1, n2); nan marks a failed cell
    failures: dict  # (i, j) -> message
    regimes: np.ndarray  # (n1, n2) regime labels
    metadata: dict = field(default_factory=dict)


def evaluate_cell(params: SystemParams, initial: QubitState, config: EvolutionConfig,
                  t_eval: float) -> float:
    """S_m at t_eval for one parameter set (bare rotating frame)."""
    traj = evolve(initial, params, config)
    return s_max(traj.bare_state(traj.at(t_eval)))[0]


def _cell_task(args):
    i, j, spec, initial = args
    try:
        params = spec.cell_params(i, j)
        value = evaluate_cell(params, initial, spec.evolution, spec.t_eval)
    except (QubitSyncError, ValueError, ArithmeticError) as exc:
        return i, j, math.nan, f"{type(exc).__name__}: {exc}"
    if not 0.0 <= value <= S_MAX_BOUND:
        return i, j, math.nan, f"RangeError: S_m={value!r} outside [0, 1/8]"
    return i, j, value, None


def _regime(spec, i, j):
    try:
        return spec.cell_params(i, j).regime
    except QubitSyncError:
        return "invalid"


def run_sweep(spec: SweepSpec, initial: QubitState | None = None, workers: int | None = 1,
              progress=None) -> SweepGrid:
    """Evaluate S_m(t_eval) on every cell of the grid.

    ``workers`` > 1 distributes cells over processes; ``None`` uses all CPUs.
    ``progress``, if given, is called with the number of finished cells.
    """
    if initial is None:
        initial = QubitState.plus()
    initial.validate()
    n1, n2 = spec.shape
    values = np.full((n1, n2), np.nan)
    failures = {}
    tasks = [(i, j, spec, initial) for i in range(n1) for j in range(n2)]
    if workers is None:
        workers = os.cpu_count() or 1

    def collect(results):
        for done, (i, j, value, message) in enumerate(results, 1):
            values[i, j] = value
            if message is not None:
                failures[(i, j)] = message
            if progress is not None:
                progress(done)

    if workers <= 1 or len(tasks) == 1:
        collect(map(_cell_task, tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            collect(pool.map(_cell_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))

    regimes = np.array([[_regime(spec, i, j) for j in range(n2)] for i in range(n1)])
    from . import __version__
    metadata = {
        "artifact_version": __version__,
        "omega_qubit": spec.fixed.omega_qubit,
        "n_failed": len(failures),
    }
    return SweepGrid(spec, values, failures, regimes, metadata)


@dataclass(frozen=True)
class TongueMask:
    mask: np.ndarray
    labels: np.ndarray  # 0 = background, 1..n = connected components
    n_components: int
    largest: np.ndarray

    def component_at(self, i: int, j: int) -> np.ndarray:
        label = self.labels[i, j]
        if label == 0:
            return np.zeros_like(self.mask)
        return self.labels == label


def tongue_mask(grid: SweepGrid, threshold: float) -> TongueMask:
    """Cells with S_m >= threshold and their 4-connected components."""
    if not 0 < threshold < 1 / 8:
        raise ValidationError("threshold must lie in (0, 1/8)")
    values = np.asarray(grid.values if isinstance(grid, SweepGrid) else grid, dtype=float)
    with np.errstate(invalid="ignore"):
        mask = np.nan_to_num(values, nan=-1.0) >= threshold
    labels, n = ndimage.label(mask)
    if n == 0:
        largest = np.zeros_like(mask)
    else:
        sizes = np.bincount(labels.ravel())[1:]
        largest = labels == (int(np.argmax(sizes)) + 1)
    return TongueMask(mask, labels, int(n), largest)
