"""Phase synchronization of a laser-driven qubit in an Ohmic bath.

Time-local master-equation dynamics with co-integrated memory coefficients,
plus the synchronization observables built on top of it.
"""

__version__ = "0.1.0"

from .bath import MemoryCoefficients, correlation, memory_rhs, spectral_density
from .errors import *  # noqa: F401,F403
from .limitcycle import TrajectoryClass, Verdict, classify, lab_trajectory
from .model import (DressedFrame, Frame, QubitState, SystemParams, build_dressed_frame,
                    rotate_to_bare, rotate_to_dressed)
from .observables import (BlochVector, QGrid, bloch_lab, bloch_rotating, husimi_q,
                          phase_distribution, q_grid, s_max, shifted_phase)
from .propagator import (EvolutionConfig, Trajectory, evolve, halve_step_convergence,
                         master_rhs)
from .sweeps import Axis, SweepGrid, SweepSpec, run_sweep, tongue_mask

PRESETS = {
    "markov": {"lambda_cutoff": 5.0, "gamma_coupling": 0.1},
    "nonmarkov": {"lambda_cutoff": 0.01, "gamma_coupling": 0.1},
}
