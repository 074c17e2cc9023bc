"""Rotating- and lab-frame Bloch trajectories with their classification.

    python scripts/bloch_trajectory.py --preset markov --t-end 300 --out markov.csv
"""

import argparse
import math
import sys

import numpy as np

from qubitsync import (EvolutionConfig, QubitState, SystemParams, classify, evolve,
                       lab_trajectory)

LAMBDAS = {"markov": 5.0, "nonmarkov": 0.01}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=sorted(LAMBDAS), default="markov")
    ap.add_argument("--t-end", type=float, default=300.0)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--epsilon", type=float, default=1.0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    p = SystemParams(delta_detuning=args.delta, epsilon_drive=args.epsilon, gamma_coupling=0.1,
                     lambda_cutoff=LAMBDAS[args.preset])
    n = max(501, math.ceil(args.t_end * p.omega_laser / (math.pi / 16)) + 1)
    lab = lab_trajectory(evolve(QubitState.plus(), p, EvolutionConfig.uniform(args.t_end, n)))
    c = classify(lab.times, lab.lab, window=args.t_end / 10)
    print(f"verdict={c.verdict.value} period={c.period_estimate} "
          f"2pi/omega_L={2 * math.pi / p.omega_laser:.6f} mz_end={lab.lab[-1, 2]:.6f}",
          file=sys.stderr)
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    np.savetxt(out, lab.rows(), delimiter=",", header="t,mx,my,mz,mxp,myp,mzp", comments="",
               fmt="%.17g")


if __name__ == "__main__":
    main()
