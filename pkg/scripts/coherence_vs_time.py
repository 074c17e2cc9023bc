"""|rho10(t)| in the bare rotating frame for both bath presets and Delta in {0, 1}.

Writes one CSV with columns t, markov_d0, markov_d1, nonmarkov_d0, nonmarkov_d1.

    python scripts/coherence_vs_time.py --out coherence.csv
"""

import argparse
import sys

import numpy as np

from qubitsync import EvolutionConfig, QubitState, SystemParams, evolve

LAMBDAS = {"markov": 5.0, "nonmarkov": 0.01}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=500.0)
    ap.add_argument("--n-samples", type=int, default=2001)
    ap.add_argument("--omega0", type=float, default=5.0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    cfg = EvolutionConfig.uniform(args.t_end, args.n_samples)
    columns, data = ["t"], [np.array(cfg.sample_times)]
    for name, lam in LAMBDAS.items():
        for delta in (0.0, 1.0):
            p = SystemParams(delta_detuning=delta, epsilon_drive=1.0, omega_qubit=args.omega0,
                             gamma_coupling=0.1, lambda_cutoff=lam)
            data.append(np.abs(evolve(QubitState.plus(), p, cfg).bare_rho()[:, 0, 1]))
            columns.append(f"{name}_d{delta:g}")
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    np.savetxt(out, np.column_stack(data), delimiter=",", header=",".join(columns),
               comments="", fmt="%.17g")


if __name__ == "__main__":
    main()
