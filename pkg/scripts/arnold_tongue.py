"""S_m(t_eval) over a (Delta, epsilon) grid with a tongue summary per epsilon row.

    python scripts/arnold_tongue.py --preset nonmarkov --n 41 --out tongue.csv
"""

import argparse
import sys

import numpy as np

from qubitsync import Axis, SweepSpec, SystemParams, run_sweep, tongue_mask

LAMBDAS = {"markov": 5.0, "nonmarkov": 0.01}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=sorted(LAMBDAS), default="nonmarkov")
    ap.add_argument("--n", type=int, default=41)
    ap.add_argument("--t-eval", type=float, default=500.0)
    ap.add_argument("--threshold", type=float, default=0.05)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    spec = SweepSpec(Axis("delta", -2.0, 2.0, args.n), Axis("epsilon", 0.1, 2.0, args.n),
                     SystemParams(gamma_coupling=0.1, lambda_cutoff=LAMBDAS[args.preset]),
                     t_eval=args.t_eval)
    done = [0]

    def progress(k):
        done[0] = k
        if k % args.n == 0:
            print(f"{k}/{args.n ** 2} cells", file=sys.stderr)

    grid = run_sweep(spec, workers=args.workers, progress=progress)
    mask = tongue_mask(grid, args.threshold)
    for j, eps in enumerate(spec.axis2.values):
        width = int(mask.mask[:, j].sum())
        print(f"epsilon={eps:.4f} locked cells={width}", file=sys.stderr)
    d, e = np.meshgrid(spec.axis1.values, spec.axis2.values, indexing="ij")
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    np.savetxt(out, np.column_stack([d.ravel(), e.ravel(), grid.values.ravel()]),
               delimiter=",", header="delta,epsilon,s_max", comments="", fmt="%.17g")


if __name__ == "__main__":
    main()
