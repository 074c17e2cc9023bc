"""Scan the qubit frequency and report the Markov coherence ordering at t = 500.

The ordering 0 < |rho10|(Delta=1) < |rho10|(Delta=0) < 1/2 depends on omega0,
which enters only through the laser frequency omega_L = omega0 - Delta.

    python scripts/calibrate_omega0.py --omega0 3 4 5 6 8 10
"""

import argparse

from qubitsync import EvolutionConfig, QubitState, SystemParams, evolve


def final_coherence(omega0, delta, t_end):
    p = SystemParams(delta_detuning=delta, epsilon_drive=1.0, omega_qubit=omega0,
                     gamma_coupling=0.1, lambda_cutoff=5.0)
    tr = evolve(QubitState.plus(), p, EvolutionConfig(t_end=t_end, sample_times=(0.0, t_end)))
    return abs(tr.bare_rho()[-1, 0, 1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega0", type=float, nargs="+", default=[3, 4, 5, 6, 8, 10])
    ap.add_argument("--t-end", type=float, default=500.0)
    args = ap.parse_args()
    print("omega0,abs_rho10_delta0,abs_rho10_delta1,ordering_holds")
    for w in args.omega0:
        c0 = final_coherence(w, 0.0, args.t_end)
        c1 = final_coherence(w, 1.0, args.t_end)
        print(f"{w:g},{c0:.6f},{c1:.6f},{0 < c1 < c0 < 0.5}")


if __name__ == "__main__":
    main()
