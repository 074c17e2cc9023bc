"""Command-line front end: ``qubitsync {evolve,qfunc,sweep,trajectory}``.

Outputs are CSV (``#``-prefixed metadata header, 17 significant digits) or
JSON carrying the same rows plus a metadata block.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, RunConfig, initial_state, parse_config
from .errors import IntegrationFailure, ParseError, QubitSyncError, ValidationError
from .limitcycle import classify, lab_trajectory
from .model import build_dressed_frame
from .observables import bloch_components, q_grid, s_max
from .propagator import evolve
from .sweeps import SweepSpec, run_sweep, tongue_mask

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_json_value(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(columns, rows, metadata, fmt_name, comments=()) -> str:
    if fmt_name == "json":
        doc = {
            "metadata": _json_value(metadata),
            "columns": list(columns),
            "rows": [[_json_value(float(v)) for v in row] for row in rows],
        }
        if comments:
            doc["diagnostics"] = list(comments)
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    lines = [f"# {k} = {v}" for k, v in _flat(metadata)]
    lines.extend(f"# {c}" for c in comments)
    lines.append(",".join(columns))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _flat(meta, prefix=""):
    for k, v in meta.items():
        if isinstance(v, dict):
            yield from _flat(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}", v


def base_metadata(config: RunConfig) -> dict:
    frame = build_dressed_frame(config.params)
    return {
        "artifact": "qubitsync",
        "artifact_version": __version__,
        "preset": config.preset or "none",
        # the destination path is not part of the computation
        "config": {k: v for k, v in config.settings().items() if k != "out"},
        "omega_laser": repr(config.params.omega_laser),
        "regime": config.params.regime,
        "delta_rabi": repr(frame.delta_rabi),
        "max_step_used": repr(config.evolution.resolved_max_step(config.params)),
    }


def _diag(traj):
    return {k: repr(v) if isinstance(v, float) else v for k, v in traj.diagnostics.items()}


def cmd_evolve(config: RunConfig):
    traj = evolve(initial_state(config.initial), config.params, config.evolution)
    bare = traj.bare_rho()
    m = bloch_components(bare)
    rows = []
    for i, t in enumerate(traj.times):
        r = bare[i]
        sm, phi_star = s_max(r)
        g = traj.gammas[i]
        rows.append([t, r[0, 0].real, r[1, 1].real, r[0, 1].real, r[0, 1].imag, abs(r[0, 1]),
                     sm, phi_star, *m[i], g[0].real, g[0].imag, g[1].real, g[1].imag,
                     g[2].real, g[2].imag])
    columns = ["t", "rho11", "rho00", "re_rho10", "im_rho10", "abs_rho10", "s_max", "phi_star",
               "mx", "my", "mz", "re_gamma1", "im_gamma1", "re_gamma2", "im_gamma2",
               "re_gamma3", "im_gamma3"]
    meta = base_metadata(config)
    meta["frame"] = "bare_rotating"
    meta["diagnostics"] = _diag(traj)
    return columns, rows, meta, ()


def cmd_qfunc(config: RunConfig):
    state = initial_state(config.initial)
    meta = base_metadata(config)
    if config.time > 0:
        traj = evolve(state, config.params, config.evolution)
        state = traj.bare_state(traj.at(config.time))
        meta["diagnostics"] = _diag(traj)
    grid = q_grid(state, config.n_theta, config.n_phi, time=config.time)
    rows = [[th, ph, grid.values[i, j], grid.time]
            for i, th in enumerate(grid.theta_axis) for j, ph in enumerate(grid.phi_axis)]
    meta["normalization"] = repr(grid.normalization())
    return ["theta", "phi", "q", "time"], rows, meta, ()


def cmd_sweep(config: RunConfig):
    a1, a2 = config.grid
    spec = SweepSpec(a1, a2, config.params, config.t_eval, config.evolution)
    grid = run_sweep(spec, initial_state(config.initial), workers=config.workers)
    rows = [[x, y, grid.values[i, j]]
            for i, x in enumerate(a1.values) for j, y in enumerate(a2.values)]
    meta = base_metadata(config)
    meta["axes"] = f"{a1.name},{a2.name}"
    meta["n_failed"] = len(grid.failures)
    regimes = sorted(set(grid.regimes.ravel().tolist()))
    meta["regimes"] = ",".join(regimes)
    if config.threshold is not None:
        mask = tongue_mask(grid, config.threshold)
        meta["tongue"] = {
            "threshold": repr(config.threshold),
            "cells": int(mask.mask.sum()),
            "components": mask.n_components,
            "largest_component": int(mask.largest.sum()),
        }
    comments = [f"failed {a1.name}={fmt(a1.values[i])} {a2.name}={fmt(a2.values[j])}: {msg}"
                for (i, j), msg in sorted(grid.failures.items())]
    return [a1.name, a2.name, "s_max"], rows, meta, comments


def cmd_trajectory(config: RunConfig):
    traj = evolve(initial_state(config.initial), config.params, config.evolution)
    lab = lab_trajectory(traj)
    verdict = classify(lab.times, lab.lab, config.window, config.eps_fp, config.eps_rec,
                       config.transient_cut)
    meta = base_metadata(config)
    meta["diagnostics"] = _diag(traj)
    meta["classification"] = {
        "verdict": verdict.verdict.value,
        "recurrence_distance": repr(verdict.recurrence_distance),
        "period_estimate": repr(verdict.period_estimate),
        "transient_cut": repr(verdict.transient_cut),
        "reference_period_2pi_over_omega_laser": repr(2 * math.pi / lab.omega_laser),
    }
    return ["t", "mx", "my", "mz", "mxp", "myp", "mzp"], lab.rows().tolist(), meta, ()


HANDLERS = {"evolve": cmd_evolve, "qfunc": cmd_qfunc, "sweep": cmd_sweep,
            "trajectory": cmd_trajectory}


def run(config: RunConfig, stdout=None) -> int:
    """Execute a validated config; returns the process exit status."""
    stdout = stdout or sys.stdout
    try:
        columns, rows, meta, comments = HANDLERS[config.command](config)
        text = render(columns, rows, meta, config.format, comments)
    except IntegrationFailure as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except QubitSyncError as exc:
        print(f"configuration error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if config.out is None:
            stdout.write(text)
        else:
            Path(config.out).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubitsync", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--preset", choices=["markov", "nonmarkov"])
        for flag in ("delta", "epsilon", "gamma", "lambda", "omega0", "t-end", "t-eval",
                     "threshold", "time", "rel-tol", "abs-tol", "max-step", "window",
                     "eps-fp", "eps-rec"):
            p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), metavar="X")
        p.add_argument("--n-samples", dest="n_samples", metavar="N")
        p.add_argument("--initial", help="plus | minus | excited | ground | bloch:mx,my,mz")
        p.add_argument("--grid", help="a:min:max:n,b:min:max:n")
        p.add_argument("--workers", metavar="N")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any configuration key")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    for item in args.set:
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    for key, value in vars(args).items():
        if key in ("config", "set") or value is None:
            continue
        overrides[key] = value
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        config = parse_config(text, overrides)
    except (ParseError, ValidationError, QubitSyncError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
