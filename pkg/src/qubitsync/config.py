"""Flat ``key = value`` run configuration with presets and flag overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .model import DEFAULT_OMEGA_QUBIT, QubitState, SystemParams
from .propagator import EvolutionConfig
from .sweeps import Axis

DEFAULT_GRID = "delta:-2:2:81,epsilon:0.1:2:81"
COMMANDS = ("evolve", "qfunc", "sweep", "trajectory")
FORMATS = ("csv", "json")

PRESETS = {
    "markov": {"lambda": "5", "gamma": "0.1", "epsilon": "1", "delta": "1", "t_end": "500"},
    "nonmarkov": {"lambda": "0.01", "gamma": "0.1", "epsilon": "1", "delta": "1", "t_end": "500"},
}


def _opt_float(text):
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


def _opt_int(text):
    return None if text.strip().lower() in ("", "none", "auto") else int(text)


def _opt_str(text):
    text = text.strip()
    return None if text.lower() in ("", "none", "-") else text


def _grid(text):
    text = text.strip()
    if text.lower() in ("", "none"):
        return None
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise ValueError("grid needs two comma-separated axes name:min:max:n")
    return tuple(Axis.parse(p) for p in parts)


# key -> (converter, default text)
KEYS = {
    "command": (str.strip, "evolve"),
    "preset": (_opt_str, "none"),
    "delta": (float, "1"),
    "epsilon": (float, "1"),
    "gamma": (float, "0.1"),
    "lambda": (float, "5"),
    "omega0": (float, repr(DEFAULT_OMEGA_QUBIT)),
    "t_end": (float, "500"),
    "n_samples": (_opt_int, "auto"),
    "rel_tol": (float, "1e-8"),
    "abs_tol": (float, "1e-10"),
    "max_step": (_opt_float, "auto"),
    "initial": (str.strip, "plus"),
    "out": (_opt_str, "-"),
    "format": (str.strip, "csv"),
    "grid": (_grid, "none"),
    "t_eval": (_opt_float, "auto"),
    "threshold": (_opt_float, "none"),
    "time": (float, "0"),
    "n_theta": (int, "181"),
    "n_phi": (int, "360"),
    "window": (_opt_float, "auto"),
    "eps_fp": (float, "1e-3"),
    "eps_rec": (float, "1e-2"),
    "transient_cut": (_opt_float, "auto"),
    "workers": (int, "1"),
}

ALIASES = {"t-end": "t_end", "t-eval": "t_eval", "n-samples": "n_samples", "omega_0": "omega0",
           "rel-tol": "rel_tol", "abs-tol": "abs_tol", "max-step": "max_step"}


def initial_state(spec: str) -> QubitState:
    """``plus``, ``minus``, ``excited``, ``ground`` or ``bloch:mx,my,mz``."""
    spec = spec.strip().lower()
    named = {
        "plus": lambda: QubitState.plus(),
        "minus": lambda: QubitState.from_bloch(-1, 0, 0),
        "excited": QubitState.excited,
        "ground": QubitState.ground,
    }
    if spec in named:
        return named[spec]()
    if spec.startswith("bloch:"):
        try:
            mx, my, mz = (float(v) for v in spec[6:].split(","))
        except ValueError:
            raise ValidationError(f"bad Bloch vector {spec!r}") from None
        if mx * mx + my * my + mz * mz > 1 + 1e-12:
            raise ValidationError("initial Bloch vector must have norm <= 1")
        return QubitState.from_bloch(mx, my, mz)
    raise ValidationError(f"unknown initial state {spec!r}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: SystemParams
    evolution: EvolutionConfig
    options: dict = field(default_factory=dict)
    preset: str | None = None

    def __getattr__(self, name):
        try:
            return self.__dict__["options"][name]
        except KeyError:
            raise AttributeError(name) from None

    def to_text(self) -> str:
        """Serialize every resolved key; parsing the result gives an equal config."""
        return "".join(f"{k} = {v}\n" for k, v in self.settings().items())

    def settings(self) -> dict:
        p = self.params
        ev = self.evolution
        o = self.options
        grid = o["grid"]
        return {
            "command": self.command,
            "delta": repr(p.delta_detuning),
            "epsilon": repr(p.epsilon_drive),
            "gamma": repr(p.gamma_coupling),
            "lambda": repr(p.lambda_cutoff),
            "omega0": repr(p.omega_qubit),
            "t_end": repr(ev.t_end),
            "n_samples": str(o["n_samples"]),
            "rel_tol": repr(ev.rel_tol),
            "abs_tol": repr(ev.abs_tol),
            "max_step": "auto" if ev.max_step is None else repr(ev.max_step),
            "initial": o["initial"],
            "out": o["out"] or "-",
            "format": o["format"],
            "grid": "none" if grid is None else ",".join(str(a) for a in grid),
            "t_eval": repr(o["t_eval"]),
            "threshold": "none" if o["threshold"] is None else repr(o["threshold"]),
            "time": repr(o["time"]),
            "n_theta": str(o["n_theta"]),
            "n_phi": str(o["n_phi"]),
            "window": repr(o["window"]),
            "eps_fp": repr(o["eps_fp"]),
            "eps_rec": repr(o["eps_rec"]),
            "transient_cut": "auto" if o["transient_cut"] is None else repr(o["transient_cut"]),
            "workers": str(o["workers"]),
        }


def _read_lines(text: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = ALIASES.get(key, key)
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        raw[key] = (value, lineno)
    return raw


def parse_config(text: str = "", overrides: dict | None = None) -> RunConfig:
    """Build a validated RunConfig.

    Precedence, lowest first: built-in defaults, preset, file keys, overrides.
    ``overrides`` maps keys to string (or plain) values, e.g. parsed CLI flags.
    """
    raw = _read_lines(text)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        key = ALIASES.get(key, key.replace("-", "_"))
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}")
        raw[key] = (str(value), None)

    preset_text = raw.get("preset", ("none", None))
    preset = _opt_str(preset_text[0])
    merged = {k: (default, None) for k, (_, default) in KEYS.items()}
    if preset is not None:
        if preset not in PRESETS:
            raise ValidationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        merged.update({k: (v, None) for k, v in PRESETS[preset].items()})
    merged.update(raw)

    values = {}
    for key, (text_value, lineno) in merged.items():
        conv = KEYS[key][0]
        try:
            values[key] = conv(text_value)
        except ValidationError:
            raise
        except ValueError as exc:
            raise ParseError(f"{key}: cannot parse {text_value!r} ({exc})", lineno) from None
    return _build(values, preset)


def _build(v: dict, preset) -> RunConfig:
    if v["command"] not in COMMANDS:
        raise ValidationError(f"command must be one of {COMMANDS}")
    if v["format"] not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}")
    params = SystemParams(delta_detuning=v["delta"], epsilon_drive=v["epsilon"],
                          omega_qubit=v["omega0"], gamma_coupling=v["gamma"],
                          lambda_cutoff=v["lambda"])
    t_end = v["t_end"]
    if not (t_end >= 0 and math.isfinite(t_end)):
        raise ValidationError("t_end must be finite and >= 0")
    initial_state(v["initial"])

    n = v["n_samples"]
    if n is None:
        n = 501
        if v["command"] == "trajectory":
            # resolve pi/16 per sample at the laser frequency, twice the aliasing guard
            n = max(501, int(math.ceil(t_end * params.omega_laser / (math.pi / 16))) + 1)
    if n < 1 or (n == 1 and t_end > 0):
        raise ValidationError("n_samples must be >= 2 (or 1 with t_end = 0)")

    t_eval = t_end if v["t_eval"] is None else v["t_eval"]
    if not 0 <= t_eval <= t_end:
        raise ValidationError("t_eval must lie in [0, t_end]")
    qtime = v["time"]
    if not 0 <= qtime <= t_end:
        raise ValidationError("time must lie in [0, t_end]")
    if v["command"] == "sweep":
        # cells only need the evaluation time
        times = sorted({0.0, t_eval})
    else:
        base = [0.0] if t_end == 0 else _linspace(t_end, n)
        times = sorted(set(base + ([qtime] if v["command"] == "qfunc" else [])))
    evolution = EvolutionConfig(t_end=t_end, sample_times=tuple(times), rel_tol=v["rel_tol"],
                                abs_tol=v["abs_tol"], max_step=v["max_step"])

    if v["command"] == "sweep" and v["grid"] is None:
        v["grid"] = _grid(DEFAULT_GRID)
    if v["grid"] is not None and v["grid"][0].name == v["grid"][1].name:
        raise ValidationError("grid axes must differ")
    if v["threshold"] is not None and not 0 < v["threshold"] < 1 / 8:
        raise ValidationError("threshold must lie in (0, 1/8)")
    if v["n_theta"] < 2 or v["n_phi"] < 1:
        raise ValidationError("n_theta >= 2 and n_phi >= 1 required")
    window = t_end / 10 if v["window"] is None else v["window"]
    if v["command"] == "trajectory" and not window > 0:
        raise ValidationError("window must be > 0")
    if v["eps_fp"] <= 0 or v["eps_rec"] <= 0:
        raise ValidationError("eps_fp and eps_rec must be > 0")
    if v["workers"] < 1:
        raise ValidationError("workers must be >= 1")

    options = {
        "n_samples": n,
        "initial": v["initial"],
        "out": v["out"],
        "format": v["format"],
        "grid": v["grid"],
        "t_eval": float(t_eval),
        "threshold": v["threshold"],
        "time": float(qtime),
        "n_theta": v["n_theta"],
        "n_phi": v["n_phi"],
        "window": float(window),
        "eps_fp": v["eps_fp"],
        "eps_rec": v["eps_rec"],
        "transient_cut": v["transient_cut"],
        "workers": v["workers"],
    }
    return RunConfig(v["command"], params, evolution, options, preset)


def _linspace(t_end, n):
    return [t_end * k / (n - 1) for k in range(n)] if n > 1 else [0.0]
