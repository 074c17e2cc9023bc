import io
import json
import math

import numpy as np
import pytest

from qubitsync import (EvolutionConfig, ParseError, QubitState, ValidationError, evolve,
                       s_max)
from qubitsync.cli import main, run
from qubitsync.config import parse_config


def read_csv(text):
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# ") and " = " in line:
            k, v = line[2:].split(" = ", 1)
            meta[k] = v
        elif not line.startswith("#"):
            body.append(line)
    columns = body[0].split(",")
    data = np.array([[float(x) for x in row.split(",")] for row in body[1:]])
    return columns, data, meta


def run_text(config):
    buf = io.StringIO()
    assert run(config, stdout=buf) == 0
    return buf.getvalue()


def test_sweep_default_grid():
    a1, a2 = parse_config("command = sweep\n").grid
    assert (a1.name, a1.min, a1.max, a1.n_points) == ("delta", -2.0, 2.0, 81)
    assert (a2.name, a2.min, a2.max, a2.n_points) == ("epsilon", 0.1, 2.0, 81)


def test_preset_expansion():
    cfg = parse_config("", {"preset": "nonmarkov"})
    p = cfg.params
    assert (p.lambda_cutoff, p.gamma_coupling, p.epsilon_drive, p.delta_detuning) == \
        (0.01, 0.1, 1.0, 1.0)
    assert cfg.evolution.t_end == 500
    assert parse_config("preset = markov\n").params.lambda_cutoff == 5


def test_negative_gamma_rejected():
    with pytest.raises(ValidationError, match="gamma"):
        parse_config("gamma = -1\n")


def test_flag_overrides_file():
    assert parse_config("delta = 1\n", {"delta": "0"}).params.delta_detuning == 0
    # file beats preset
    assert parse_config("preset = nonmarkov\nlambda = 2\n").params.lambda_cutoff == 2


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        parse_config("delta = 1\n\nbogus = 3\n")
    assert err.value.line == 3 and "line 3" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_config("epsilon = one\n")
    assert err.value.line == 1
    with pytest.raises(ParseError):
        parse_config("delta 1\n")


def test_invalid_choices():
    with pytest.raises(ValidationError):
        parse_config("format = xml\n")
    with pytest.raises(ValidationError):
        parse_config("command = sweep\ngrid = delta:0:1:2,delta:0:1:2\n")
    with pytest.raises(ValidationError):
        parse_config("preset = hot\n")


@pytest.mark.parametrize("text", [
    "",
    "command = sweep\n",
    "preset = nonmarkov\ncommand = trajectory\nt_end = 300\n",
    "command = sweep\ngrid = delta:-2:2:41,epsilon:0.1:2:41\nthreshold = 0.05\nworkers = 4\n",
    "command = qfunc\ntime = 12.5\ninitial = bloch:0.1,0.2,-0.3\nmax_step = 0.001\n",
])
def test_config_round_trip(text):
    cfg = parse_config(text)
    again = parse_config(cfg.to_text())
    assert again.settings() == cfg.settings()
    assert again.params == cfg.params
    assert again.evolution == cfg.evolution


def test_evolve_nonmarkov_coherence_stays_near_half():
    cols, data, meta = read_csv(run_text(parse_config("", {"preset": "nonmarkov"})))
    col = data[:, cols.index("abs_rho10")]
    assert data[-1, 0] == 500
    assert np.all((col >= 0.45) & (col <= 0.5 + 1e-12)), (col.min(), col.max())


def test_evolve_csv_metadata_and_columns():
    cfg = parse_config("t_end = 2\nn_samples = 5\n")
    cols, data, meta = read_csv(run_text(cfg))
    assert cols[:6] == ["t", "rho11", "rho00", "re_rho10", "im_rho10", "abs_rho10"]
    assert data.shape == (5, len(cols))
    assert meta["config.omega0"] == "5.0"
    assert meta["config.rel_tol"] == "1e-08"
    assert meta["artifact_version"]
    np.testing.assert_allclose(data[:, 1] + data[:, 2], 1, atol=1e-12)
    assert parse_config("\n".join(f"{k[7:]} = {v}" for k, v in meta.items()
                                  if k.startswith("config."))).settings() == cfg.settings()


def test_qfunc_peak_at_zero_phase():
    cols, data, meta = read_csv(run_text(parse_config("command = qfunc\n")))
    assert cols == ["theta", "phi", "q", "time"]
    top = data[np.argmax(data[:, 2])]
    assert top[1] == 0.0
    assert top[0] == pytest.approx(math.pi / 2)
    assert abs(float(meta["normalization"]) - 1) < 1e-6


def test_single_cell_sweep_matches_evolve():
    cfg = parse_config("command = sweep\nt_end = 30\ngrid = delta:0.5:0.5:1,epsilon:1.2:1.2:1\n")
    cols, data, _ = read_csv(run_text(cfg))
    assert cols == ["delta", "epsilon", "s_max"]
    p = cfg.params.replace(delta_detuning=0.5, epsilon_drive=1.2)
    tr = evolve(QubitState.plus(), p, EvolutionConfig.uniform(30, 301))
    assert data[0, 2] == pytest.approx(s_max(tr.bare_state(-1))[0], abs=1e-9)


def test_sweep_failure_rows_and_json():
    cfg = parse_config("command = sweep\nt_end = 5\ngrid = gamma:-0.1:0.1:2,delta:0:0:1\n"
                       "format = json\n")
    doc = json.loads(run_text(cfg))
    assert doc["columns"] == ["gamma", "delta", "s_max"]
    assert doc["rows"][0][2] is None and doc["rows"][1][2] > 0
    assert doc["metadata"]["n_failed"] == 1
    assert any("failed gamma=-0.1" in d for d in doc["diagnostics"])


def test_trajectory_json(tmp_path):
    out = tmp_path / "traj.json"
    code = main(["trajectory", "--t-end", "60", "--window", "6", "--out", str(out),
                 "--format", "json"])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["columns"] == ["t", "mx", "my", "mz", "mxp", "myp", "mzp"]
    assert doc["metadata"]["classification"]["verdict"] in ("fixed_point", "limit_cycle",
                                                              "undecided")


def test_exit_codes(tmp_path, capsys):
    assert main(["evolve", "--gamma", "-1"]) == 2
    assert main(["evolve", "--set", "nonsense=1"]) == 2
    assert main(["evolve", "--config", str(tmp_path / "missing.cfg")]) == 4
    assert main(["evolve", "--t-end", "1", "--out", str(tmp_path / "no" / "dir.csv")]) == 4
    # no step can meet a tolerance this far below machine precision
    assert main(["evolve", "--t-end", "1", "--rel-tol", "1e-300", "--abs-tol", "1e-300"]) == 3
    assert main(["evolve", "--t-end", "1", "--n-samples", "3",
                 "--out", str(tmp_path / "ok.csv")]) == 0
    capsys.readouterr()


def test_sweep_output_is_bit_identical(tmp_path):
    args = ["sweep", "--t-end", "10", "--grid", "delta:-1:1:3,epsilon:0.5:1:2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert a.read_bytes() != b""
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
