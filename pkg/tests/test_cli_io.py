import csv
import hashlib
import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from zitter.cli_io import (EXIT_CONFIG, EXIT_IO, EXIT_PHYSICS, MANIFEST_NAME, OUT_DIR_ENV, emit_csv,
                           main, parse_config, run)
from zitter.errors import (InvalidValueError, MissingFieldError, NonFiniteError, UnknownCommandError,
                           UnknownKeyError)
from zitter.zitterbewegung import TimeSeries, dwell_density

REST_SIMULATE = {
    "command": "simulate",
    "packet": {"nodes": 1, "epsilon": 1 / math.sqrt(2), "delta": 0.0, "spin": "up"},
    "time": {"t_max": 1.0, "dt": 0.001},
}
KINEMATICS = {"command": "kinematics", "scenario": {"E": 45e9, "b_perp": 1e-16}}


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


# -- parse_config -------------------------------------------------------------

def test_minimal_kinematics_config():
    cfg = parse_config(json.dumps(KINEMATICS))
    assert cfg.command == "kinematics"
    assert cfg.scenario.energy_ev == 45e9
    assert cfg.scenario.b_perp_cm == 1e-16


def test_dt_zero_names_dt():
    doc = dict(REST_SIMULATE, time={"t_max": 1.0, "dt": 0})
    with pytest.raises(InvalidValueError, match="dt") as exc:
        parse_config(json.dumps(doc))
    assert exc.value.key == "time.dt"


def test_unknown_key_named():
    with pytest.raises(UnknownKeyError, match="foo") as exc:
        parse_config(json.dumps(dict(KINEMATICS, foo=1)))
    assert exc.value.key == "foo"
    with pytest.raises(UnknownKeyError, match="foo"):
        parse_config(json.dumps(dict(REST_SIMULATE, packet={"foo": 2})))


def test_unknown_command():
    with pytest.raises(UnknownCommandError):
        parse_config('{"command": "teleport"}')


def test_missing_fields():
    with pytest.raises(MissingFieldError, match="scenario"):
        parse_config('{"command": "kinematics"}')
    with pytest.raises(MissingFieldError, match="packet"):
        parse_config('{"command": "simulate", "time": {"t_max": 1, "dt": 0.1}}')
    with pytest.raises(MissingFieldError, match="t_max"):
        parse_config(json.dumps(dict(REST_SIMULATE, time={"dt": 0.1})))
    with pytest.raises(MissingFieldError, match="command"):
        parse_config("{}")


def test_non_finite_rejected():
    with pytest.raises(NonFiniteError, match="sigma"):
        parse_config('{"command": "trajectory", "packet": {"sigma": NaN}}')
    with pytest.raises(NonFiniteError, match="E"):
        parse_config('{"command": "kinematics", "scenario": {"E": Infinity, "b_perp": 1e-16}}')


@pytest.mark.parametrize("text", [
    "not json", "[1, 2]", '{"command": 3}', '{"command": "simulate", "packet": 5}',
    '{"command": "trajectory", "packet": {"p0": [1, 2]}}',
    '{"command": "trajectory", "packet": {"nodes": 2.5}}',
    '{"command": "trajectory", "packet": {"epsilon": 2}}',
    '{"command": "trajectory", "packet": {"spin": "sideways"}}',
    '{"command": "trajectory", "packet": {"sigma": true}}',
    '{"command": "kinematics", "scenario": {"E": 1, "b_perp": 1e-16}}',
    '{"command": "density"}',
    '{"command": "density", "density": {"amplitude": 1, "axis": "w"}}',
    '{"command": "constants", "output": {"format": "xml"}}',
])
def test_malformed_configs_raise_structured_errors(text):
    from zitter.errors import ConfigError
    with pytest.raises(ConfigError):
        parse_config(text)


def test_cli_command_must_agree_with_config():
    with pytest.raises(InvalidValueError, match="command"):
        parse_config(json.dumps(KINEMATICS), command="constants")
    assert parse_config("{}", command="constants").command == "constants"


# -- emit_csv -------------------------------------------------------------------

def test_empty_series_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv(TimeSeries.empty(), path)
    assert path.read_text() == "t,vE_x,vE_y,vE_z,vZ_x,vZ_y,vZ_z,xZ_x,xZ_y,xZ_z\n"


def test_checksums_are_deterministic(tmp_path):
    h = dwell_density(0.5, n_bins=16, n_samples=1000)
    c1 = emit_csv(h, tmp_path / "a.csv")
    c2 = emit_csv(h, tmp_path / "b.csv")
    assert c1 == c2 == hashlib.sha256((tmp_path / "a.csv").read_bytes()).hexdigest()


def test_numbers_round_trip(tmp_path):
    h = dwell_density(1 / (4 * np.pi), n_bins=8, n_samples=999)
    emit_csv(h, tmp_path / "d.csv")
    rows = list(csv.DictReader(open(tmp_path / "d.csv")))
    assert [float(r["histogram"]) for r in rows] == h.density.tolist()
    assert [float(r["closed_form"]) for r in rows] == h.closed_form.tolist()


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_csv(TimeSeries.empty(), tmp_path / "missing" / "x.csv")


# -- run ---------------------------------------------------------------------------

def test_constants_command(tmp_path, capsys):
    assert main(["constants", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert re.search(r"8\.09\d*e-21 s", out)
    assert "cm" in out and "eV" in out
    manifest = json.loads((tmp_path / MANIFEST_NAME).read_text())
    assert manifest["units"].startswith("electron units: m_e=c=h=1")
    assert "alpha" in manifest["velocity_sign"]


def test_kinematics_command(tmp_path, capsys):
    cfg = write_config(tmp_path, dict(KINEMATICS, delta_w=1e-7))
    assert main(["kinematics", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    tau = re.search(r"tau = b_parallel/c = (\S+) s", out)
    assert float(tau.group(1)) == pytest.approx(3.7e-32, rel=0.03)
    assert "PointLike" in out and "Extended" in out
    assert "gamma^-1" in out


def test_simulate_command(tmp_path):
    cfg = write_config(tmp_path, REST_SIMULATE)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "simulate.csv").read_text().splitlines()
    assert len(lines) == 1001
    rows = list(csv.DictReader(lines))
    assert float(rows[0]["t"]) == 0.0
    assert float(rows[0]["vZ_x"]) == 1.0
    manifest = json.loads((tmp_path / MANIFEST_NAME).read_text())
    assert manifest["outputs"]["simulate.csv"] == hashlib.sha256((tmp_path / "simulate.csv").read_bytes()).hexdigest()
    assert manifest["config"]["command"] == "simulate"


def test_simulate_with_observability(tmp_path, capsys):
    cfg = parse_config(json.dumps(dict(REST_SIMULATE, delta_w=1e-7)))
    assert run(cfg, tmp_path) == 0
    report = json.loads((tmp_path / "observability.json").read_text())
    assert report["averaged"] is True
    assert report["resolution_ratio"] == pytest.approx(5.11e12, rel=1e-3)
    assert "time-averaged" in capsys.readouterr().out


def test_density_command(tmp_path):
    doc = {"command": "density", "density": {"amplitude": 1 / (4 * math.pi), "n_bins": 64, "n_samples": 100_000}}
    assert run(parse_config(json.dumps(doc)), tmp_path) == 0
    rows = list(csv.DictReader(open(tmp_path / "density.csv")))
    assert len(rows) == 64
    assert list(rows[0]) == ["bin_center", "histogram", "closed_form"]


def test_density_from_packet(tmp_path):
    doc = {"command": "density", "packet": REST_SIMULATE["packet"], "density": {"n_samples": 10_000}}
    run(parse_config(json.dumps(doc)), tmp_path)
    centers = [float(r["bin_center"]) for r in csv.DictReader(open(tmp_path / "density.csv"))]
    assert max(centers) < 1 / (4 * math.pi)
    assert max(centers) > 0.95 / (4 * math.pi)


def test_trajectory_command(tmp_path):
    doc = {"command": "trajectory", "packet": REST_SIMULATE["packet"], "trajectory": {"n_samples": 65}}
    run(parse_config(json.dumps(doc)), tmp_path)
    rows = list(csv.reader(open(tmp_path / "trajectory.csv")))
    assert rows[0] == ["t", "x", "y", "z"]
    assert len(rows) == 66
    first, last = np.array(rows[1][1:], float), np.array(rows[-1][1:], float)
    assert np.max(np.abs(first - last)) < 1e-9
    assert float(rows[-1][0]) == pytest.approx(0.5)


def test_trajectory_mode_out_of_range(tmp_path):
    doc = {"command": "trajectory", "packet": {"nodes": 1}, "trajectory": {"mode": 3}}
    assert main(["trajectory", "--config", str(write_config(tmp_path, doc)), "--out", str(tmp_path)]) == EXIT_PHYSICS


def test_env_var_sets_default_output(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env_out"))
    assert main(["constants"]) == 0
    assert (tmp_path / "env_out" / MANIFEST_NAME).exists()


def test_exit_codes(tmp_path, capsys):
    bad = write_config(tmp_path, dict(REST_SIMULATE, time={"t_max": 1.0, "dt": 0}))
    assert main(["simulate", "--config", str(bad)]) == EXIT_CONFIG
    assert "dt" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == EXIT_IO
    assert main(["teleport", "--out", str(tmp_path)]) == EXIT_CONFIG
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = write_config(tmp_path, REST_SIMULATE)
    assert main(["simulate", "--config", str(cfg), "--out", str(blocker / "sub")]) == EXIT_IO


def test_repeated_runs_are_byte_identical(tmp_path):
    cfg = parse_config(json.dumps(dict(REST_SIMULATE, packet={"nodes": 3, "sigma": 0.05, "epsilon": 0.4})))
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    for name in ("simulate.csv", MANIFEST_NAME):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "zitter", "constants", "--out", str(tmp_path)],
                          capture_output=True, text=True, check=True)
    assert "T_Z" in proc.stdout
