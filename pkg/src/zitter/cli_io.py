"""
Command-line front end: JSON run configs in, CSV tables and a JSON manifest out.

    zitter <command> --config run.json [--out DIR]

Commands: constants, kinematics, simulate, density, trajectory. The output
directory falls back to ``output.path`` in the config, then ``$ZITTER_OUT_DIR``,
then the working directory. Exit codes: 0 ok, 1 other failure, 2 bad config,
3 physics precondition violated, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from . import __version__
from .dirac_core import SpinLabel
from .errors import (ConfigError, InvalidValueError, MissingFieldError, NonFiniteError,
                     PhysicsError, UnknownCommandError, UnknownKeyError, ZitterError)
from .kinematics import (CONSTANTS, M_E_C2, CollisionScenario, classify_regime, collision_time,
                         compton_wavelength, contracted_impact, gamma_inverse, uncertainty_time,
                         zitter_period)
from .wavepacket import PacketSpec, PacketState, gaussian_packet
from .zitterbewegung import (AXES, VELOCITY_SIGN_CONVENTION, DwellHistogram, TimeSeries, Trajectory,
                             dwell_density, mode_trajectory, observability_filter, simulate,
                             trajectory_times, zb_mode)

COMMANDS = ("constants", "kinematics", "simulate", "density", "trajectory")
UNIT_SYSTEM = "electron units: m_e=c=h=1 (energy m_e c^2, time T_Z=h/m_e c^2, length lambda_C=h/m_e c)"
OUT_DIR_ENV = "ZITTER_OUT_DIR"
MANIFEST_NAME = "manifest.json"

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG, EXIT_PHYSICS, EXIT_IO = 0, 1, 2, 3, 4

_SECTIONS = {
    "command": None,
    "packet": {"p0", "sigma", "epsilon", "delta", "spin", "nodes", "cutoff"},
    "time": {"t_max", "dt"},
    "scenario": {"E", "b_perp"},
    "delta_w": None,
    "density": {"amplitude", "n_bins", "n_samples", "axis"},
    "trajectory": {"n_samples", "mode"},
    "output": {"path", "format"},
}


@dataclass(frozen=True)
class DensitySettings:
    amplitude: float | None = None
    n_bins: int = 64
    n_samples: int = 1_000_000
    axis: str = "x"


@dataclass(frozen=True)
class RunConfig:
    command: str
    packet: PacketSpec | None = None
    t_max: float | None = None
    dt: float | None = None
    scenario: CollisionScenario | None = None
    delta_w_ev: float | None = None
    density: DensitySettings = DensitySettings()
    trajectory_samples: int = 257
    trajectory_mode: int | str = "center"
    output_dir: str | None = None
    output_format: str = "csv"
    raw: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# config parsing

def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValueError(f"'{key}' must be a number, got {value!r}", key)
    if not math.isfinite(value):
        raise NonFiniteError(f"'{key}' must be finite, got {value!r}", key)
    return float(value)


def _integer(value: Any, key: str, minimum: int) -> int:
    x = _number(value, key)
    if x != int(x) or x < minimum:
        raise InvalidValueError(f"'{key}' must be an integer >= {minimum}, got {value!r}", key)
    return int(x)


def _positive(value: Any, key: str) -> float:
    x = _number(value, key)
    if x <= 0:
        raise InvalidValueError(f"'{key}' must be positive, got {value!r}", key)
    return x


def _section(doc: dict, name: str) -> dict | None:
    sec = doc.get(name)
    if sec is None:
        return None
    if not isinstance(sec, dict):
        raise InvalidValueError(f"'{name}' must be an object", name)
    for key in sec:
        if key not in _SECTIONS[name]:
            raise UnknownKeyError(f"unknown key '{key}' in '{name}'", f"{name}.{key}")
    return sec


def _require(sec: dict | None, name: str, key: str) -> Any:
    if sec is None:
        raise MissingFieldError(f"missing required section '{name}'", name)
    if key not in sec:
        raise MissingFieldError(f"missing required field '{name}.{key}'", f"{name}.{key}")
    return sec[key]


def _parse_packet(sec: dict) -> PacketSpec:
    kw: dict[str, Any] = {}
    if "p0" in sec:
        p0 = sec["p0"]
        if not isinstance(p0, list) or len(p0) != 3:
            raise InvalidValueError("'packet.p0' must be a list of three numbers", "packet.p0")
        kw["p0"] = tuple(_number(c, "packet.p0") for c in p0)
    if "sigma" in sec:
        kw["sigma"] = _positive(sec["sigma"], "packet.sigma")
    if "epsilon" in sec:
        eps = _number(sec["epsilon"], "packet.epsilon")
        if not 0.0 <= eps <= 1.0:
            raise InvalidValueError(f"'packet.epsilon' must lie in [0, 1], got {eps}", "packet.epsilon")
        kw["epsilon"] = eps
    if "delta" in sec:
        kw["delta"] = _number(sec["delta"], "packet.delta")
    if "spin" in sec:
        try:
            kw["spin"] = SpinLabel(str(sec["spin"]).lower())
        except ValueError:
            raise InvalidValueError(f"'packet.spin' must be 'up' or 'down', got {sec['spin']!r}",
                                    "packet.spin") from None
    if "nodes" in sec:
        kw["nodes"] = _integer(sec["nodes"], "packet.nodes", 1)
    if "cutoff" in sec:
        kw["cutoff"] = _positive(sec["cutoff"], "packet.cutoff")
    return PacketSpec(**kw)


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """
    Validate a JSON run configuration.

    ``command`` (from the command line) fills in or must agree with the
    document's own ``command`` field. Every problem raises a ``ConfigError``
    subclass whose ``key`` names the offending field.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidValueError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidValueError("config must be a JSON object")
    for key in doc:
        if key not in _SECTIONS:
            raise UnknownKeyError(f"unknown key '{key}'", key)

    cmd = doc.get("command", command)
    if cmd is None:
        raise MissingFieldError("missing required field 'command'", "command")
    if command is not None and cmd != command:
        raise InvalidValueError(f"config command {cmd!r} does not match {command!r}", "command")
    if cmd not in COMMANDS:
        raise UnknownCommandError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}",
                                  "command")

    packet_sec = _section(doc, "packet")
    time_sec = _section(doc, "time")
    scen_sec = _section(doc, "scenario")
    dens_sec = _section(doc, "density")
    traj_sec = _section(doc, "trajectory")
    out_sec = _section(doc, "output") or {}

    kw: dict[str, Any] = {"command": cmd, "raw": {**doc, "command": cmd}}
    if packet_sec is not None:
        kw["packet"] = _parse_packet(packet_sec)
    elif cmd in ("simulate", "trajectory"):
        raise MissingFieldError(f"command '{cmd}' requires a 'packet' section", "packet")

    if time_sec is not None or cmd == "simulate":
        dt = _number(_require(time_sec, "time", "dt"), "time.dt")
        t_max = _number(_require(time_sec, "time", "t_max"), "time.t_max")
        if dt <= 0:
            raise InvalidValueError(f"'time.dt' must be positive, got {dt}", "time.dt")
        if t_max < dt:
            raise InvalidValueError(f"'time.t_max' must be at least dt, got {t_max}", "time.t_max")
        kw.update(dt=dt, t_max=t_max)

    if scen_sec is not None or cmd == "kinematics":
        energy = _number(_require(scen_sec, "scenario", "E"), "scenario.E")
        b_perp = _number(_require(scen_sec, "scenario", "b_perp"), "scenario.b_perp")
        if energy < M_E_C2:
            raise InvalidValueError(f"'scenario.E' must be at least m_e c^2 = {M_E_C2} eV", "scenario.E")
        if b_perp <= 0:
            raise InvalidValueError("'scenario.b_perp' must be positive", "scenario.b_perp")
        kw["scenario"] = CollisionScenario(energy, b_perp)

    if "delta_w" in doc:
        kw["delta_w_ev"] = _positive(doc["delta_w"], "delta_w")

    if dens_sec is not None:
        d: dict[str, Any] = {}
        if "amplitude" in dens_sec:
            d["amplitude"] = _positive(dens_sec["amplitude"], "density.amplitude")
        if "n_bins" in dens_sec:
            d["n_bins"] = _integer(dens_sec["n_bins"], "density.n_bins", 2)
        if "n_samples" in dens_sec:
            d["n_samples"] = _integer(dens_sec["n_samples"], "density.n_samples", 1)
        if "axis" in dens_sec:
            if dens_sec["axis"] not in AXES:
                raise InvalidValueError("'density.axis' must be one of x, y, z", "density.axis")
            d["axis"] = dens_sec["axis"]
        kw["density"] = DensitySettings(**d)
    if cmd == "density" and kw.get("density", DensitySettings()).amplitude is None and packet_sec is None:
        raise MissingFieldError("command 'density' requires 'density.amplitude' or a 'packet'",
                                "density.amplitude")

    if traj_sec is not None:
        if "n_samples" in traj_sec:
            kw["trajectory_samples"] = _integer(traj_sec["n_samples"], "trajectory.n_samples", 2)
        if "mode" in traj_sec:
            mode = traj_sec["mode"]
            if mode != "center":
                mode = _integer(mode, "trajectory.mode", 0)
            kw["trajectory_mode"] = mode

    if "path" in out_sec:
        if not isinstance(out_sec["path"], str):
            raise InvalidValueError("'output.path' must be a string", "output.path")
        kw["output_dir"] = out_sec["path"]
    if "format" in out_sec:
        if out_sec["format"] != "csv":
            raise InvalidValueError("'output.format' must be 'csv'", "output.format")
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# emission

def _fmt(x: float) -> str:
    return repr(float(x))


def _rows(obj) -> tuple[list[str], list[list[float]]]:
    if isinstance(obj, TimeSeries):
        header = ["t", "vE_x", "vE_y", "vE_z", "vZ_x", "vZ_y", "vZ_z", "xZ_x", "xZ_y", "xZ_z"]
        data = np.column_stack([obj.t, obj.v_E, obj.v_Z, obj.x_Z]) if len(obj) else np.zeros((0, 10))
        return header, data.tolist()
    if isinstance(obj, DwellHistogram):
        header = ["bin_center", "histogram", "closed_form"]
        return header, np.column_stack([obj.bin_centers, obj.density, obj.closed_form]).tolist()
    if isinstance(obj, Trajectory):
        header = ["t", "x", "y", "z"]
        return header, np.column_stack([obj.t, obj.points]).reshape(-1, 4).tolist()
    raise TypeError(f"cannot emit {type(obj).__name__} as CSV")


def render_csv(obj) -> str:
    header, rows = _rows(obj)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(obj, path: str | os.PathLike) -> str:
    """Write a series, histogram or trajectory as CSV; return the SHA-256 of the bytes."""
    data = render_csv(obj).encode("utf-8")
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _write_json(payload: dict, path: Path) -> str:
    data = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def build_manifest(config: RunConfig, outputs: dict[str, str]) -> dict:
    return {
        "tool": "zitter",
        "version": __version__,
        "units": UNIT_SYSTEM,
        "velocity_sign": VELOCITY_SIGN_CONVENTION,
        "config": config.raw,
        "outputs": dict(sorted(outputs.items())),
    }


# ---------------------------------------------------------------------------
# commands

def _resolve_out_dir(config: RunConfig, out_dir: str | os.PathLike | None) -> Path:
    target = out_dir or config.output_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _packet(config: RunConfig) -> PacketState:
    return gaussian_packet(config.packet or PacketSpec())


def _center_index(state: PacketState) -> int:
    p0 = np.asarray(state.spec.p0 if state.spec else np.zeros(3))
    return int(np.argmin(np.sum((state.momenta - p0) ** 2, axis=1)))


def _mode_index(config: RunConfig, state: PacketState) -> int:
    if config.trajectory_mode == "center":
        return _center_index(state)
    idx = int(config.trajectory_mode)
    if idx >= len(state):
        raise PhysicsError(f"trajectory.mode {idx} out of range for a packet of {len(state)} nodes")
    return idx


def _constants_lines() -> list[str]:
    T = zitter_period()
    return [
        f"T_Z = h/m_e c^2 = {T:.6e} s  (1 in electron units)",
        f"lambda_C = c T_Z = {compton_wavelength():.6e} cm  (1 in electron units)",
        f"m_e c^2 = {M_E_C2:.8g} eV = {M_E_C2 * CONSTANTS.joule_per_ev:.6e} J  (1 in electron units)",
        f"ZB angular frequency at rest = 4 pi / T_Z = {4 * math.pi / T:.6e} rad/s",
    ]


def _kinematics_lines(config: RunConfig) -> list[str]:
    sc = config.scenario
    tau = collision_time(sc)
    verdict = classify_regime(tau)
    lines = [
        f"E = {sc.energy_ev:.6e} eV, b_perp = {sc.b_perp_cm:.6e} cm",
        f"gamma^-1 = sqrt(1-beta^2) = {gamma_inverse(sc.energy_ev):.6e}",
        f"b_parallel = {contracted_impact(sc.b_perp_cm, sc.energy_ev):.6e} cm",
        f"tau = b_parallel/c = {tau:.6e} s",
        f"tau/T_Z = {verdict.ratio:.6e} -> {verdict.verdict.value}",
    ]
    if config.delta_w_ev is not None:
        ut = uncertainty_time(config.delta_w_ev)
        res = classify_regime(ut.delta_t)
        lines += [
            f"delta_w/m_e c^2 = {config.delta_w_ev / M_E_C2:.6e}",
            f"delta_t = {ut.delta_t:.6e} s, delta_t/T_Z = {ut.ratio:.6e} -> {res.verdict.value}",
        ]
    return lines


def _report_payload(report) -> dict:
    payload = {
        "averaged": report.averaged,
        "resolution_ratio": report.resolution_ratio,
        "zb_period": report.period,
        "v_E": report.v_E.tolist(),
    }
    if report.averaged:
        payload["mean_zb_displacement"] = report.mean_zb_displacement.tolist()
        payload["zb_center"] = report.zb_center.tolist()
        payload["densities"] = [
            {"mode": i, "axis": ax, "amplitude": h.amplitude, "l1_to_arcsine": h.l1_distance()}
            for i, ax, h in report.densities
        ]
    return payload


def run(config: RunConfig, out_dir: str | os.PathLike | None = None, stdout: TextIO | None = None) -> int:
    """Execute one command, write its artifacts plus ``manifest.json``; return the exit status."""
    stdout = stdout or sys.stdout
    out = _resolve_out_dir(config, out_dir)
    outputs: dict[str, str] = {}
    lines: list[str] = []

    if config.command == "constants":
        lines = _constants_lines()
    elif config.command == "kinematics":
        lines = _kinematics_lines(config)
    elif config.command == "simulate":
        state = _packet(config)
        series = simulate(state, config.t_max, config.dt)
        outputs["simulate.csv"] = emit_csv(series, out / "simulate.csv")
        if config.delta_w_ev is not None:
            report = observability_filter(state, config.delta_w_ev / M_E_C2, t_max=config.t_max,
                                          dt=config.dt, max_modes=1)
            outputs["observability.json"] = _write_json(_report_payload(report), out / "observability.json")
            lines.append(f"observability: {'time-averaged' if report.averaged else 'raw oscillations'}"
                         f" (delta_t/T_Z = {report.resolution_ratio:.6e})")
        lines.append(f"wrote {len(series)} samples to {out / 'simulate.csv'}")
    elif config.command == "density":
        ds = config.density
        amplitude, phase = ds.amplitude, 0.0
        if amplitude is None:
            state = _packet(config)
            zm = zb_mode(state.modes[_center_index(state)])
            j = AXES.index(ds.axis)
            amplitude = zm.weight * float(zm.amplitude[j]) / zm.omega
            phase = float(zm.phase[j])
            if amplitude <= 0:
                raise PhysicsError(f"packet has no ZB oscillation on axis {ds.axis}")
        hist = dwell_density(amplitude, ds.n_bins, ds.n_samples, axis=ds.axis, phase=phase)
        outputs["density.csv"] = emit_csv(hist, out / "density.csv")
        lines.append(f"dwell density: amplitude {amplitude:.6e} lambda_C, L1 to arcsine law "
                     f"{hist.l1_distance():.3e}; wrote {out / 'density.csv'}")
    elif config.command == "trajectory":
        state = _packet(config)
        mode = state.modes[_mode_index(config, state)]
        traj = Trajectory(trajectory_times(mode, config.trajectory_samples),
                          mode_trajectory(mode, config.trajectory_samples))
        outputs["trajectory.csv"] = emit_csv(traj, out / "trajectory.csv")
        lines.append(f"wrote {config.trajectory_samples} trajectory points to {out / 'trajectory.csv'}")

    text = "".join(line + "\n" for line in lines)
    if config.command in ("constants", "kinematics"):
        outputs["stdout"] = hashlib.sha256(text.encode("utf-8")).hexdigest()
    _write_json(build_manifest(config, outputs), out / MANIFEST_NAME)
    stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="zitter", description=__doc__.strip().splitlines()[0])
    parser.add_argument("command", help=" | ".join(COMMANDS))
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    args = parser.parse_args(argv)

    try:
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error[io]: cannot read config {args.config}: {exc.strerror}", file=sys.stderr)
                return EXIT_IO
        else:
            text = "{}"
        config = parse_config(text, command=args.command)
        return run(config, args.out)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"error[physics]: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"error[io]: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ZitterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
