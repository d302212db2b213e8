"""Command-line sweeps that reproduce the figure data as CSV or JSON.

Usage::

    wgqed <subcommand> --config FILE [--out FILE] [--format csv|json] [--threads N]

The config is flat ``key = value`` text (``#`` starts a comment). Exit codes:
0 success, 1 usage or config error, 2 at least one sweep point failed
numerically (its row is written with ``nan`` columns).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import __version__
from .errors import WgqedError
from .model import (DEFAULT_SPAN, Direction, PhysParams, PulseSpec, default_t_atom, make_grid)
from .observables import (collision_photon_numbers, lorentzian_h, peak_excitation_estimate,
                          phase_h, shot_noise_bands, transmittance_reflectance)
from .oracle import oracle_transmittance

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
EXCITATION_WARN = 0.1


class ConfigError(ValueError):
    """Malformed or invalid configuration text."""


@dataclass(frozen=True)
class Axis:
    name: str
    scale: str
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class Config:
    """Resolved fixed parameters; ``t_atom=None`` means 6 / omega at each point."""

    gamma0: float = 1.0
    ratio: float = 1.0
    omega: float = 1.0
    delta: float = 0.0
    na: float = 1.0
    nb: float = 0.0
    phi: float = 0.0
    kind: str = "coherent"
    t_atom: float | None = None
    span: float = DEFAULT_SPAN
    points: int | None = None
    h_form: str = "derived"

    def params(self) -> PhysParams:
        t_atom = self.t_atom if self.t_atom is not None else default_t_atom(self.omega)
        return PhysParams(self.gamma0, self.ratio, self.delta, t_atom)

    def pulses(self) -> tuple[PulseSpec, PulseSpec]:
        if self.kind == "fock1":
            return (PulseSpec.fock(self.omega),
                    PulseSpec.fock(self.omega, Direction.BACKWARD))
        return (PulseSpec.coherent(self.omega, self.na),
                PulseSpec.coherent(self.omega, self.nb, self.phi, Direction.BACKWARD))

    def grid(self):
        return make_grid(self.params(), self.omega, self.span, self.points)


@dataclass(frozen=True)
class SweepSpec:
    subcommand: str
    config: Config
    axis: Axis
    explicit: frozenset = field(default_factory=frozenset)


class SweepRow(NamedTuple):
    x: float
    columns: dict


class ParsedConfig(NamedTuple):
    params: PhysParams
    pulse_a: PulseSpec
    pulse_b: PulseSpec
    sweep: SweepSpec


# Subcommand -> (columns, default axis). The axis tuple is (name, scale, from, to, points).
SUBCOMMANDS = {
    "transmittance-sweep": (("T_coherent", "R_coherent", "L_coherent", "T_fock", "R_fock", "L_fock"),
                            ("omega", "log", 0.01, 100.0, 25)),
    "nonlinearity": (("T", "R", "loss"), ("na", "log", 1.0, 100.0, 21)),
    "detection": (("N_T", "N_T_low", "N_T_high", "N_R", "N_R_low", "N_R_high"),
                  ("na", "linear", 1.0, 40.0, 40)),
    "susceptibility": (("re_h", "im_h", "re_lorentz", "im_lorentz"),
                       ("delta", "linear", -10.0, 10.0, 81)),
    "phase-shift": (("tau", "re_h", "im_h"), ("omega_tau", "linear", -3.0, 3.0, 61)),
    "collision-fringes": (("N_plus", "N_minus", "loss"),
                          ("phi", "linear", 0.0, 2.0 * math.pi, 64)),
    "collision-tuning": (("N_plus", "N_minus", "loss"), ("nb", "linear", 0.0, 4.0, 41)),
    "oracle-check": (("T", "R", "L", "T_oracle", "R_oracle", "L_oracle", "rel_dT", "rel_dR"),
                     ("omega", "log", 0.1, 10.0, 3)),
}

_FLOAT_KEYS = ("gamma0", "ratio", "omega", "delta", "na", "nb", "phi", "t_atom", "grid.span")
_AXIS_NAMES = ("gamma0", "ratio", "omega", "delta", "na", "nb", "phi", "t_atom")
_KEYS = set(_FLOAT_KEYS) | {"kind", "h_form", "grid.points", "axis.name", "axis.scale", "axis.from",
                            "axis.to", "axis.points"}


def _tokenize(source: str) -> dict:
    raw = {}
    for lineno, line in enumerate(source.splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = (value, lineno)
    return raw


def _number(raw, key, cast=float):
    value, lineno = raw[key]
    try:
        out = cast(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} must be a number, got {value!r}") from None
    if cast is float and not math.isfinite(out):
        raise ConfigError(f"line {lineno}: {key} must be finite")
    return out


def parse_config(source: str, subcommand: str = "transmittance-sweep") -> ParsedConfig:
    """Parse and validate config text for ``subcommand``.

    Missing keys take the defaults gamma0 = 1, ratio = 1, omega = 1, delta = 0,
    na = 1, nb = 0, phi = 0, kind = coherent, h_form = derived,
    t_atom = 6 / omega,
    grid.span = 8, grid.points from the resolution rule, and the
    subcommand's default axis.
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    raw = _tokenize(source)
    values = {k: _number(raw, k) for k in _FLOAT_KEYS if k in raw}
    for key in ("na", "nb"):
        if key in values and values[key] < 0:
            raise ConfigError(f"{key} must be >= 0, got {values[key]!r}")
    for key in ("gamma0", "omega", "t_atom"):
        if key in values and values[key] <= 0:
            raise ConfigError(f"{key} must be positive, got {values[key]!r}")
    if "ratio" in values and values["ratio"] < 0:
        raise ConfigError(f"ratio must be >= 0, got {values['ratio']!r}")
    kind = raw.get("kind", ("coherent", 0))[0]
    if kind not in ("coherent", "fock1"):
        raise ConfigError(f"kind must be 'coherent' or 'fock1', got {kind!r}")
    h_form = raw.get("h_form", ("derived", 0))[0]
    if h_form not in ("derived", "printed"):
        raise ConfigError(f"h_form must be 'derived' or 'printed', got {h_form!r}")
    kw = {k: v for k, v in values.items() if k in _AXIS_NAMES}
    cfg = Config(kind=kind, h_form=h_form, **kw)
    if "grid.span" in values:
        if values["grid.span"] < 4:
            raise ConfigError(f"grid.span must be >= 4, got {values['grid.span']!r}")
        cfg = replace(cfg, span=values["grid.span"])
    if "grid.points" in raw:
        pts = _number(raw, "grid.points", int)
        if pts < 64:
            raise ConfigError(f"grid.points must be >= 64, got {pts}")
        cfg = replace(cfg, points=pts)

    d_name, d_scale, d_from, d_to, d_points = SUBCOMMANDS[subcommand][1]
    name = raw.get("axis.name", (d_name, 0))[0]
    allowed = _AXIS_NAMES + (("omega_tau",) if subcommand == "phase-shift" else ())
    if name not in allowed:
        raise ConfigError(f"axis.name {name!r} not valid for {subcommand}")
    scale = raw.get("axis.scale", (d_scale if name == d_name else "linear", 0))[0]
    if scale not in ("linear", "log"):
        raise ConfigError(f"axis.scale must be 'linear' or 'log', got {scale!r}")
    same = name == d_name
    if not same and not {"axis.from", "axis.to"} <= raw.keys():
        raise ConfigError(f"axis.from and axis.to are required for axis {name!r}")
    start = _number(raw, "axis.from") if "axis.from" in raw else d_from
    stop = _number(raw, "axis.to") if "axis.to" in raw else d_to
    points = _number(raw, "axis.points", int) if "axis.points" in raw else d_points
    if points < 2:
        raise ConfigError(f"axis.points must be >= 2, got {points}")
    if scale == "log" and not (start > 0 and stop > 0):
        raise ConfigError("log axis requires axis.from and axis.to > 0")
    axis = Axis(name, scale, float(start), float(stop), int(points))
    try:
        params = cfg.params()
        pulse_a, pulse_b = cfg.pulses()
    except WgqedError as exc:
        raise ConfigError(str(exc)) from None
    sweep = SweepSpec(subcommand, cfg, axis, frozenset(raw))
    return ParsedConfig(params, pulse_a, pulse_b, sweep)


def _point_config(spec: SweepSpec, x: float) -> Config:
    name = spec.axis.name
    if name == "omega_tau":
        return spec.config
    return replace(spec.config, **{name: float(x)})


def evaluate_point(spec: SweepSpec, x: float) -> dict:
    """Columns of one sweep point; raises :class:`WgqedError` on numerical failure."""
    cfg = _point_config(spec, x)
    params = cfg.params()
    sub = spec.subcommand
    om = cfg.omega

    if sub == "transmittance-sweep":
        grid = cfg.grid()
        coh = transmittance_reflectance(params, PulseSpec.coherent(om, cfg.na), grid)
        fock = transmittance_reflectance(params, PulseSpec.fock(om), grid)
        return {"T_coherent": coh.transmittance, "R_coherent": coh.reflectance,
                "L_coherent": coh.loss, "T_fock": fock.transmittance,
                "R_fock": fock.reflectance, "L_fock": fock.loss}
    if sub in ("nonlinearity", "detection"):
        pulse = cfg.pulses()[0]
        res = transmittance_reflectance(params, pulse, cfg.grid())
        if sub == "nonlinearity":
            return {"T": res.transmittance, "R": res.reflectance, "loss": res.loss}
        n_t = res.transmittance * pulse.mean_n
        n_r = res.reflectance * pulse.mean_n
        (tl, th), (rl, rh) = shot_noise_bands(n_t), shot_noise_bands(n_r)
        return {"N_T": n_t, "N_T_low": tl, "N_T_high": th,
                "N_R": n_r, "N_R_low": rl, "N_R_high": rh}
    if sub == "susceptibility":
        h = phase_h(params, om, 0.0, printed=cfg.h_form == "printed")
        lor = complex(lorentzian_h(params))
        return {"re_h": h.real, "im_h": h.imag, "re_lorentz": lor.real, "im_lorentz": lor.imag}
    if sub == "phase-shift":
        tau = float(x) / om if spec.axis.name == "omega_tau" else 0.0
        h = phase_h(params, om, tau, printed=cfg.h_form == "printed")
        return {"tau": tau, "re_h": h.real, "im_h": h.imag}
    if sub in ("collision-fringes", "collision-tuning"):
        fwd, bwd = cfg.pulses()
        res = collision_photon_numbers(params, fwd, bwd, cfg.grid())
        return {"N_plus": res.n_plus, "N_minus": res.n_minus, "loss": res.loss}
    if sub == "oracle-check":
        res = transmittance_reflectance(params, PulseSpec.fock(om), cfg.grid())
        t_o, r_o, l_o = oracle_transmittance(params, om)
        return {"T": res.transmittance, "R": res.reflectance, "L": res.loss,
                "T_oracle": t_o, "R_oracle": r_o, "L_oracle": l_o,
                "rel_dT": (res.transmittance - t_o) / t_o if t_o else math.nan,
                "rel_dR": (res.reflectance - r_o) / r_o if r_o else math.nan}
    raise ConfigError(f"unknown subcommand {sub!r}")


def _safe_point(args):
    spec, x = args
    try:
        return evaluate_point(spec, x), None
    except (WgqedError, ArithmeticError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(spec: SweepSpec, threads: int = 1, diagnostics=None) -> list[SweepRow]:
    """Evaluate every axis point in order; failed points get ``nan`` columns.

    ``diagnostics`` (a list) collects one message per failed point.
    """
    columns = SUBCOMMANDS[spec.subcommand][0]
    xs = [float(x) for x in spec.axis.values()]
    jobs = [(spec, x) for x in xs]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_safe_point, jobs))
    else:
        results = [_safe_point(job) for job in jobs]
    rows = []
    for x, (cols, err) in zip(xs, results):
        if err is not None:
            if diagnostics is not None:
                diagnostics.append(f"{spec.axis.name}={x!r}: {err}")
            cols = {c: math.nan for c in columns}
        rows.append(SweepRow(x, {c: float(cols[c]) for c in columns}))
    return rows


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.16e}"


def metadata(spec: SweepSpec) -> dict:
    """Key/value echo of the sweep: parameters, axis, grid rule and version."""
    cfg = spec.config
    meta = {"wgqed_version": __version__, "subcommand": spec.subcommand}
    for key in ("gamma0", "ratio", "omega", "delta", "na", "nb", "phi"):
        meta[key] = repr(float(getattr(cfg, key)))
    meta["kind"] = cfg.kind
    meta["h_form"] = cfg.h_form
    t_fixed = cfg.t_atom if cfg.t_atom is not None else default_t_atom(cfg.omega)
    meta["t_atom"] = repr(float(t_fixed))
    meta["t_atom_rule"] = "fixed" if cfg.t_atom is not None else "6/omega"
    meta["grid.span"] = repr(float(cfg.span))
    meta["grid.points"] = "auto" if cfg.points is None else str(cfg.points)
    try:
        grid = cfg.grid()
        meta["grid.dt"] = repr(grid.dt)
        meta["grid.n_points"] = str(grid.n_points)
    except WgqedError:
        meta["grid.dt"] = "invalid"
    ax = spec.axis
    meta.update({"axis.name": ax.name, "axis.scale": ax.scale, "axis.from": repr(ax.start),
                 "axis.to": repr(ax.stop), "axis.points": str(ax.points)})
    return meta


def _x_label(spec: SweepSpec) -> str:
    return spec.axis.name


def write_csv(rows: list[SweepRow], spec: SweepSpec) -> str:
    """CSV text: ``# key=value`` metadata lines, a header row and one row per point."""
    if not rows:
        raise ValueError("write_csv needs at least one row")
    lines = [f"# {k}={v}" for k, v in metadata(spec).items()]
    columns = list(rows[0].columns)
    lines.append(",".join([_x_label(spec)] + columns))
    for row in rows:
        lines.append(",".join([_fmt(row.x)] + [_fmt(row.columns[c]) for c in columns]))
    return "\n".join(lines) + "\n"


def write_json(rows: list[SweepRow], spec: SweepSpec) -> str:
    """JSON array of row objects with the CSV columns; ``nan`` becomes null."""
    label = _x_label(spec)

    def clean(v):
        return None if math.isnan(v) else v

    data = [{label: clean(r.x), **{k: clean(v) for k, v in r.columns.items()}} for r in rows]
    return json.dumps(data, indent=1) + "\n"


def parse_csv_metadata(text: str) -> dict:
    meta = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition("=")
        meta[key] = value
    return meta


def params_from_metadata(meta: dict) -> PhysParams:
    """Rebuild the fixed :class:`PhysParams` echoed in a CSV header."""
    return PhysParams(float(meta["gamma0"]), float(meta["ratio"]), float(meta["delta"]),
                      float(meta["t_atom"]))


def _threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("WGQED_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"WGQED_THREADS must be an integer, got {env!r}") from None
    return 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wgqed", description=__doc__.split("\n\n")[0])
    ap.add_argument("subcommand", choices=sorted(SUBCOMMANDS))
    ap.add_argument("--config", required=True, help="flat key = value parameter file")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--threads", type=int, help="worker processes (default: $WGQED_THREADS or 1)")
    return ap


def _excitation_note(spec: SweepSpec, err):
    cfg = spec.config
    if spec.subcommand not in ("susceptibility", "phase-shift"):
        return
    values = spec.axis.values() if spec.axis.name in ("na", "omega", "ratio", "gamma0") else [None]
    peak = 0.0
    for x in values:
        c = _point_config(spec, x) if x is not None else cfg
        try:
            peak = max(peak, peak_excitation_estimate(c.params(), c.omega, c.na))
        except WgqedError:
            continue
    print(f"wgqed: peak excitation estimate g_eff^2 N_a / gamma^2 = {peak:.4g}", file=err)
    if peak > EXCITATION_WARN:
        print("wgqed: warning: estimate exceeds 0.1; the low-saturation form of h may be inaccurate",
              file=err)


def main(argv=None) -> int:
    err = sys.stderr
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        parsed = parse_config(text, args.subcommand)
        threads = _threads(args.threads)
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
    except (OSError, ConfigError) as exc:
        print(f"wgqed: error: {exc}", file=err)
        return EXIT_USAGE
    spec = parsed.sweep
    _excitation_note(spec, err)
    diagnostics = []
    rows = run_sweep(spec, threads, diagnostics)
    out = write_csv(rows, spec) if args.format == "csv" else write_json(rows, spec)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    except OSError as exc:
        print(f"wgqed: error: {exc}", file=err)
        return EXIT_USAGE
    for msg in diagnostics:
        print(f"wgqed: point failed: {msg}", file=err)
    return EXIT_NUMERIC if diagnostics else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
