"""Command-line entry point: ``dirmeas <command> [--config FILE] [--set KEY=VALUE ...]``.

Each command reads one flat TOML file; ``--set`` and the common flags
override values from the file. Unknown keys or invalid values exit with
status 2 before anything is computed or written.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Any, Callable

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import analysis, shots
from .coupling import STRONG, ModifiedScheme, StandardScheme
from .optics import OpticalConfig, run_modified_scheme, run_standard_scheme
from .wavefield import gaussian_source, make_grid

SCHEMA_LINE = "# dirmeas-sim schema v1"


class ConfigError(Exception):
    pass


def _floats(v):
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(x) for x in v]


def _ints(v):
    if isinstance(v, int):
        return [v]
    return [int(x) for x in v]


# key -> (default, coercion)
DEFAULTS: dict[str, dict[str, tuple[Any, Callable]]] = {
    "beta": {
        "delta_p": ([0.0, 0.25, 0.5, 0.75, 1.0], _floats),
        "n_points": (60, int),
        "normalization": ("unit_sum_over_bins", str),
    },
    "fidelity": {
        "delta_p": ([i / 20 for i in range(21)], _floats),
        "waist": ([1.0, 0.75, 0.5], _floats),
        "n_points": (4096, int),
        "t": (0.0, float),
    },
    "magnification": {
        "n_points": ([1, 2, 5, 10, 20, 30, 40, 50, 60, 80, 100], _ints),
        "mode": ("double_window", str),
        "delta_p": (0.5625, float),
        "normalization": ("unit_norm_windows", str),
    },
    "simulate": {
        "scheme": ("modified", str),
        "n_points": (64, int),
        "waist": (1.0, float),
        "t": (0.0, float),
        "half_range": (30e-3, float),
        "wavelength": (800e-9, float),
        "focal_length": (1.0, float),
        "slit_width": (15e-6, float),
        "lcp_focal_length": (0.0, float),
        "theta": (STRONG, float),
        "guard": (2, int),
        "focal_samples": (256, int),
        "photons": (0, int),
        "seed": (0, int),
    },
    "paper-report": {
        "half_range": (30e-3, float),
        "step": (1e-3, float),
        "focal_length": (1.0, float),
        "slit_width": (15e-6, float),
        "wavelength": (800e-9, float),
    },
}


def _parse_override(item: str) -> tuple[str, Any]:
    if "=" not in item:
        raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key.strip(), value


def load_config(command: str, path: str | None, overrides: list[str], seed: int | None) -> dict:
    """Merge defaults, file values and overrides; reject unknown keys."""
    spec = DEFAULTS[command]
    values: dict[str, Any] = {}
    if path:
        try:
            with open(path, "rb") as fh:
                values.update(tomllib.load(fh))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for item in overrides:
        key, value = _parse_override(item)
        values[key] = value
    if seed is not None and "seed" in spec:
        values["seed"] = seed
    unknown = sorted(set(values) - set(spec))
    if unknown:
        raise ConfigError(f"unknown config key(s) for {command!r}: {', '.join(unknown)}")
    out = {}
    for key, (default, coerce) in spec.items():
        raw = values.get(key, default)
        try:
            out[key] = coerce(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key!r}: {raw!r}") from exc
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(rows, header, out_path):
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\r\n")
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _validated(fn):
    # convert domain validation failures into config errors
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return wrapper


@_validated
def _beta_spec(cfg):
    analysis.check_delta_p(cfg["delta_p"])
    return analysis.SweepSpec("delta_p", tuple(cfg["delta_p"]),
                              {"n_points": cfg["n_points"]}, cfg["normalization"])


def cmd_beta(cfg, args):
    spec = _beta_spec(cfg)
    rows = analysis.beta_profile(spec)
    _write_csv(rows, ["delta_p_over_piL", "x_over_L", "beta_abs_normalized"], args.out)


@_validated
def _fidelity_spec(cfg):
    analysis.check_delta_p(cfg["delta_p"])
    if min(cfg["waist"]) <= 0:
        raise ValueError("waists must be positive")
    return analysis.SweepSpec("delta_p", tuple(cfg["delta_p"]),
                              {"waists": tuple(cfg["waist"]), "n_points": cfg["n_points"],
                               "t": cfg["t"]})


def cmd_fidelity(cfg, args):
    spec = _fidelity_spec(cfg)
    rows = analysis.fidelity_sweep(spec)
    _write_csv(rows, ["delta_p_over_piL", "a_over_L", "fidelity"], args.out)


@_validated
def _magnification_spec(cfg):
    if cfg["mode"] not in ("mub", "double_window"):
        raise ValueError(f"unknown mode {cfg['mode']!r}")
    return analysis.SweepSpec("n_points", tuple(cfg["n_points"]),
                              {"mode": cfg["mode"], "delta_p": cfg["delta_p"]},
                              cfg["normalization"])


def cmd_magnification(cfg, args):
    rows = analysis.magnification_sweep(_magnification_spec(cfg))
    _write_csv(rows, ["n_points", "magnification"], args.out)


@_validated
def _simulation_setup(cfg):
    if cfg["scheme"] not in ("standard", "modified"):
        raise ValueError(f"unknown scheme {cfg['scheme']!r}")
    if cfg["photons"] < 0:
        raise ValueError("photons must be >= 0")
    lcp = cfg["lcp_focal_length"] or None
    config = OpticalConfig.from_physical(
        cfg["half_range"], cfg["wavelength"], cfg["focal_length"], cfg["slit_width"],
        theta=cfg["theta"], guard=cfg["guard"], focal_samples=cfg["focal_samples"],
        lcp_focal_length=None if lcp is None else lcp / cfg["half_range"],
    )
    grid = make_grid(cfg["n_points"], 1.0)
    psi = gaussian_source(cfg["waist"], grid, t=cfg["t"])
    plan = shots.ShotPlan(cfg["photons"], cfg["seed"]) if cfg["photons"] > 0 else None
    return config, psi, plan


def cmd_simulate(cfg, args):
    config, psi, plan = _simulation_setup(cfg)
    runner = run_modified_scheme if cfg["scheme"] == "modified" else run_standard_scheme
    record = runner(psi, config, threads=args.threads)
    readout = record.readout
    if plan is not None:
        def scheme_for(i):
            if record.scheme == "modified":
                return ModifiedScheme(record.beta_eff[i], config.theta)
            return StandardScheme(config.theta)

        readout, _, _ = shots.sample_record(record, plan, scheme_for)
    amps = readout / np.sqrt(record.grid.spacing)
    good = np.isfinite(amps)
    norm = math.sqrt(np.sum(np.abs(amps[good]) ** 2) * record.grid.spacing)
    psi_hat = amps / norm if norm > 0 else amps
    rows = [
        (float(x), float(pt.real), float(pt.imag), float(ph.real), float(ph.imag), float(tr),
         record.scheme)
        for x, pt, ph, tr in zip(record.x, record.psi_true[record.bins], psi_hat,
                                 record.signal_transmission)
    ]
    _write_csv(rows, ["x_over_L", "re_psi_true", "im_psi_true", "re_psi_hat", "im_psi_hat",
                      "signal_transmission", "scheme"], args.out)


def cmd_paper_report(cfg, args):
    try:
        rep = analysis.estimate_paper_setup(cfg["half_range"], cfg["step"], cfg["focal_length"],
                                            cfg["slit_width"], cfg["wavelength"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"delta_x / L        {rep.delta_x_over_L:.4f}")
    print(f"delta_p / (pi/L)   {rep.delta_p_over_piL:.4f}")
    print(f"|beta|             {rep.beta_abs:.4f}   ({rep.convention})")
    print(f"M = 1/|beta|       {rep.magnification:.4f}")
    for name, val in rep.alternatives.items():
        print(f"  alt |beta|       {val:.4f}   ({name})")
    if args.out:
        _write_csv([(rep.delta_x_over_L, rep.delta_p_over_piL, rep.beta_abs, rep.magnification)],
                   ["delta_x_over_L", "delta_p_over_piL", "beta_abs", "magnification"], args.out)


COMMANDS = {
    "beta": cmd_beta,
    "fidelity": cmd_fidelity,
    "magnification": cmd_magnification,
    "simulate": cmd_simulate,
    "paper-report": cmd_paper_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirmeas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat TOML file with parameters")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config value")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.overrides, args.seed)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"dirmeas: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures map to status 1
        print(f"dirmeas: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
