"""Command-line interface: deterministic file outputs from a JSON run config.

Subcommands
-----------
field         write the field sweep (field.csv / field.json) and meta.json
trajectories  write the Bohmian trajectory family (traj.csv)
boost         transform existing outputs to a moving frame
              (field_boosted.csv, traj_boosted.csv, retro_intervals.json)
validate      run the acceptance checks (validation_report.json)
render        draw a spacetime diagram (PPM or SVG) from existing outputs

Exit codes: 0 ok, 1 validation failure, 2 config error, 3 I/O error,
4 missing inputs.  Identical configs produce byte-identical outputs; all
floating-point columns are serialized with 17 significant digits so they
round-trip exactly.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__, fields
from .dynamics import initial_positions, integrate
from .fields import (classify, current_evaluator, mass_scale, mbar_sq_printed,
                     rho_peak)
from .model import ConfigError, GridSpec, PhysConfig, validate
from .relativity import BoostFrame, boost_velocity
from .render import render_from_dir
from .wavepacket import jet_evaluator, peak_amplitude

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_MISSING = 4

# Boosts closer to the light cone than this amplify roundoff past the
# advertised tolerances.
THETA_CAP = 0.95

_CLASS_LETTER = {fields.TIMELIKE: "T", fields.LIGHTLIKE: "L", fields.SPACELIKE: "S"}

_PHYS_KEYS = {"k0", "sigma", "alpha", "hbar", "c"}
_GRID_KEYS = {"t_min", "t_max", "x_min", "x_max", "nt", "nx"}
_RUN_KEYS = {"physics", "grid", "n_traj", "t0", "boost_theta", "mode",
             "output_dir", "format", "render"}


@dataclass(frozen=True)
class RunConfig:
    physics: PhysConfig
    grid: GridSpec
    n_traj: int
    t0: float
    boost_theta: float | None
    mode: str
    output_dir: str
    format: str
    render: bool


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def load_run_config(path: str | Path) -> RunConfig:
    """Parse and validate a flat JSON run configuration.

    Unknown keys are rejected at every level (they are almost always
    typos in physics parameters).  Omitted keys take documented defaults.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(raw, _RUN_KEYS, "config")
    if "physics" not in raw or not isinstance(raw["physics"], dict):
        raise ConfigError("config requires a 'physics' object")
    _reject_unknown(raw["physics"], _PHYS_KEYS, "physics")
    try:
        physics = validate(PhysConfig(**raw["physics"]))
    except TypeError as exc:
        raise ConfigError(f"bad physics block: {exc}") from exc

    sigma = physics.sigma
    grid_raw = raw.get("grid", {"t_min": -3.0 / sigma, "t_max": 3.0 / sigma,
                                "x_min": -3.0 / sigma, "x_max": 3.0 / sigma,
                                "nt": 256, "nx": 256})
    if not isinstance(grid_raw, dict):
        raise ConfigError("'grid' must be an object")
    _reject_unknown(grid_raw, _GRID_KEYS, "grid")
    try:
        grid = GridSpec(**grid_raw)
    except TypeError as exc:
        raise ConfigError(f"bad grid block: {exc}") from exc

    n_traj = raw.get("n_traj", 100)
    if not isinstance(n_traj, int) or n_traj < 0:
        raise ConfigError(f"n_traj must be an integer >= 0, got {n_traj!r}")
    t0 = raw.get("t0", -2.0 / sigma)
    if not isinstance(t0, (int, float)) or not math.isfinite(t0):
        raise ConfigError(f"t0 must be a finite number, got {t0!r}")
    theta = raw.get("boost_theta")
    if theta is not None:
        if not isinstance(theta, (int, float)) or not abs(theta) < THETA_CAP:
            raise ConfigError(f"boost_theta must satisfy |theta| < {THETA_CAP}, got {theta!r}")
    mode = raw.get("mode", "exact")
    if mode not in ("exact", "printed"):
        raise ConfigError(f"mode must be 'exact' or 'printed', got {mode!r}")
    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    render = raw.get("render", False)
    if not isinstance(render, bool):
        raise ConfigError(f"render must be a boolean, got {render!r}")
    return RunConfig(physics=physics, grid=grid, n_traj=n_traj, t0=float(t0),
                     boost_theta=theta, mode=mode,
                     output_dir=raw.get("output_dir", "out"), format=fmt, render=render)


def _fmt(v: float) -> str:
    return "%.17g" % v


def _write_atomic(path: Path, data) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        if isinstance(data, bytes):
            tmp.write_bytes(data)
        else:
            tmp.write_text(data)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _config_dict(cfg: RunConfig) -> dict:
    return {
        "physics": {"k0": cfg.physics.k0, "sigma": cfg.physics.sigma,
                    "alpha": cfg.physics.alpha, "hbar": cfg.physics.hbar,
                    "c": cfg.physics.c},
        "grid": {"t_min": cfg.grid.t_min, "t_max": cfg.grid.t_max,
                 "x_min": cfg.grid.x_min, "x_max": cfg.grid.x_max,
                 "nt": cfg.grid.nt, "nx": cfg.grid.nx},
        "n_traj": cfg.n_traj, "t0": cfg.t0, "boost_theta": cfg.boost_theta,
        "mode": cfg.mode, "output_dir": cfg.output_dir, "format": cfg.format,
        "render": cfg.render,
    }


def _write_meta(out_dir: Path, cfg: RunConfig, eps_light: float, rho_min_rel: float) -> None:
    meta = {
        "tool": "photonmass",
        "version": __version__,
        "config": _config_dict(cfg),
        "optics_warning": cfg.physics.optics_warning,
        "thresholds": {"eps_light": eps_light, "rho_min_rel": rho_min_rel,
                       "psi4_reliable_rel": fields.PSI4_RELIABLE_REL},
    }
    _write_atomic(out_dir / "meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


FIELD_COLUMNS = ["t", "x", "psi_re", "psi_im", "rho", "j", "v", "mbar_sq", "meff_sq", "class"]


def _field_rows(cfg: RunConfig, mode: str, eps_light: float, rho_min_rel: float):
    physics = cfg.physics
    jet = jet_evaluator(physics)
    cur = current_evaluator(physics, mode)
    peak4 = peak_amplitude(physics) ** 4
    rho_node = rho_min_rel * rho_peak(physics)
    scale = mass_scale(physics)
    for t in cfg.grid.t_values():
        t = float(t)
        for x in cfg.grid.x_values():
            x = float(x)
            psi = jet(t, x)[0]
            rho, j = cur(t, x)
            mb = rho * rho - j * j if mode == "exact" else mbar_sq_printed(physics, t, x)
            psi4 = abs(psi) ** 4
            meff = mb / psi4 if psi4 > 0.0 else math.nan
            node = abs(rho) < rho_node
            reliable = psi4 >= fields.PSI4_RELIABLE_REL * peak4
            v = math.nan if node else physics.c**2 * j / rho
            letter = "N" if (node or not reliable) else _CLASS_LETTER[classify(mb, scale, eps_light)]
            yield t, x, psi.real, psi.imag, rho, j, v, mb, meff, letter


def cmd_field(args) -> int:
    cfg = load_run_config(args.config)
    mode = args.mode or cfg.mode
    fmt = args.format or cfg.format
    out_dir = Path(args.out or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _field_rows(cfg, mode, args.eps_light, args.rho_min)
    if fmt == "csv":
        lines = [",".join(FIELD_COLUMNS)]
        lines.extend(",".join([*map(_fmt, row[:-1]), row[-1]]) for row in rows)
        _write_atomic(out_dir / "field.csv", "\n".join(lines) + "\n")
    else:
        payload = {"columns": FIELD_COLUMNS, "rows": [list(row) for row in rows]}
        _write_atomic(out_dir / "field.json", json.dumps(payload) + "\n")
    _write_meta(out_dir, cfg, args.eps_light, args.rho_min)
    if cfg.render and (out_dir / "traj.csv").exists():
        render_from_dir(out_dir, out_dir / "render.ppm", boosted=False)
    return EXIT_OK


TRAJ_COLUMNS = ["traj_id", "s", "t", "x", "v", "mbar_sq", "class", "termination"]


def cmd_trajectories(args) -> int:
    cfg = load_run_config(args.config)
    n = args.n if args.n is not None else cfg.n_traj
    if n < 0:
        raise ConfigError(f"trajectory count must be >= 0, got {n}")
    t0 = args.t0 if args.t0 is not None else cfg.t0
    out_dir = Path(args.out or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid
    window = (grid.x_min, grid.x_max)
    lines = [",".join(TRAJ_COLUMNS)]
    stalls = 0
    if n > 0:
        if t0 >= grid.t_max:
            raise ConfigError(f"t0 = {t0:g} must lie below the grid top t_max = {grid.t_max:g}")
        try:
            starts = initial_positions(cfg.physics, n, t0, window)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for tid, x0 in enumerate(starts):
            traj = integrate(cfg.physics, float(x0), t0, grid.t_max, window=window,
                             mode=cfg.mode, rho_min_rel=args.rho_min)
            stalls += traj.termination == "node_stall"
            for smp in traj.samples:
                lines.append(",".join([
                    str(tid), _fmt(smp.s), _fmt(smp.t), _fmt(smp.x), _fmt(smp.v),
                    _fmt(smp.mbar_sq), _CLASS_LETTER[smp.causal_class], traj.termination,
                ]))
    _write_atomic(out_dir / "traj.csv", "\n".join(lines) + "\n")
    _write_meta(out_dir, cfg, args.eps_light, args.rho_min)
    print(f"wrote {n} trajectories ({stalls} node stalls) to {out_dir / 'traj.csv'}")
    if cfg.render and (out_dir / "field.csv").exists():
        render_from_dir(out_dir, out_dir / "render.ppm", boosted=False)
    return EXIT_OK


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    text = path.read_text().splitlines()
    header = text[0].split(",")
    return header, [line.split(",") for line in text[1:] if line]


def cmd_boost(args) -> int:
    cfg = load_run_config(args.config)
    theta = args.theta
    if not abs(theta) < THETA_CAP:
        raise ConfigError(f"|theta| must be < {THETA_CAP}, got {theta}")
    in_dir = Path(args.in_dir)
    for name in ("field.csv", "traj.csv", "meta.json"):
        if not (in_dir / name).exists():
            raise FileNotFoundError(f"lab-frame input {in_dir / name} not found")
    in_meta = json.loads((in_dir / "meta.json").read_text())
    if in_meta.get("config", {}).get("mode") == "printed":
        raise ConfigError("printed-mode outputs are frame-bound and cannot be boosted")
    frame = BoostFrame(theta)
    g = frame.gamma
    out_dir = Path(args.out or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    header, rows = _read_csv(in_dir / "field.csv")
    col = {name: header.index(name) for name in header}
    out_lines = [",".join(["tp", "xp", "psi_re", "psi_im", "rho_p", "j_p", "v_p",
                           "mbar_sq", "meff_sq", "class"])]
    for row in rows:
        t, x = float(row[col["t"]]), float(row[col["x"]])
        rho, j = float(row[col["rho"]]), float(row[col["j"]])
        v = float(row[col["v"]])
        out_lines.append(",".join([
            _fmt(g * (t - theta * x)), _fmt(g * (x - theta * t)),
            row[col["psi_re"]], row[col["psi_im"]],
            _fmt(g * (rho - theta * j)), _fmt(g * (j - theta * rho)),
            _fmt(boost_velocity(frame, v)) if math.isfinite(v) else "nan",
            row[col["mbar_sq"]], row[col["meff_sq"]], row[col["class"]],
        ]))
    _write_atomic(out_dir / "field_boosted.csv", "\n".join(out_lines) + "\n")

    cur = current_evaluator(cfg.physics, "exact")
    header, rows = _read_csv(in_dir / "traj.csv")
    col = {name: header.index(name) for name in header}
    out_lines = [",".join(["traj_id", "s", "tp", "xp", "vp", "mbar_sq", "class",
                           "termination", "retro"])]
    intervals: dict[int, list] = {}
    current_run: dict[int, list] = {}
    for row in rows:
        tid = int(row[col["traj_id"]])
        s = float(row[col["s"]])
        t, x = float(row[col["t"]]), float(row[col["x"]])
        v = float(row[col["v"]])
        rho, j = cur(t, x)
        rho_p = g * (rho - theta * j)
        retro = rho_p < 0.0
        out_lines.append(",".join([
            row[col["traj_id"]], row[col["s"]],
            _fmt(g * (t - theta * x)), _fmt(g * (x - theta * t)),
            _fmt(boost_velocity(frame, v)),
            row[col["mbar_sq"]], row[col["class"]], row[col["termination"]],
            "true" if retro else "false",
        ]))
        run = current_run.get(tid)
        if retro:
            mb = float(row[col["mbar_sq"]])
            if run is None:
                current_run[tid] = [s, s, rho_p, mb, rho]
            else:
                run[1] = s
                run[2] = min(run[2], rho_p)
                run[3] = max(run[3], mb)
                run[4] = min(run[4], rho)
        elif run is not None:
            intervals.setdefault(tid, []).append(run)
            del current_run[tid]
    for tid, run in current_run.items():
        if run is not None:
            intervals.setdefault(tid, []).append(run)
    _write_atomic(out_dir / "traj_boosted.csv", "\n".join(out_lines) + "\n")

    retro_doc = {
        "theta": theta,
        "trajectories": [
            {"traj_id": tid,
             "intervals": [{"s_start": r[0], "s_end": r[1], "min_rho_boosted": r[2],
                            "max_mbar_sq": r[3], "min_rho_lab": r[4]}
                           for r in runs]}
            for tid, runs in sorted(intervals.items())
        ],
    }
    _write_atomic(out_dir / "retro_intervals.json",
                  json.dumps(retro_doc, indent=2, sort_keys=True) + "\n")

    boosted_cfg_dict = _config_dict(cfg)
    boosted_cfg_dict["boost_theta"] = theta
    boosted_cfg_dict["grid"] = in_meta["config"]["grid"]
    meta = {"tool": "photonmass", "version": __version__, "config": boosted_cfg_dict,
            "optics_warning": cfg.physics.optics_warning,
            "thresholds": in_meta.get("thresholds", {})}
    _write_atomic(out_dir / "meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_validation

    cfg = load_run_config(args.config)
    report = run_validation(cfg.physics, cfg.grid, n_traj=cfg.n_traj, t0=cfg.t0,
                            level=args.level)
    out_dir = Path(args.out or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "validation_report.json",
                  json.dumps(report, indent=2, sort_keys=True) + "\n")
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['criterion']}")
    print(f"report: {out_dir / 'validation_report.json'}")
    return EXIT_OK if report["all_passed"] else EXIT_VALIDATION


def cmd_render(args) -> int:
    render_from_dir(Path(args.in_dir), Path(args.out),
                    boosted=True if args.boosted else None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonmass",
        description="Bohmian photon trajectories and weak-value local mass "
                    "for interfering massless wavepackets")
    parser.add_argument("--version", action="version", version=f"photonmass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_thresholds(p):
        p.add_argument("--eps-light", type=float, default=fields.EPS_LIGHT,
                       help="lightlike classification band, relative to the mass scale")
        p.add_argument("--rho-min", type=float, default=fields.RHO_MIN_REL,
                       help="node threshold, relative to the peak density")

    p = sub.add_parser("field", help="write the spacetime field sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=["exact", "printed"])
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out", help="output directory (default: config output_dir)")
    add_thresholds(p)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("trajectories", help="write the Bohmian trajectory family")
    p.add_argument("--config", required=True)
    p.add_argument("--n", type=int, help="number of trajectories (default: config n_traj)")
    p.add_argument("--t0", type=float, help="start time (default: config t0)")
    p.add_argument("--out")
    add_thresholds(p)
    p.set_defaults(func=cmd_trajectories)

    p = sub.add_parser("boost", help="transform lab-frame outputs to a moving frame")
    p.add_argument("--config", required=True)
    p.add_argument("--theta", type=float, required=True, help="boost velocity, |theta| < 0.95")
    p.add_argument("--in", dest="in_dir", required=True, help="directory with lab-frame outputs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_boost)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--config", required=True)
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="draw a spacetime diagram from outputs")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True, help="target image: FILE.ppm or FILE.svg")
    p.add_argument("--boosted", action="store_true",
                   help="force rendering the boosted outputs")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing inputs: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
