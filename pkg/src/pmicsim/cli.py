"""Command-line front end.

Exit codes: 0 success, 1 validation error (bad config, failed check),
2 runtime error. Errors are reported as a single ``error:`` line on stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import figures
from .analysis import revival_scan
from .config import RunConfig, parse_config
from .errors import ConfigError, PmicError, ValidationError
from .io import write_csv_slice, write_pgm_carpet, _open_for_write
from .propagator import SpaceTimeGrid, carpet, density_slice, slice_at_fraction, symmetric_grid
from .screen import screen_pattern
from .spectral import SlitAperture, WellConfig, slit_coefficients
from .validation import run_checks


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"usage: {message}")


def _load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


def _out(cfg: RunConfig, name: str) -> Path:
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _tag(v: float) -> str:
    return f"{v:.10g}"


def write_carpet_csv(path, field) -> None:
    with _open_for_write(path, "w") as fh:
        fh.write("t,y,density\n")
        for t, row in zip(field.grid.t, field.values):
            for y, d in zip(field.grid.y, row):
                fh.write(f"{t:.15g},{y:.15g},{d:.15g}\n")


def cmd_carpet(cfg, args):
    coeffs = slit_coefficients(cfg.well, cfg.slit, cfg.N)
    grid = SpaceTimeGrid.uniform(cfg.well, cfg.y_points, cfg.t_points)
    field = carpet(coeffs, cfg.well, grid, workers=args.workers)
    written = []
    if "pgm" in cfg.format:
        written.append(_out(cfg, "carpet.pgm"))
        write_pgm_carpet(written[-1], field)
    if "csv" in cfg.format:
        written.append(_out(cfg, "carpet.csv"))
        write_carpet_csv(written[-1], field)
    return written


def cmd_slice(cfg, args):
    times = args.t or list(cfg.t_list)
    if not times:
        raise ConfigError("no times given: pass --t or set t_list", "t_list")
    coeffs = slit_coefficients(cfg.well, cfg.slit, cfg.N)
    y = symmetric_grid(cfg.L, cfg.y_points)
    written = []
    for t in times:
        dens = density_slice(coeffs, cfg.well, y, t, workers=args.workers).density
        written.append(_out(cfg, f"slice_t{_tag(t)}.csv"))
        write_csv_slice(written[-1], y, dens)
    return written


def cmd_screen(cfg, args):
    dists = args.d or list(cfg.d_list)
    if not dists:
        raise ConfigError("no distances given: pass --d or set d_list", "d_list")
    coeffs = slit_coefficients(cfg.well, cfg.slit, cfg.N)
    y = symmetric_grid(cfg.L, cfg.y_points)
    written = []
    for D in dists:
        dens = screen_pattern(coeffs, cfg.well, cfg.beam, y, D, workers=args.workers)
        written.append(_out(cfg, f"screen_d{_tag(D)}.csv"))
        write_csv_slice(written[-1], y, dens)
    return written


def cmd_revivals(cfg, args):
    T = cfg.well.revival_time()
    t_max = args.t_max if args.t_max is not None else cfg.t_measure + 1.1 * T
    step = args.step if args.step is not None else T / 100
    coeffs = slit_coefficients(cfg.well, cfg.slit, cfg.N)
    y = symmetric_grid(cfg.L, cfg.y_points)
    report = revival_scan(
        coeffs, cfg.well, y, (cfg.t_measure, t_max), step, args.threshold, workers=args.workers
    )
    path = _out(cfg, "revivals.csv")
    report.write_csv(path)
    return [path]


def cmd_validate(cfg, args):
    checks = run_checks(cfg, workers=args.workers)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    if failed:
        raise ValidationError(f"{len(failed)} check(s) failed: {','.join(failed)}")
    return []


def cmd_figures(cfg, args):
    written = []
    c = figures.CARPET
    well = WellConfig(c["L"])
    coeffs = slit_coefficients(well, SlitAperture(c["y0"], c["a"]), c["N"])
    field = carpet(coeffs, well, SpaceTimeGrid.uniform(well, cfg.y_points, cfg.t_points), workers=args.workers)
    written.append(_out(cfg, "fig1_carpet.pgm"))
    write_pgm_carpet(written[-1], field)

    s = figures.SLICE
    well = WellConfig(s["L"])
    full = slit_coefficients(well, SlitAperture(s["y0"], s["a"]), s["N"])
    y = symmetric_grid(well.L, cfg.y_points)
    for entry in figures.SLICES:
        dens = slice_at_fraction(full.truncate(entry.N), well, y, entry.tau, workers=args.workers)
        written.append(_out(cfg, f"{entry.name}.csv"))
        write_csv_slice(written[-1], y, dens)
    return written


COMMANDS = {
    "carpet": cmd_carpet,
    "slice": cmd_slice,
    "screen": cmd_screen,
    "revivals": cmd_revivals,
    "validate": cmd_validate,
    "figures": cmd_figures,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pmicsim", description="Collapse-state carpets and slices in an infinite well.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="flat key=value run configuration")
        sp.add_argument("--workers", type=int, default=1, help="parallel workers (output does not depend on it)")
        return sp

    add("carpet", "space-time density as PGM and CSV")
    add("slice", "density at fixed times").add_argument("--t", type=float, action="append", help="time (repeatable)")
    add("screen", "density on a screen at distance D").add_argument(
        "--d", type=float, action="append", help="screen distance (repeatable)"
    )
    rv = add("revivals", "scan for full, mirror and fractional revivals")
    rv.add_argument("--t-max", type=float, default=None)
    rv.add_argument("--step", type=float, default=None, help="scan step (default T/100)")
    rv.add_argument("--threshold", type=float, default=1e-3)
    add("validate", "oracle-equivalence checks")
    add("figures", "parameter sets of the reference figures")
    return p


def _fail(kind, exc) -> str:
    parts = [f"error: kind={kind}"]
    key = getattr(exc, "key", None)
    line = getattr(exc, "line", None)
    if key:
        parts.append(f"key={key}")
    if line:
        parts.append(f"line={line}")
    msg = " ".join(str(exc).split())
    return " ".join(parts) + f" message={msg}"


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", "workers")
        cfg = _load(args.config)
        for path in COMMANDS[args.command](cfg, args):
            print(path)
    except ValidationError as exc:
        print(_fail("validation", exc), file=sys.stderr)
        return 1
    except PmicError as exc:
        kind = "validation" if isinstance(exc, ValueError) else "runtime"
        print(_fail(kind, exc), file=sys.stderr)
        return 1 if kind == "validation" else 2
    except Exception as exc:  # noqa: BLE001 - last-resort single-line report
        print(_fail("runtime", exc), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
