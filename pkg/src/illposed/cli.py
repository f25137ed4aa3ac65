"""Command-line entry point.

Commands: lemmas, cascade, burgers-gap, euler-gap, time-zero, norm.
Exit codes: 0 success with all asserted floors met, 1 failed assertion
(report still written), 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import ConfigError, load_scenario
from .errors import IllposedError
from .grid import read_field
from .spectral import BesovIndex, besov_norm

FLOOR_STABILITY_MIN = 0.5
INIT_LAW_TOL = 0.01


def _parse_n_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        return int(lo), int(hi)
    n = int(text)
    return n, n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="illposed",
        description="Spectral gap experiments for transport and ideal-flow equations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one configuration value (repeatable)")
        p.add_argument("--output-dir", default=None,
                       help="report directory (falls back to ILLPOSED_OUTPUT_DIR)")
        p.add_argument("--jobs", type=int, default=None, help="parallel cells")

    for name in ("lemmas", "cascade", "burgers-gap", "euler-gap", "time-zero"):
        p = sub.add_parser(name)
        common(p)
        if name.endswith("gap") or name == "time-zero":
            p.add_argument("--n", default=None, help="index range, e.g. 9..14")
            p.add_argument("--s", type=float, default=None)
            p.add_argument("--p", default=None)

    p = sub.add_parser("norm", help="Besov norm of a stored field")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--j-max", type=int, default=None)
    return ap


def _resolve_output_dir(args) -> str:
    out = args.output_dir or os.environ.get("ILLPOSED_OUTPUT_DIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _scenario_overrides(args) -> list[str]:
    overrides = list(args.set)
    if getattr(args, "n", None):
        lo, hi = _parse_n_range(args.n)
        overrides += [f"n_min={lo}", f"n_max={hi}"]
    if getattr(args, "s", None) is not None:
        overrides.append(f"s={args.s}")
    if getattr(args, "p", None) is not None:
        overrides.append(f"p={args.p}")
    if args.jobs is not None:
        overrides.append(f"jobs={args.jobs}")
    return overrides


def _gap_outcome(report, path) -> int:
    report.to_csv(path)
    ok = True
    if any(r.init_dist > 0 for r in report.rows):
        ok &= report.init_dist_law_spread() <= INIT_LAW_TOL
    ok &= report.floor_stability() >= FLOOR_STABILITY_MIN
    ok &= report.besov_dominates_block()
    stat = "ok" if ok else "FAILED"
    print(f"{report.scenario}: rows={len(report.rows)} "
          f"floor_stability={report.floor_stability():.3f} "
          f"init_law_spread={report.init_dist_law_spread():.2e} "
          f"wall={report.wall_time:.1f}s -> {path} [{stat}]")
    return 0 if ok else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse already printed a diagnostic
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.command == "norm":
            field = read_field(args.input)
            p = np.inf if str(args.p).lower() in ("inf", "infinity") else float(args.p)
            j_max = args.j_max
            if j_max is None:
                j_max = max(0, int(np.floor(np.log2(field.grid.nyquist() * 3.0 / 8.0))))
            value = besov_norm(field, BesovIndex(args.s, p), j_max)
            print(f"{value!r}")
            return 0

        out_dir = _resolve_output_dir(args)
        overrides = _scenario_overrides(args)
        cfg = load_scenario(args.command, config_path=args.config,
                            overrides=overrides, output_dir=out_dir)

        if args.command == "lemmas":
            from .experiments import run_lemma_suite
            rep = run_lemma_suite(cfg)
            path = os.path.join(out_dir, "lemma_report.csv")
            rep.to_csv(path)
            for r in rep.rows:
                mark = "ok" if r.passed else "FAILED"
                rel = "<=" if r.kind == "le" else ">="
                print(f"  {r.name}: {r.measured:.3e} {rel} {r.bound:.3e} [{mark}]")
            print(f"lemmas: {len(rep.rows)} checks, wall={rep.wall_time:.1f}s -> {path}")
            return 0 if rep.all_passed else 1

        if args.command == "cascade":
            from .data1d import DataSpec1D, build_u0_1d, time_sequence
            from .grid import UniformPeriodicGrid
            from .profiles import build_profiles
            from .spectral import BesovIndex as BI
            from .transport1d import cascade_errors
            grid = UniformPeriodicGrid(1, cfg.points, cfg.box_half_width)
            profiles = build_profiles(grid)
            u0 = build_u0_1d(DataSpec1D(s=cfg.s, j_max=cfg.j_max), profiles, grid)
            n = cfg.n_max
            t_ref = time_sequence(n).t_n
            times = [t_ref / 8.0, t_ref / 4.0, t_ref / 2.0, t_ref]
            table = cascade_errors(u0, n, times, BI(cfg.s, cfg.p),
                                   flow_steps=cfg.flow_steps)
            path = os.path.join(out_dir, "cascade_orders.csv")
            table.to_csv(path)
            for key, val in table.orders.items():
                print(f"  fitted order {key}: {val:.3f}")
            print(f"cascade: n={n} -> {path}")
            return 0

        if args.command == "burgers-gap":
            from .experiments import run_burgers_gap
            report = run_burgers_gap(cfg)
            return _gap_outcome(report, os.path.join(out_dir, "burgers_gap.csv"))

        if args.command == "euler-gap":
            from .experiments import run_euler_gap
            report = run_euler_gap(cfg)
            return _gap_outcome(report, os.path.join(out_dir, "euler_gap.csv"))

        if args.command == "time-zero":
            from .experiments import run_time_discontinuity
            report = run_time_discontinuity(cfg)
            return _gap_outcome(report, os.path.join(out_dir, "time_zero.csv"))

        raise ConfigError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IllposedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
