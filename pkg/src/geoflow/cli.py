"""Command-line front end.

    geoflow simulate SCENARIO.json [--out DIR] [--stride N]
    geoflow simulate --sweep LIST.json [--out DIR] [--jobs J]
    geoflow verify SUITE

Exit codes: 0 completed, 2 shock/blowup/diffeo_loss, 3 config error,
4 singular inertia.  ``verify`` exits 1 when a check fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import runner, verify
from .errors import ConfigError
from .scenario import parse_scenario

log = logging.getLogger("geoflow")

OUT_ENV = "GEOFLOW_OUT"


def _load(path, stride=None):
    text = Path(path).read_text(encoding="utf-8")
    scenario = parse_scenario(text)
    if stride is not None:
        if stride < 1:
            raise ConfigError("must be >= 1", "--stride")
        scenario.stride = stride
    return scenario


def simulate_one(path, out_dir, stride=None) -> int:
    try:
        scenario = _load(path, stride)
    except OSError as exc:
        print(f"config_error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return runner.EXIT_CODES["config_error"]
    except ConfigError as exc:
        print(f"config_error: {path}: {exc}", file=sys.stderr)
        return runner.EXIT_CODES["config_error"]
    try:
        report = runner.run(scenario, out_dir)
    except OSError as exc:
        print(f"io_error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    summary = ", ".join(f"{k}={v:.3e}" for k, v in report.drifts.items())
    print(f"{scenario.name}: {report.status} at t={report.final_time:.6g} [{summary}]")
    if report.message:
        print(f"  {report.message}")
    return report.exit_code


def _sweep_entry(args):
    path, out_dir, stride = args
    return simulate_one(path, out_dir, stride)


def sweep(list_path, out_dir, stride=None, jobs=None) -> int:
    try:
        entries = json.loads(Path(list_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config_error: sweep list {list_path}: {exc}", file=sys.stderr)
        return runner.EXIT_CODES["config_error"]
    if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
        print("config_error: sweep list must be a JSON array of scenario paths", file=sys.stderr)
        return runner.EXIT_CODES["config_error"]
    base = Path(list_path).parent
    tasks = []
    for entry in entries:
        path = Path(entry) if Path(entry).is_absolute() else base / entry
        tasks.append((str(path), str(Path(out_dir) / path.stem), stride))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        codes = list(pool.map(_sweep_entry, tasks))
    return max(codes, default=0)


def run_verify(suite: str) -> int:
    if suite not in verify.SUITES:
        print(f"unknown suite {suite!r}; choose from {sorted(verify.SUITES)}", file=sys.stderr)
        return runner.EXIT_CODES["config_error"]
    checks = verify.SUITES[suite]()
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{suite}: {len(checks) - failed}/{len(checks)} passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geoflow", description="Geodesic flows on Lie groups")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario file")
    sim.add_argument("scenario", nargs="?", help="scenario JSON document")
    sim.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or .)")
    sim.add_argument("--stride", type=int, help="record every N-th step")
    sim.add_argument("--sweep", help="JSON array of scenario paths, run concurrently")
    sim.add_argument("--jobs", type=int, default=None, help="worker processes for --sweep")

    ver = sub.add_parser("verify", help="run an invariant suite")
    ver.add_argument("suite", choices=sorted(verify.SUITES))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "verify":
        return run_verify(args.suite)
    out_dir = args.out or os.environ.get(OUT_ENV) or "."
    if args.sweep:
        return sweep(args.sweep, out_dir, args.stride, args.jobs)
    if not args.scenario:
        parser.error("simulate needs a scenario file or --sweep")
    return simulate_one(args.scenario, out_dir, args.stride)


if __name__ == "__main__":
    sys.exit(main())
