"""Command-line surface: simulate, check, manifold, sweep.

Exit codes: 0 success, 1 usage or scenario-document error, 2 numerical
failure during integration, 3 acceptance-criterion failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import yaml

from . import acceptance, smc
from .engine import integrate
from .errors import IntegrationError, ScenarioError
from .scenario_io import (default_scenario, parse_scenario, trajectory_csv,
                          write_manifold)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code (1, not argparse's 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="blowdown",
                     description="Batch-digester blowdown simulator with "
                                 "sliding-mode discharge-flow control.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario to CSV")
    sim.add_argument("--scenario", metavar="FILE",
                     help="scenario YAML (omit for the shipped default)")
    sim.add_argument("--out", metavar="DIR", required=True,
                     help="output directory for trajectory.csv")
    sim.add_argument("--t-end", type=float, metavar="S")
    sim.add_argument("--rtol", type=float, metavar="R")
    sim.add_argument("--atol", type=float, metavar="A")
    sim.add_argument("--log-every", type=float, metavar="S")

    chk = sub.add_parser("check", help="run the acceptance suite")
    chk.add_argument("--scenario", metavar="FILE",
                     help="scenario YAML used for the trajectory criteria")

    man = sub.add_parser("manifold", help="emit the sliding-surface grid")
    man.add_argument("--out", metavar="FILE", required=True)
    man.add_argument("--e-range", nargs=2, type=float, default=[0.0, 1e-3],
                     metavar=("A", "B"))
    man.add_argument("--xi-range", nargs=2, type=float, default=[0.0, 10.0],
                     metavar=("A", "B"))
    man.add_argument("--steps", type=int, default=41, metavar="N")

    swp = sub.add_parser("sweep", help="run concurrent scenario variants")
    swp.add_argument("--scenario", metavar="FILE")
    swp.add_argument("--param", required=True, metavar="PATH",
                     help="dotted document path, e.g. parameters.k_smc")
    swp.add_argument("--values", required=True, metavar="V1,V2,...")
    swp.add_argument("--out", metavar="DIR", required=True)
    return parser


def _load_document(path: Optional[str]) -> dict:
    if path is None:
        return {}
    doc = yaml.safe_load(Path(path).read_text())
    return doc if doc is not None else {}


def _scenario_from(path: Optional[str]):
    return parse_scenario(_load_document(path))


def _run_to_csv(scenario, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "trajectory.csv"
    target.write_text(trajectory_csv(integrate(scenario)))
    return target


def _cmd_simulate(args) -> int:
    scenario = _scenario_from(args.scenario)
    overrides = {}
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if args.rtol is not None:
        overrides["rtol"] = args.rtol
    if args.atol is not None:
        overrides["atol"] = args.atol
    if args.log_every is not None:
        overrides["log_interval"] = args.log_every
    if overrides:
        scenario = replace(scenario, **overrides)
        scenario.validate()
    target = _run_to_csv(scenario, Path(args.out))
    print(f"wrote {target}")
    return EXIT_OK


def _cmd_check(args) -> int:
    scenario = _scenario_from(args.scenario) if args.scenario else None
    results = acceptance.run_all(scenario)
    for result in results:
        print(result.line)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_ACCEPTANCE


def _cmd_manifold(args) -> int:
    scenario = default_scenario()
    grids = smc.manifold_grid(args.e_range, args.xi_range,
                              scenario.parameters.lambda_q, args.steps)
    write_manifold(*grids, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _set_path(doc: dict, dotted: str, value: float) -> None:
    keys = dotted.split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ScenarioError(f"cannot descend into {key!r} in {dotted!r}")
    node[keys[-1]] = value


def _cmd_sweep(args) -> int:
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ScenarioError(f"bad --values list: {exc}")
    if not values:
        raise ScenarioError("--values must name at least one value")
    base = _load_document(args.scenario)

    runs = []
    for value in values:
        doc = yaml.safe_load(yaml.safe_dump(base)) or {}
        _set_path(doc, args.param, value)
        scenario = parse_scenario(doc)  # validate before launching anything
        runs.append((value, scenario))

    out_root = Path(args.out)
    # Processes, not threads: scipy's lsoda carries global Fortran state and
    # can only integrate one problem at a time per process.
    with concurrent.futures.ProcessPoolExecutor(
            max_workers=min(len(runs), 8)) as pool:
        futures = {
            pool.submit(_run_to_csv, scenario,
                        out_root / f"{args.param}={value:g}"): value
            for value, scenario in runs}
        for future in concurrent.futures.as_completed(futures):
            print(f"wrote {future.result()}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"simulate": _cmd_simulate, "check": _cmd_check,
               "manifold": _cmd_manifold, "sweep": _cmd_sweep}[args.command]
    try:
        return handler(args)
    except (ScenarioError, FileNotFoundError, yaml.YAMLError) as exc:
        print(f"blowdown: scenario error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"blowdown: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
