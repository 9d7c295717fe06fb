"""Command line: ``fgpga generate | run | export-traces | oracle``.

The default output directory can be overridden with ``FGPGA_OUT``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import instance_io
from .bench import ALGORITHMS, ExperimentConfig, export_traces, run_experiment
from .generate import GenParams, generate_ladder
from .oracle import DEFAULT_STATE_BUDGET, BudgetExceeded, solve_exact


def parse_sizes(spec: str) -> list[int]:
    """``"100..1000:100"`` (inclusive range with step) or ``"50,100,200"``."""
    sizes = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            span, _, step = part.partition(":")
            lo, hi = (int(x) for x in span.split(".."))
            step = int(step) if step else 1
            if step < 1 or hi < lo:
                raise argparse.ArgumentTypeError(f"bad size range {part!r}")
            sizes.extend(range(lo, hi + 1, step))
        elif part:
            sizes.append(int(part))
    if not sizes or min(sizes) < 2:
        raise argparse.ArgumentTypeError(f"sizes must be integers >= 2, got {spec!r}")
    return sizes


def default_out(sub: str) -> Path:
    return Path(os.environ.get("FGPGA_OUT", "out")) / sub


def _instance_paths(items) -> list[Path]:
    paths = []
    for item in items:
        p = Path(item)
        paths.extend(sorted(p.glob("*.json")) if p.is_dir() else [p])
    return paths


def cmd_generate(args) -> int:
    out = Path(args.out) if args.out else default_out("instances")
    overrides = {"capacity_headroom": args.headroom, "target_edge_factor": args.edge_factor}
    for inst in generate_ladder(args.sizes, args.seed, **overrides):
        path = instance_io.save(inst, out / f"{inst.name}.json")
        print(f"{path}  V={inst.V} E={inst.app.edge_count} Mn={inst.Mn} "
              f"sum_r={np.sum(inst.app.demands):.3f} sum_C={np.sum(inst.machines.capacities):.0f}")
    return 0


def cmd_run(args) -> int:
    config = ExperimentConfig(
        instances=_instance_paths(args.instances),
        out_dir=Path(args.out) if args.out else default_out("results"),
        algorithms=args.algorithms,
        repetitions=args.reps,
        seed_base=args.seed,
        generations=args.generations,
        population=args.population,
        workers=args.workers,
        record_time=not args.no_timing,
    )
    reports = run_experiment(config)
    failed = [r for r in reports if not r.ok]
    print(f"{len(reports)} runs written to {config.out_dir}"
          + (f"; {len(failed)} flagged init-failed" if failed else ""))
    return 0


def cmd_export(args) -> int:
    out = Path(args.out) if args.out else Path(args.results) / "series.csv"
    n = export_traces(args.results, out, x=args.x, how=args.aggregate,
                      algorithms=args.algorithms)
    print(f"{n} series written to {out}")
    return 0


def cmd_oracle(args) -> int:
    inst = instance_io.load(args.instance)
    try:
        res = solve_exact(inst, state_budget=args.budget)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    if not res.feasible:
        print(f"{inst.name}: infeasible ({res.states_enumerated} states)")
        return 1
    print(f"{inst.name}: optimum {res.optimal_cost!r} genes {res.optimal_genes} "
          f"({res.states_enumerated} states)")
    return 0


def _algorithms(text: str) -> list[str]:
    algs = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algs if a not in ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithms {bad}")
    return algs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fgpga", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write random benchmark instances")
    g.add_argument("--sizes", type=parse_sizes, default=parse_sizes("100..1000:100"))
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--out")
    g.add_argument("--headroom", type=float, default=GenParams.capacity_headroom)
    g.add_argument("--edge-factor", type=float, default=GenParams.target_edge_factor)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run the algorithm x instance x repetition matrix")
    r.add_argument("instances", nargs="+", help="instance files or directories of them")
    r.add_argument("--algorithms", type=_algorithms, default=["fgpga", "sa"])
    r.add_argument("--reps", type=int, default=10)
    r.add_argument("--seed", type=int, default=0, help="seed of repetition 0")
    r.add_argument("--out")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--generations", type=int, default=None,
                   help="GA generations (default 6000 for V<=500, else 3000); "
                        "also sets the SA budget")
    r.add_argument("--population", type=int, default=20)
    r.add_argument("--no-timing", action="store_true",
                   help="leave wall_time_ms empty so outputs are byte-reproducible")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("export-traces", help="plot-ready best-cost series")
    e.add_argument("results", help="directory written by `run`")
    e.add_argument("--out")
    e.add_argument("--x", choices=["iteration", "evaluations"], default="iteration")
    e.add_argument("--aggregate", choices=["none", "median", "mean"], default="none")
    e.add_argument("--algorithms", type=_algorithms, default=None)
    e.set_defaults(func=cmd_export)

    o = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    o.add_argument("instance")
    o.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
