"""Experiment matrix runner: algorithms x instances x repetitions.

Writes ``runs.csv`` (one row per run), ``summary.csv`` (best/average per
algorithm and instance), ``table.csv`` (side-by-side best/avg per instance)
and one trace file per run under ``traces/``.  Output is ordered by
(algorithm, instance, seed) whatever order runs finish in, so a repeated
experiment reproduces every file byte for byte, apart from the
``wall_time_ms`` column unless timing is switched off.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from statistics import mean, median

from . import instance_io
from .ga import GaParams, no_greedy, run_fgpga
from .graph import Instance, is_feasible
from .report import RunReport
from .sa import SaParams, run_sa

log = logging.getLogger(__name__)

ALGORITHMS = ("fgpga", "fgpga-no-greedy", "sa")
CSV_COLUMNS = ["algorithm", "instance", "V", "Mn", "seed", "best_cost", "avg_cost",
               "wall_time_ms", "feasible"]
SERIES_COLUMNS = ["series", "x", "y", "log10_y"]


def run_seed(seed_base: int, repetition: int) -> int:
    """Seed of repetition ``k``: ``seed_base + k``, shared by every algorithm and instance."""
    return seed_base + repetition


@dataclass
class ExperimentConfig:
    instances: list[Path]
    out_dir: Path
    algorithms: list[str] = field(default_factory=lambda: ["fgpga", "sa"])
    repetitions: int = 10
    seed_base: int = 0
    generations: int | None = None
    population: int = 20
    workers: int = 1
    record_time: bool = True

    def __post_init__(self):
        self.instances = [Path(p) for p in self.instances]
        self.out_dir = Path(self.out_dir)
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        unknown = sorted(set(self.algorithms) - set(ALGORITHMS))
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {list(ALGORITHMS)}")
        missing = [str(p) for p in self.instances if not p.is_file()]
        if missing:
            raise FileNotFoundError(f"instance files not found: {missing}")
        if not self.instances:
            raise ValueError("no instances given")


def solve(instance: Instance, algorithm: str, seed: int,
          generations: int | None = None, population: int = 20) -> RunReport:
    gp = GaParams(population_size=population, max_generations=generations, rng_seed=seed)
    if algorithm == "fgpga":
        return run_fgpga(instance, gp, label=algorithm)
    if algorithm == "fgpga-no-greedy":
        return run_fgpga(instance, no_greedy(gp), label=algorithm)
    if algorithm == "sa":
        return run_sa(instance, SaParams.matched(gp, instance.V, rng_seed=seed), label=algorithm)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _run_cell(task) -> RunReport:
    path, algorithm, seed, generations, population = task
    instance = instance_io.load(path)
    report = solve(instance, algorithm, seed, generations, population)
    # re-verify at the harness boundary rather than trusting the solver's flag
    report.feasible = (report.best_genes is not None
                       and is_feasible(instance.app, instance.machines, report.best_genes))
    return report


def run_experiment(config: ExperimentConfig) -> list[RunReport]:
    tasks = [(str(path), alg, run_seed(config.seed_base, k), config.generations, config.population)
             for path in config.instances
             for alg in config.algorithms
             for k in range(config.repetitions)]
    log.info("running %d cells with %d worker(s)", len(tasks), config.workers)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reports = list(pool.map(_run_cell, tasks))
    else:
        reports = []
        for task in tasks:
            reports.append(_run_cell(task))
            r = reports[-1]
            log.info("%s %s seed=%d cost=%s", r.algorithm, r.instance, r.seed, r.best_cost)
    reports.sort(key=lambda r: (r.algorithm, r.instance, r.seed))
    write_outputs(reports, config.out_dir, config.record_time)
    return reports


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def _flag(b: bool) -> str:
    return "true" if b else "false"


def trace_path(out_dir: Path, algorithm: str, instance: str, seed: int) -> Path:
    return Path(out_dir) / "traces" / f"{algorithm}__{instance}__s{seed}.csv"


def write_trace(report: RunReport, path: Path) -> None:
    if not report.trace:
        return
    cols = [f.name for f in fields(type(report.trace[0]))]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rec in report.trace:
            row = []
            for c in cols:
                v = getattr(rec, c)
                row.append(_flag(v) if isinstance(v, bool) else _num(v) if isinstance(v, float) else v)
            w.writerow(row)


def aggregate(reports: list[RunReport]) -> list[dict]:
    """Table-style best/avg per (algorithm, instance) over successful runs."""
    cells: dict[tuple[str, str], list[RunReport]] = {}
    for r in reports:
        cells.setdefault((r.algorithm, r.instance), []).append(r)
    rows = []
    for (alg, inst), runs in sorted(cells.items()):
        costs = [r.best_cost for r in runs if r.ok]
        rows.append({
            "algorithm": alg, "instance": inst, "V": runs[0].V, "Mn": runs[0].Mn,
            "best_cost": min(costs) if costs else None,
            "avg_cost": mean(costs) if costs else None,
            "wall_time_ms": mean(r.wall_time_ms for r in runs),
            "feasible": all(r.feasible for r in runs),
            "runs": len(runs),
        })
    return rows


def write_outputs(reports: list[RunReport], out_dir: Path, record_time: bool = True) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def timing(ms):
        return f"{ms:.1f}" if record_time else ""

    with open(out_dir / "runs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in reports:
            w.writerow([r.algorithm, r.instance, r.V, r.Mn, r.seed,
                        _num(r.best_cost) if r.ok else "", "",
                        timing(r.wall_time_ms), _flag(r.feasible)])

    summary = aggregate(reports)
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in summary:
            w.writerow([row["algorithm"], row["instance"], row["V"], row["Mn"], "",
                        _num(row["best_cost"]), _num(row["avg_cost"]),
                        timing(row["wall_time_ms"]), _flag(row["feasible"])])

    algs = sorted({row["algorithm"] for row in summary})
    by_inst: dict[str, dict] = {}
    for row in summary:
        by_inst.setdefault(row["instance"], {"V": row["V"]})[row["algorithm"]] = row
    with open(out_dir / "table.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "V"] + [f"{a}_{k}" for a in algs for k in ("best", "avg")])
        for inst, cell in sorted(by_inst.items(), key=lambda kv: (kv[1]["V"], kv[0])):
            row = [inst, cell["V"]]
            for a in algs:
                got = cell.get(a)
                row += [_num(got["best_cost"]), _num(got["avg_cost"])] if got else ["", ""]
            w.writerow(row)

    for r in reports:
        write_trace(r, trace_path(out_dir, r.algorithm, r.instance, r.seed))


def read_runs(results_dir) -> list[dict]:
    with open(Path(results_dir) / "runs.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def read_trace(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _iteration_column(rows: list[dict]) -> str:
    return "generation" if "generation" in rows[0] else "epoch"


def export_traces(results_dir, out_path, x: str = "iteration", how: str = "none",
                  algorithms=None) -> int:
    """Write plot-ready ``series, x, y, log10_y`` rows; returns the number of series.

    ``how="none"`` gives one series per run; ``"median"`` or ``"mean"``
    collapse the seeds of each (algorithm, instance) into one series, runs
    that stopped early being held at their final value.  ``x`` is either
    the iteration number or the cumulative evaluation count.
    """
    if x not in ("iteration", "evaluations"):
        raise ValueError("x must be 'iteration' or 'evaluations'")
    if how not in ("none", "median", "mean"):
        raise ValueError("how must be 'none', 'median' or 'mean'")
    results_dir = Path(results_dir)
    runs = [r for r in read_runs(results_dir)
            if r["best_cost"] != "" and (not algorithms or r["algorithm"] in algorithms)]
    paths = {(r["algorithm"], r["instance"], int(r["seed"])):
             trace_path(results_dir, r["algorithm"], r["instance"], int(r["seed"]))
             for r in runs}
    absent = [f"{a}/{i}/s{s} ({p})" for (a, i, s), p in paths.items() if not p.is_file()]
    if absent:
        raise FileNotFoundError("missing traces for runs: " + ", ".join(absent))

    series: dict[str, list[tuple[int, float]]] = {}
    groups: dict[str, list[list[tuple[int, float]]]] = {}
    for (alg, inst, seed), path in sorted(paths.items()):
        rows = read_trace(path)
        if not rows:
            continue
        it = _iteration_column(rows)
        pts = [(int(row[it] if x == "iteration" else row["evaluations"]), float(row["best_cost"]))
               for row in rows]
        if how == "none":
            series[f"{alg}/{inst}/s{seed}"] = pts
        else:
            groups.setdefault(f"{alg}/{inst}", []).append(pts)

    reducer = median if how == "median" else mean
    for label, members in groups.items():
        longest = max(members, key=len)
        pts = []
        for i, (xv, _) in enumerate(longest):
            pts.append((xv, reducer(m[min(i, len(m) - 1)][1] for m in members)))
        series[label] = pts

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for label in sorted(series):
            for xv, yv in series[label]:
                w.writerow([label, xv, _num(yv), _num(math.log10(yv)) if yv > 0 else ""])
    return len(series)

