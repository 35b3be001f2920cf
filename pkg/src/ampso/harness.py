"""Experiment harness: seeded runs, campaign statistics, file outputs.

A campaign is a grid of (algorithm, function, dimension) cells, each run R
times with seeds ``base_seed + run_index`` so any single run can be
re-derived.  Outputs are deterministic: rerunning a campaign with the same
base seed produces byte-identical files.

File layout under the output directory:
    runs.csv      one row per run (the raw material for the summaries)
    summary.csv   one row per cell with the aggregate statistics
    summary.json  the same cells as JSON plus conventions metadata
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import make_spec
from .optimizer import AmpsoConfig, RunResult, run_ampso, run_gpso

__all__ = [
    "ALGORITHMS",
    "StatsSummary",
    "CampaignSpec",
    "CellResult",
    "execute_run",
    "run_campaign",
    "write_campaign_outputs",
    "write_trace_csv",
    "TRACE_COLUMNS",
]

ALGORITHMS = {"ampso": run_ampso, "gpso": run_gpso}

TRACE_COLUMNS = ("fe", "iteration", "phase", "best_error", "diversity", "omega", "er")

RUNS_COLUMNS = ("algorithm", "function", "dim", "run", "seed", "best_error", "fe_used")


@dataclass(frozen=True)
class StatsSummary:
    """Aggregate of final errors over a cell's runs (population std)."""

    mean: float
    std: float
    best: float
    worst: float
    median: float

    @classmethod
    def from_errors(cls, errors) -> "StatsSummary":
        e = np.asarray(errors, dtype=float)
        if e.size == 0:
            raise ValueError("at least one run is required")
        return cls(
            mean=float(e.mean()),
            std=float(e.std()),
            best=float(e.min()),
            worst=float(e.max()),
            median=float(np.median(e)),
        )


@dataclass(frozen=True)
class CampaignSpec:
    """A benchmark campaign: the full grid and its execution knobs."""

    algorithms: tuple[str, ...] = ("ampso",)
    functions: tuple[str, ...] = ("rastrigin",)
    dimensions: tuple[int, ...] = (10,)
    runs: int = 30
    base_seed: int = 0
    config: AmpsoConfig = field(default_factory=AmpsoConfig)
    jobs: int = 1

    def validate(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        for algorithm in self.algorithms:
            if algorithm not in ALGORITHMS:
                known = ", ".join(sorted(ALGORITHMS))
                raise ValueError(f"unknown algorithm {algorithm!r}; available: {known}")
        self.config.validate()

    def seed_for(self, run_index: int) -> int:
        return self.base_seed + run_index

    def tasks(self):
        for algorithm in self.algorithms:
            for function in self.functions:
                for dim in self.dimensions:
                    for run in range(self.runs):
                        yield (algorithm, function, dim, run, self.seed_for(run), self.config)


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    function: str
    dim: int
    run: int
    seed: int
    best_error: float
    fe_used: int


@dataclass(frozen=True)
class CellResult:
    algorithm: str
    function: str
    dim: int
    runs: int
    stats: StatsSummary
    error: str | None = None  # set when the whole cell failed


def execute_run(task) -> RunRecord:
    """Run one seeded (algorithm, function, dim) instance; picklable for pools."""
    algorithm, function, dim, run, seed, config = task
    spec = make_spec(function, dim)
    result: RunResult = ALGORITHMS[algorithm](config, spec, seed=seed)
    return RunRecord(algorithm, function, dim, run, seed, result.best_error, result.fe_used)


def _execute_or_flag(task) -> RunRecord:
    """Like execute_run but failures become NaN records, not exceptions."""
    try:
        return execute_run(task)
    except Exception:
        algorithm, function, dim, run, seed, _ = task
        return RunRecord(algorithm, function, dim, run, seed, math.nan, 0)


def run_campaign(campaign: CampaignSpec) -> tuple[list[RunRecord], list[CellResult]]:
    """Execute every cell; per-cell failures are recorded, not fatal."""
    campaign.validate()
    tasks = list(campaign.tasks())
    if campaign.jobs > 1:
        with ProcessPoolExecutor(max_workers=campaign.jobs) as pool:
            outcomes = list(pool.map(_execute_or_flag, tasks, chunksize=1))
    else:
        outcomes = [_execute_or_flag(task) for task in tasks]

    records = sorted(outcomes, key=lambda r: (r.algorithm, r.function, r.dim, r.run))
    cells: list[CellResult] = []
    for algorithm in campaign.algorithms:
        for function in campaign.functions:
            for dim in campaign.dimensions:
                cell_records = [
                    r
                    for r in records
                    if (r.algorithm, r.function, r.dim) == (algorithm, function, dim)
                ]
                errors = [r.best_error for r in cell_records]
                if any(math.isnan(e) for e in errors):
                    cells.append(
                        CellResult(
                            algorithm,
                            function,
                            dim,
                            len(cell_records),
                            StatsSummary(math.nan, math.nan, math.nan, math.nan, math.nan),
                            error="one or more runs failed",
                        )
                    )
                else:
                    cells.append(
                        CellResult(
                            algorithm,
                            function,
                            dim,
                            len(cell_records),
                            StatsSummary.from_errors(errors),
                        )
                    )
    return records, cells


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as handle:
        handle.write(text)
    os.replace(tmp, path)


def _csv_text(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_campaign_outputs(
    out_dir: str, records: list[RunRecord], cells: list[CellResult]
) -> dict[str, str]:
    """Write runs.csv, summary.csv and summary.json; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)

    runs_path = os.path.join(out_dir, "runs.csv")
    _atomic_write(
        runs_path,
        _csv_text(
            RUNS_COLUMNS,
            [
                (r.algorithm, r.function, r.dim, r.run, r.seed, repr(r.best_error), r.fe_used)
                for r in records
            ],
        ),
    )

    summary_path = os.path.join(out_dir, "summary.csv")
    summary_header = ("algorithm", "function", "dim", "runs", "mean", "std", "best", "worst", "median")
    _atomic_write(
        summary_path,
        _csv_text(
            summary_header,
            [
                (
                    c.algorithm,
                    c.function,
                    c.dim,
                    c.runs,
                    repr(c.stats.mean),
                    repr(c.stats.std),
                    repr(c.stats.best),
                    repr(c.stats.worst),
                    repr(c.stats.median),
                )
                for c in cells
            ],
        ),
    )

    json_path = os.path.join(out_dir, "summary.json")
    payload = {
        "metadata": {
            "std_convention": "population (divide by run count)",
            "seed_derivation": "seed = base_seed + run_index",
            "error_form": "objective value minus known optimum",
        },
        "cells": [
            {
                "algorithm": c.algorithm,
                "function": c.function,
                "dim": c.dim,
                "runs": c.runs,
                "mean": c.stats.mean,
                "std": c.stats.std,
                "best": c.stats.best,
                "worst": c.stats.worst,
                "median": c.stats.median,
                **({"error": c.error} if c.error else {}),
            }
            for c in cells
        ],
    }
    _atomic_write(json_path, json.dumps(payload, indent=2) + "\n")

    return {"runs": runs_path, "summary_csv": summary_path, "summary_json": json_path}


def write_trace_csv(path: str, result: RunResult, stride: int | None = None) -> None:
    """Write a run's trace; ``stride`` keeps rows at least that many FEs apart.

    The first and last rows are always kept.
    """
    points = result.trace
    if stride is not None and stride > 1 and points:
        kept = [points[0]]
        for point in points[1:-1]:
            if point.fe - kept[-1].fe >= stride:
                kept.append(point)
        if len(points) > 1:
            kept.append(points[-1])
        points = kept

    rows = [
        (
            p.fe,
            p.iteration,
            p.phase,
            repr(p.best_error),
            repr(p.diversity),
            repr(p.omega),
            repr(p.evolution_rate),
        )
        for p in points
    ]
    _atomic_write(path, _csv_text(TRACE_COLUMNS, rows))
