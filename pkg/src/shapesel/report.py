"""Summary arithmetic, artifact writers, and the summary cross-checker.

All files written here are byte-deterministic functions of their
inputs: floats are serialized with ``repr`` (full round-trip
precision), JSON keys are sorted, and nothing records wall-clock time.
Every summary number can be recomputed from the per-window CSVs;
:func:`crosscheck_run_dir` does exactly that.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .selection import EvaluationReport

SUMMARY_COLUMNS = ["dataset", "source", "no_drop_mse", "random_mse",
                   "shapelet_mse", "coverage"]
PER_WINDOW_COLUMNS = ["window_index", "error", "dropped", "selective_error"]


def reduction_percent(full_mse: float, selective_mse: float) -> float:
    """Percent error removed relative to forecasting everything."""
    if full_mse <= 0:
        raise ValueError(f"full MSE must be positive, got {full_mse}")
    return (full_mse - selective_mse) / full_mse * 100.0


def average_reduction(pairs) -> float:
    """Mean of per-dataset :func:`reduction_percent` over (full, selective) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one (full, selective) pair")
    return float(np.mean([reduction_percent(f, s) for f, s in pairs]))


def over_random_margin(random_mse: float, shapelet_mse: float) -> float:
    """Percent by which informed selection beats random at equal coverage."""
    return reduction_percent(random_mse, shapelet_mse)


@dataclass(frozen=True)
class SummaryRow:
    """One summary line: seed-averaged results for one dataset/forecaster."""

    dataset: str
    source: str
    no_drop_mse: float
    random_mse: float
    shapelet_mse: float
    coverage: float


def write_summary_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow([r.dataset, r.source, repr(r.no_drop_mse),
                             repr(r.random_mse), repr(r.shapelet_mse),
                             repr(r.coverage)])


def read_summary_csv(path) -> list[SummaryRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            rows.append(SummaryRow(
                dataset=rec["dataset"], source=rec["source"],
                no_drop_mse=float(rec["no_drop_mse"]),
                random_mse=float(rec["random_mse"]),
                shapelet_mse=float(rec["shapelet_mse"]),
                coverage=float(rec["coverage"]),
            ))
    return rows


def write_per_window_csv(path, report: EvaluationReport) -> None:
    """Error trace with drops: dropped windows report a zeroed selective error."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PER_WINDOW_COLUMNS)
        for i, (err, dropped) in enumerate(zip(report.per_window_errors,
                                               report.drop_mask)):
            selective = 0.0 if dropped else float(err)
            writer.writerow([i, repr(float(err)), int(dropped), repr(selective)])


def read_per_window_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Return (errors, drop_mask) from a per-window file."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        errors, dropped = [], []
        for rec in reader:
            errors.append(float(rec["error"]))
            dropped.append(bool(int(rec["dropped"])))
    return np.array(errors), np.array(dropped, dtype=bool)


def write_ablation_csv(path, rows) -> None:
    """Rows are dicts with keys source, axis, value, no_drop_mse, random_mse, shapelet_mse, coverage."""
    columns = ["source", "axis", "value", "no_drop_mse", "random_mse",
               "shapelet_mse", "coverage"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([r["source"], r["axis"], repr(float(r["value"])),
                             repr(float(r["no_drop_mse"])),
                             repr(float(r["random_mse"])),
                             repr(float(r["shapelet_mse"])),
                             repr(float(r["coverage"]))])


def _zeroed(errors: np.ndarray, mask: np.ndarray) -> float:
    return float(errors[~mask].sum() / errors.size)


def crosscheck_run_dir(run_dir, tol: float = 1e-12) -> list[str]:
    """Recompute every summary number from the per-window CSVs.

    Uses the artifact manifest in ``report.json``.  Returns a list of
    mismatch descriptions; an empty list means the summary is fully
    reproducible from the raw per-window data.
    """
    with open(os.path.join(run_dir, "report.json")) as fh:
        manifest = json.load(fh)
    summary = {(r.dataset, r.source): r
               for r in read_summary_csv(os.path.join(run_dir, "summary.csv"))}
    problems: list[str] = []
    for source in manifest["sources"]:
        label = source["label"]
        key = (manifest["dataset"], label)
        if key not in summary:
            problems.append(f"summary.csv has no row for {key}")
            continue
        row = summary[key]
        shapelet_vals, random_vals, coverages, no_drops = [], [], [], []
        for seed_block in source["seeds"]:
            for method, sink in (("shapelet", shapelet_vals), ("random", random_vals)):
                errors, mask = read_per_window_csv(
                    os.path.join(run_dir, seed_block["per_window_files"][method]))
                sink.append(_zeroed(errors, mask))
                if method == "shapelet":
                    coverages.append(1.0 - mask.mean())
                no_drops.append(float(errors.mean()))
        checks = [
            ("no_drop_mse", row.no_drop_mse, float(np.mean(no_drops))),
            ("random_mse", row.random_mse, float(np.mean(random_vals))),
            ("shapelet_mse", row.shapelet_mse, float(np.mean(shapelet_vals))),
            ("coverage", row.coverage, float(np.mean(coverages))),
        ]
        for name, stated, recomputed in checks:
            if abs(stated - recomputed) > tol:
                problems.append(
                    f"{label}: {name} summary={stated!r} recomputed={recomputed!r}"
                )
    return problems
