"""Threshold filtering, window discarding, and selective error accounting.

Two accounting conventions coexist and are always reported together:

* ``mse_zeroed`` — dropped windows contribute zero error but stay in
  the denominator: ``sum(retained errors) / n``.  This is the headline
  number; under it, dropping a random ``dp`` fraction scales the full
  MSE by ``(1 - dp)`` in expectation.
* ``mse_retained`` — the mean error over retained windows only.

Both are trivially recomputable from the per-window errors and the
drop set, and the exporters keep that data next to every summary.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._util import floor_frac
from .distance import DistanceMatrix
from .forecast import ErrorVector


@dataclass(frozen=True)
class ThresholdSpec:
    """High-error cutoff ``tau = mean + delta * std`` over validation errors."""

    mean: float
    std: float
    delta: float
    tau: float


@dataclass(frozen=True)
class Selection:
    """A drop decision over n windows: ``dropped`` and ``retained`` partition 0..n-1."""

    dropped: np.ndarray     # sorted int indices
    retained: np.ndarray    # sorted int indices
    n: int
    dp: float
    method: str
    seed: int | None = None

    def __post_init__(self) -> None:
        if len(self.dropped) + len(self.retained) != self.n:
            raise ValueError("dropped and retained must partition the windows")

    def drop_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.dropped] = True
        return mask


@dataclass(frozen=True)
class EvaluationReport:
    """Selective-forecasting outcome for one error vector and one selection."""

    mse_zeroed: float
    mse_retained: float
    coverage: float
    n: int
    n_dropped: int
    all_dropped: bool
    per_window_errors: np.ndarray
    drop_mask: np.ndarray
    provenance: dict = field(default_factory=dict)


def compute_threshold(mean_err: float, std_err: float, delta: float) -> ThresholdSpec:
    """tau = mean_err + delta * std_err (population-std convention upstream)."""
    if std_err < 0:
        raise ValueError(f"std_err must be >= 0, got {std_err}")
    if not np.isfinite(mean_err) or not np.isfinite(std_err) or not np.isfinite(delta):
        raise ValueError("threshold inputs must be finite")
    return ThresholdSpec(mean=mean_err, std=std_err, delta=delta,
                         tau=mean_err + delta * std_err)


def filter_high_error(errors: ErrorVector, tau: ThresholdSpec | float) -> np.ndarray:
    """Indices (ascending) of windows with error strictly above tau."""
    cutoff = tau.tau if isinstance(tau, ThresholdSpec) else float(tau)
    return np.flatnonzero(errors.errors > cutoff)


def n_to_drop(dp: float, n: int) -> int:
    """floor(dp * n), the drop budget for n windows."""
    if not 0.0 <= dp <= 1.0:
        raise ValueError(f"dp must be in [0, 1], got {dp}")
    return floor_frac(dp, n)


def discard(dp: float, matrix: DistanceMatrix) -> Selection:
    """Drop the floor(dp*n) windows whose contexts match shapelets best.

    Windows are ranked by ascending per-window minimum distance, ties
    broken by ascending window index (stable sort), and the first
    floor(dp*n) are dropped.
    """
    n = len(matrix)
    m = n_to_drop(dp, n)
    order = np.argsort(matrix.min_distance, kind="stable")
    dropped = np.sort(order[:m])
    retained = np.sort(order[m:])
    return Selection(dropped=dropped, retained=retained, n=n, dp=dp,
                     method="shapelet")


def random_selection(dp: float, n: int, seed: int) -> Selection:
    """Drop floor(dp*n) windows uniformly at random without replacement.

    Implemented as a prefix of a seeded permutation, so for a fixed
    seed the drop set grows monotonically with dp.
    """
    m = n_to_drop(dp, n)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    dropped = np.sort(perm[:m])
    retained = np.sort(perm[m:])
    return Selection(dropped=dropped, retained=retained, n=n, dp=dp,
                     method="random", seed=seed)


def selective_mse(errors: ErrorVector, selection: Selection,
                  provenance: dict | None = None) -> EvaluationReport:
    """Score a drop decision under both accounting conventions."""
    if len(errors) != selection.n:
        raise ValueError(
            f"error vector has {len(errors)} windows, selection has {selection.n}"
        )
    mask = selection.drop_mask()
    retained_sum = float(errors.errors[~mask].sum())
    n_ret = int(selection.n - mask.sum())
    all_dropped = n_ret == 0
    prov = {"method": selection.method, "dp": selection.dp, "n": selection.n}
    if selection.seed is not None:
        prov["seed"] = selection.seed
    if provenance:
        prov.update(provenance)
    return EvaluationReport(
        mse_zeroed=retained_sum / selection.n,
        mse_retained=0.0 if all_dropped else retained_sum / n_ret,
        coverage=n_ret / selection.n,
        n=selection.n,
        n_dropped=int(mask.sum()),
        all_dropped=all_dropped,
        per_window_errors=errors.errors.copy(),
        drop_mask=mask,
        provenance=prov,
    )


def write_selection_csv(path, selection: Selection,
                        matrix: DistanceMatrix | None = None) -> None:
    """Write ``window_index,min_distance,dropped`` rows (distance blank without a matrix)."""
    mask = selection.drop_mask()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["window_index", "min_distance", "dropped"])
        for i in range(selection.n):
            dist = repr(float(matrix.min_distance[i])) if matrix is not None else ""
            writer.writerow([i, dist, int(mask[i])])
