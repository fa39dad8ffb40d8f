"""z-normalized Euclidean distance and sliding subsequence matching.

Matching is scale- and offset-invariant: both the shapelet and each
context subsequence are z-normalized (population std) before the
Euclidean distance is taken, and a shapelet shorter than the context
slides over every alignment, keeping the minimum.  Degenerate
(near-constant) stretches z-normalize to the zero vector so flat
regions never produce spurious perfect matches against structured
shapelets.

The per-alignment loop is the defining semantics; the batched
implementation below evaluates the identical elementwise expression
for all alignments at once, so it agrees with an explicit loop to
float round-off (well inside 1e-9).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Population std below this is treated as zero (constant subsequence).
DEGENERATE_STD = 1e-12


def znorm(v: np.ndarray) -> np.ndarray:
    """(v - mean) / population-std; the zero vector if std < 1e-12."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("znorm expects a non-empty 1-D sequence")
    sd = v.std()
    if sd < DEGENERATE_STD:
        return np.zeros_like(v)
    return (v - v.mean()) / sd


def znorm_ed(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between the z-normalized sequences.

    Both inputs must have equal length.  Symmetric, and invariant to
    affine transforms ``alpha * x + beta`` (alpha > 0) of either input.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    diff = znorm(a) - znorm(b)
    return float(np.sqrt(np.sum(diff * diff)))


def _znorm_alignments(context: np.ndarray, q: int) -> np.ndarray:
    """z-normalized view of every length-q subsequence, shape (n_align, q)."""
    windows = sliding_window_view(context, q)
    mu = windows.mean(axis=1, keepdims=True)
    sd = windows.std(axis=1, keepdims=True)
    degenerate = sd < DEGENERATE_STD
    return np.where(degenerate, 0.0, (windows - mu) / np.where(degenerate, 1.0, sd))


def sliding_distance_profile(context: np.ndarray, shapelet: np.ndarray) -> np.ndarray:
    """znorm ED of the shapelet against every alignment of the context.

    Entry ``j`` is ``znorm_ed(context[j : j + q], shapelet)`` for
    ``j in 0 .. len(context) - q``.
    """
    context = np.asarray(context, dtype=np.float64)
    shapelet = np.asarray(shapelet, dtype=np.float64)
    q = shapelet.size
    if q == 0:
        raise ValueError("shapelet must be non-empty")
    if q > context.size:
        raise ValueError(
            f"shapelet length {q} exceeds context length {context.size}"
        )
    zs = znorm(shapelet)
    zw = _znorm_alignments(context, q)
    diff = zw - zs[None, :]
    return np.sqrt(np.sum(diff * diff, axis=1))


def sliding_min_distance(context: np.ndarray, shapelet: np.ndarray) -> tuple[float, int]:
    """Minimum z-norm ED over all alignments, with its position.

    Ties go to the smallest alignment index.
    """
    profile = sliding_distance_profile(context, shapelet)
    pos = int(np.argmin(profile))
    return float(profile[pos]), pos


@dataclass(frozen=True)
class DistanceMatrix:
    """All window-vs-shapelet sliding minima for one window set.

    ``values[i, k]`` is the minimum distance of shapelet ``k`` in window
    ``i``'s context and ``positions[i, k]`` the alignment achieving it.
    ``min_distance[i]`` / ``min_shapelet[i]`` / ``min_position[i]``
    describe the best shapelet per window (row minimum; ties to the
    lowest shapelet index).
    """

    values: np.ndarray       # (n, K)
    positions: np.ndarray    # (n, K) int
    min_distance: np.ndarray  # (n,)
    min_shapelet: np.ndarray  # (n,) int
    min_position: np.ndarray  # (n,) int

    def __len__(self) -> int:
        return int(self.values.shape[0])


def build_distance_matrix(contexts, shapelets) -> DistanceMatrix:
    """Sliding-minimum distances of every shapelet in every context.

    ``contexts`` is an (n, sl) array or a ``WindowSet``; ``shapelets``
    a sequence of 1-D arrays (or a ``ShapeletSet``) no longer than sl.
    Raises ``ValueError`` on an empty shapelet set.
    """
    contexts = getattr(contexts, "contexts", contexts)
    shapelets = getattr(shapelets, "shapelets", shapelets)
    contexts = np.asarray(contexts, dtype=np.float64)
    if contexts.ndim != 2 or contexts.shape[0] == 0:
        raise ValueError("contexts must be a non-empty (n, sl) array")
    shapelet_list = [np.asarray(s, dtype=np.float64) for s in shapelets]
    if len(shapelet_list) == 0:
        raise ValueError("shapelet set is empty; nothing to match")
    n = contexts.shape[0]
    k = len(shapelet_list)
    values = np.empty((n, k))
    positions = np.empty((n, k), dtype=np.int64)
    z_shapelets = [znorm(s) for s in shapelet_list]
    for i in range(n):
        ctx = contexts[i]
        for j, zs in enumerate(z_shapelets):
            zw = _znorm_alignments(ctx, zs.size)
            diff = zw - zs[None, :]
            profile = np.sqrt(np.sum(diff * diff, axis=1))
            p = int(np.argmin(profile))
            values[i, j] = profile[p]
            positions[i, j] = p
    best = values.argmin(axis=1)
    rows = np.arange(n)
    return DistanceMatrix(
        values=values,
        positions=positions,
        min_distance=values[rows, best],
        min_shapelet=best.astype(np.int64),
        min_position=positions[rows, best],
    )


def write_distance_csv(path, matrix: DistanceMatrix) -> None:
    """Dump the full matrix: one ``window_index,shapelet_index,distance,position`` row per pair."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["window_index", "shapelet_index", "distance", "position"])
        n, k = matrix.values.shape
        for i in range(n):
            for j in range(k):
                writer.writerow(
                    [i, j, repr(float(matrix.values[i, j])), int(matrix.positions[i, j])]
                )
