"""Baseline forecaster, external prediction files, and per-window errors.

The baseline is a direct multi-output linear map from the ``sl``
context values to all ``fl`` horizon values, fit once by ridge
regression on every training window.  It exists to give selection
experiments a deterministic, dependency-free forecaster; predictions
from any stronger model can be swapped in through the CSV format
accepted by :func:`load_external_predictions`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import TimeSeries, WindowSet, make_windows


@dataclass(frozen=True)
class BaselineModel:
    """Fitted linear forecaster: ``predict(x) = x @ weights + intercept``."""

    weights: np.ndarray        # (sl, fl)
    intercept: np.ndarray      # (fl,)
    sl: int
    fl: int
    ridge: float


@dataclass(frozen=True)
class PredictionSet:
    """Forecasts aligned with a :class:`WindowSet`: row i predicts window i."""

    values: np.ndarray          # (n, fl)
    source: str

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def for_window(self, i: int) -> np.ndarray:
        return self.values[i]


@dataclass(frozen=True)
class ErrorVector:
    """Per-window mean squared forecast errors, with summary moments.

    ``std`` uses the population convention (ddof=0) throughout.
    """

    errors: np.ndarray
    mean: float
    std: float
    source: str = ""

    @classmethod
    def from_errors(cls, errors: np.ndarray, source: str = "") -> "ErrorVector":
        errors = np.asarray(errors, dtype=np.float64)
        if errors.ndim != 1 or errors.size == 0:
            raise ValueError("error vector must be non-empty and 1-D")
        if np.any(errors < 0) or not np.all(np.isfinite(errors)):
            raise ValueError("errors must be finite and non-negative")
        return cls(errors=errors, mean=float(errors.mean()),
                   std=float(errors.std()), source=source)

    def __len__(self) -> int:
        return int(self.errors.size)


def fit_baseline(train: TimeSeries, sl: int, fl: int, ridge: float = 1e-3) -> BaselineModel:
    """Fit the direct linear forecaster on all stride-1 training windows.

    Contexts and targets are mean-centered, the weight matrix solves the
    ridge normal equations, and the intercept restores the means — so the
    fit is translation-equivariant.  With ``ridge = 0`` a rank-deficient
    normal system raises ``numpy.linalg.LinAlgError``.
    """
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    windows = make_windows(train, sl=sl, fl=fl, stride=1)
    x = windows.contexts
    y = windows.targets
    x_mean = x.mean(axis=0)
    y_mean = y.mean(axis=0)
    xc = x - x_mean
    yc = y - y_mean
    gram = xc.T @ xc + ridge * np.eye(sl)
    if ridge == 0.0 and np.linalg.matrix_rank(gram) < sl:
        raise np.linalg.LinAlgError(
            "normal system is rank-deficient and ridge is 0; pass ridge > 0"
        )
    weights = np.linalg.solve(gram, xc.T @ yc)
    intercept = y_mean - x_mean @ weights
    return BaselineModel(weights=weights, intercept=intercept, sl=sl, fl=fl, ridge=ridge)


def predict(model: BaselineModel, windows: WindowSet) -> PredictionSet:
    """Forecast every window's horizon from its context."""
    if windows.sl != model.sl or windows.fl != model.fl:
        raise ValueError(
            f"window geometry (sl={windows.sl}, fl={windows.fl}) does not match "
            f"model (sl={model.sl}, fl={model.fl})"
        )
    values = windows.contexts @ model.weights + model.intercept
    return PredictionSet(values=values, source="baseline")


def prediction_header(fl: int) -> list[str]:
    return ["window_index"] + [f"v_{j}" for j in range(1, fl + 1)]


def load_external_predictions(path, windows: WindowSet, source: str = "external") -> PredictionSet:
    """Read a prediction CSV (``window_index,v_1,...,v_fl``) for ``windows``.

    Every window index must appear exactly once and every row must carry
    exactly ``fl`` finite values; violations raise ``ValueError`` naming
    the offending row, and a missing file raises ``FileNotFoundError``.
    """
    fl = windows.fl
    n = len(windows)
    expected = prediction_header(fl)
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise FileNotFoundError(f"no such prediction file: {path}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"prediction file {path} is empty")
        if len(header) != fl + 1:
            raise ValueError(
                f"prediction file {path} has {len(header) - 1} value columns, "
                f"expected fl = {fl}"
            )
        if [h.strip() for h in header] != expected:
            raise ValueError(
                f"prediction file {path} header mismatch: expected "
                f"{','.join(expected)}"
            )
        values = np.full((n, fl), np.nan)
        seen = np.zeros(n, dtype=bool)
        for rownum, row in enumerate(reader):
            if len(row) != fl + 1:
                raise ValueError(
                    f"{path}: row {rownum} has {len(row) - 1} values, expected {fl}"
                )
            try:
                idx = int(row[0])
                vals = np.array([float(v) for v in row[1:]])
            except ValueError:
                raise ValueError(f"{path}: cannot parse row {rownum}") from None
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"{path}: non-finite value at row {rownum}")
            if not 0 <= idx < n:
                raise ValueError(
                    f"{path}: row {rownum} has window index {idx}, "
                    f"valid range is 0..{n - 1}"
                )
            if seen[idx]:
                raise ValueError(f"{path}: duplicate window index {idx} at row {rownum}")
            seen[idx] = True
            values[idx] = vals
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise ValueError(
            f"{path}: covers {int(seen.sum())} of {n} windows "
            f"(first missing index {missing})"
        )
    return PredictionSet(values=values, source=source)


def write_predictions_csv(path, preds: PredictionSet) -> None:
    """Write predictions in the ``window_index,v_1,...,v_fl`` format."""
    fl = preds.values.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(prediction_header(fl))
        for i, row in enumerate(preds.values):
            writer.writerow([i] + [repr(float(v)) for v in row])


def per_window_mse(preds: PredictionSet, windows: WindowSet) -> ErrorVector:
    """Mean squared error of each window's forecast over its horizon."""
    if len(preds) != len(windows):
        raise ValueError(
            f"predictions cover {len(preds)} windows, window set has {len(windows)}"
        )
    if preds.values.shape[1] != windows.fl:
        raise ValueError(
            f"predictions have horizon {preds.values.shape[1]}, windows have fl={windows.fl}"
        )
    errors = ((preds.values - windows.targets) ** 2).mean(axis=1)
    return ErrorVector.from_errors(errors, source=preds.source)
