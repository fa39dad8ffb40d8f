"""Series ingestion, chronological splits, and sliding-window extraction.

A univariate series is loaded from one CSV column, split
chronologically into train/validation/test, and cut into
(context, target) windows: the context is the stretch a forecaster
conditions on, the target is the horizon it must predict.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ._util import floor_frac

logger = logging.getLogger(__name__)

# Fixed ETT-style boundaries: 12/4/4 months of hourly or quarter-hourly
# records (30-day months), expressed as split indices.
ETT_HOURLY_BOUNDARIES = (12 * 30 * 24, 16 * 30 * 24)
ETT_QUARTER_HOURLY_BOUNDARIES = (12 * 30 * 24 * 4, 16 * 30 * 24 * 4)


@dataclass(frozen=True)
class TimeSeries:
    """A finite univariate series with a name tag.

    ``values`` is a read-only 1-D float64 array; construction rejects
    empty or non-finite input so downstream code never re-checks.
    """

    values: np.ndarray
    name: str = "series"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError(f"series must be 1-D, got shape {values.shape}")
        if values.size == 0:
            raise ValueError("series must contain at least one value")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValueError(f"non-finite value at position {bad}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SplitSpec:
    """Chronological train/validation/test split.

    Either ``fractions`` (summing to 1) or explicit ``boundaries``
    ``(train_end, val_end)`` may be given, not both.
    """

    fractions: tuple[float, float, float] | None = (0.7, 0.1, 0.2)
    boundaries: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.boundaries is not None:
            if self.fractions not in (None, (0.7, 0.1, 0.2)):
                raise ValueError("give fractions or boundaries, not both")
            object.__setattr__(self, "fractions", None)
            a, b = self.boundaries
            if not (0 < a < b):
                raise ValueError(
                    f"boundaries must satisfy 0 < train_end < val_end, got {self.boundaries}"
                )
            return
        if self.fractions is None:
            raise ValueError("one of fractions or boundaries is required")
        f = self.fractions
        if len(f) != 3 or any(not (0.0 <= x <= 1.0) for x in f):
            raise ValueError(f"fractions must be three values in [0, 1], got {f!r}")
        if abs(sum(f) - 1.0) > 1e-9:
            raise ValueError(f"fractions must sum to 1, got sum {sum(f)!r}")

    @classmethod
    def ett_hourly(cls) -> "SplitSpec":
        return cls(fractions=None, boundaries=ETT_HOURLY_BOUNDARIES)

    @classmethod
    def ett_quarter_hourly(cls) -> "SplitSpec":
        return cls(fractions=None, boundaries=ETT_QUARTER_HOURLY_BOUNDARIES)

    def resolve(self, length: int) -> tuple[int, int]:
        """Concrete (train_end, val_end) indices for a series of ``length``."""
        if self.boundaries is not None:
            a, b = self.boundaries
            if b >= length:
                raise ValueError(
                    f"boundaries {self.boundaries} do not fit series of length {length}"
                )
            return (a, b)
        f_train, f_val, _ = self.fractions  # type: ignore[misc]
        return (floor_frac(f_train, length), floor_frac(f_train + f_val, length))


@dataclass(frozen=True)
class Window:
    """One forecasting instance: ``context`` precedes ``target`` in time."""

    index: int
    start: int
    context: np.ndarray
    target: np.ndarray


class WindowSet:
    """Sliding windows over a series, stored as stacked arrays.

    ``contexts`` has shape (n, sl) and ``targets`` (n, fl); row ``i``
    is the window starting at ``starts[i]`` in the source series.
    """

    def __init__(self, contexts: np.ndarray, targets: np.ndarray, starts: np.ndarray,
                 sl: int, fl: int, stride: int, source: str = "series") -> None:
        self.contexts = contexts
        self.targets = targets
        self.starts = starts
        self.sl = sl
        self.fl = fl
        self.stride = stride
        self.source = source

    def __len__(self) -> int:
        return int(self.contexts.shape[0])

    def __getitem__(self, i: int) -> Window:
        n = len(self)
        if not -n <= i < n:
            raise IndexError(f"window index {i} out of range for {n} windows")
        i = i % n
        return Window(index=i, start=int(self.starts[i]),
                      context=self.contexts[i], target=self.targets[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def load_series(path, column: str, name: str | None = None) -> TimeSeries:
    """Read one numeric column of a CSV into a :class:`TimeSeries`.

    Raises ``FileNotFoundError`` for a missing file, ``ValueError``
    naming the column when it is absent, and ``ValueError`` with the
    0-based data-row index on the first blank or non-numeric cell.
    """
    try:
        # blank rows must surface as parse errors, not vanish
        frame = pd.read_csv(path, skip_blank_lines=False)
    except FileNotFoundError:
        raise FileNotFoundError(f"no such data file: {path}") from None
    except pd.errors.EmptyDataError:
        raise ValueError(f"empty data file: {path}") from None
    if column not in frame.columns:
        raise ValueError(f"column {column!r} not found in {path} "
                         f"(has: {', '.join(map(str, frame.columns))})")
    raw = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=np.float64)
    finite = np.isfinite(raw)
    if not finite.all():
        row = int(np.flatnonzero(~finite)[0])
        raise ValueError(f"cannot parse column {column!r} at data row {row}: "
                         f"value {frame[column].iloc[row]!r}")
    if raw.size == 0:
        raise ValueError(f"column {column!r} in {path} has no rows")
    return TimeSeries(values=raw, name=name or str(column))


def split_series(ts: TimeSeries, spec: SplitSpec, min_length: int = 1,
                 ) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Split ``ts`` chronologically into (train, val, test).

    ``min_length`` is the shortest admissible split — pass ``sl + fl``
    so every split can host at least one window.  Raises ``ValueError``
    naming the offending split when one is too small.
    """
    a, b = spec.resolve(len(ts))
    parts = {
        "train": ts.values[:a],
        "val": ts.values[a:b],
        "test": ts.values[b:],
    }
    for label, segment in parts.items():
        if segment.size < min_length:
            raise ValueError(
                f"{label} split too small: {segment.size} < {min_length} "
                f"(boundaries {a}, {b} on length {len(ts)})"
            )
    logger.info("split %s (length %d) at boundaries (%d, %d): train=%d val=%d test=%d",
                ts.name, len(ts), a, b, a, b - a, len(ts) - b)
    return (
        TimeSeries(parts["train"], name=f"{ts.name}/train"),
        TimeSeries(parts["val"], name=f"{ts.name}/val"),
        TimeSeries(parts["test"], name=f"{ts.name}/test"),
    )


def window_count(length: int, sl: int, fl: int, stride: int) -> int:
    """Number of stride-spaced windows: floor((length - sl - fl)/stride) + 1."""
    if length < sl + fl:
        return 0
    return (length - sl - fl) // stride + 1


def make_windows(ts: TimeSeries, sl: int, fl: int, stride: int = 1) -> WindowSet:
    """Cut ``ts`` into windows of ``sl`` context + ``fl`` target values.

    Window ``i`` starts at ``i * stride``; its context is
    ``values[start : start + sl]`` and its target the ``fl`` values
    that follow.  Raises ``ValueError`` on bad geometry or when the
    series is too short for a single window.
    """
    if sl < 1 or fl < 1:
        raise ValueError(f"sl and fl must be positive, got sl={sl}, fl={fl}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    n = window_count(len(ts), sl, fl, stride)
    if n == 0:
        raise ValueError(
            f"series {ts.name!r} of length {len(ts)} too short for one "
            f"window of sl+fl = {sl + fl}"
        )
    starts = np.arange(n, dtype=np.int64) * stride
    idx = starts[:, None] + np.arange(sl + fl)[None, :]
    block = ts.values[idx]
    return WindowSet(
        contexts=np.ascontiguousarray(block[:, :sl]),
        targets=np.ascontiguousarray(block[:, sl:]),
        starts=starts, sl=sl, fl=fl, stride=stride, source=ts.name,
    )
