"""Synthetic series with planted motifs that precede forecast-hostile bursts.

Each planted block is a motif written verbatim into the clean base
signal, immediately followed by a burst: ``horizon`` samples whose
noise std jumps from ``noise_std`` to ``burst_std``.  A forecaster
conditioning on a context that contains the motif is therefore looking
at a horizon that is (partly) unpredictable noise — a known-answer
instance for selective forecasting, with ground truth positions
returned for scoring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import TimeSeries


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one planted-motif series.

    ``motif_rate`` is the approximate fraction of the series covered by
    motif+burst blocks; the number of planted blocks is
    ``floor(motif_rate * length / (len(motif) + horizon))``, spread over
    equal segments with seeded jitter so blocks never overlap.
    """

    length: int
    motif: np.ndarray
    horizon: int
    motif_rate: float = 0.2
    base: str = "sine"
    base_amplitude: float = 1.0
    base_period: float = 64.0
    ar_coeff: float = 0.9
    noise_std: float = 0.1
    burst_std: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        motif = np.asarray(self.motif, dtype=np.float64)
        if motif.ndim != 1 or motif.size == 0:
            raise ValueError("motif must be a non-empty 1-D array")
        object.__setattr__(self, "motif", motif)
        if self.length < 1:
            raise ValueError(f"length must be positive, got {self.length}")
        if motif.size >= self.length / 10:
            raise ValueError(
                f"motif length {motif.size} must be < length/10 = {self.length / 10}"
            )
        if self.horizon < 1:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if not 0.0 <= self.motif_rate < 1.0:
            raise ValueError(f"motif_rate must be in [0, 1), got {self.motif_rate}")
        if self.base not in ("sine", "ar1"):
            raise ValueError(f"base must be 'sine' or 'ar1', got {self.base!r}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")
        if self.burst_std <= self.noise_std:
            raise ValueError(
                f"burst_std ({self.burst_std}) must exceed noise_std ({self.noise_std})"
            )

    @property
    def block(self) -> int:
        """Samples occupied by one motif + its burst."""
        return int(self.motif.size) + self.horizon


@dataclass(frozen=True)
class PlantedSeries:
    """Generated series plus the ground truth needed to score selections."""

    series: TimeSeries
    motif_positions: np.ndarray   # start index of each planted motif
    burst_spans: np.ndarray       # (m, 2) half-open [start, end) burst ranges
    clean: np.ndarray             # pre-noise signal (motifs verbatim)
    spec: SynthSpec


def bump_motif(q: int, amplitude: float = 1.0) -> np.ndarray:
    """A smooth biphasic pulse: one windowed sine cycle, up then down.

    Distinct from both sinusoidal bases (different period and envelope)
    and broadband noise, which makes it a convenient planted pattern.
    """
    if q < 2:
        raise ValueError(f"motif length must be >= 2, got {q}")
    t = np.arange(q) + 0.5
    envelope = np.sin(np.pi * t / q)
    return amplitude * envelope * np.sin(2.0 * np.pi * t / q)


def _base_signal(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.base == "sine":
        t = np.arange(spec.length)
        return spec.base_amplitude * np.sin(2.0 * np.pi * t / spec.base_period)
    # AR(1) scaled to a stationary std of base_amplitude.
    phi = spec.ar_coeff
    innovations = rng.standard_normal(spec.length)
    x = np.empty(spec.length)
    x[0] = innovations[0]
    for t in range(1, spec.length):
        x[t] = phi * x[t - 1] + innovations[t]
    stationary = np.sqrt(1.0 / (1.0 - phi * phi))
    return spec.base_amplitude * x / stationary


def _place_motifs(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    count = int(spec.motif_rate * spec.length / spec.block)
    if count == 0:
        return np.empty(0, dtype=np.int64)
    segment = spec.length // count
    if segment < spec.block:
        raise ValueError(
            f"motif_rate {spec.motif_rate} leaves segments of {segment} samples, "
            f"too small for a {spec.block}-sample motif+burst block"
        )
    positions = np.empty(count, dtype=np.int64)
    for j in range(count):
        lo = j * segment
        hi = min((j + 1) * segment, spec.length) - spec.block
        positions[j] = rng.integers(lo, hi + 1)
    return positions


def generate_planted(spec: SynthSpec) -> PlantedSeries:
    """Build the series: base + noise, motifs verbatim, bursts after them.

    All randomness flows from ``spec.seed``.  Returned invariants: the
    motif appears unmodified in ``clean`` at every recorded position,
    blocks are disjoint and in bounds, and burst spans cover exactly
    ``horizon`` samples starting where each motif ends.
    """
    rng = np.random.default_rng(spec.seed)
    clean = _base_signal(spec, rng)
    noise = rng.standard_normal(spec.length) * spec.noise_std
    positions = _place_motifs(spec, rng)
    q = spec.motif.size
    spans = np.empty((positions.size, 2), dtype=np.int64)
    for j, pos in enumerate(positions):
        clean[pos : pos + q] = spec.motif
        b0, b1 = pos + q, pos + q + spec.horizon
        noise[b0:b1] = rng.standard_normal(spec.horizon) * spec.burst_std
        spans[j] = (b0, b1)
    series = TimeSeries(values=clean + noise, name=f"planted-{spec.seed}")
    return PlantedSeries(series=series, motif_positions=positions,
                         burst_spans=spans, clean=clean, spec=spec)


def burst_overlap_mask(burst_spans: np.ndarray, horizon_starts: np.ndarray,
                       horizon_len: int) -> np.ndarray:
    """True where the half-open horizon [start, start+len) meets any burst span.

    ``horizon_starts`` must be absolute positions in the generated
    series (offset window starts by the split start before calling).
    """
    starts = np.asarray(horizon_starts, dtype=np.int64)
    mask = np.zeros(starts.size, dtype=bool)
    for b0, b1 in np.asarray(burst_spans, dtype=np.int64):
        mask |= (starts < b1) & (starts + horizon_len > b0)
    return mask
