"""Shared test oracles, written independently of the library internals."""

import numpy as np


def znorm_oracle(v):
    v = np.asarray(v, dtype=np.float64)
    sd = v.std()
    if sd < 1e-12:
        return np.zeros_like(v)
    return (v - v.mean()) / sd


def znorm_ed_oracle(a, b):
    da = znorm_oracle(a) - znorm_oracle(b)
    return float(np.sqrt(np.sum(da * da)))


def sliding_min_oracle(context, shapelet):
    """Exhaustive loop over every alignment, ties to the smallest start."""
    q = len(shapelet)
    best_d, best_j = np.inf, -1
    for j in range(len(context) - q + 1):
        d = znorm_ed_oracle(context[j : j + q], shapelet)
        if d < best_d:
            best_d, best_j = d, j
    return best_d, best_j


def best_aligned_corr(atom, motif):
    """Max |Pearson correlation| sliding the atom over the zero-padded motif.

    Learned atoms are only defined up to shift and truncation, so a
    plain lag-0 correlation under-reports recovery; this scans every
    overlap of at least one sample.
    """
    atom = np.asarray(atom, dtype=np.float64)
    motif = np.asarray(motif, dtype=np.float64)
    q = atom.size
    padded = np.concatenate([np.zeros(q - 1), motif, np.zeros(q - 1)])
    best = 0.0
    for t in range(padded.size - q + 1):
        seg = padded[t : t + q]
        if seg.std() < 1e-12 or atom.std() < 1e-12:
            continue
        best = max(best, abs(float(np.corrcoef(seg, atom)[0, 1])))
    return best
