"""Shift-invariant dictionary learning and shapelet extraction.

Learns K atoms of length q that reconstruct a set of length-p samples
when each atom may be placed at a per-sample offset:

    minimize   1/2 * sum_i || x_i - sum_k alpha_ik * T(d_k, t_ik) ||^2
               + lam * sum_i ||alpha_i||_1
    subject to ||d_k||^2 <= norm_bound,   t_ik in {0, ..., p - q}

where ``T(d, t)`` places atom ``d`` at offset ``t`` in a length-p zero
vector.  The solver alternates two steps:

* **Sparse coding** (atoms fixed): per sample, each atom's offset is
  the argmax of the absolute cross-correlation with the running
  residual; the coefficients are then fit by iterative soft
  thresholding (ISTA) over the resulting shifted-atom design.
* **Atom update** ((alpha, t) fixed): a projected gradient step per
  atom on the reconstruction term, with backtracking halving of the
  step until the objective does not increase, then projection back to
  the norm ball when ``||d||^2 > norm_bound``.

The highest-total-|coefficient| atoms, deduplicated by z-normalized
distance, become the shapelets used for window matching.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .distance import znorm_ed

logger = logging.getLogger(__name__)

_EPS = 1e-12


@dataclass(frozen=True)
class SIDLConfig:
    """Hyper-parameters for one dictionary fit."""

    K: int
    q: int
    lam: float
    norm_bound: float = 1.0
    max_iters: int = 100
    inner_iters: int = 50
    rel_tol: float = 1e-5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.norm_bound <= 0:
            raise ValueError(f"norm_bound must be > 0, got {self.norm_bound}")
        if self.max_iters < 1 or self.inner_iters < 1:
            raise ValueError("max_iters and inner_iters must be >= 1")
        if self.rel_tol <= 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")


@dataclass(frozen=True)
class SparseCode:
    """Per-sample codes: coefficients ``alpha`` (n, K) and offsets (n, K)."""

    alpha: np.ndarray
    offsets: np.ndarray

    def __len__(self) -> int:
        return int(self.alpha.shape[0])


@dataclass(frozen=True)
class Dictionary:
    """Learned atoms (K, q) with the objective value after each alternation."""

    atoms: np.ndarray
    config: SIDLConfig
    objective_trace: list[float]


@dataclass(frozen=True)
class ShapeletSet:
    """Ranked, deduplicated atoms retained for window matching."""

    shapelets: list[np.ndarray]
    scores: list[float]
    atom_indices: list[int]
    q: int
    config: SIDLConfig | None = None
    objective_trace: list[float] | None = None

    def __len__(self) -> int:
        return len(self.shapelets)


def shift_atom(atom: np.ndarray, t: int, p: int) -> np.ndarray:
    """Length-p vector with ``atom`` written at offset ``t``, zeros elsewhere."""
    atom = np.asarray(atom, dtype=np.float64)
    q = atom.size
    if q > p:
        raise ValueError(f"atom length {q} exceeds sample length {p}")
    if not 0 <= t <= p - q:
        raise ValueError(f"offset {t} outside valid range [0, {p - q}]")
    out = np.zeros(p)
    out[t : t + q] = atom
    return out


def reconstruct_sample(atoms: np.ndarray, alpha: np.ndarray, offsets: np.ndarray,
                       p: int) -> np.ndarray:
    """``sum_k alpha[k] * T(atoms[k], offsets[k])`` without materializing shifts."""
    out = np.zeros(p)
    q = atoms.shape[1]
    for k in range(atoms.shape[0]):
        a = alpha[k]
        if a != 0.0:
            t = int(offsets[k])
            out[t : t + q] += a * atoms[k]
    return out


def _soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def sparse_code(x: np.ndarray, atoms: np.ndarray, lam: float,
                inner_iters: int = 50, rel_tol: float = 1e-5,
                ) -> tuple[np.ndarray, np.ndarray]:
    """Code one sample against fixed atoms; returns (alpha, offsets).

    Offsets are chosen greedily, atom by atom: each atom goes where the
    absolute cross-correlation with the current residual peaks (ties to
    the smallest offset), and a provisional least-squares coefficient
    updates the residual before the next atom looks.  With all offsets
    fixed, ISTA then minimizes
    ``1/2 ||x - S alpha||^2 + lam ||alpha||_1`` over the shifted-atom
    design ``S``, stopping after ``inner_iters`` or when the largest
    coordinate change drops below ``rel_tol`` (relative to max(1, |alpha|)).
    """
    x = np.asarray(x, dtype=np.float64)
    atoms = np.asarray(atoms, dtype=np.float64)
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(atoms)):
        raise ValueError("sparse_code requires finite sample and atoms")
    K, q = atoms.shape
    p = x.size
    if q > p:
        raise ValueError(f"atom length {q} exceeds sample length {p}")

    residual = x.copy()
    offsets = np.zeros(K, dtype=np.int64)
    design = np.zeros((p, K))
    warm = np.zeros(K)
    for k in range(K):
        atom = atoms[k]
        nrm2 = float(atom @ atom)
        if nrm2 < _EPS:
            continue
        corr = np.correlate(residual, atom, mode="valid")
        t = int(np.argmax(np.abs(corr)))
        offsets[k] = t
        design[t : t + q, k] = atom
        coef = corr[t] / nrm2
        warm[k] = coef
        residual[t : t + q] -= coef * atom

    gram = design.T @ design
    lipschitz = float(np.linalg.eigvalsh(gram)[-1]) if K > 0 else 0.0
    if lipschitz < _EPS:
        return np.zeros(K), offsets
    step = 1.0 / lipschitz
    dtx = design.T @ x
    alpha = warm
    for _ in range(inner_iters):
        grad = gram @ alpha - dtx
        new = _soft_threshold(alpha - step * grad, lam * step)
        delta = float(np.max(np.abs(new - alpha)))
        alpha = new
        if delta < rel_tol * max(1.0, float(np.max(np.abs(alpha)))):
            break
    return alpha, offsets


def _code_all(samples: np.ndarray, atoms: np.ndarray, config: SIDLConfig) -> SparseCode:
    n = samples.shape[0]
    K = atoms.shape[0]
    alpha = np.zeros((n, K))
    offsets = np.zeros((n, K), dtype=np.int64)
    for i in range(n):
        alpha[i], offsets[i] = sparse_code(
            samples[i], atoms, config.lam, config.inner_iters, config.rel_tol
        )
    return SparseCode(alpha=alpha, offsets=offsets)


def _sample_objective(x: np.ndarray, atoms: np.ndarray, alpha: np.ndarray,
                      offsets: np.ndarray, lam: float) -> float:
    r = x - reconstruct_sample(atoms, alpha, offsets, x.size)
    return 0.5 * float(r @ r) + lam * float(np.sum(np.abs(alpha)))


def sidl_objective(samples: np.ndarray, atoms: np.ndarray, codes: SparseCode,
                   lam: float) -> float:
    """Full objective: reconstruction quadratic plus l1 coefficient penalty."""
    samples = np.asarray(samples, dtype=np.float64)
    total = 0.0
    for i in range(samples.shape[0]):
        total += _sample_objective(samples[i], atoms, codes.alpha[i],
                                   codes.offsets[i], lam)
    return total


def _residuals(samples: np.ndarray, atoms: np.ndarray, codes: SparseCode) -> np.ndarray:
    n, p = samples.shape
    res = samples.copy()
    for i in range(n):
        res[i] -= reconstruct_sample(atoms, codes.alpha[i], codes.offsets[i], p)
    return res


def reconstruction_gradient(samples: np.ndarray, atoms: np.ndarray,
                            codes: SparseCode) -> np.ndarray:
    """Gradient of the reconstruction term w.r.t. every atom, shape (K, q).

    ``grad_k = -sum_i alpha_ik * r_i[t_ik : t_ik + q]`` with ``r_i`` the
    residual of sample i under the current atoms and codes.
    """
    samples = np.asarray(samples, dtype=np.float64)
    atoms = np.asarray(atoms, dtype=np.float64)
    K, q = atoms.shape
    res = _residuals(samples, atoms, codes)
    grad = np.zeros((K, q))
    for i in range(samples.shape[0]):
        for k in range(K):
            a = codes.alpha[i, k]
            if a != 0.0:
                t = int(codes.offsets[i, k])
                grad[k] -= a * res[i, t : t + q]
    return grad


def _project(atom: np.ndarray, norm_bound: float) -> np.ndarray:
    nrm2 = float(atom @ atom)
    if nrm2 > norm_bound:
        return atom * np.sqrt(norm_bound / nrm2)
    return atom


def dict_update(atoms: np.ndarray, samples: np.ndarray, codes: SparseCode,
                step: float | None = None, norm_bound: float = 1.0) -> np.ndarray:
    """One pass of projected gradient steps over the atoms, codes fixed.

    Atoms are updated in sequence against the running residual.  The
    default step for atom k is ``1 / sum_i alpha_ik^2`` (the exact
    curvature of its quadratic block); any step is halved until the
    reconstruction objective does not increase, and an atom whose step
    underflows is left unchanged.  Updated atoms are projected onto
    ``||d||^2 <= norm_bound``.  Atoms with all-zero coefficients see a
    zero gradient and pass through untouched.
    """
    atoms = np.array(atoms, dtype=np.float64, copy=True)
    samples = np.asarray(samples, dtype=np.float64)
    K, q = atoms.shape
    res = _residuals(samples, atoms, codes)

    for k in range(K):
        weight = float(np.sum(codes.alpha[:, k] ** 2))
        if weight < _EPS:
            continue
        # Segments of each sample's residual that atom k touches.
        users = np.flatnonzero(codes.alpha[:, k] != 0.0)
        segs = np.stack([res[i, codes.offsets[i, k] : codes.offsets[i, k] + q]
                         for i in users])
        coefs = codes.alpha[users, k]
        grad = -(coefs[:, None] * segs).sum(axis=0)
        local = 0.5 * float(np.sum(segs * segs))

        s = (1.0 / weight) if step is None else float(step)
        accepted = None
        for _ in range(60):
            candidate = _project(atoms[k] - s * grad, norm_bound)
            delta = candidate - atoms[k]
            shifted = segs - coefs[:, None] * delta[None, :]
            cand_local = 0.5 * float(np.sum(shifted * shifted))
            if cand_local <= local + _EPS * max(1.0, abs(local)):
                accepted = (candidate, shifted)
                break
            s *= 0.5
        if accepted is None:
            continue
        atoms[k], new_segs = accepted
        for j, i in enumerate(users):
            t = int(codes.offsets[i, k])
            res[i, t : t + q] = new_segs[j]
    return atoms


def learn_dictionary(samples: np.ndarray, config: SIDLConfig,
                     ) -> tuple[Dictionary, SparseCode]:
    """Alternate sparse coding and atom updates until converged.

    Atoms start as random subsequences of the samples (seeded from
    ``config.seed``), rescaled onto the norm bound so every atom begins
    with enough energy to attract coefficients.  Each alternation
    re-codes every sample, keeping the previous code when it scores
    better under the new atoms, so the recorded objective trace is
    non-increasing.  Stops after ``max_iters`` alternations or when the
    objective change falls below ``rel_tol`` relative to its value.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ValueError("sample set must be a non-empty (n, p) array")
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples contain non-finite values")
    n, p = samples.shape
    if config.q > p:
        raise ValueError(f"atom length q={config.q} exceeds sample length p={p}")

    rng = np.random.default_rng(config.seed)
    atoms = np.empty((config.K, config.q))
    for k in range(config.K):
        i = int(rng.integers(n))
        t = int(rng.integers(p - config.q + 1))
        atom = samples[i, t : t + config.q].copy()
        if float(atom @ atom) < _EPS:
            atom = rng.standard_normal(config.q)
        atom *= np.sqrt(config.norm_bound) / np.linalg.norm(atom)
        atoms[k] = atom

    codes = _code_all(samples, atoms, config)
    trace = [sidl_objective(samples, atoms, codes, config.lam)]

    for _ in range(config.max_iters):
        atoms = dict_update(atoms, samples, codes, step=None,
                            norm_bound=config.norm_bound)
        alpha = np.zeros_like(codes.alpha)
        offsets = np.zeros_like(codes.offsets)
        for i in range(n):
            cand_a, cand_t = sparse_code(samples[i], atoms, config.lam,
                                         config.inner_iters, config.rel_tol)
            new_obj = _sample_objective(samples[i], atoms, cand_a, cand_t, config.lam)
            old_obj = _sample_objective(samples[i], atoms, codes.alpha[i],
                                        codes.offsets[i], config.lam)
            if new_obj <= old_obj:
                alpha[i], offsets[i] = cand_a, cand_t
            else:
                alpha[i], offsets[i] = codes.alpha[i], codes.offsets[i]
        codes = SparseCode(alpha=alpha, offsets=offsets)
        trace.append(sidl_objective(samples, atoms, codes, config.lam))
        if abs(trace[-2] - trace[-1]) < config.rel_tol * max(1.0, abs(trace[-1])):
            break

    logger.info("dictionary learned: K=%d q=%d lam=%g, %d alternations, "
                "objective %.6g -> %.6g", config.K, config.q, config.lam,
                len(trace) - 1, trace[0], trace[-1])
    return Dictionary(atoms=atoms, config=config, objective_trace=trace), codes


def rank_top_k(dictionary: Dictionary, codes: SparseCode, top_k: int = 5,
               dedup_threshold: float = 1.0) -> ShapeletSet:
    """Keep the highest-scoring atoms, skipping near-duplicates.

    An atom's score is ``sum_i |alpha_ik|``.  Atoms are visited in
    descending score order (ties by atom index) and retained while
    their z-normalized distance to every retained atom is at least
    ``dedup_threshold``; a threshold of 0 disables deduplication.
    Atoms with zero score are never retained, so all-zero codes yield
    an empty set.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    if dedup_threshold < 0:
        raise ValueError(f"dedup_threshold must be >= 0, got {dedup_threshold}")
    scores = np.abs(codes.alpha).sum(axis=0)
    order = np.argsort(-scores, kind="stable")
    kept: list[int] = []
    for k in order:
        k = int(k)
        if scores[k] <= 0.0:
            continue
        if any(znorm_ed(dictionary.atoms[k], dictionary.atoms[j]) < dedup_threshold
               for j in kept):
            continue
        kept.append(k)
        if len(kept) == top_k:
            break
    return ShapeletSet(
        shapelets=[dictionary.atoms[k].copy() for k in kept],
        scores=[float(scores[k]) for k in kept],
        atom_indices=kept,
        q=dictionary.atoms.shape[1],
        config=dictionary.config,
        objective_trace=list(dictionary.objective_trace),
    )


def _child_seed(seed: int, cell: int, fold: int) -> int:
    return int(np.random.SeedSequence([seed, cell, fold]).generate_state(1)[0])


def _holdout_error(samples: np.ndarray, atoms: np.ndarray, config: SIDLConfig) -> float:
    total = 0.0
    for x in samples:
        alpha, offsets = sparse_code(x, atoms, config.lam,
                                     config.inner_iters, config.rel_tol)
        r = x - reconstruct_sample(atoms, alpha, offsets, x.size)
        total += 0.5 * float(r @ r)
    return total / samples.shape[0]


def grid_search(samples: np.ndarray, k_grid, q_grid, lam_grid, folds: int = 3,
                seed: int = 0, norm_bound: float = 1.0, max_iters: int = 100,
                inner_iters: int = 50, rel_tol: float = 1e-5) -> SIDLConfig:
    """Pick (K, q, lam) by cross-validated held-out reconstruction error.

    Samples are shuffled (seeded) into ``folds`` folds; each grid cell
    trains on the other folds and is scored by the mean per-sample
    reconstruction error ``1/2 ||x - recon||^2`` on the held-out fold,
    averaged over folds.  Exact ties go to smaller K, then smaller q,
    then larger lam.  Raises ``ValueError`` when there are fewer samples
    than folds or when a grid q exceeds the sample length.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n, p = samples.shape
    if n < folds:
        raise ValueError(f"need at least {folds} samples for {folds}-fold CV, got {n}")
    for q in q_grid:
        if q > p:
            raise ValueError(f"grid q={q} exceeds sample length p={p}")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    fold_idx = np.array_split(perm, folds)

    best: tuple[float, SIDLConfig] | None = None
    cells = list(product(sorted(k_grid), sorted(q_grid), sorted(lam_grid, reverse=True)))
    for cell, (K, q, lam) in enumerate(cells):
        fold_errors = []
        for f in range(folds):
            held = samples[fold_idx[f]]
            train = samples[np.concatenate([fold_idx[g] for g in range(folds) if g != f])]
            cfg = SIDLConfig(K=K, q=q, lam=lam, norm_bound=norm_bound,
                             max_iters=max_iters, inner_iters=inner_iters,
                             rel_tol=rel_tol, seed=_child_seed(seed, cell, f))
            d, _ = learn_dictionary(train, cfg)
            fold_errors.append(_holdout_error(held, d.atoms, cfg))
        cv = float(np.mean(fold_errors))
        logger.debug("grid cell K=%d q=%d lam=%g: cv error %.6g", K, q, lam, cv)
        if best is None or cv < best[0]:
            best = (cv, SIDLConfig(K=K, q=q, lam=lam, norm_bound=norm_bound,
                                   max_iters=max_iters, inner_iters=inner_iters,
                                   rel_tol=rel_tol, seed=seed))
    assert best is not None
    logger.info("grid search selected K=%d q=%d lam=%g (cv error %.6g)",
                best[1].K, best[1].q, best[1].lam, best[0])
    return best[1]


def save_shapelets(path, shapelet_set: ShapeletSet) -> None:
    """Write a shapelet set as JSON (atoms at full float precision)."""
    payload = {
        "q": shapelet_set.q,
        "shapelets": [
            {"atom_index": idx, "score": score, "values": [float(v) for v in s]}
            for idx, score, s in zip(shapelet_set.atom_indices,
                                     shapelet_set.scores,
                                     shapelet_set.shapelets)
        ],
        "config": None,
        "objective_trace": shapelet_set.objective_trace,
    }
    if shapelet_set.config is not None:
        c = shapelet_set.config
        payload["config"] = {
            "K": c.K, "q": c.q, "lam": c.lam, "norm_bound": c.norm_bound,
            "max_iters": c.max_iters, "inner_iters": c.inner_iters,
            "rel_tol": c.rel_tol, "seed": c.seed,
        }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_shapelets(path) -> ShapeletSet:
    """Read a shapelet set written by :func:`save_shapelets`."""
    with open(path) as fh:
        payload = json.load(fh)
    config = None
    if payload.get("config"):
        config = SIDLConfig(**payload["config"])
    entries = payload["shapelets"]
    return ShapeletSet(
        shapelets=[np.array(e["values"], dtype=np.float64) for e in entries],
        scores=[float(e["score"]) for e in entries],
        atom_indices=[int(e["atom_index"]) for e in entries],
        q=int(payload["q"]),
        config=config,
        objective_trace=payload.get("objective_trace"),
    )
