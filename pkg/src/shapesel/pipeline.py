"""End-to-end selective forecasting runs, ablations, and artifact emission.

A run follows one recipe: forecast validation and test windows, turn
validation errors into a ``mean + delta * std`` threshold, learn a
shapelet dictionary from the contexts of above-threshold validation
windows, match those shapelets in test contexts, drop the best-matching
``dp`` fraction, and score the result against a seeded random drop of
the same size.  Every stochastic step draws from an explicit seed, so a
run is a pure function of its config — repeated runs produce
byte-identical artifacts.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import re
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np

from .data import SplitSpec, TimeSeries, load_series, make_windows, split_series
from .dictlearn import (SIDLConfig, ShapeletSet, grid_search, learn_dictionary,
                        rank_top_k, save_shapelets)
from .distance import DistanceMatrix, build_distance_matrix, write_distance_csv
from .forecast import (ErrorVector, fit_baseline, load_external_predictions,
                       per_window_mse, predict)
from .report import (SummaryRow, write_ablation_csv, write_per_window_csv,
                     write_summary_csv)
from .selection import (EvaluationReport, Selection, ThresholdSpec,
                        compute_threshold, discard, filter_high_error,
                        random_selection, selective_mse, write_selection_csv)
from .synth import PlantedSeries, SynthSpec, generate_planted

logger = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """A stage failure, message-prefixed with the stage name."""


@contextmanager
def _stage(name: str):
    try:
        yield
    except (PipelineError, FileNotFoundError):
        raise
    except Exception as exc:
        raise PipelineError(f"stage {name!r}: {exc}") from exc


@dataclass(frozen=True)
class PredictionSource:
    """One external forecaster: prediction CSVs for the val and test windows."""

    label: str
    val_path: str
    test_path: str


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; see README for the JSON schema."""

    dataset_path: str | None = None
    dataset_column: str | None = None
    dataset_name: str = "dataset"
    synth: SynthSpec | None = None
    split: SplitSpec = field(default_factory=SplitSpec)
    sl: int = 512
    fl: int = 96
    stride: int = 1
    forecaster: str = "baseline"
    ridge: float = 1e-3
    prediction_sources: tuple[PredictionSource, ...] = ()
    delta: float = 2.0
    dp: float = 0.2
    k_grid: tuple[int, ...] = (4, 8, 16)
    q_grid: tuple[int, ...] | None = None
    lam_grid: tuple[float, ...] = (0.01, 0.1, 1.0)
    norm_bound: float = 1.0
    max_iters: int = 100
    inner_iters: int = 50
    rel_tol: float = 1e-5
    grid_folds: int = 3
    top_k: int = 5
    dedup_threshold: float = 1.0
    seeds: tuple[int, ...] = (0, 1, 2)
    output_dir: str | None = None

    def __post_init__(self) -> None:
        if (self.dataset_path is None) == (self.synth is None):
            raise ValueError("config needs exactly one of dataset or synth")
        if self.dataset_path is not None and self.dataset_column is None:
            raise ValueError("dataset config requires a column name")
        if self.forecaster not in ("baseline", "external"):
            raise ValueError(f"forecaster must be 'baseline' or 'external', "
                             f"got {self.forecaster!r}")
        if self.forecaster == "external" and not self.prediction_sources:
            raise ValueError("external forecaster requires prediction sources")
        if not 0.0 <= self.dp <= 1.0:
            raise ValueError(f"dp must be in [0, 1], got {self.dp}")
        if len(self.seeds) == 0:
            raise ValueError("seeds must be non-empty")

    @property
    def resolved_q_grid(self) -> tuple[int, ...]:
        if self.q_grid is not None:
            return self.q_grid
        return (max(1, self.sl // 16), max(1, self.sl // 8), max(1, self.sl // 4))

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str = ".") -> "RunConfig":
        def _path(p):
            return p if os.path.isabs(p) else os.path.join(base_dir, p)

        kwargs: dict = {}
        if "dataset" in raw and raw["dataset"] is not None:
            ds = raw["dataset"]
            kwargs["dataset_path"] = _path(ds["path"])
            kwargs["dataset_column"] = ds["column"]
            kwargs["dataset_name"] = ds.get("name", ds["column"])
        if "synth" in raw and raw["synth"] is not None:
            sy = dict(raw["synth"])
            sy["motif"] = np.array(sy["motif"], dtype=np.float64)
            kwargs["synth"] = SynthSpec(**sy)
            kwargs["dataset_name"] = raw.get("name", f"synth-{kwargs['synth'].seed}")
        if "split" in raw:
            sp = raw["split"]
            if "preset" in sp:
                preset = sp["preset"]
                if preset == "ett-hourly":
                    kwargs["split"] = SplitSpec.ett_hourly()
                elif preset == "ett-quarter-hourly":
                    kwargs["split"] = SplitSpec.ett_quarter_hourly()
                else:
                    raise ValueError(f"unknown split preset {preset!r}")
            elif "boundaries" in sp:
                kwargs["split"] = SplitSpec(fractions=None,
                                            boundaries=tuple(sp["boundaries"]))
            else:
                kwargs["split"] = SplitSpec(fractions=tuple(sp["fractions"]))
        for key in ("sl", "fl", "stride", "forecaster", "ridge", "delta", "dp",
                    "top_k", "dedup_threshold"):
            if key in raw:
                kwargs[key] = raw[key]
        if "predictions" in raw:
            kwargs["prediction_sources"] = tuple(
                PredictionSource(label=p["label"], val_path=_path(p["val"]),
                                 test_path=_path(p["test"]))
                for p in raw["predictions"])
        if "sidl" in raw:
            sidl = raw["sidl"]
            as_tuple = lambda v: tuple(v) if isinstance(v, (list, tuple)) else (v,)
            if "K" in sidl:
                kwargs["k_grid"] = as_tuple(sidl["K"])
            if "q" in sidl:
                kwargs["q_grid"] = as_tuple(sidl["q"])
            if "lam" in sidl:
                kwargs["lam_grid"] = as_tuple(sidl["lam"])
            for key in ("norm_bound", "max_iters", "inner_iters", "rel_tol",
                        "grid_folds"):
                if key in sidl:
                    kwargs[key] = sidl[key]
        if "seeds" in raw:
            kwargs["seeds"] = tuple(raw["seeds"])
        if "output_dir" in raw and raw["output_dir"] is not None:
            kwargs["output_dir"] = _path(raw["output_dir"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            raw = json.load(fh)
        return cls.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))

    def snapshot(self) -> dict:
        """JSON-safe copy of the config for the run report."""
        out: dict = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, SynthSpec):
                d = dataclasses.asdict(value)
                d["motif"] = [float(v) for v in value.motif]
                value = d
            elif isinstance(value, SplitSpec):
                value = ({"boundaries": list(value.boundaries)}
                         if value.boundaries is not None
                         else {"fractions": list(value.fractions)})
            elif isinstance(value, tuple):
                value = [
                    dataclasses.asdict(v) if dataclasses.is_dataclass(v) else v
                    for v in value
                ]
            out[f.name] = value
        return out


@dataclass
class SeedResult:
    """Shapelet and random selections for one seed of one source."""

    seed: int
    shapelet_set: ShapeletSet | None
    distance_matrix: DistanceMatrix | None
    shapelet_selection: Selection
    shapelet_eval: EvaluationReport
    random_selection: Selection
    random_eval: EvaluationReport


@dataclass
class SourceResult:
    """All selection results for one forecaster over the test windows."""

    label: str
    threshold: ThresholdSpec
    n_high_error: int
    sidl_config: SIDLConfig | None
    no_drop: EvaluationReport
    seed_results: list[SeedResult]
    test_errors: ErrorVector

    def average(self, method: str) -> dict:
        evals = [getattr(r, f"{method}_eval") for r in self.seed_results]
        return {
            "mse_zeroed": float(np.mean([e.mse_zeroed for e in evals])),
            "mse_retained": float(np.mean([e.mse_retained for e in evals])),
            "coverage": float(np.mean([e.coverage for e in evals])),
        }


@dataclass
class RunReport:
    """Everything a run produced; :func:`emit_report` serializes it."""

    config: RunConfig
    dataset_name: str
    boundaries: tuple[int, int]
    n_val_windows: int
    n_test_windows: int
    test_offset: int
    sources: list[SourceResult]
    warnings: list[str]
    planted: PlantedSeries | None = None


@dataclass
class _Prepared:
    series: TimeSeries
    boundaries: tuple[int, int]
    val_windows: object
    test_windows: object
    sources: list[tuple[str, ErrorVector, ErrorVector]]
    planted: PlantedSeries | None


def _validate_inputs(config: RunConfig) -> None:
    if config.dataset_path is not None and not os.path.exists(config.dataset_path):
        raise FileNotFoundError(
            f"stage 'ingest': missing data file {config.dataset_path}")
    for src in config.prediction_sources:
        for p in (src.val_path, src.test_path):
            if not os.path.exists(p):
                raise FileNotFoundError(
                    f"stage 'forecast': missing prediction file {p} "
                    f"(source {src.label!r})")


def _prepare(config: RunConfig) -> _Prepared:
    _validate_inputs(config)
    planted = None
    with _stage("ingest"):
        if config.synth is not None:
            planted = generate_planted(config.synth)
            series = planted.series
        else:
            series = load_series(config.dataset_path, config.dataset_column,
                                 name=config.dataset_name)
    with _stage("split"):
        boundaries = config.split.resolve(len(series))
        train, val, test = split_series(series, config.split,
                                        min_length=config.sl + config.fl)
    with _stage("window"):
        val_windows = make_windows(val, config.sl, config.fl, config.stride)
        test_windows = make_windows(test, config.sl, config.fl, config.stride)
    sources: list[tuple[str, ErrorVector, ErrorVector]] = []
    with _stage("forecast"):
        if config.forecaster == "baseline":
            model = fit_baseline(train, config.sl, config.fl, config.ridge)
            val_errors = per_window_mse(predict(model, val_windows), val_windows)
            test_errors = per_window_mse(predict(model, test_windows), test_windows)
            sources.append(("baseline", val_errors, test_errors))
        else:
            for src in config.prediction_sources:
                vp = load_external_predictions(src.val_path, val_windows, src.label)
                tp = load_external_predictions(src.test_path, test_windows, src.label)
                sources.append((src.label,
                                per_window_mse(vp, val_windows),
                                per_window_mse(tp, test_windows)))
    return _Prepared(series=series, boundaries=boundaries,
                     val_windows=val_windows, test_windows=test_windows,
                     sources=sources, planted=planted)


def _no_drop_selection(n: int) -> Selection:
    return Selection(dropped=np.empty(0, dtype=np.int64),
                     retained=np.arange(n, dtype=np.int64),
                     n=n, dp=0.0, method="none")


def _choose_sidl_config(samples: np.ndarray, config: RunConfig,
                        warnings: list[str], label: str) -> SIDLConfig:
    k_grid = config.k_grid
    q_grid = config.resolved_q_grid
    lam_grid = config.lam_grid
    n_cells = len(k_grid) * len(q_grid) * len(lam_grid)
    first = dict(K=min(k_grid), q=min(q_grid), lam=max(lam_grid),
                 norm_bound=config.norm_bound, max_iters=config.max_iters,
                 inner_iters=config.inner_iters, rel_tol=config.rel_tol,
                 seed=config.seeds[0])
    if n_cells == 1:
        return SIDLConfig(**first)
    if samples.shape[0] < config.grid_folds:
        warnings.append(
            f"{label}: only {samples.shape[0]} high-error windows, fewer than "
            f"{config.grid_folds} folds; skipping grid search")
        return SIDLConfig(**first)
    with _stage("learn-shapelets"):
        return grid_search(samples, k_grid, q_grid, lam_grid,
                           folds=config.grid_folds, seed=config.seeds[0],
                           norm_bound=config.norm_bound,
                           max_iters=config.max_iters,
                           inner_iters=config.inner_iters,
                           rel_tol=config.rel_tol)


def _source_run(prep: _Prepared, label: str, val_errors: ErrorVector,
                test_errors: ErrorVector, config: RunConfig, delta: float,
                warnings: list[str]) -> SourceResult:
    n_test = len(prep.test_windows)
    with _stage("select"):
        threshold = compute_threshold(val_errors.mean, val_errors.std, delta)
        high = filter_high_error(val_errors, threshold)
    logger.info("%s: tau=%.6g, %d of %d validation windows above threshold",
                label, threshold.tau, high.size, len(val_errors))

    no_drop = selective_mse(test_errors, _no_drop_selection(n_test),
                            provenance={"source": label})
    seed_results: list[SeedResult] = []
    sidl_cfg: SIDLConfig | None = None

    if high.size == 0:
        warnings.append(
            f"{label}: no validation window exceeds tau={threshold.tau:.6g} "
            f"(delta={delta}); shapelet selection degenerates to no-drop")
    else:
        samples = prep.val_windows.contexts[high]
        sidl_cfg = _choose_sidl_config(samples, config, warnings, label)

    for seed in config.seeds:
        if sidl_cfg is None:
            sset = None
            dmat = None
        else:
            with _stage("learn-shapelets"):
                dictionary, codes = learn_dictionary(
                    samples, replace(sidl_cfg, seed=seed))
                sset = rank_top_k(dictionary, codes, config.top_k,
                                  config.dedup_threshold)
            if len(sset) == 0:
                warnings.append(f"{label} seed {seed}: all-zero codes gave an "
                                f"empty shapelet set; no-drop fallback")
                sset = None
                dmat = None
            else:
                with _stage("select"):
                    dmat = build_distance_matrix(prep.test_windows.contexts,
                                                 sset.shapelets)
        with _stage("select"):
            if dmat is None:
                shapelet_sel = Selection(dropped=np.empty(0, dtype=np.int64),
                                         retained=np.arange(n_test, dtype=np.int64),
                                         n=n_test, dp=config.dp, method="shapelet",
                                         seed=seed)
            else:
                shapelet_sel = replace(discard(config.dp, dmat), seed=seed)
            shapelet_eval = selective_mse(test_errors, shapelet_sel,
                                          provenance={"source": label})
            random_sel = random_selection(config.dp, n_test, seed=seed)
            random_eval = selective_mse(test_errors, random_sel,
                                        provenance={"source": label})
        seed_results.append(SeedResult(
            seed=seed, shapelet_set=sset, distance_matrix=dmat,
            shapelet_selection=shapelet_sel, shapelet_eval=shapelet_eval,
            random_selection=random_sel, random_eval=random_eval))

    return SourceResult(label=label, threshold=threshold,
                        n_high_error=int(high.size), sidl_config=sidl_cfg,
                        no_drop=no_drop, seed_results=seed_results,
                        test_errors=test_errors)


def run_pipeline(config: RunConfig) -> RunReport:
    """Run the full recipe; write artifacts when the config names an output dir."""
    prep = _prepare(config)
    warnings: list[str] = []
    sources = [
        _source_run(prep, label, val_errors, test_errors, config, config.delta,
                    warnings)
        for label, val_errors, test_errors in prep.sources
    ]
    report = RunReport(
        config=config,
        dataset_name=config.dataset_name,
        boundaries=prep.boundaries,
        n_val_windows=len(prep.val_windows),
        n_test_windows=len(prep.test_windows),
        test_offset=prep.boundaries[1],
        sources=sources,
        warnings=warnings,
        planted=prep.planted,
    )
    for w in warnings:
        logger.warning("%s", w)
    if config.output_dir is not None:
        emit_report(report, config.output_dir)
    return report


@dataclass
class AblationResult:
    axis: str
    rows: list[dict]
    warnings: list[str]


def run_ablation(config: RunConfig, axis: str, values) -> AblationResult:
    """Sweep ``dp`` (shapelets reused) or ``delta`` (shapelets re-learned).

    Returns one row per (source, value) with seed-averaged numbers, and
    writes ``ablation_<axis>.csv`` when the config has an output dir.
    """
    if axis not in ("dp", "delta"):
        raise ValueError(f"ablation axis must be 'dp' or 'delta', got {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("ablation needs at least one value")
    prep = _prepare(config)
    warnings: list[str] = []
    rows: list[dict] = []

    if axis == "dp":
        results = [
            _source_run(prep, label, ve, te, config, config.delta, warnings)
            for label, ve, te in prep.sources
        ]
        for value in values:
            for res in results:
                shap, rand, cov = [], [], []
                for sr in res.seed_results:
                    if sr.distance_matrix is None:
                        sel = _no_drop_selection(res.test_errors.errors.size)
                    else:
                        sel = discard(value, sr.distance_matrix)
                    ev = selective_mse(res.test_errors, sel)
                    rv = selective_mse(
                        res.test_errors,
                        random_selection(value, len(res.test_errors), sr.seed))
                    shap.append(ev.mse_zeroed)
                    rand.append(rv.mse_zeroed)
                    cov.append(ev.coverage)
                rows.append({
                    "source": res.label, "axis": "dp", "value": value,
                    "no_drop_mse": res.no_drop.mse_zeroed,
                    "random_mse": float(np.mean(rand)),
                    "shapelet_mse": float(np.mean(shap)),
                    "coverage": float(np.mean(cov)),
                })
    else:
        for value in values:
            for label, ve, te in prep.sources:
                res = _source_run(prep, label, ve, te, config, value, warnings)
                avg_s = res.average("shapelet")
                avg_r = res.average("random")
                rows.append({
                    "source": label, "axis": "delta", "value": value,
                    "no_drop_mse": res.no_drop.mse_zeroed,
                    "random_mse": avg_r["mse_zeroed"],
                    "shapelet_mse": avg_s["mse_zeroed"],
                    "coverage": avg_s["coverage"],
                })

    for w in warnings:
        logger.warning("%s", w)
    if config.output_dir is not None:
        os.makedirs(config.output_dir, exist_ok=True)
        write_ablation_csv(os.path.join(config.output_dir, f"ablation_{axis}.csv"),
                           rows)
    return AblationResult(axis=axis, rows=rows, warnings=warnings)


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", label)


def _eval_numbers(ev: EvaluationReport) -> dict:
    return {"mse_zeroed": ev.mse_zeroed, "mse_retained": ev.mse_retained,
            "coverage": ev.coverage, "n_dropped": ev.n_dropped}


def emit_report(report: RunReport, out_dir) -> None:
    """Write summary.csv, per-window CSVs, shapelet/selection/distance dumps, report.json.

    Byte-deterministic for a fixed report; every summary value is
    recomputable from the per-window files (see
    :func:`shapesel.report.crosscheck_run_dir`).
    """
    os.makedirs(out_dir, exist_ok=True)
    summary_rows = []
    manifest_sources = []
    for res in report.sources:
        label = _slug(res.label)
        avg_s = res.average("shapelet")
        avg_r = res.average("random")
        summary_rows.append(SummaryRow(
            dataset=report.dataset_name, source=res.label,
            no_drop_mse=res.no_drop.mse_zeroed,
            random_mse=avg_r["mse_zeroed"],
            shapelet_mse=avg_s["mse_zeroed"],
            coverage=avg_s["coverage"],
        ))
        seed_blocks = []
        for sr in res.seed_results:
            files = {
                "shapelet": f"per_window_{label}_shapelet_seed{sr.seed}.csv",
                "random": f"per_window_{label}_random_seed{sr.seed}.csv",
            }
            write_per_window_csv(os.path.join(out_dir, files["shapelet"]),
                                 sr.shapelet_eval)
            write_per_window_csv(os.path.join(out_dir, files["random"]),
                                 sr.random_eval)
            selection_file = f"selection_{label}_seed{sr.seed}.csv"
            write_selection_csv(os.path.join(out_dir, selection_file),
                                sr.shapelet_selection, sr.distance_matrix)
            block = {
                "seed": sr.seed,
                "per_window_files": files,
                "selection_file": selection_file,
                "shapelet_file": None,
                "distance_file": None,
                "n_shapelets": 0 if sr.shapelet_set is None else len(sr.shapelet_set),
                "shapelet": _eval_numbers(sr.shapelet_eval),
                "random": _eval_numbers(sr.random_eval),
            }
            if sr.shapelet_set is not None:
                block["shapelet_file"] = f"shapelets_{label}_seed{sr.seed}.json"
                save_shapelets(os.path.join(out_dir, block["shapelet_file"]),
                               sr.shapelet_set)
            if sr.distance_matrix is not None:
                block["distance_file"] = f"distances_{label}_seed{sr.seed}.csv"
                write_distance_csv(os.path.join(out_dir, block["distance_file"]),
                                   sr.distance_matrix)
            seed_blocks.append(block)
        manifest_sources.append({
            "label": res.label,
            "threshold": {"mean": res.threshold.mean, "std": res.threshold.std,
                          "delta": res.threshold.delta, "tau": res.threshold.tau},
            "n_high_error": res.n_high_error,
            "sidl_config": (None if res.sidl_config is None
                            else {"K": res.sidl_config.K, "q": res.sidl_config.q,
                                  "lam": res.sidl_config.lam,
                                  "norm_bound": res.sidl_config.norm_bound,
                                  "max_iters": res.sidl_config.max_iters,
                                  "inner_iters": res.sidl_config.inner_iters,
                                  "rel_tol": res.sidl_config.rel_tol,
                                  "seed": res.sidl_config.seed}),
            "no_drop": _eval_numbers(res.no_drop),
            "averages": {"shapelet": avg_s, "random": avg_r},
            "seeds": seed_blocks,
        })
    write_summary_csv(os.path.join(out_dir, "summary.csv"), summary_rows)
    manifest = {
        "dataset": report.dataset_name,
        "config": report.config.snapshot(),
        "boundaries": list(report.boundaries),
        "n_val_windows": report.n_val_windows,
        "n_test_windows": report.n_test_windows,
        "test_offset": report.test_offset,
        "warnings": report.warnings,
        "sources": manifest_sources,
        "ground_truth": None,
    }
    if report.planted is not None:
        manifest["ground_truth"] = {
            "motif_positions": [int(p) for p in report.planted.motif_positions],
            "burst_spans": [[int(a), int(b)] for a, b in report.planted.burst_spans],
        }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
