"""Command-line interface.

Subcommands mirror the pipeline stages so each artifact can be produced
and inspected independently: ``ingest``, ``forecast``,
``learn-shapelets``, ``select``, ``evaluate``, ``ablate``, ``synth``,
and ``report``.  Every command exits non-zero with a message on stderr
when a stage fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .data import SplitSpec, TimeSeries, load_series, make_windows, split_series
from .dictlearn import (SIDLConfig, grid_search, learn_dictionary, load_shapelets,
                        rank_top_k, save_shapelets)
from .distance import build_distance_matrix, write_distance_csv
from .forecast import (fit_baseline, load_external_predictions, per_window_mse,
                       predict, write_predictions_csv)
from .pipeline import RunConfig, run_ablation, run_pipeline
from .report import (crosscheck_run_dir, over_random_margin, read_summary_csv,
                     reduction_percent)
from .selection import (compute_threshold, discard, filter_high_error,
                        random_selection, write_selection_csv)
from .synth import SynthSpec, bump_motif, generate_planted


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip() != ""]


def _split_spec(text: str) -> SplitSpec:
    if text == "ett-hourly":
        return SplitSpec.ett_hourly()
    if text == "ett-quarter-hourly":
        return SplitSpec.ett_quarter_hourly()
    fractions = _floats(text)
    if len(fractions) != 3:
        raise argparse.ArgumentTypeError(
            "--split takes 'ett-hourly', 'ett-quarter-hourly', or three "
            "comma-separated fractions")
    return SplitSpec(fractions=tuple(fractions))


def _write_series_csv(path, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value"])
        for v in values:
            writer.writerow([repr(float(v))])


def _cmd_ingest(args) -> int:
    series = load_series(args.data, args.column, name=args.name or args.column)
    spec = args.split or SplitSpec()
    train, val, test = split_series(series, spec, min_length=args.sl + args.fl)
    os.makedirs(args.out, exist_ok=True)
    for label, part in (("train", train), ("val", val), ("test", test)):
        _write_series_csv(os.path.join(args.out, f"{label}.csv"), part.values)
    a, b = spec.resolve(len(series))
    with open(os.path.join(args.out, "boundaries.json"), "w") as fh:
        json.dump({"length": len(series), "train_end": a, "val_end": b},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"split {series.name}: train={a} val={b - a} test={len(series) - b} "
          f"-> {args.out}")
    return 0


def _cmd_forecast(args) -> int:
    train = load_series(args.train, args.column)
    target = load_series(args.target, args.column)
    model = fit_baseline(train, sl=args.sl, fl=args.fl, ridge=args.ridge)
    windows = make_windows(target, sl=args.sl, fl=args.fl, stride=args.stride)
    preds = predict(model, windows)
    write_predictions_csv(args.out, preds)
    errors = per_window_mse(preds, windows)
    print(f"forecast {len(windows)} windows of {args.target}: "
          f"mean MSE {errors.mean:.6g} -> {args.out}")
    return 0


def _load_windows(path, column, sl, fl, stride):
    series = load_series(path, column)
    return make_windows(series, sl=sl, fl=fl, stride=stride)


def _cmd_learn_shapelets(args) -> int:
    windows = _load_windows(args.split, args.column, args.sl, args.fl, args.stride)
    if args.forecaster == "baseline":
        if not args.train:
            print("error: --forecaster baseline requires --train", file=sys.stderr)
            return 2
        model = fit_baseline(load_series(args.train, args.column),
                             sl=args.sl, fl=args.fl, ridge=args.ridge)
        preds = predict(model, windows)
    else:
        if not args.predictions:
            print("error: --forecaster external requires --predictions",
                  file=sys.stderr)
            return 2
        preds = load_external_predictions(args.predictions, windows)
    errors = per_window_mse(preds, windows)
    threshold = compute_threshold(errors.mean, errors.std, args.delta)
    high = filter_high_error(errors, threshold)
    print(f"tau = {threshold.tau:.6g}; {high.size} of {len(windows)} windows above")
    if high.size == 0:
        print("error: no window exceeds the threshold; nothing to learn from",
              file=sys.stderr)
        return 1
    samples = windows.contexts[high]
    if len(args.K) * len(args.q) * len(args.lam) > 1:
        cfg = grid_search(samples, args.K, args.q, args.lam, seed=args.seed,
                          max_iters=args.max_iters)
    else:
        cfg = SIDLConfig(K=args.K[0], q=args.q[0], lam=args.lam[0],
                         max_iters=args.max_iters, seed=args.seed)
    dictionary, codes = learn_dictionary(samples, cfg)
    sset = rank_top_k(dictionary, codes, top_k=args.top_k,
                      dedup_threshold=args.dedup_threshold)
    if len(sset) == 0:
        print("error: all-zero codes; shapelet set is empty", file=sys.stderr)
        return 1
    save_shapelets(args.out, sset)
    print(f"learned {len(sset)} shapelets (K={cfg.K}, q={cfg.q}, lam={cfg.lam}) "
          f"-> {args.out}")
    return 0


def _cmd_select(args) -> int:
    windows = _load_windows(args.split, args.column, args.sl, args.fl, args.stride)
    if args.method == "shapelet":
        sset = load_shapelets(args.shapelets)
        matrix = build_distance_matrix(windows.contexts, sset.shapelets)
        selection = discard(args.dp, matrix)
        if args.distances_out:
            write_distance_csv(args.distances_out, matrix)
    else:
        matrix = None
        selection = random_selection(args.dp, len(windows), seed=args.seed)
    write_selection_csv(args.out, selection, matrix)
    print(f"dropped {len(selection.dropped)} of {selection.n} windows "
          f"({args.method}) -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    config = RunConfig.from_file(args.config)
    if args.out:
        config = RunConfig(**{**_config_asdict(config), "output_dir": args.out})
    report = run_pipeline(config)
    for res in report.sources:
        avg_s = res.average("shapelet")
        avg_r = res.average("random")
        print(f"{report.dataset_name}/{res.label}: no-drop "
              f"{res.no_drop.mse_zeroed:.6g}, random {avg_r['mse_zeroed']:.6g}, "
              f"shapelet {avg_s['mse_zeroed']:.6g} "
              f"(coverage {avg_s['coverage']:.3f})")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if config.output_dir:
        print(f"artifacts -> {config.output_dir}")
    return 0


def _config_asdict(config: RunConfig) -> dict:
    import dataclasses
    return {f.name: getattr(config, f.name) for f in dataclasses.fields(config)}


def _cmd_ablate(args) -> int:
    config = RunConfig.from_file(args.config)
    if args.out:
        config = RunConfig(**{**_config_asdict(config), "output_dir": args.out})
    result = run_ablation(config, args.axis, args.values)
    for row in result.rows:
        print(f"{row['source']} {row['axis']}={row['value']:g}: "
              f"no-drop {row['no_drop_mse']:.6g}, random {row['random_mse']:.6g}, "
              f"shapelet {row['shapelet_mse']:.6g}")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _cmd_synth(args) -> int:
    motif = np.array(_floats(args.motif)) if args.motif else bump_motif(
        args.motif_len, args.motif_amplitude)
    spec = SynthSpec(length=args.length, motif=motif, horizon=args.horizon,
                     motif_rate=args.motif_rate, base=args.base,
                     base_amplitude=args.base_amplitude,
                     base_period=args.base_period, ar_coeff=args.ar_coeff,
                     noise_std=args.noise_std, burst_std=args.burst_std,
                     seed=args.seed)
    planted = generate_planted(spec)
    _write_series_csv(args.out, planted.series.values)
    truth = {
        "motif_positions": [int(p) for p in planted.motif_positions],
        "burst_spans": [[int(a), int(b)] for a, b in planted.burst_spans],
        "motif": [float(v) for v in spec.motif],
        "horizon": spec.horizon,
    }
    truth_path = args.truth_out or (os.path.splitext(args.out)[0] + "_truth.json")
    with open(truth_path, "w") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"planted {planted.motif_positions.size} motifs in {args.length} "
          f"samples -> {args.out} (truth: {truth_path})")
    return 0


def _cmd_report(args) -> int:
    rows = read_summary_csv(os.path.join(args.run, "summary.csv"))
    print(f"{'dataset':<16}{'source':<14}{'no-drop':>10}{'random':>10}"
          f"{'shapelet':>10}{'coverage':>10}{'reduction%':>12}{'vs-random%':>12}")
    for r in rows:
        red = reduction_percent(r.no_drop_mse, r.shapelet_mse)
        margin = over_random_margin(r.random_mse, r.shapelet_mse)
        print(f"{r.dataset:<16}{r.source:<14}{r.no_drop_mse:>10.4f}"
              f"{r.random_mse:>10.4f}{r.shapelet_mse:>10.4f}{r.coverage:>10.3f}"
              f"{red:>12.2f}{margin:>12.2f}")
    problems = crosscheck_run_dir(args.run, tol=args.tol)
    if problems:
        for p in problems:
            print(f"cross-check mismatch: {p}", file=sys.stderr)
        return 1
    print("cross-check: all summary numbers recomputed from per-window files")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapesel",
        description="Selective forecasting with learned high-error shapelets")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log stage progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_geometry(p, sl=512, fl=96):
        p.add_argument("--sl", type=int, default=sl, help="context length")
        p.add_argument("--fl", type=int, default=fl, help="forecast horizon")
        p.add_argument("--stride", type=int, default=1, help="window stride")

    p = sub.add_parser("ingest", help="split a CSV series into train/val/test")
    p.add_argument("--data", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--name")
    p.add_argument("--split", type=_split_spec, default=None,
                   help="'ett-hourly', 'ett-quarter-hourly', or f,f,f "
                        "(default 0.7,0.1,0.2)")
    add_geometry(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("forecast", help="fit the baseline and write predictions")
    p.add_argument("--train", required=True, help="train split CSV")
    p.add_argument("--target", required=True, help="split to forecast")
    p.add_argument("--column", default="value")
    add_geometry(p)
    p.add_argument("--ridge", type=float, default=1e-3)
    p.add_argument("--out", required=True, help="prediction CSV path")
    p.set_defaults(func=_cmd_forecast)

    p = sub.add_parser("learn-shapelets",
                       help="learn shapelets from high-error validation windows")
    p.add_argument("--split", required=True, help="validation split CSV")
    p.add_argument("--column", default="value")
    add_geometry(p)
    p.add_argument("--forecaster", choices=("baseline", "external"),
                   default="baseline")
    p.add_argument("--train", help="train split CSV (baseline forecaster)")
    p.add_argument("--ridge", type=float, default=1e-3)
    p.add_argument("--predictions", help="prediction CSV (external forecaster)")
    p.add_argument("--delta", type=float, default=2.0)
    p.add_argument("--K", type=_ints, default=[4, 8, 16],
                   help="atom count or comma grid")
    p.add_argument("--q", type=_ints, required=True,
                   help="atom length or comma grid")
    p.add_argument("--lam", type=_floats, default=[0.01, 0.1, 1.0],
                   help="l1 weight or comma grid")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--dedup-threshold", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="shapelet JSON path")
    p.set_defaults(func=_cmd_learn_shapelets)

    p = sub.add_parser("select", help="choose windows to drop")
    p.add_argument("--split", required=True, help="test split CSV")
    p.add_argument("--column", default="value")
    add_geometry(p)
    p.add_argument("--shapelets", help="shapelet JSON (for --method shapelet)")
    p.add_argument("--dp", type=float, default=0.2)
    p.add_argument("--method", choices=("shapelet", "random"), default="shapelet")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distances-out", help="also dump the distance matrix CSV")
    p.add_argument("--out", required=True, help="selection CSV path")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("evaluate", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config's output_dir")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ablate", help="sweep dp or delta")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", choices=("dp", "delta"), required=True)
    p.add_argument("--values", type=_floats, required=True)
    p.add_argument("--out", help="override the config's output_dir")
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("synth", help="generate a planted-motif series")
    p.add_argument("--length", type=int, default=20000)
    p.add_argument("--motif", help="comma-separated motif values")
    p.add_argument("--motif-len", type=int, default=48,
                   help="length of the default bump motif")
    p.add_argument("--motif-amplitude", type=float, default=1.0)
    p.add_argument("--horizon", type=int, default=96)
    p.add_argument("--motif-rate", type=float, default=0.2)
    p.add_argument("--base", choices=("sine", "ar1"), default="sine")
    p.add_argument("--base-amplitude", type=float, default=1.0)
    p.add_argument("--base-period", type=float, default=64.0)
    p.add_argument("--ar-coeff", type=float, default=0.9)
    p.add_argument("--noise-std", type=float, default=0.1)
    p.add_argument("--burst-std", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="series CSV path")
    p.add_argument("--truth-out", help="ground-truth JSON path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("report", help="print a run summary and cross-check it")
    p.add_argument("--run", required=True, help="run output directory")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
