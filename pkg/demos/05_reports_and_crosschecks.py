"""Run artifacts: summary tables, reduction arithmetic, cross-checking.

A run directory is self-verifying: summary.csv holds the headline
numbers, the per-window CSVs hold every term behind them, and
crosscheck_run_dir recomputes the former from the latter.  This script
emits a small run, reads it back, prints the derived reduction numbers,
then corrupts one summary cell to show the cross-check catching it.

Run:  python demos/05_reports_and_crosschecks.py
"""

import tempfile
from pathlib import Path

from shapesel import (RunConfig, SplitSpec, SynthSpec, bump_motif,
                      crosscheck_run_dir, over_random_margin,
                      reduction_percent, run_pipeline)
from shapesel.report import read_per_window_csv, read_summary_csv

spec = SynthSpec(length=4000, motif=bump_motif(24, 1.0), horizon=32,
                 motif_rate=0.3, base="sine", base_amplitude=0.5,
                 base_period=48.0, seed=5)

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run"
    run_pipeline(RunConfig(
        synth=spec, dataset_name="synth-demo",
        split=SplitSpec(fractions=(0.6, 0.2, 0.2)), sl=64, fl=32,
        delta=1.0, dp=0.2, k_grid=(2,), q_grid=(16,), lam_grid=(0.1,),
        max_iters=20, top_k=3, seeds=(0, 1), output_dir=str(out)))

    rows = read_summary_csv(out / "summary.csv")
    print(f"{'dataset':<12}{'source':<10}{'no-drop':>9}{'random':>9}"
          f"{'shapelet':>9}{'reduction%':>11}{'vs-random%':>11}")
    for r in rows:
        print(f"{r.dataset:<12}{r.source:<10}{r.no_drop_mse:>9.4f}"
              f"{r.random_mse:>9.4f}{r.shapelet_mse:>9.4f}"
              f"{reduction_percent(r.no_drop_mse, r.shapelet_mse):>11.2f}"
              f"{over_random_margin(r.random_mse, r.shapelet_mse):>11.2f}")

    errors, mask = read_per_window_csv(
        out / "per_window_baseline_shapelet_seed0.csv")
    print(f"\nper-window file: {errors.size} windows, {mask.sum()} dropped; "
          f"zeroed MSE recomputes to "
          f"{float(errors[~mask].sum() / errors.size):.4f}")

    print(f"cross-check on the emitted directory: "
          f"{crosscheck_run_dir(out) or 'clean'}")

    # corrupt one summary cell and watch the cross-check flag it
    summary = out / "summary.csv"
    lines = summary.read_text().splitlines()
    cells = lines[1].split(",")
    cells[4] = repr(float(cells[4]) + 0.01)
    summary.write_text("\n".join([lines[0], ",".join(cells)] + lines[2:]) + "\n")
    problems = crosscheck_run_dir(out)
    print(f"after corrupting one cell: {len(problems)} mismatch -> "
          f"{problems[0]}")
