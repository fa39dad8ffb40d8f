import json

import pytest

from shapesel import cli


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Chained artifacts: synth series -> splits -> predictions -> shapelets."""
    root = tmp_path_factory.mktemp("cliwork")
    series = root / "series.csv"
    rc = cli.main([
        "synth", "--length", "3000", "--motif-len", "24", "--horizon", "32",
        "--motif-rate", "0.3", "--base-amplitude", "0.5", "--base-period", "48",
        "--seed", "7", "--out", str(series)])
    assert rc == 0

    splits = root / "splits"
    rc = cli.main([
        "ingest", "--data", str(series), "--column", "value",
        "--split", "0.6,0.2,0.2", "--sl", "64", "--fl", "32",
        "--out", str(splits)])
    assert rc == 0

    val_preds = root / "val_preds.csv"
    rc = cli.main([
        "forecast", "--train", str(splits / "train.csv"),
        "--target", str(splits / "val.csv"), "--sl", "64", "--fl", "32",
        "--out", str(val_preds)])
    assert rc == 0

    shapelets = root / "shapelets.json"
    rc = cli.main([
        "learn-shapelets", "--split", str(splits / "val.csv"),
        "--train", str(splits / "train.csv"), "--sl", "64", "--fl", "32",
        "--delta", "1.0", "--K", "2", "--q", "16", "--lam", "0.1",
        "--max-iters", "15", "--top-k", "3", "--out", str(shapelets)])
    assert rc == 0

    return {"root": root, "series": series, "splits": splits,
            "val_preds": val_preds, "shapelets": shapelets}


def _config_file(path, out_dir=None):
    raw = {
        "name": "synth-tiny",
        "synth": {"length": 3000, "motif": [0.0, 0.5, 1.0, 0.5, 0.0],
                  "horizon": 32, "motif_rate": 0.3, "base_amplitude": 0.5,
                  "base_period": 48.0, "seed": 7},
        "split": {"fractions": [0.6, 0.2, 0.2]},
        "sl": 64, "fl": 32, "delta": 1.0, "dp": 0.2,
        "sidl": {"K": 2, "q": 16, "lam": 0.1, "max_iters": 15},
        "seeds": [0],
    }
    if out_dir is not None:
        raw["output_dir"] = str(out_dir)
    path.write_text(json.dumps(raw))
    return path


def test_synth_writes_series_and_truth(workspace):
    truth = json.loads(
        (workspace["root"] / "series_truth.json").read_text())
    assert truth["horizon"] == 32
    assert len(truth["motif_positions"]) == len(truth["burst_spans"])
    header = workspace["series"].read_text().splitlines()[0]
    assert header == "value"


def test_ingest_writes_splits_and_boundaries(workspace):
    splits = workspace["splits"]
    sizes = {}
    for label in ("train", "val", "test"):
        lines = (splits / f"{label}.csv").read_text().splitlines()
        assert lines[0] == "value"
        sizes[label] = len(lines) - 1
    assert sizes == {"train": 1800, "val": 600, "test": 600}
    bounds = json.loads((splits / "boundaries.json").read_text())
    assert bounds == {"length": 3000, "train_end": 1800, "val_end": 2400}


def test_forecast_writes_prediction_csv(workspace):
    lines = workspace["val_preds"].read_text().splitlines()
    assert lines[0] == "window_index," + ",".join(f"v_{i}" for i in range(1, 33))
    assert len(lines) == 1 + (600 - 96 + 1)


def test_learn_shapelets_output(workspace):
    blob = json.loads(workspace["shapelets"].read_text())
    assert blob["q"] == 16
    assert 1 <= len(blob["shapelets"]) <= 3
    for s in blob["shapelets"]:
        assert len(s["values"]) == 16
        assert s["score"] > 0


def test_select_shapelet_and_random(workspace, tmp_path):
    splits, shapelets = workspace["splits"], workspace["shapelets"]
    sel_csv = tmp_path / "selection.csv"
    dist_csv = tmp_path / "distances.csv"
    rc = cli.main([
        "select", "--split", str(splits / "test.csv"), "--sl", "64",
        "--fl", "32", "--shapelets", str(shapelets), "--dp", "0.2",
        "--distances-out", str(dist_csv), "--out", str(sel_csv)])
    assert rc == 0
    lines = sel_csv.read_text().splitlines()
    assert lines[0] == "window_index,min_distance,dropped"
    assert len(lines) == 1 + (600 - 96 + 1)
    n_dropped = sum(line.split(",")[2] == "1" for line in lines[1:])
    assert n_dropped == int(0.2 * (600 - 96 + 1))
    assert dist_csv.exists()

    rand_csv = tmp_path / "random.csv"
    rc = cli.main([
        "select", "--split", str(splits / "test.csv"), "--sl", "64",
        "--fl", "32", "--method", "random", "--seed", "1", "--dp", "0.2",
        "--out", str(rand_csv)])
    assert rc == 0
    assert rand_csv.read_text() != sel_csv.read_text()


def test_evaluate_and_report_roundtrip(tmp_path, capsys):
    run_dir = tmp_path / "run"
    config = _config_file(tmp_path / "config.json")
    rc = cli.main(["evaluate", "--config", str(config), "--out", str(run_dir)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "synth-tiny/baseline:" in out
    assert (run_dir / "summary.csv").exists()
    assert (run_dir / "report.json").exists()

    rc = cli.main(["report", "--run", str(run_dir)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "cross-check: all summary numbers recomputed" in out
    assert "baseline" in out


def test_report_flags_mismatch(tmp_path, capsys):
    run_dir = tmp_path / "run"
    cli.main(["evaluate", "--config",
              str(_config_file(tmp_path / "config.json")), "--out", str(run_dir)])
    capsys.readouterr()
    summary = run_dir / "summary.csv"
    lines = summary.read_text().splitlines()
    cells = lines[1].split(",")
    cells[4] = repr(float(cells[4]) * 2 + 0.1)
    summary.write_text("\n".join([lines[0], ",".join(cells)]) + "\n")
    rc = cli.main(["report", "--run", str(run_dir)])
    assert rc == 1
    assert "cross-check mismatch" in capsys.readouterr().err


def test_ablate_prints_rows(tmp_path, capsys):
    config = _config_file(tmp_path / "config.json")
    rc = cli.main(["ablate", "--config", str(config), "--axis", "dp",
                   "--values", "0.1,0.3"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "dp=0.1" in out and "dp=0.3" in out
    assert (tmp_path / "run" / "ablation_dp.csv").exists() is False


def test_ablate_writes_csv_with_out(tmp_path):
    config = _config_file(tmp_path / "config.json")
    rc = cli.main(["ablate", "--config", str(config), "--axis", "dp",
                   "--values", "0.1,0.3", "--out", str(tmp_path / "run")])
    assert rc == 0
    lines = (tmp_path / "run" / "ablation_dp.csv").read_text().splitlines()
    assert lines[0].startswith("source,axis,value")
    assert len(lines) == 3


def test_errors_exit_nonzero(tmp_path, capsys):
    rc = cli.main(["ingest", "--data", str(tmp_path / "missing.csv"),
                   "--column", "value", "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err

    rc = cli.main(["learn-shapelets", "--split", str(tmp_path / "missing.csv"),
                   "--q", "16", "--out", str(tmp_path / "s.json")])
    assert rc == 1

    # baseline forecaster without --train is a usage error
    series = tmp_path / "tiny.csv"
    series.write_text("value\n" + "\n".join("1.0" for _ in range(200)) + "\n")
    rc = cli.main(["learn-shapelets", "--split", str(series), "--sl", "32",
                   "--fl", "8", "--q", "8", "--out", str(tmp_path / "s.json")])
    assert rc == 2
    assert "--train" in capsys.readouterr().err


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
