import numpy as np
import pytest

from shapesel import (SplitSpec, TimeSeries, fit_baseline,
                      load_external_predictions, make_windows, per_window_mse,
                      predict, split_series, write_predictions_csv)
from shapesel.forecast import ErrorVector, prediction_header


def _sine_series(n=3000, period=24.0):
    t = np.arange(n, dtype=np.float64)
    return TimeSeries(np.sin(2.0 * np.pi * t / period), name="sine")


def test_sine_heldout_mse_tiny():
    # a pure sinusoid satisfies a linear recurrence, so the linear map
    # should drive held-out MSE to (numerical) zero
    tr, va, te = split_series(_sine_series(), SplitSpec(fractions=(0.6, 0.2, 0.2)))
    model = fit_baseline(tr, sl=48, fl=24)
    ws = make_windows(te, sl=48, fl=24)
    ev = per_window_mse(predict(model, ws), ws)
    assert ev.mean < 1e-6


def test_constant_series_forecasts_constant():
    ts = TimeSeries(np.full(200, 3.0), name="const")
    model = fit_baseline(ts, sl=16, fl=8)
    ws = make_windows(ts, sl=16, fl=8)
    preds = predict(model, ws)
    np.testing.assert_allclose(preds.values, 3.0, atol=1e-9)


def test_sine_beats_last_value_baseline():
    tr, va, te = split_series(_sine_series(), SplitSpec(fractions=(0.6, 0.2, 0.2)))
    model = fit_baseline(tr, sl=48, fl=24)
    ws = make_windows(te, sl=48, fl=24)
    ev = per_window_mse(predict(model, ws), ws)
    last_value = np.repeat(ws.contexts[:, -1:], 24, axis=1)
    naive = np.mean((last_value - ws.targets) ** 2, axis=1)
    assert ev.mean < naive.mean()


def test_translation_equivariance():
    rng = np.random.default_rng(3)
    base = np.cumsum(rng.standard_normal(600)) * 0.1
    shift = 100.0
    m0 = fit_baseline(TimeSeries(base), sl=24, fl=6)
    m1 = fit_baseline(TimeSeries(base + shift), sl=24, fl=6)
    ws0 = make_windows(TimeSeries(base[:200]), sl=24, fl=6)
    ws1 = make_windows(TimeSeries(base[:200] + shift), sl=24, fl=6)
    p0 = predict(m0, ws0).values
    p1 = predict(m1, ws1).values
    np.testing.assert_allclose(p1, p0 + shift, atol=1e-9)


def test_fit_too_short():
    ts = TimeSeries(np.zeros(23))
    with pytest.raises(ValueError, match="too short"):
        fit_baseline(ts, sl=16, fl=8)


def test_fit_negative_ridge():
    ts = TimeSeries(np.arange(100, dtype=np.float64))
    with pytest.raises(ValueError):
        fit_baseline(ts, sl=8, fl=4, ridge=-1.0)


def test_ridge_zero_singular_raises():
    # constant series centers to all-zero contexts: rank-deficient
    ts = TimeSeries(np.full(100, 2.0))
    with pytest.raises(np.linalg.LinAlgError):
        fit_baseline(ts, sl=8, fl=4, ridge=0.0)


def test_ridge_zero_full_rank_ok():
    rng = np.random.default_rng(0)
    ts = TimeSeries(rng.standard_normal(400))
    model = fit_baseline(ts, sl=8, fl=4, ridge=0.0)
    assert np.all(np.isfinite(model.weights))


def test_predict_geometry_mismatch():
    ts = TimeSeries(np.arange(100, dtype=np.float64))
    model = fit_baseline(ts, sl=8, fl=4)
    ws = make_windows(ts, sl=10, fl=4)
    with pytest.raises(ValueError, match="geometry"):
        predict(model, ws)


def test_predict_deterministic():
    rng = np.random.default_rng(1)
    ts = TimeSeries(rng.standard_normal(300))
    model = fit_baseline(ts, sl=12, fl=5)
    ws = make_windows(ts, sl=12, fl=5)
    a = predict(model, ws).values
    b = predict(model, ws).values
    np.testing.assert_array_equal(a, b)


def test_per_window_mse_hand_case():
    ts = TimeSeries(np.array([0.0, 0.0, 1.0, 1.0]))
    ws = make_windows(ts, sl=2, fl=2)
    model = fit_baseline(TimeSeries(np.zeros(10)), sl=2, fl=2)
    preds = predict(model, ws)
    object.__setattr__(preds, "values", np.array([[2.0, 3.0]]))
    ev = per_window_mse(preds, ws)
    # target (1, 1), prediction (2, 3): ((2-1)^2 + (3-1)^2) / 2
    assert ev.errors[0] == pytest.approx(2.5, abs=1e-15)


def test_perfect_predictions_zero_error():
    ts = TimeSeries(np.full(50, 3.0))
    model = fit_baseline(ts, sl=8, fl=4)
    ws = make_windows(ts, sl=8, fl=4)
    ev = per_window_mse(predict(model, ws), ws)
    np.testing.assert_allclose(ev.errors, 0.0, atol=1e-18)
    assert ev.mean == pytest.approx(0.0, abs=1e-18)


def test_mse_against_brute_force_oracle():
    rng = np.random.default_rng(5)
    ts = TimeSeries(rng.standard_normal(200))
    ws = make_windows(ts, sl=10, fl=6)
    model = fit_baseline(ts, sl=10, fl=6)
    preds = predict(model, ws)
    ev = per_window_mse(preds, ws)
    for i in range(len(ws)):
        direct = sum((preds.values[i][j] - ws.targets[i][j]) ** 2
                     for j in range(6)) / 6.0
        assert abs(ev.errors[i] - direct) <= 1e-12
    # grand-MSE identity: mean over windows == mean over all (window, step)
    grand = np.mean((preds.values - ws.targets) ** 2)
    assert abs(ev.mean - grand) <= 1e-12


def test_error_vector_stats_recomputable():
    errors = np.array([1.0, 2.0, 3.0, 4.0])
    ev = ErrorVector.from_errors(errors, source="x")
    assert ev.mean == pytest.approx(errors.mean())
    assert ev.std == pytest.approx(errors.std())  # population convention


def test_error_vector_rejects_bad_values():
    with pytest.raises(ValueError):
        ErrorVector.from_errors(np.array([1.0, -0.5]), source="x")
    with pytest.raises(ValueError):
        ErrorVector.from_errors(np.array([1.0, np.nan]), source="x")


def _write_pred_file(path, values, indices=None):
    n, fl = values.shape
    indices = range(n) if indices is None else indices
    lines = [",".join(prediction_header(fl))]
    for i, row in zip(indices, values):
        lines.append(",".join([str(i)] + [repr(float(v)) for v in row]))
    path.write_text("\n".join(lines) + "\n")


def test_external_predictions_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    ts = TimeSeries(rng.standard_normal(80))
    ws = make_windows(ts, sl=10, fl=4)
    values = rng.standard_normal((len(ws), 4))
    p = tmp_path / "preds.csv"
    _write_pred_file(p, values)
    preds = load_external_predictions(p, ws)
    np.testing.assert_array_equal(preds.values, values)
    assert preds.source.startswith("external")


def test_external_predictions_write_then_load(tmp_path):
    rng = np.random.default_rng(4)
    ts = TimeSeries(rng.standard_normal(60))
    ws = make_windows(ts, sl=8, fl=3)
    model = fit_baseline(ts, sl=8, fl=3)
    preds = predict(model, ws)
    p = tmp_path / "preds.csv"
    write_predictions_csv(p, preds)
    again = load_external_predictions(p, ws)
    np.testing.assert_array_equal(again.values, preds.values)


def test_external_predictions_missing_index(tmp_path):
    ts = TimeSeries(np.arange(30, dtype=np.float64))
    ws = make_windows(ts, sl=4, fl=2)
    values = np.zeros((len(ws) - 1, 2))
    p = tmp_path / "preds.csv"
    _write_pred_file(p, values, indices=[i for i in range(len(ws)) if i != 5])
    with pytest.raises(ValueError, match="5"):
        load_external_predictions(p, ws)


def test_external_predictions_duplicate_index(tmp_path):
    ts = TimeSeries(np.arange(20, dtype=np.float64))
    ws = make_windows(ts, sl=4, fl=2)
    values = np.zeros((len(ws), 2))
    p = tmp_path / "preds.csv"
    _write_pred_file(p, values, indices=[0] * len(ws))
    with pytest.raises(ValueError, match="duplicate"):
        load_external_predictions(p, ws)


def test_external_predictions_short_row(tmp_path):
    ts = TimeSeries(np.arange(20, dtype=np.float64))
    ws = make_windows(ts, sl=4, fl=2)
    p = tmp_path / "preds.csv"
    p.write_text("window_index,v_1,v_2\n0,1.0\n")
    with pytest.raises(ValueError):
        load_external_predictions(p, ws)


def test_external_predictions_bad_header(tmp_path):
    ts = TimeSeries(np.arange(20, dtype=np.float64))
    ws = make_windows(ts, sl=4, fl=2)
    p = tmp_path / "preds.csv"
    p.write_text("idx,a,b\n0,1.0,2.0\n")
    with pytest.raises(ValueError, match="header"):
        load_external_predictions(p, ws)


def test_external_predictions_missing_file(tmp_path):
    ts = TimeSeries(np.arange(20, dtype=np.float64))
    ws = make_windows(ts, sl=4, fl=2)
    with pytest.raises(FileNotFoundError):
        load_external_predictions(tmp_path / "nope.csv", ws)
