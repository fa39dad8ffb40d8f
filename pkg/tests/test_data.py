import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapesel import (SplitSpec, TimeSeries, load_series, make_windows,
                      split_series, window_count)
from shapesel.data import ETT_HOURLY_BOUNDARIES, ETT_QUARTER_HOURLY_BOUNDARIES


def test_timeseries_basic():
    ts = TimeSeries(np.array([1.0, 2.0, 3.0]), name="t")
    assert len(ts) == 3
    assert ts.values.dtype == np.float64


def test_timeseries_rejects_bad_input():
    with pytest.raises(ValueError):
        TimeSeries(np.array([]))
    with pytest.raises(ValueError):
        TimeSeries(np.ones((2, 2)))
    with pytest.raises(ValueError, match="position 1"):
        TimeSeries(np.array([1.0, np.nan, 3.0]))
    with pytest.raises(ValueError):
        TimeSeries(np.array([1.0, np.inf]))


def test_timeseries_values_are_read_only():
    ts = TimeSeries(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        ts.values[0] = 9.0


def test_split_exact_fractions():
    ts = TimeSeries(np.arange(100, dtype=np.float64))
    tr, va, te = split_series(ts, SplitSpec(fractions=(0.6, 0.2, 0.2)))
    assert (len(tr), len(va), len(te)) == (60, 20, 20)


def test_split_floor_arithmetic_17420():
    # 17420 * 0.6 = 10452, remaining thirds land on 3484 each
    ts = TimeSeries(np.zeros(17420))
    tr, va, te = split_series(ts, SplitSpec(fractions=(0.6, 0.2, 0.2)))
    assert (len(tr), len(va), len(te)) == (10452, 3484, 3484)


def test_split_concat_roundtrip():
    rng = np.random.default_rng(0)
    values = rng.standard_normal(257)
    ts = TimeSeries(values)
    tr, va, te = split_series(ts, SplitSpec(fractions=(0.7, 0.1, 0.2)))
    joined = np.concatenate([tr.values, va.values, te.values])
    np.testing.assert_array_equal(joined, values)


def test_split_too_small():
    ts = TimeSeries(np.zeros(10))
    with pytest.raises(ValueError, match="val split too small"):
        split_series(ts, SplitSpec(fractions=(1.0, 0.0, 0.0)))


def test_split_min_length_enforced():
    ts = TimeSeries(np.zeros(100))
    with pytest.raises(ValueError, match="too small"):
        split_series(ts, SplitSpec(fractions=(0.6, 0.2, 0.2)), min_length=30)


def test_split_boundaries():
    ts = TimeSeries(np.arange(50, dtype=np.float64))
    tr, va, te = split_series(ts, SplitSpec(fractions=None, boundaries=(30, 40)))
    assert (len(tr), len(va), len(te)) == (30, 10, 10)
    np.testing.assert_array_equal(te.values, np.arange(40, 50))


def test_split_boundaries_must_fit():
    spec = SplitSpec(fractions=None, boundaries=(30, 40))
    with pytest.raises(ValueError, match="do not fit"):
        spec.resolve(40)


def test_ett_presets():
    assert SplitSpec.ett_hourly().boundaries == ETT_HOURLY_BOUNDARIES
    assert SplitSpec.ett_quarter_hourly().boundaries == ETT_QUARTER_HOURLY_BOUNDARIES
    assert ETT_HOURLY_BOUNDARIES == (8640, 11520)
    assert ETT_QUARTER_HOURLY_BOUNDARIES == (34560, 46080)


def test_splitspec_validation():
    with pytest.raises(ValueError, match="sum to 1"):
        SplitSpec(fractions=(0.5, 0.2, 0.2))
    with pytest.raises(ValueError):
        SplitSpec(fractions=None, boundaries=None)
    with pytest.raises(ValueError):
        SplitSpec(fractions=None, boundaries=(5, 5))


@given(length=st.integers(10, 2000),
       f_train=st.floats(0.3, 0.8))
@settings(max_examples=60, deadline=None)
def test_split_partition_property(length, f_train):
    rest = (1.0 - f_train) / 2.0
    spec = SplitSpec(fractions=(f_train, rest, rest))
    a, b = spec.resolve(length)
    assert 0 <= a <= b <= length
    ts = TimeSeries(np.arange(length, dtype=np.float64))
    try:
        tr, va, te = split_series(ts, spec)
    except ValueError:
        return  # a degenerate split is a legal outcome for tiny lengths
    assert len(tr) + len(va) + len(te) == length


def test_window_count_examples():
    assert window_count(608, 512, 96, 1) == 1
    assert window_count(708, 512, 96, 50) == 3
    assert window_count(600, 512, 96, 1) == 0


def test_make_windows_starts_and_content():
    ts = TimeSeries(np.arange(708, dtype=np.float64))
    ws = make_windows(ts, sl=512, fl=96, stride=50)
    assert len(ws) == 3
    np.testing.assert_array_equal(ws.starts, [0, 50, 100])
    for w in ws:
        np.testing.assert_array_equal(w.context, np.arange(w.start, w.start + 512))
        np.testing.assert_array_equal(
            w.target, np.arange(w.start + 512, w.start + 512 + 96))


def test_make_windows_too_short():
    ts = TimeSeries(np.zeros(600))
    with pytest.raises(ValueError, match="too short"):
        make_windows(ts, sl=512, fl=96)


def test_make_windows_bad_geometry():
    ts = TimeSeries(np.zeros(100))
    with pytest.raises(ValueError):
        make_windows(ts, sl=0, fl=5)
    with pytest.raises(ValueError):
        make_windows(ts, sl=5, fl=5, stride=0)


def test_windowset_indexing():
    ts = TimeSeries(np.arange(40, dtype=np.float64))
    ws = make_windows(ts, sl=8, fl=4, stride=3)
    assert ws[len(ws) - 1].index == len(ws) - 1
    assert ws[-1].start == ws[len(ws) - 1].start
    with pytest.raises(IndexError):
        ws[len(ws)]


@given(length=st.integers(5, 400), sl=st.integers(1, 40),
       fl=st.integers(1, 40), stride=st.integers(1, 17))
@settings(max_examples=100, deadline=None)
def test_window_count_property(length, sl, fl, stride):
    values = np.arange(length, dtype=np.float64)
    ts = TimeSeries(values)
    n = window_count(length, sl, fl, stride)
    if n == 0:
        with pytest.raises(ValueError):
            make_windows(ts, sl, fl, stride)
        return
    ws = make_windows(ts, sl, fl, stride)
    assert len(ws) == n
    # every window is a bit-exact contiguous slice
    last = ws[n - 1]
    assert last.start + sl + fl <= length
    assert last.start + stride + sl + fl > length
    for w in ws:
        np.testing.assert_array_equal(
            np.concatenate([w.context, w.target]),
            values[w.start : w.start + sl + fl])


def test_load_series_roundtrip(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text("date,OT\n2020-01-01,1.5\n2020-01-02,-2.0\n2020-01-03,0.25\n")
    ts = load_series(p, "OT")
    np.testing.assert_array_equal(ts.values, [1.5, -2.0, 0.25])
    assert ts.name == "OT"


def test_load_series_single_row(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("v\n5.0\n")
    np.testing.assert_array_equal(load_series(p, "v").values, [5.0])


def test_load_series_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_series(tmp_path / "nope.csv", "v")


def test_load_series_missing_column(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="'c' not found"):
        load_series(p, "c")


def test_load_series_blank_cell_reports_row(tmp_path):
    rows = ["v"] + [str(float(i)) for i in range(7)] + [""] + ["9.0"]
    p = tmp_path / "data.csv"
    p.write_text("\n".join(rows) + "\n")
    with pytest.raises(ValueError, match="row 7"):
        load_series(p, "v")


def test_load_series_non_numeric_reports_row(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text("v\n1.0\nbogus\n3.0\n")
    with pytest.raises(ValueError, match="row 1"):
        load_series(p, "v")
