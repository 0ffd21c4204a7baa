import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pgmmreg.data import (
    DataError,
    Dataset,
    ScalingParams,
    apply_scaling,
    fit_scaling,
    load_csv,
    parse_table,
    prepare,
    split,
    write_csv,
)


def _write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_csv_by_name(tmp_path):
    ds = load_csv(_write(tmp_path, "a,b,y\n0,1,2\n1,0,3\n1,1,4"), "y")
    assert (ds.n, ds.d) == (3, 2)
    assert ds.targets.tolist() == [2, 3, 4]
    assert ds.features.tolist() == [[0, 1], [1, 0], [1, 1]]
    assert ds.feature_names == ("a", "b")


def test_load_csv_by_index_without_header(tmp_path):
    ds = load_csv(_write(tmp_path, "0,1,2\n1,0,3\n"), "0", has_header=False)
    assert ds.targets.tolist() == [0, 1]
    assert ds.features.tolist() == [[1, 2], [0, 3]]
    assert load_csv(_write(tmp_path, "0,1,2\n1,0,3\n"), -1, has_header=False).targets.tolist() == [2, 3]


def test_parse_error_names_row_and_column(tmp_path):
    with pytest.raises(DataError, match="row 1, column 2"):
        load_csv(_write(tmp_path, "a,b,y\n0,x,2\n"), "y")


def test_ragged_rows(tmp_path):
    with pytest.raises(DataError, match="row 2 has 2 fields"):
        load_csv(_write(tmp_path, "a,b,y\n0,1,2\n1,0\n"), "y")


def test_single_column_has_no_features(tmp_path):
    with pytest.raises(DataError, match="no features remain"):
        load_csv(_write(tmp_path, "y\n1\n2\n"), "y")


def test_missing_file_and_unknown_target(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        load_csv(tmp_path / "nope.csv", "y")
    with pytest.raises(DataError, match="not in header"):
        load_csv(_write(tmp_path, "a,b\n1,2\n"), "y")


def test_whitespace_and_drop():
    ds = parse_table("1 2 3 9\n4 5 6 9\n", target=2, has_header=False, delimiter=None, drop=[3])
    assert ds.features.tolist() == [[1, 2], [4, 5]]
    assert ds.targets.tolist() == [3, 6]


def test_dataset_rejects_nonfinite_and_mismatch():
    with pytest.raises(DataError):
        Dataset([[np.nan]], [1.0])
    with pytest.raises(DataError):
        Dataset([[1.0], [2.0]], [1.0])


def test_dataset_is_read_only():
    ds = Dataset([[1.0]], [2.0])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 5


@pytest.mark.parametrize(
    "X, lo, hi",
    [
        ([[0], [2], [4]], [0], [4]),
        ([[5], [5]], [5], [5]),
        ([[-1, 2], [1, 0]], [-1, 0], [1, 2]),
    ],
)
def test_fit_scaling_extrema(X, lo, hi):
    params = fit_scaling(Dataset(X, np.zeros(len(X))))
    assert params.minimum.tolist() == lo
    assert params.maximum.tolist() == hi


def test_apply_scaling_examples():
    params = ScalingParams([0.0], [4.0])
    out = apply_scaling(Dataset([[0], [2], [4], [6]], np.zeros(4)), params)
    assert out.features.ravel().tolist() == [0, 0.5, 1, 1.5]
    const = apply_scaling(Dataset([[5.0]], [0.0]), ScalingParams([5.0], [5.0]))
    assert const.features.tolist() == [[0.0]]
    with pytest.raises(DataError):
        apply_scaling(Dataset([[1.0, 2.0]], [0.0]), params)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 4)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_scaled_training_data_lies_in_unit_interval(X):
    ds = Dataset(X, np.zeros(X.shape[0]))
    Z = apply_scaling(ds, fit_scaling(ds)).features
    const = X.max(axis=0) == X.min(axis=0)
    assert np.all(Z[:, const] == 0)
    assert np.all(Z[:, ~const] >= -1e-12) and np.all(Z[:, ~const] <= 1 + 1e-12)


def test_split_is_deterministic_partition():
    ds = Dataset(np.arange(20.0).reshape(10, 2), np.arange(10.0))
    a_tr, a_te = split(ds, 5, seed=7)
    b_tr, b_te = split(ds, 5, seed=7)
    assert np.array_equal(a_tr.targets, b_tr.targets) and np.array_equal(a_te.targets, b_te.targets)
    assert sorted(np.concatenate([a_tr.targets, a_te.targets]).tolist()) == list(range(10))
    assert not set(a_tr.targets) & set(a_te.targets)
    assert not np.array_equal(split(ds, 5, seed=8)[0].targets, a_tr.targets)


def test_split_sizes_for_half_split():
    ds = Dataset(np.random.default_rng(0).random((768, 8)), np.zeros(768))
    tr, te = split(ds, 384, seed=0)
    assert (tr.n, te.n) == (384, 384)


@pytest.mark.parametrize("count", [0, 10, 11])
def test_split_range(count):
    ds = Dataset(np.zeros((10, 1)), np.zeros(10))
    with pytest.raises(DataError):
        split(ds, count, seed=0)


def test_prepare_scales_with_train_statistics_only():
    rng = np.random.default_rng(1)
    ds = Dataset(rng.normal(size=(40, 3)), rng.normal(size=40))
    sp = prepare(ds, 20, seed=3)
    assert np.allclose(sp.train.features.min(axis=0), 0) and np.allclose(sp.train.features.max(axis=0), 1)
    assert np.array_equal(sp.scaling.minimum, sp.raw_train.features.min(axis=0))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(2, 4)),
              elements=st.floats(-1e9, 1e9, allow_nan=False, allow_subnormal=True)))
def test_csv_round_trip(tmp_path_factory, M):
    path = tmp_path_factory.mktemp("rt") / "rt.csv"
    ds = Dataset(M[:, :-1], M[:, -1])
    write_csv(ds, path)
    back = load_csv(path, "y")
    write_csv(back, path)
    again = load_csv(path, "y")
    for other in (back, again):
        assert np.array_equal(other.features, ds.features)
        assert np.array_equal(other.targets, ds.targets)
