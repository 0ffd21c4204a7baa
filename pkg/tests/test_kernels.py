import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pgmmreg.kernels import KernelSpec, gmm, kernel_matrix, linear, pgmm, rbf, transform_nonnegative

vectors = arrays(np.float64, st.integers(1, 6), elements=st.floats(-100, 100, allow_nan=False))


def test_transform_documented_example():
    assert transform_nonnegative([-3, 17, -0.8]).tolist() == [0, 3, 17, 0, 0, 0.8]


@pytest.mark.parametrize("u, expected", [([0], [0, 0]), ([5], [5, 0]), ([-2], [0, 2])])
def test_transform_branches(u, expected):
    out = transform_nonnegative(u)
    assert out.tolist() == expected
    assert not np.signbit(out).any()


@given(vectors)
def test_transform_invariants(u):
    t = transform_nonnegative(u)
    assert t.shape == (2 * u.size,)
    assert (t >= 0).all()
    assert ((t[0::2] > 0) & (t[1::2] > 0)).sum() == 0
    assert np.array_equal(t[0::2] - t[1::2], u)


def test_transform_matrix_rows():
    X = np.array([[1.0, -2.0], [0.0, 3.0]])
    assert np.array_equal(transform_nonnegative(X)[1], transform_nonnegative(X[1]))


def test_gmm_examples():
    assert gmm([2], [1]) == 0.5
    assert gmm([1, 0], [0, 1]) == 0
    assert gmm([0, 0], [0, 0]) == 0
    assert gmm([1.5, -2.0, 0.3], [1.5, -2.0, 0.3]) == 1


def test_pgmm_examples():
    assert pgmm([2], [1], 2) == pytest.approx(0.25, rel=1e-15)
    assert pgmm([0.3, -4.0], [0.3, -4.0], 3.7) == 1
    with pytest.raises(ValueError):
        pgmm([1], [1], 0)
    with pytest.raises(ValueError):
        pgmm([1, 2], [1], 1)


@given(vectors, st.data())
def test_pgmm_at_one_is_gmm(u, data):
    v = data.draw(arrays(np.float64, u.size, elements=st.floats(-100, 100, allow_nan=False)))
    assert pgmm(u, v, 1) == gmm(u, v)
    assert 0 <= gmm(u, v) <= 1


def test_rbf_examples():
    assert rbf([0.2, 4], [0.2, 4], 3) == 1
    assert rbf([0], [1], 1) == pytest.approx(math.exp(-1), rel=1e-15)
    assert rbf([0], [1], 1e6) < 1e-300
    with pytest.raises(ValueError):
        rbf([0], [1], 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("rbf")
    with pytest.raises(ValueError):
        KernelSpec.pgmm(-1)
    with pytest.raises(ValueError):
        KernelSpec("poly")
    assert KernelSpec.from_dict(KernelSpec.pgmm(2).to_dict()) == KernelSpec.pgmm(2)


SPECS = [KernelSpec.linear(), KernelSpec.rbf(0.5), KernelSpec.gmm(), KernelSpec.pgmm(2.0), KernelSpec.pgmm(0.3)]
SCALAR = {"linear": lambda u, v, s: linear(u, v), "rbf": lambda u, v, s: rbf(u, v, s.gamma),
          "gmm": lambda u, v, s: gmm(u, v), "pgmm": lambda u, v, s: pgmm(u, v, s.p)}


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_kernel_matrix_matches_scalar_calls(spec):
    rng = np.random.default_rng(5)
    A, B = rng.normal(size=(3, 2)), rng.normal(size=(2, 2))
    K = kernel_matrix(A, B, spec)
    expected = np.array([[SCALAR[spec.kind](a, b, spec) for b in B] for a in A])
    assert K.shape == (3, 2)
    np.testing.assert_allclose(K, expected, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_kernel_matrix_symmetric(spec):
    X = np.random.default_rng(2).normal(size=(30, 4))
    K = kernel_matrix(X, X, spec)
    assert np.abs(K - K.T).max() <= 1e-12
    assert np.abs(K - kernel_matrix(X, X.copy(), spec)).max() <= 1e-12


def test_linear_matrix_is_gram():
    X = np.random.default_rng(3).normal(size=(6, 3))
    np.testing.assert_allclose(kernel_matrix(X, X, KernelSpec.linear()), X @ X.T, rtol=1e-14, atol=1e-14)


def test_gmm_unit_diagonal_and_range():
    X = np.random.default_rng(4).normal(size=(25, 5))
    K = kernel_matrix(X, X, KernelSpec.gmm())
    assert np.all(np.diag(K) == 1)
    assert K.min() >= 0 and K.max() <= 1


def test_zero_rows_give_zero_similarity():
    X = np.array([[0.0, 0.0], [1.0, 2.0]])
    K = kernel_matrix(X, X, KernelSpec.gmm())
    assert K[0, 0] == 0 and K[0, 1] == 0


def test_blocked_build_matches_unblocked(monkeypatch):
    import pgmmreg.kernels as km

    X = np.random.default_rng(9).random((40, 3))
    full = kernel_matrix(X, X[:17], KernelSpec.pgmm(1.7))
    monkeypatch.setattr(km, "_BLOCK_BYTES", 8)
    assert np.array_equal(kernel_matrix(X, X[:17], KernelSpec.pgmm(1.7)), full)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        kernel_matrix(np.zeros((2, 3)), np.zeros((2, 2)), KernelSpec.gmm())
