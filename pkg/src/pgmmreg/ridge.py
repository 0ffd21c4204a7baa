"""Primal ridge linear regression and dual kernel ridge regression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .data import Dataset
from .kernels import KernelSpec, kernel_matrix

MAX_JITTER_RETRIES = 6
JITTER_SCALE = 1e-10


class NotPositiveDefinite(LinAlgError):
    """Cholesky failed even after the maximum diagonal jitter."""


def cholesky_jittered(A) -> tuple[tuple, float]:
    """Cholesky factor of ``A``, adding diagonal jitter on failure.

    The first retry adds ``1e-10 * trace(A) / n`` to the diagonal; each
    further retry multiplies it by 10, up to six retries. Returns the
    ``cho_factor`` pair and the jitter that was finally used (0.0 if none).
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    try:
        return cho_factor(A, lower=True, check_finite=True), 0.0
    except LinAlgError:
        pass
    base = abs(np.trace(A)) / n
    jitter = JITTER_SCALE * (base if base > 0 else 1.0)
    eye = np.eye(n)
    for _ in range(MAX_JITTER_RETRIES):
        try:
            return cho_factor(A + jitter * eye, lower=True), jitter
        except LinAlgError:
            jitter *= 10.0
    raise NotPositiveDefinite(
        f"matrix of size {n} not positive definite after {MAX_JITTER_RETRIES} jitter retries"
    )


def solve_spd(A, b, return_jitter: bool = False):
    """Solve ``A x = b`` for symmetric positive definite ``A`` via Cholesky."""
    b = np.asarray(b, dtype=np.float64)
    factor, jitter = cholesky_jittered(A)
    if b.shape[0] != factor[0].shape[0]:
        raise ValueError(f"right-hand side length {b.shape[0]} != matrix size {factor[0].shape[0]}")
    x = cho_solve(factor, b)
    return (x, jitter) if return_jitter else x


def _augment(X, intercept: bool) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if intercept:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return X


@dataclass(frozen=True, eq=False)
class LinearRidgeModel:
    weights: np.ndarray
    lam: float
    has_intercept: bool
    jitter: float = 0.0

    @property
    def d(self) -> int:
        return self.weights.shape[0] - int(self.has_intercept)

    def predict(self, X_t) -> np.ndarray:
        return predict_linear(self, X_t)


@dataclass(frozen=True, eq=False)
class KernelRidgeModel:
    alpha: np.ndarray
    lam: float
    spec: KernelSpec
    train_features: np.ndarray
    jitter: float = 0.0

    def predict(self, X_t) -> np.ndarray:
        return predict_kernel_ridge(self, X_t)


def fit_linear_ridge(data: Dataset, lam: float, intercept: bool = True) -> LinearRidgeModel:
    """Weights ``(X'X + lam I)^-1 X'y``.

    With ``intercept`` a constant-1 column is appended first; its weight is
    penalized like every other weight.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    X = _augment(data.features, intercept)
    A = X.T @ X
    A[np.diag_indices_from(A)] += lam
    w, jitter = solve_spd(A, X.T @ data.targets, return_jitter=True)
    return LinearRidgeModel(w, float(lam), intercept, jitter)


def predict_linear(model: LinearRidgeModel, X_t) -> np.ndarray:
    X_t = np.atleast_2d(np.asarray(X_t, dtype=np.float64))
    if X_t.shape[1] != model.d:
        raise ValueError(f"model expects {model.d} features, got {X_t.shape[1]}")
    return _augment(X_t, model.has_intercept) @ model.weights


def fit_kernel_ridge(data: Dataset, lam: float, spec: KernelSpec, K=None) -> KernelRidgeModel:
    """Dual coefficients solving ``(K + lam I) alpha = y``.

    Pass a precomputed train kernel ``K`` to reuse it across a lambda sweep;
    it is not modified.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    X = data.features
    if K is None:
        K = kernel_matrix(X, X, spec)
    elif K.shape != (data.n, data.n):
        raise ValueError(f"kernel shape {K.shape} does not match {data.n} training rows")
    A = K + lam * np.eye(data.n)
    alpha, jitter = solve_spd(A, data.targets, return_jitter=True)
    return KernelRidgeModel(alpha, float(lam), spec, X, jitter)


def predict_kernel_ridge(model: KernelRidgeModel, X_t, K_t=None) -> np.ndarray:
    """``K_t @ alpha`` with ``K_t`` the kernel between test rows and retained training rows."""
    if K_t is None:
        X_t = np.atleast_2d(np.asarray(X_t, dtype=np.float64))
        if X_t.shape[1] != model.train_features.shape[1]:
            raise ValueError(
                f"model expects {model.train_features.shape[1]} features, got {X_t.shape[1]}"
            )
        K_t = kernel_matrix(X_t, model.train_features, model.spec)
    return K_t @ model.alpha
