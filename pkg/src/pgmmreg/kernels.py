"""Linear, RBF, GMM and pGMM similarities and kernel-matrix construction.

The GMM family works on nonnegative data. General real vectors are first
expanded to twice the dimension: coordinate ``u_i`` becomes the pair
``(u_i, 0)`` when positive and ``(0, -u_i)`` otherwise. GMM is then the ratio
of summed elementwise minima to summed elementwise maxima; pGMM raises every
min and max to the power ``p`` before summing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINEAR = "linear"
RBF = "rbf"
GMM = "gmm"
PGMM = "pgmm"
KINDS = (LINEAR, RBF, GMM, PGMM)

# bytes of scratch per broadcast block in kernel_matrix
_BLOCK_BYTES = 32 * 2**20


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    gamma: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == RBF:
            if self.gamma is None or not self.gamma > 0:
                raise ValueError(f"RBF kernel needs gamma > 0, got {self.gamma}")
        elif self.gamma is not None:
            raise ValueError(f"gamma is only meaningful for RBF, got kind={self.kind}")
        if self.kind == PGMM:
            if self.p is None or not self.p > 0:
                raise ValueError(f"pGMM kernel needs p > 0, got {self.p}")
        elif self.p is not None:
            raise ValueError(f"p is only meaningful for pGMM, got kind={self.kind}")

    @classmethod
    def linear(cls):
        return cls(LINEAR)

    @classmethod
    def rbf(cls, gamma):
        return cls(RBF, gamma=float(gamma))

    @classmethod
    def gmm(cls):
        return cls(GMM)

    @classmethod
    def pgmm(cls, p):
        return cls(PGMM, p=float(p))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "gamma": self.gamma, "p": self.p}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(d["kind"], gamma=d.get("gamma"), p=d.get("p"))

    def __str__(self):
        if self.kind == RBF:
            return f"rbf(gamma={self.gamma:g})"
        if self.kind == PGMM:
            return f"pgmm(p={self.p:g})"
        return self.kind


def transform_nonnegative(u) -> np.ndarray:
    """Expand the last axis from d to 2d nonnegative entries.

    >>> transform_nonnegative([-3, 17, -0.8]).tolist()
    [0.0, 3.0, 17.0, 0.0, 0.0, 0.8]
    """
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros(u.shape[:-1] + (2 * u.shape[-1],))
    pos = u > 0
    out[..., 0::2] = np.where(pos, u, 0.0)
    out[..., 1::2] = np.where(pos, 0.0, -u) + 0.0  # + 0.0 turns -0.0 into 0.0
    return out


def _power(x: np.ndarray, p: float) -> np.ndarray:
    """``x**p`` for nonnegative x, as exp(p log x) with exact zeros kept at 0."""
    if p == 1:
        return x
    out = np.zeros_like(x)
    nz = x > 0
    out[nz] = np.exp(p * np.log(x[nz]))
    return out


def _check_pair(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or u.shape != v.shape:
        raise ValueError(f"vectors must be 1-d with equal length, got {u.shape} and {v.shape}")
    return u, v


def _ratio(num, den):
    return num / den if den > 0 else 0.0


def gmm(u, v) -> float:
    """Generalized min-max similarity; 0 when both vectors are all zero."""
    u, v = _check_pair(u, v)
    a, b = transform_nonnegative(u), transform_nonnegative(v)
    return _ratio(np.minimum(a, b).sum(), np.maximum(a, b).sum())


def pgmm(u, v, p: float) -> float:
    """Powered GMM: sum(min^p) / sum(max^p) over the expanded coordinates."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    u, v = _check_pair(u, v)
    a, b = transform_nonnegative(u), transform_nonnegative(v)
    return _ratio(_power(np.minimum(a, b), p).sum(), _power(np.maximum(a, b), p).sum())


def rbf(u, v, gamma: float) -> float:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    u, v = _check_pair(u, v)
    return float(np.exp(-gamma * np.sum((u - v) ** 2)))


def linear(u, v) -> float:
    u, v = _check_pair(u, v)
    return float(u @ v)


def _minmax_block_rows(n_cols: int, width: int) -> int:
    return max(1, _BLOCK_BYTES // (8 * max(1, n_cols * width)))


def _minmax_matrix(TA: np.ndarray, TB: np.ndarray) -> np.ndarray:
    # sum(max) = sum(a) + sum(b) - sum(min), so only the min-sum is broadcast
    ra = TA.sum(axis=1)
    rb = TB.sum(axis=1)
    S = np.empty((TA.shape[0], TB.shape[0]))
    step = _minmax_block_rows(TB.shape[0], TA.shape[1])
    for i in range(0, TA.shape[0], step):
        S[i:i + step] = np.minimum(TA[i:i + step, None, :], TB[None, :, :]).sum(axis=2)
    den = ra[:, None] + rb[None, :] - S
    out = np.zeros_like(S)
    np.divide(S, den, out=out, where=den > 0)
    return out


def minmax_features(X, spec: KernelSpec) -> np.ndarray:
    """Rows expanded to nonnegative form and raised to the pGMM power.

    min/max commute with the monotone map t -> t**p on nonnegatives, so the
    pGMM matrix equals the GMM matrix of these powered rows.
    """
    T = transform_nonnegative(np.asarray(X, dtype=np.float64))
    return _power(T, spec.p) if spec.kind == PGMM else T


def kernel_matrix(A, B, spec: KernelSpec) -> np.ndarray:
    """Kernel between every row of ``A`` (m x d) and every row of ``B`` (n x d)."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]} columns")
    same = A is B or (A.shape == B.shape and np.array_equal(A, B))

    if spec.kind == LINEAR:
        K = A @ B.T
        if same:
            K = 0.5 * (K + K.T)
        return K
    if spec.kind == RBF:
        ra = np.einsum("ij,ij->i", A, A)
        rb = np.einsum("ij,ij->i", B, B)
        D = np.maximum(ra[:, None] + rb[None, :] - 2.0 * (A @ B.T), 0.0)
        if same:
            D = 0.5 * (D + D.T)
            np.fill_diagonal(D, 0.0)
        return np.exp(-spec.gamma * D)

    TA = minmax_features(A, spec)
    TB = TA if same else minmax_features(B, spec)
    return _minmax_matrix(TA, TB)
