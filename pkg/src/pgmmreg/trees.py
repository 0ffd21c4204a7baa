"""Histogram binning and J-leaf regression trees for gradient boosting.

Features are quantized once into small integer codes; trees split on code
thresholds (``code <= t`` goes left) using per-bin sums of first and second
derivatives of the loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HESS_FLOOR = 1e-12
# a split must beat this fraction of the per-feature bin-score bound to count
# as a positive gain; protects against rounding noise on homogeneous nodes
GAIN_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Binner:
    """Per-feature sorted bin upper boundaries.

    A value ``x`` gets the code of the first boundary ``>= x``; values above
    the last boundary get the last code.
    """

    boundaries: tuple
    max_bins: int

    @property
    def d(self) -> int:
        return len(self.boundaries)

    @property
    def n_bins(self) -> np.ndarray:
        return np.array([len(b) for b in self.boundaries])

    def to_dict(self) -> dict:
        return {"max_bins": self.max_bins, "boundaries": [b.tolist() for b in self.boundaries]}

    @classmethod
    def from_dict(cls, d: dict) -> "Binner":
        return cls(tuple(np.asarray(b, dtype=np.float64) for b in d["boundaries"]), int(d["max_bins"]))


def _feature_boundaries(col: np.ndarray, max_bins: int) -> np.ndarray:
    values = np.sort(col)
    distinct = np.unique(values)
    if distinct.size <= max_bins:
        return distinct
    # equal-population cut ranks; each boundary is an observed value
    n = values.size
    ranks = -(-np.arange(1, max_bins + 1) * n // max_bins) - 1
    return np.unique(values[ranks])


def build_bins(X, max_bins: int = 255) -> Binner:
    """Data-adaptive bins: exact codes for low-cardinality features, quantiles otherwise.

    Boundaries are always observed training values, so codes depend only on
    the ranks of the data and are unchanged by strictly increasing transforms.
    """
    if max_bins < 2:
        raise ValueError(f"max_bins must be >= 2, got {max_bins}")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return Binner(tuple(_feature_boundaries(X[:, j], max_bins) for j in range(X.shape[1])), max_bins)


def apply_bins(X, binner: Binner) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != binner.d:
        raise ValueError(f"binner has {binner.d} features, got {X.shape[1]} columns")
    dtype = np.uint8 if binner.max_bins <= 256 else np.uint16
    codes = np.empty(X.shape, dtype=dtype)
    for j, b in enumerate(binner.boundaries):
        codes[:, j] = np.minimum(np.searchsorted(b, X[:, j], side="left"), len(b) - 1)
    return codes


def gain_second_order(G_left, H_left, G_total, H_total):
    """Split gain from first/second derivative sums.

    ``G_left**2 / H_left + G_right**2 / H_right - G_total**2 / H_total``,
    with every hessian sum floored at ``HESS_FLOOR``. Works elementwise on
    arrays.
    """
    H_right = H_total - H_left
    G_right = G_total - G_left
    return (
        G_left**2 / np.maximum(H_left, HESS_FLOOR)
        + G_right**2 / np.maximum(H_right, HESS_FLOOR)
        - G_total**2 / np.maximum(H_total, HESS_FLOOR)
    )


def gain_first_order(G_left, count_left, G_total, count_total):
    """Unit-weight split gain: each sample has hessian 1."""
    count_right = count_total - count_left
    return (
        G_left**2 / count_left
        + (G_total - G_left) ** 2 / count_right
        - G_total**2 / count_total
    )


@dataclass(frozen=True, eq=False)
class SplitStats:
    """Prefix sums over bin thresholds for one node.

    Arrays have shape ``(d, n_bins - 1)``: entry ``[f, t]`` sums the samples
    with ``code[f] <= t``. Right-hand sums are totals minus left sums.
    """

    grad_left: np.ndarray
    hess_left: np.ndarray
    count_left: np.ndarray
    grad_total: float
    hess_total: float
    count_total: int
    bin_score: np.ndarray  # per feature: sum over bins of G_b**2 / H_b

    @property
    def grad_right(self):
        return self.grad_total - self.grad_left

    @property
    def hess_right(self):
        return self.hess_total - self.hess_left

    @property
    def count_right(self):
        return self.count_total - self.count_left


def split_stats(codes, grads, hesses=None, n_bins: int | None = None) -> SplitStats:
    """Histogram the node's samples and accumulate prefix sums per feature.

    ``hesses=None`` means unit weights (first-order mode); the hessian sums
    are then the sample counts.
    """
    codes = np.atleast_2d(codes)
    k, d = codes.shape
    if n_bins is None:
        n_bins = int(codes.max()) + 1 if k else 1
    return _split_stats_flat(
        (codes.astype(np.intp) + np.arange(d) * n_bins).ravel(), grads, hesses, d, n_bins
    )


def _split_stats_flat(flat, g, h, d, nb) -> SplitStats:
    size = d * nb
    G = np.bincount(flat, weights=np.repeat(g, d), minlength=size).reshape(d, nb)
    C = np.bincount(flat, minlength=size).reshape(d, nb)
    if h is None:
        H = C.astype(np.float64)
        H_total = float(len(g))
    else:
        H = np.bincount(flat, weights=np.repeat(h, d), minlength=size).reshape(d, nb)
        H_total = float(h.sum())
    occupied = C > 0
    score = np.zeros_like(G)
    np.divide(G**2, np.maximum(H, HESS_FLOOR), out=score, where=occupied)
    return SplitStats(
        grad_left=np.cumsum(G, axis=1)[:, :-1],
        hess_left=np.cumsum(H, axis=1)[:, :-1],
        count_left=np.cumsum(C, axis=1)[:, :-1],
        grad_total=float(g.sum()),
        hess_total=H_total,
        count_total=len(g),
        bin_score=score.sum(axis=1),
    )


def best_split(stats: SplitStats, second_order: bool, min_leaf: int = 1):
    """Best ``(gain, feature, threshold)`` for a node, or None without a positive gain.

    Ties go to the lowest feature index, then the lowest threshold.
    """
    if stats.grad_left.shape[1] == 0:
        return None
    ok = (stats.count_left >= min_leaf) & (stats.count_right >= min_leaf)
    if not ok.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        if second_order:
            gain = gain_second_order(stats.grad_left, stats.hess_left, stats.grad_total, stats.hess_total)
        else:
            gain = gain_first_order(
                stats.grad_left, stats.count_left, stats.grad_total, stats.count_total
            )
    gain = np.where(ok, gain, -np.inf)
    flat = int(np.argmax(gain))
    f, t = divmod(flat, gain.shape[1])
    g = float(gain[f, t])
    if not g > GAIN_RTOL * stats.bin_score[f]:
        return None
    return g, f, t


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """Array-encoded binary tree over bin codes.

    Node 0 is the root. Leaves have ``feature == -1``. Internal nodes send
    ``code[feature] <= threshold`` to ``left``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def apply(self, codes) -> np.ndarray:
        """Leaf node index for every row of ``codes``."""
        codes = np.atleast_2d(codes)
        node = np.zeros(codes.shape[0], dtype=np.intp)
        active = np.arange(codes.shape[0])
        while active.size:
            nd = node[active]
            f = self.feature[nd]
            internal = f >= 0
            active, nd, f = active[internal], nd[internal], f[internal]
            go_left = codes[active, f] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
        return node

    def predict(self, codes) -> np.ndarray:
        return self.value[self.apply(codes)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        ints = {k: np.asarray(d[k], dtype=np.intp) for k in ("feature", "threshold", "left", "right")}
        return cls(value=np.asarray(d["value"], dtype=np.float64), **ints)


def predict_tree(tree: RegressionTree, binned_row) -> float:
    return float(tree.predict(np.asarray(binned_row)[None, :])[0])


class _Node:
    __slots__ = ("rows", "stats", "split", "feature", "threshold", "left", "right")

    def __init__(self, rows, stats, split):
        self.rows = rows
        self.stats = stats
        self.split = split
        self.feature = -1
        self.threshold = -1
        self.left = -1
        self.right = -1


def grow_tree(
    binned_X,
    grads,
    hesses=None,
    J: int = 20,
    min_leaf: int = 1,
    p: float = 1.0,
    n_bins: int | None = None,
) -> RegressionTree:
    """Best-first growth of a tree with at most ``J`` leaves.

    With ``hesses`` the second-order gain is used and leaf values are
    ``sum(-g) / sum(h)``. Without, the unit-weight gain is used and leaf
    values are ``sum(-g) / (p * count)``. Growth stops early when no leaf
    has a split with positive gain and ``min_leaf`` samples per side.
    """
    if J < 2:
        raise ValueError(f"J must be >= 2, got {J}")
    codes = np.atleast_2d(binned_X)
    g = np.asarray(grads, dtype=np.float64)
    h = None if hesses is None else np.asarray(hesses, dtype=np.float64)
    n, d = codes.shape
    if g.shape != (n,) or (h is not None and h.shape != (n,)):
        raise ValueError("gradient/hessian length must match the number of rows")
    second_order = h is not None
    nb = int(n_bins) if n_bins is not None else (int(codes.max()) + 1 if n else 1)
    flat = codes.astype(np.intp) + np.arange(d) * nb

    def make(rows):
        st = _split_stats_flat(
            flat[rows].ravel(), g[rows], None if h is None else h[rows], d, nb
        )
        return _Node(rows, st, best_split(st, second_order, min_leaf))

    nodes = [make(np.arange(n))]
    leaves = [0]
    while len(leaves) < J:
        best = None
        for i in sorted(leaves):
            s = nodes[i].split
            if s is not None and (best is None or s[0] > nodes[best].split[0]):
                best = i
        if best is None:
            break
        node = nodes[best]
        _, f, t = node.split
        mask = codes[node.rows, f] <= t
        node.feature, node.threshold = f, t
        node.left, node.right = len(nodes), len(nodes) + 1
        nodes.append(make(node.rows[mask]))
        nodes.append(make(node.rows[~mask]))
        node.rows = node.stats = node.split = None
        leaves.remove(best)
        leaves += [node.left, node.right]

    value = np.zeros(len(nodes))
    for i in leaves:
        st = nodes[i].stats
        if second_order:
            value[i] = -st.grad_total / max(st.hess_total, HESS_FLOOR)
        else:
            value[i] = -st.grad_total / (p * st.count_total)
    return RegressionTree(
        feature=np.array([nd.feature for nd in nodes], dtype=np.intp),
        threshold=np.array([nd.threshold for nd in nodes], dtype=np.intp),
        left=np.array([nd.left for nd in nodes], dtype=np.intp),
        right=np.array([nd.right for nd in nodes], dtype=np.intp),
        value=value,
    )
