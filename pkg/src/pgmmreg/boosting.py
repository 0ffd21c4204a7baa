"""Lp-loss boosting of J-leaf regression trees.

Each iteration fits a tree to the derivatives of ``|y - F|**p`` at the
current fit ``F`` (which starts at 0) and adds ``nu`` times its output.
For ``p >= 2`` trees use second-order gains and Newton leaf values; for
``1 <= p < 2`` the second derivative is not used and leaves take
``sum(-g) / (p * count)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .trees import Binner, RegressionTree, apply_bins, build_bins, grow_tree

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-5


def _check_p(p, lower=1.0):
    if not p >= lower:
        raise ValueError(f"p must be >= {lower:g}, got {p}")


def lp_loss(y, F, p: float) -> float:
    """Mean of ``|y - F|**p``."""
    y = np.asarray(y, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    if y.shape != F.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {F.shape}")
    return float(np.mean(np.abs(y - F) ** p))


def lp_grad(y, F, p: float):
    """Derivative of ``|y - F|**p`` with respect to F.

    ``-p * |r|**(p-1) * sign(r)`` with ``r = y - F`` and ``sign(0) = 0``.
    """
    r = np.asarray(y, dtype=np.float64) - np.asarray(F, dtype=np.float64)
    return -p * np.abs(r) ** (p - 1) * np.sign(r)


def lp_hess(y, F, p: float):
    """Second derivative ``p (p-1) |y - F|**(p-2)``; only defined for p >= 2."""
    if not p >= 2:
        raise ValueError(f"second derivative requires p >= 2, got {p}")
    r = np.asarray(y, dtype=np.float64) - np.asarray(F, dtype=np.float64)
    return p * (p - 1) * np.abs(r) ** (p - 2)


def early_stop_threshold(y, p: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """Training-loss level below which boosting exits: ``epsilon**(p/2) * mean(|y|**p)``."""
    y = np.asarray(y, dtype=np.float64)
    return float(epsilon ** (p / 2) * np.mean(np.abs(y) ** p))


@dataclass(frozen=True, eq=False)
class BoostModel:
    trees: list
    nu: float
    p: float
    binner: Binner
    iterations_run: int
    train_loss_history: np.ndarray  # training Lp loss after each iteration
    train_l2_history: np.ndarray
    test_l2_history: np.ndarray | None = None
    stopped_early: bool = False
    J: int | None = None
    max_iterations: int | None = None

    def predict(self, X_t) -> np.ndarray:
        return predict_boost(self, X_t)

    @property
    def best_iteration(self) -> int | None:
        """1-based iteration with the lowest recorded test L2 loss."""
        if self.test_l2_history is None or len(self.test_l2_history) == 0:
            return None
        return int(np.argmin(self.test_l2_history)) + 1


@dataclass
class _Fit:
    trees: list = field(default_factory=list)
    lp: list = field(default_factory=list)
    l2: list = field(default_factory=list)
    test_l2: list = field(default_factory=list)


def fit_lp_boost(
    train: Dataset,
    p: float = 2.0,
    J: int = 20,
    nu: float = 0.1,
    M: int = 10000,
    epsilon: float = DEFAULT_EPSILON,
    min_leaf: int = 1,
    max_bins: int = 255,
    eval_set: Dataset | None = None,
    binner: Binner | None = None,
) -> BoostModel:
    """Boost ``J``-leaf trees on the Lp loss.

    Parameters
    ----------
    train
        Training data; bins are built from its features unless ``binner``
        is given.
    p
        Loss power, ``p >= 1``.
    J, nu, M
        Leaves per tree, shrinkage in (0, 1], maximum number of iterations.
    epsilon
        Early-stop tolerance. Iteration stops once the training Lp loss,
        checked after each update, drops below
        ``early_stop_threshold(y, p, epsilon)``.
    eval_set
        Optional held-out data; its L2 loss is recorded per iteration.
    """
    _check_p(p)
    if J < 2:
        raise ValueError(f"J must be >= 2, got {J}")
    if not 0 < nu <= 1:
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if min_leaf < 1:
        raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")

    binner = binner or build_bins(train.features, max_bins)
    codes = apply_bins(train.features, binner)
    n_bins = int(binner.n_bins.max())
    y = train.targets
    second_order = p >= 2
    threshold = early_stop_threshold(y, p, epsilon)

    F = np.zeros(train.n)
    if eval_set is not None:
        test_codes = apply_bins(eval_set.features, binner)
        F_test = np.zeros(eval_set.n)

    fit = _Fit()
    stopped = False
    for m in range(1, M + 1):
        g = lp_grad(y, F, p)
        h = lp_hess(y, F, p) if second_order else None
        tree = grow_tree(codes, g, h, J=J, min_leaf=min_leaf, p=p, n_bins=n_bins)
        fit.trees.append(tree)
        F = F + nu * tree.predict(codes)
        loss = lp_loss(y, F, p)
        fit.lp.append(loss)
        fit.l2.append(lp_loss(y, F, 2))
        if eval_set is not None:
            F_test = F_test + nu * tree.predict(test_codes)
            fit.test_l2.append(lp_loss(eval_set.targets, F_test, 2))
        if loss < threshold:
            stopped = True
            log.debug("early stop at iteration %d (loss %.3g < %.3g)", m, loss, threshold)
            break
        if not math.isfinite(loss):
            raise FloatingPointError(f"training loss diverged at iteration {m}")

    return BoostModel(
        trees=fit.trees,
        nu=float(nu),
        p=float(p),
        binner=binner,
        iterations_run=len(fit.trees),
        train_loss_history=np.array(fit.lp),
        train_l2_history=np.array(fit.l2),
        test_l2_history=np.array(fit.test_l2) if eval_set is not None else None,
        stopped_early=stopped,
        J=int(J),
        max_iterations=int(M),
    )


def predict_boost(model: BoostModel, X_t, n_trees: int | None = None) -> np.ndarray:
    """Shrunken sum of tree outputs, optionally truncated to the first ``n_trees``."""
    X_t = np.atleast_2d(np.asarray(X_t, dtype=np.float64))
    if X_t.shape[1] != model.binner.d:
        raise ValueError(f"model expects {model.binner.d} features, got {X_t.shape[1]}")
    codes = apply_bins(X_t, model.binner)
    F = np.zeros(X_t.shape[0])
    for tree in model.trees[:n_trees]:
        F = F + model.nu * tree.predict(codes)
    return F
