"""Grid runs: every method over its full parameter grid, best test MSE reported."""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..boosting import fit_lp_boost
from ..data import Dataset, PreparedSplit, load_csv, prepare
from ..kernels import KernelSpec, kernel_matrix
from ..ridge import NotPositiveDefinite, fit_kernel_ridge, fit_linear_ridge, predict_linear
from .config import ExperimentConfig
from .datasets import load_benchmark

log = logging.getLogger(__name__)


def mse(y, yhat) -> float:
    return float(np.mean((np.asarray(y) - np.asarray(yhat)) ** 2))


@dataclass
class Cell:
    """One grid point. For boosting ``test_mse`` is the best over iterations."""

    params: dict
    train_mse: float
    test_mse: float
    info: dict = field(default_factory=dict)
    curve: dict | None = None

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "train_mse": self.train_mse,
            "test_mse": self.test_mse,
            "info": self.info,
            "curve": self.curve,
        }

    @classmethod
    def from_dict(cls, d) -> "Cell":
        return cls(d["params"], d["train_mse"], d["test_mse"], d.get("info", {}), d.get("curve"))


@dataclass
class MetricReport:
    method: str
    dataset: str
    n_train: int
    n_test: int
    d: int
    seed: int
    cells: list
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def best_index(self) -> int | None:
        scores = [c.test_mse for c in self.cells]
        finite = [i for i, s in enumerate(scores) if math.isfinite(s)]
        if not finite:
            return None
        return min(finite, key=lambda i: scores[i])

    @property
    def best(self) -> Cell | None:
        i = self.best_index
        return None if i is None else self.cells[i]

    @property
    def best_mse(self) -> float:
        b = self.best
        return math.nan if b is None else b.test_mse

    def to_dict(self, wall_time=True) -> dict:
        d = {
            "method": self.method,
            "dataset": self.dataset,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "d": self.d,
            "seed": self.seed,
            "best_index": self.best_index,
            "best_test_mse": self.best_mse,
            "cells": [c.to_dict() for c in self.cells],
            "config": self.config,
        }
        if wall_time:
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d) -> "MetricReport":
        return cls(
            d["method"], d["dataset"], d["n_train"], d["n_test"], d["d"], d["seed"],
            [Cell.from_dict(c) for c in d["cells"]], d.get("wall_time", 0.0), d.get("config", {}),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "MetricReport":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def format_table(self) -> str:
        keys = list(self.cells[0].params) if self.cells else []
        head = keys + ["train_mse", "test_mse"]
        lines = [
            f"# method={self.method} dataset={self.dataset} n_train={self.n_train} "
            f"n_test={self.n_test} d={self.d} seed={self.seed}",
            "  ".join(f"{h:>12}" for h in head),
        ]
        best = self.best_index
        for i, c in enumerate(self.cells):
            row = [f"{c.params[k]:>12g}" for k in keys]
            row += [f"{c.train_mse:>12.6g}", f"{c.test_mse:>12.6g}"]
            lines.append("  ".join(row) + ("  <- best" if i == best else ""))
        lines.append(f"# best test MSE {self.best_mse:.6g}; wall time {self.wall_time:.2f}s")
        return "\n".join(lines)


def load_config_data(config: ExperimentConfig) -> tuple[Dataset, str]:
    if config.dataset is not None:
        return load_benchmark(config.dataset, config.data_dir), config.dataset
    data = load_csv(
        config.data, config.target, has_header=config.has_header,
        delimiter=config.delimiter, drop=config.drop,
    )
    return data, str(config.data)


def _kernel_job(args):
    """All lambda cells for one kernel: build K once, solve once per lambda."""
    spec, lambdas, split, base = args
    Xtr, ytr = split.train.features, split.train.targets
    K = kernel_matrix(Xtr, Xtr, spec)
    Kt = kernel_matrix(split.test.features, Xtr, spec)
    cells = []
    for lam in lambdas:
        params = dict(base, **{"lambda": lam})
        try:
            model = fit_kernel_ridge(split.train, lam, spec, K=K)
        except NotPositiveDefinite as exc:
            cells.append(Cell(params, math.nan, math.nan, {"error": str(exc)}))
            continue
        cells.append(Cell(
            params,
            mse(ytr, K @ model.alpha),
            mse(split.test.targets, Kt @ model.alpha),
            {"jitter": model.jitter} if model.jitter else {},
        ))
    return cells


def _linear_job(args):
    lambdas, split, intercept = args
    cells = []
    for lam in lambdas:
        model = fit_linear_ridge(split.train, lam, intercept=intercept)
        cells.append(Cell(
            {"lambda": lam},
            mse(split.train.targets, predict_linear(model, split.train.features)),
            mse(split.test.targets, predict_linear(model, split.test.features)),
            {"jitter": model.jitter} if model.jitter else {},
        ))
    return cells


def _boost_job(args):
    p, J, nu, split, cfg = args
    model = fit_lp_boost(
        split.train, p=p, J=J, nu=nu, M=cfg["M"], epsilon=cfg["epsilon"],
        min_leaf=cfg["min_leaf"], max_bins=cfg["max_bins"], eval_set=split.test,
    )
    test = model.test_l2_history
    best_it = model.best_iteration
    return [Cell(
        {"p": p, "J": J, "nu": nu},
        float(model.train_l2_history[-1]),
        float(test[best_it - 1]),
        {
            "best_iteration": best_it,
            "final_test_mse": float(test[-1]),
            "iterations_run": model.iterations_run,
            "stopped_early": model.stopped_early,
        },
        {
            "train_lp": model.train_loss_history.tolist(),
            "train_l2": model.train_l2_history.tolist(),
            "test_l2": test.tolist(),
        },
    )]


def _jobs(config: ExperimentConfig, split: PreparedSplit):
    lams = tuple(config.lambdas)
    m = config.method
    if m == "LR":
        return _linear_job, [(lams, split, config.intercept)]
    if m == "GMM":
        return _kernel_job, [(KernelSpec.gmm(), lams, split, {})]
    if m == "PGMM":
        return _kernel_job, [(KernelSpec.pgmm(p), lams, split, {"p": p}) for p in config.p_grid]
    if m == "RBF":
        return _kernel_job, [(KernelSpec.rbf(g), lams, split, {"gamma": g}) for g in config.gammas]
    cfg = {k: getattr(config, k) for k in ("M", "epsilon", "min_leaf", "max_bins")}
    return _boost_job, [
        (p, J, nu, split, cfg) for p, J, nu in product(config.p_grid, config.Js, config.nus)
    ]


def run_experiment(config: ExperimentConfig, data: Dataset | None = None, name: str | None = None) -> MetricReport:
    """Split, scale on the training half, and evaluate every grid cell.

    ``data`` overrides loading from the configuration. Cells appear in grid
    order regardless of the worker count.
    """
    config.validate()
    if data is None:
        data, name = load_config_data(config)
    name = name or "data"
    train_count = config.train_count or math.ceil(data.n / 2)
    split = prepare(data, train_count, config.seed)

    start = time.perf_counter()
    job, args = _jobs(config, split)
    if config.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(job, args))
    else:
        chunks = [job(a) for a in args]
    cells = [c for chunk in chunks for c in chunk]
    elapsed = time.perf_counter() - start
    report = MetricReport(
        config.method, name, split.train.n, split.test.n, data.d, config.seed, cells,
        elapsed, config.to_dict(),
    )
    log.info("%s on %s: best test MSE %.6g (%d cells, %.1fs)", config.method, name,
             report.best_mse, len(cells), elapsed)
    return report


def fit_single(config: ExperimentConfig, data: Dataset | None = None, name: str | None = None):
    """Fit only the first value of every grid; returns ``(model, report, split)``."""
    if data is None:
        data, name = load_config_data(config)
    name = name or "data"
    split = prepare(data, config.train_count or math.ceil(data.n / 2), config.seed)
    lam, gamma, p = config.lambdas[0], config.gammas[0], config.p_grid[0]
    start = time.perf_counter()
    m = config.method
    if m == "LPBOOST":
        J, nu = config.Js[0], config.nus[0]
        model = fit_lp_boost(
            split.train, p=p, J=J, nu=nu, M=config.M, epsilon=config.epsilon,
            min_leaf=config.min_leaf, max_bins=config.max_bins, eval_set=split.test,
        )
        cell = Cell(
            {"p": p, "J": J, "nu": nu},
            float(model.train_l2_history[-1]),
            float(model.test_l2_history[-1]),
            {"iterations_run": model.iterations_run, "stopped_early": model.stopped_early},
        )
    else:
        if m == "LR":
            model = fit_linear_ridge(split.train, lam, intercept=config.intercept)
            params = {"lambda": lam}
        else:
            if m == "GMM":
                spec, params = KernelSpec.gmm(), {}
            elif m == "PGMM":
                spec, params = KernelSpec.pgmm(p), {"p": p}
            else:
                spec, params = KernelSpec.rbf(gamma), {"gamma": gamma}
            model = fit_kernel_ridge(split.train, lam, spec)
            params["lambda"] = lam
        cell = Cell(
            params,
            mse(split.train.targets, model.predict(split.train.features)),
            mse(split.test.targets, model.predict(split.test.features)),
            {"jitter": model.jitter} if model.jitter else {},
        )
    report = MetricReport(
        m, name, split.train.n, split.test.n, data.d, config.seed, [cell],
        time.perf_counter() - start, config.to_dict(),
    )
    return model, report, split
