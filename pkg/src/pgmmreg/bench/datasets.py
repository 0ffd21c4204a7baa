"""Registry of the public benchmark datasets and their reference results.

Files are not shipped; place them in a data directory (``--data-dir``,
``$PGMMREG_DATA`` or ``./data``). See README for download sources.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from ..data import DataError, Dataset, load_csv


@dataclass(frozen=True)
class BenchmarkDataset:
    name: str
    files: tuple  # candidate file names, first match wins
    target: str
    train_count: int
    n_total: int
    dim: int
    drop: tuple = ()
    has_header: bool = True
    delimiter: str | None = ","
    # best test MSE per method as published (LR, RBF, GMM, PGMM, L2-boost)
    reference: dict = field(default_factory=dict)


REGISTRY = {
    d.name.lower(): d
    for d in [
        BenchmarkDataset(
            "ENBcool", ("ENB2012_data.csv", "enb.csv"), target="Y2", drop=("Y1",),
            train_count=384, n_total=768, dim=8,
            reference={"LR": 10.24, "RBF": 3.20, "GMM": 1.70, "PGMM": 1.28, "LPBOOST": 1.21},
        ),
        BenchmarkDataset(
            "ENBheat", ("ENB2012_data.csv", "enb.csv"), target="Y1", drop=("Y2",),
            train_count=384, n_total=768, dim=8,
            reference={"LR": 9.00, "RBF": 0.495, "GMM": 0.191, "PGMM": 0.188, "LPBOOST": 0.186},
        ),
        BenchmarkDataset(
            "Airfoil", ("airfoil_self_noise.dat", "airfoil.dat"), target="-1",
            has_header=False, delimiter=None,
            train_count=752, n_total=1503, dim=5,
            reference={"LR": 24.26, "RBF": 8.35, "GMM": 7.50, "PGMM": 3.56, "LPBOOST": 3.09},
        ),
        BenchmarkDataset(
            "CPUsmall", ("cpusmall.csv", "cpusmall", "cpusmall.libsvm"), target="-1",
            train_count=4096, n_total=8192, dim=12,
            reference={"LR": 102.12, "RBF": 9.05, "GMM": 7.22, "PGMM": 7.05, "LPBOOST": 6.89},
        ),
    ]
}


def data_dir(explicit=None) -> Path:
    return Path(explicit or os.environ.get("PGMMREG_DATA") or "data")


def find_file(ds: BenchmarkDataset, directory=None) -> Path | None:
    root = data_dir(directory)
    for name in ds.files:
        path = root / name
        if path.is_file():
            return path
    return None


def _load_libsvm(path: Path, dim: int) -> Dataset:
    try:
        from sklearn.datasets import load_svmlight_file
    except ImportError as exc:  # pragma: no cover - optional dependency
        raise DataError("reading LIBSVM files needs scikit-learn (pip install artifact[libsvm])") from exc
    try:
        X, y = load_svmlight_file(str(path), n_features=dim)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return Dataset(X.toarray(), y)


def load_benchmark(name: str, directory=None) -> Dataset:
    try:
        ds = REGISTRY[name.lower()]
    except KeyError:
        raise DataError(f"unknown dataset {name!r}; known: {sorted(d.name for d in REGISTRY.values())}") from None
    path = find_file(ds, directory)
    if path is None:
        raise DataError(
            f"dataset {ds.name} not found in {data_dir(directory)} (looked for {', '.join(ds.files)})"
        )
    if path.suffix in ("", ".libsvm"):
        data = _load_libsvm(path, ds.dim)
    else:
        data = load_csv(path, ds.target, has_header=ds.has_header, delimiter=ds.delimiter, drop=ds.drop)
    if data.d != ds.dim:
        raise DataError(f"{ds.name}: expected {ds.dim} features, found {data.d} in {path}")
    return data
