"""Dataset container, CSV ingestion, [0, 1] feature scaling and seeded splits."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise DataError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Row-major feature matrix with its target vector.

    Arrays are copied on construction and marked read-only, so a Dataset can
    be shared freely.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = _frozen(self.features, 2)
        y = _frozen(self.targets, 1)
        n, d = X.shape
        if n < 1 or d < 1:
            raise DataError(f"dataset needs n >= 1 and d >= 1, got n={n}, d={d}")
        if y.shape[0] != n:
            raise DataError(f"targets length {y.shape[0]} != feature rows {n}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise DataError("dataset contains NaN or infinite values")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != d:
                raise DataError(f"{len(names)} feature names for {d} columns")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def take(self, rows) -> "Dataset":
        return Dataset(self.features[rows], self.targets[rows], self.feature_names)


@dataclass(frozen=True, eq=False)
class ScalingParams:
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        lo = _frozen(self.minimum, 1)
        hi = _frozen(self.maximum, 1)
        if lo.shape != hi.shape:
            raise DataError("scaling min/max lengths differ")
        if np.any(lo > hi):
            raise DataError("scaling min exceeds max")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)

    @property
    def d(self) -> int:
        return self.minimum.shape[0]


def _resolve_column(selector, header: list[str] | None, width: int) -> int:
    if isinstance(selector, str) and not selector.lstrip("-").isdigit():
        if header is None:
            raise DataError(f"target column {selector!r} given by name but the file has no header")
        if selector not in header:
            raise DataError(f"target column {selector!r} not in header {header}")
        return header.index(selector)
    idx = int(selector)
    if not -width <= idx < width:
        raise DataError(f"column index {idx} out of range for {width} columns")
    return idx % width


def _rows(text: str, has_header: bool, delimiter: str | None):
    if delimiter is None:
        rows = [line.split() for line in text.splitlines()]
    else:
        rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError("empty input")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DataError("no data rows")
    width = len(header) if header is not None else len(rows[0])
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise DataError(f"row {i} has {len(r)} fields, expected {width}")
    return header, rows, width


def _to_float(rows, width, skip=frozenset()) -> np.ndarray:
    values = np.empty((len(rows), width))
    for i, r in enumerate(rows, start=1):
        for j, cell in enumerate(r):
            try:
                values[i - 1, j] = float(cell)
            except ValueError:
                if j in skip:
                    values[i - 1, j] = np.nan
                    continue
                raise DataError(
                    f"cannot parse {cell.strip()!r} as a number at row {i}, column {j + 1}"
                ) from None
    return values


def parse_table(
    text: str,
    target,
    has_header: bool = True,
    delimiter: str | None = ",",
    drop: Sequence = (),
) -> Dataset:
    """Parse delimited text into a Dataset.

    ``delimiter=None`` splits on runs of whitespace. ``target`` and the
    entries of ``drop`` are column names (header required) or zero-based
    indices; negative indices count from the right.
    """
    header, rows, width = _rows(text, has_header, delimiter)
    t = _resolve_column(target, header, width)
    dropped = {_resolve_column(c, header, width) for c in drop}
    if t in dropped:
        raise DataError("target column is also listed for dropping")
    keep = [j for j in range(width) if j != t and j not in dropped]
    if not keep:
        raise DataError("no features remain after removing the target column")
    values = _to_float(rows, width, skip=dropped)
    names = [header[j] for j in keep] if header is not None else None
    return Dataset(values[:, keep], values[:, t], names)


def read_matrix(path, has_header: bool = True, delimiter: str | None = ",") -> np.ndarray:
    """All columns of a delimited file as a float matrix (no target column)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    _, rows, width = _rows(text, has_header, delimiter)
    X = _to_float(rows, width)
    if not np.isfinite(X).all():
        raise DataError(f"{path}: NaN or infinite values")
    return X


def load_csv(
    path,
    target,
    has_header: bool = True,
    delimiter: str | None = ",",
    drop: Sequence = (),
) -> Dataset:
    """Read a delimited text file; see :func:`parse_table` for the options.

    Row numbers in error messages count data rows from 1 (the header is not
    counted); column numbers count from 1.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_table(text, target, has_header=has_header, delimiter=delimiter, drop=drop)


def write_csv(data: Dataset, path, target_name: str = "y") -> None:
    """Write features plus target (last column) so that ``load_csv`` round-trips exactly."""
    names = list(data.feature_names or [f"x{j}" for j in range(data.d)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + [target_name])
        for row, y in zip(data.features, data.targets):
            w.writerow([repr(float(v)) for v in row] + [repr(float(y))])


def fit_scaling(train: Dataset) -> ScalingParams:
    return ScalingParams(train.features.min(axis=0), train.features.max(axis=0))


def scale_features(X, params: ScalingParams) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.d:
        raise DataError(f"expected {params.d} feature columns, got shape {X.shape}")
    span = params.maximum - params.minimum
    constant = span == 0
    out = (X - params.minimum) / np.where(constant, 1.0, span)
    out[:, constant] = 0.0
    return out


def apply_scaling(data: Dataset, params: ScalingParams) -> Dataset:
    """Map each feature affinely so the fitted range becomes [0, 1].

    Values outside the fitted range are not clamped. Constant columns
    (max == min) map to 0.
    """
    return Dataset(scale_features(data.features, params), data.targets, data.feature_names)


def split(data: Dataset, train_count: int, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle; the first ``train_count`` rows train, the rest test."""
    if not 1 <= train_count < data.n:
        raise DataError(f"train_count must be in [1, {data.n - 1}], got {train_count}")
    order = np.random.default_rng(seed).permutation(data.n)
    return data.take(order[:train_count]), data.take(order[train_count:])


@dataclass
class PreparedSplit:
    """Scaled train/test pair plus the scaling that produced it."""

    train: Dataset
    test: Dataset
    scaling: ScalingParams
    raw_train: Dataset = field(repr=False)
    raw_test: Dataset = field(repr=False)


def prepare(data: Dataset, train_count: int, seed: int) -> PreparedSplit:
    """Split, then scale both halves with statistics from the training half only."""
    tr, te = split(data, train_count, seed)
    params = fit_scaling(tr)
    return PreparedSplit(apply_scaling(tr, params), apply_scaling(te, params), params, tr, te)
