"""JSON model files.

Floats are written with ``repr`` precision, so a loaded model predicts
bit-identically to the one that was saved.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..boosting import BoostModel
from ..data import ScalingParams
from ..kernels import KernelSpec
from ..ridge import KernelRidgeModel, LinearRidgeModel
from ..trees import Binner, RegressionTree

FORMAT = "pgmmreg-model"
VERSION = 1


class ModelFormatError(ValueError):
    """The file is not a readable model file."""


class ModelVersionError(ModelFormatError):
    """The file was written by an incompatible format version."""


def _encode(model) -> tuple[str, dict]:
    if isinstance(model, LinearRidgeModel):
        return "linear_ridge", {
            "weights": model.weights.tolist(),
            "lambda": model.lam,
            "has_intercept": model.has_intercept,
            "jitter": model.jitter,
        }
    if isinstance(model, KernelRidgeModel):
        return "kernel_ridge", {
            "alpha": model.alpha.tolist(),
            "lambda": model.lam,
            "spec": model.spec.to_dict(),
            "train_features": model.train_features.tolist(),
            "jitter": model.jitter,
        }
    if isinstance(model, BoostModel):
        return "lp_boost", {
            "nu": model.nu,
            "p": model.p,
            "J": model.J,
            "max_iterations": model.max_iterations,
            "iterations_run": model.iterations_run,
            "stopped_early": model.stopped_early,
            "binner": model.binner.to_dict(),
            "trees": [t.to_dict() for t in model.trees],
            "train_loss_history": model.train_loss_history.tolist(),
            "train_l2_history": model.train_l2_history.tolist(),
            "test_l2_history": None if model.test_l2_history is None else model.test_l2_history.tolist(),
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _decode(kind: str, m: dict):
    arr = np.asarray
    if kind == "linear_ridge":
        return LinearRidgeModel(arr(m["weights"], dtype=float), m["lambda"], m["has_intercept"], m["jitter"])
    if kind == "kernel_ridge":
        X = arr(m["train_features"], dtype=float).reshape(len(m["alpha"]), -1)
        return KernelRidgeModel(
            arr(m["alpha"], dtype=float), m["lambda"], KernelSpec.from_dict(m["spec"]), X, m["jitter"]
        )
    if kind == "lp_boost":
        test = m["test_l2_history"]
        return BoostModel(
            trees=[RegressionTree.from_dict(t) for t in m["trees"]],
            nu=m["nu"],
            p=m["p"],
            binner=Binner.from_dict(m["binner"]),
            iterations_run=m["iterations_run"],
            train_loss_history=arr(m["train_loss_history"], dtype=float),
            train_l2_history=arr(m["train_l2_history"], dtype=float),
            test_l2_history=None if test is None else arr(test, dtype=float),
            stopped_early=m["stopped_early"],
            J=m["J"],
            max_iterations=m["max_iterations"],
        )
    raise ModelFormatError(f"unknown model type {kind!r}")


def save_model(model, path, scaling: ScalingParams | None = None) -> None:
    """Write ``model`` (and optionally the feature scaling it was trained under)."""
    kind, body = _encode(model)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "type": kind,
        "model": body,
        "scaling": None if scaling is None else {
            "min": scaling.minimum.tolist(),
            "max": scaling.maximum.tolist(),
        },
    }
    Path(path).write_text(json.dumps(doc))


def read_model_file(path):
    """Return ``(model, scaling)``; ``scaling`` is None when none was stored."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: malformed or truncated model file ({exc.msg})") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelFormatError(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise ModelVersionError(
            f"{path}: model format version {doc.get('version')!r} is incompatible with {VERSION}"
        )
    try:
        model = _decode(doc["type"], doc["model"])
        sc = doc.get("scaling")
        scaling = None if sc is None else ScalingParams(sc["min"], sc["max"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"{path}: incomplete model record ({exc})") from None
    return model, scaling


def load_model(path):
    return read_model_file(path)[0]
