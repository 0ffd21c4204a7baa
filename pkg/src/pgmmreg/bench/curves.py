"""Tab-separated curve tables: test MSE against lambda, p, or boosting iteration."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

from .experiment import MetricReport

KINDS = ("mse_vs_lambda", "mse_vs_p", "mse_vs_iteration")


class CurveError(ValueError):
    """The report has no data along the requested axis."""


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _write(path: Path, header, rows) -> Path:
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for r in rows:
            fh.write("\t".join(_fmt(v) for v in r) + "\n")
    return path


def _series_label(params: dict, method: str) -> str:
    rest = [f"{k}={v:g}" for k, v in params.items() if k != "lambda"]
    return ",".join(rest) if rest else method


def _lambda_table(report: MetricReport):
    if not report.cells or "lambda" not in report.cells[0].params:
        raise CurveError(f"report for {report.method} has no lambda axis")
    series = {}
    for c in report.cells:
        series.setdefault(_series_label(c.params, report.method), {})[c.params["lambda"]] = c.test_mse
    lambdas = sorted({c.params["lambda"] for c in report.cells})
    names = list(series)
    rows = [[lam] + [series[s].get(lam, math.nan) for s in names] for lam in lambdas]
    return ["lambda"] + names, rows


def _p_table(report: MetricReport):
    if not report.cells or "p" not in report.cells[0].params:
        raise CurveError(f"report for {report.method} has no p axis")
    best = defaultdict(lambda: math.inf)
    for c in report.cells:
        if math.isfinite(c.test_mse):
            best[c.params["p"]] = min(best[c.params["p"]], c.test_mse)
    ps = sorted({c.params["p"] for c in report.cells})
    vals = [best[p] if p in best else math.nan for p in ps]
    finite = [v for v in vals if math.isfinite(v)]
    lowest = min(finite) if finite else None
    rows = [[p, v, int(v == lowest)] for p, v in zip(ps, vals)]
    return ["p", f"{report.method}_best_test_mse", "is_min"], rows


def emit_curves(report: MetricReport, kind: str, out_dir) -> list[Path]:
    """Write the tables for one curve kind; returns the written paths.

    ``mse_vs_lambda`` gives one column per kernel parameter value.
    ``mse_vs_p`` gives the best MSE per p over all other parameters, with the
    minimum row flagged. ``mse_vs_iteration`` writes one table per boosting
    cell holding exactly one row per iteration run.
    """
    if kind not in KINDS:
        raise CurveError(f"unknown curve kind {kind!r}; expected one of {KINDS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{report.method.lower()}_{kind}"
    if kind == "mse_vs_lambda":
        header, rows = _lambda_table(report)
        return [_write(out / f"{stem}.tsv", header, rows)]
    if kind == "mse_vs_p":
        header, rows = _p_table(report)
        return [_write(out / f"{stem}.tsv", header, rows)]

    cells = [c for c in report.cells if c.curve is not None]
    if not cells:
        raise CurveError(f"report for {report.method} has no per-iteration history")
    paths = []
    for c in cells:
        tag = "_".join(f"{k}{v:g}" for k, v in c.params.items())
        cols = [c.curve["train_lp"], c.curve["train_l2"], c.curve["test_l2"]]
        rows = [[i + 1, *vals] for i, vals in enumerate(zip(*cols))]
        paths.append(_write(out / f"{stem}_{tag}.tsv", ["iteration", "train_lp", "train_l2", "test_l2"], rows))
    return paths
