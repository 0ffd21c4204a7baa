"""Command-line interface: ``pgmmreg {fit,grid,predict,curves}``.

Failures exit nonzero after printing a single line to stderr of the form
``error: category=<name>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench.config import ConfigError, build_config, parse_settings
from .bench.curves import KINDS, CurveError, emit_curves
from .bench.experiment import MetricReport, fit_single, run_experiment
from .bench.persist import ModelFormatError, read_model_file, save_model
from .data import DataError, load_csv, read_matrix, scale_features
from .ridge import NotPositiveDefinite

EXIT_CODES = {"config": 2, "data": 3, "model": 4, "numeric": 5, "io": 6, "internal": 1}

# CLI flag -> config-file key
_FLAG_KEYS = {
    "method": "method", "data": "data", "dataset": "dataset", "data_dir": "data_dir",
    "target": "target", "delimiter": "delimiter", "drop": "drop",
    "lambda_": "lambda", "gamma": "gamma", "p": "p", "J": "J", "nu": "nu", "M": "M",
    "epsilon": "epsilon", "min_leaf": "min_leaf", "max_bins": "max_bins", "seed": "seed",
    "train_count": "train_count", "out": "out", "workers": "workers",
}


def _experiment_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key=value configuration file (flags win)")
    sp.add_argument("--data", help="CSV file with features and target")
    sp.add_argument("--dataset", help="registered benchmark name (ENBcool, ENBheat, Airfoil, CPUsmall)")
    sp.add_argument("--data-dir", help="directory holding benchmark files")
    sp.add_argument("--target", help="target column: header name or zero-based index (default: last)")
    sp.add_argument("--no-header", action="store_true", help="the file has no header row")
    sp.add_argument("--delimiter", help="field delimiter: ',', 'tab' or 'whitespace'")
    sp.add_argument("--drop", help="comma-separated columns to ignore")
    sp.add_argument("--method", help="LR, RBF, GMM, PGMM or LPBOOST")
    sp.add_argument("--lambda", dest="lambda_", help="comma-separated ridge penalties")
    sp.add_argument("--gamma", help="comma-separated RBF gammas")
    sp.add_argument("--p", help="comma-separated p values (pGMM power or Lp loss power)")
    sp.add_argument("--J", help="comma-separated leaves per tree")
    sp.add_argument("--nu", help="comma-separated shrinkage values")
    sp.add_argument("--M", help="maximum boosting iterations")
    sp.add_argument("--epsilon", help="early-stop tolerance")
    sp.add_argument("--min-leaf", help="minimum samples per tree leaf")
    sp.add_argument("--max-bins", help="histogram bins per feature")
    sp.add_argument("--seed", help="split seed")
    sp.add_argument("--train-count", help="training rows (default: half, rounded up)")
    sp.add_argument("--workers", help="parallel grid workers")
    sp.add_argument("--out", help="output directory")


def _config_from_args(args):
    raw = {key: getattr(args, attr) for attr, key in _FLAG_KEYS.items() if getattr(args, attr, None) is not None}
    overrides = parse_settings(raw)
    if args.no_header:
        overrides["has_header"] = False
    return build_config(args.config, overrides)


def _out_dir(config, default="results") -> Path:
    out = Path(config.out or default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(report: MetricReport, out: Path) -> None:
    report.save(out / "report.json")
    (out / "report.txt").write_text(report.format_table() + "\n")
    with open(out / "cells.jsonl", "w") as fh:
        for c in report.cells:
            rec = {"method": report.method, "dataset": report.dataset, **c.params,
                   "train_mse": c.train_mse, "test_mse": c.test_mse, **c.info}
            fh.write(json.dumps(rec) + "\n")


def cmd_fit(args) -> int:
    config = _config_from_args(args)
    model, report, split = fit_single(config)
    out = _out_dir(config)
    save_model(model, out / "model.json", scaling=split.scaling)
    _write_report(report, out)
    print(report.format_table())
    print(f"model written to {out / 'model.json'}")
    return 0


def cmd_grid(args) -> int:
    config = _config_from_args(args)
    report = run_experiment(config)
    out = _out_dir(config)
    _write_report(report, out)
    print(report.format_table())
    return 0


def cmd_curves(args) -> int:
    if args.report:
        report = MetricReport.load(args.report)
        out = Path(args.out or Path(args.report).parent)
    else:
        config = _config_from_args(args)
        report = run_experiment(config)
        out = _out_dir(config)
        _write_report(report, out)
    kinds = KINDS if args.kind == "all" else (args.kind,)
    written = []
    for kind in kinds:
        try:
            written += emit_curves(report, kind, out)
        except CurveError:
            if args.kind != "all":
                raise
    if not written:
        raise CurveError(f"report for {report.method} has no curve data")
    for path in written:
        print(path)
    return 0


def cmd_predict(args) -> int:
    model, scaling = read_model_file(args.model)
    delim = {"whitespace": None, "tab": "\t"}.get(args.delimiter, args.delimiter or ",")
    if args.target is not None:
        data = load_csv(args.data, args.target, has_header=not args.no_header, delimiter=delim)
        X, y = data.features, data.targets
    else:
        X, y = read_matrix(args.data, has_header=not args.no_header, delimiter=delim), None
    if scaling is not None:
        X = scale_features(X, scaling)
    pred = model.predict(X)
    lines = ["prediction" + (",target" if y is not None else "")]
    for i, v in enumerate(pred):
        lines.append(repr(float(v)) + (f",{y[i]!r}" if y is not None else ""))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if y is not None:
        print(f"test MSE {float(np.mean((y - pred) ** 2)):.6g}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgmmreg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit", help="fit one configuration and save the model")
    _experiment_flags(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("grid", help="evaluate the full parameter grid")
    _experiment_flags(sp)
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("curves", help="emit MSE curve tables")
    _experiment_flags(sp)
    sp.add_argument("--report", help="existing report.json (skips running the grid)")
    sp.add_argument("--kind", default="all", choices=KINDS + ("all",))
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("predict", help="predict with a saved model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--target", help="target column to exclude from the features (enables MSE)")
    sp.add_argument("--no-header", action="store_true")
    sp.add_argument("--delimiter")
    sp.add_argument("--out", help="predictions CSV (default: stdout)")
    sp.set_defaults(func=cmd_predict)
    return parser


def _category(exc: BaseException) -> str:
    if isinstance(exc, ConfigError):
        return "config"
    if isinstance(exc, DataError):
        return "data"
    if isinstance(exc, ModelFormatError):
        return "model"
    if isinstance(exc, (NotPositiveDefinite, FloatingPointError)):
        return "numeric"
    if isinstance(exc, CurveError):
        return "config"
    if isinstance(exc, OSError):
        return "io"
    if isinstance(exc, ValueError):
        return "config"
    return "internal"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one parseable line
        cat = _category(exc)
        msg = " ".join(str(exc).split())
        print(f"error: category={cat}: {msg}", file=sys.stderr)
        return EXIT_CODES[cat]


if __name__ == "__main__":
    sys.exit(main())
