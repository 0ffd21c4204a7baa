"""Experiment configuration: defaults, key=value files and overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    pass


METHODS = ("LR", "RBF", "GMM", "PGMM", "LPBOOST")


def _decades(lo, hi):
    return tuple(10.0**k for k in range(lo, hi + 1))


DEFAULT_LAMBDAS = _decades(-6, 2)
DEFAULT_GAMMAS = tuple(2.0**k for k in range(-8, 9, 2))
DEFAULT_PGMM_P = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0)
DEFAULT_BOOST_P = (1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0, 10.0)
DEFAULT_J = (6, 10, 20)
DEFAULT_NU = (0.06, 0.1, 0.2)


@dataclass
class ExperimentConfig:
    method: str = "PGMM"
    data: str | None = None
    dataset: str | None = None  # name from the benchmark registry
    data_dir: str | None = None
    target: str = "-1"
    has_header: bool = True
    delimiter: str | None = ","
    drop: tuple = ()
    lambdas: tuple = DEFAULT_LAMBDAS
    gammas: tuple = DEFAULT_GAMMAS
    ps: tuple | None = None  # None -> the method's default p grid
    Js: tuple = DEFAULT_J
    nus: tuple = DEFAULT_NU
    M: int = 10000
    epsilon: float = 1e-5
    min_leaf: int = 1
    max_bins: int = 255
    intercept: bool = True
    seed: int = 0
    train_count: int | None = None  # None -> ceil(n / 2)
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        self.method = str(self.method).upper()
        self.validate()

    @property
    def p_grid(self) -> tuple:
        if self.ps is not None:
            return tuple(self.ps)
        return DEFAULT_BOOST_P if self.method == "LPBOOST" else DEFAULT_PGMM_P

    def validate(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        need = {
            "LR": ("lambdas",),
            "RBF": ("lambdas", "gammas"),
            "GMM": ("lambdas",),
            "PGMM": ("lambdas", "p_grid"),
            "LPBOOST": ("p_grid", "Js", "nus"),
        }[self.method]
        for name in need:
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"grid {name!r} is empty for method {self.method}")
        if any(lam < 0 for lam in self.lambdas):
            raise ConfigError("lambda values must be nonnegative")
        if self.method == "RBF" and any(g <= 0 for g in self.gammas):
            raise ConfigError("gamma values must be positive")
        if self.method == "PGMM" and any(p <= 0 for p in self.p_grid):
            raise ConfigError("pGMM p values must be positive")
        if self.method == "LPBOOST":
            if any(p < 1 for p in self.p_grid):
                raise ConfigError("Lp boosting needs p >= 1")
            if any(j < 2 for j in self.Js):
                raise ConfigError("J values must be >= 2")
            if any(not 0 < nu <= 1 for nu in self.nus):
                raise ConfigError("nu values must lie in (0, 1]")
            if self.M < 1:
                raise ConfigError("M must be >= 1")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.data is None and self.dataset is None:
            raise ConfigError("either a data path or a registered dataset name is required")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["p_grid"] = list(self.p_grid)
        return d


# config-file / flag key -> (field name, parser)
def _floats(s):
    return tuple(float(v) for v in str(s).split(",") if v.strip())


def _ints(s):
    return tuple(int(v) for v in str(s).split(",") if v.strip())


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _delim(s):
    s = str(s)
    return {"whitespace": None, "tab": "\t", "comma": ","}.get(s.strip().lower(), s)


KEYS = {
    "method": ("method", str),
    "data": ("data", str),
    "dataset": ("dataset", str),
    "data_dir": ("data_dir", str),
    "target": ("target", str),
    "header": ("has_header", _bool),
    "delimiter": ("delimiter", _delim),
    "drop": ("drop", lambda s: tuple(c.strip() for c in str(s).split(",") if c.strip())),
    "lambda": ("lambdas", _floats),
    "gamma": ("gammas", _floats),
    "p": ("ps", _floats),
    "J": ("Js", _ints),
    "nu": ("nus", _floats),
    "M": ("M", int),
    "epsilon": ("epsilon", float),
    "min_leaf": ("min_leaf", int),
    "max_bins": ("max_bins", int),
    "intercept": ("intercept", _bool),
    "seed": ("seed", int),
    "train_count": ("train_count", int),
    "out": ("out", str),
    "workers": ("workers", int),
}


def parse_settings(items: dict) -> dict:
    """Map raw ``key -> string`` settings onto typed config fields."""
    fields = {}
    for key, raw in items.items():
        norm = key.strip().replace("-", "_")
        spec = KEYS.get(norm) or KEYS.get(norm.lower())
        if spec is None:
            raise ConfigError(f"unknown configuration key {key!r}")
        name, parse = spec
        try:
            fields[name] = parse(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None
    return fields


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    items = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        items[key.strip()] = value.strip()
    return parse_settings(items)


def build_config(file_path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Defaults, then the config file, then ``overrides`` (already typed)."""
    fields = {}
    if file_path is not None:
        fields.update(read_config_file(file_path))
    fields.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig(**fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
