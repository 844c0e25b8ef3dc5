"""Experiment configuration and its flat ``key = value`` file format.

Lists are comma separated; ``#`` starts a comment.  Example::

    alpha = 1.5
    beta = 0.75
    n = 100000
    paths = 2000
    grid = 0.25, 0.5, 0.75, 1.0
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..errors import ParameterError

EXPERIMENTS = ("marginal", "fidi", "hitting", "selfsim", "maxinc", "timechange", "vnseq", "rates")

_DEFAULTS = {
    "marginal": dict(alpha=1.5, beta=0.75, n=10**5, paths=2000, grid=(0.25, 0.5, 0.75, 1.0)),
    "fidi": dict(alpha=1.5, beta=0.75, n=10**5, paths=2000, grid=(0.25, 0.5, 0.75, 1.0)),
    "hitting": dict(alpha=1.5, beta=0.75, n=10**5, paths=10**4, grid=()),
    "selfsim": dict(alpha=1.5, beta=0.75, n=1, paths=10**5, grid=(0.5,), scales=(0.5, 2.0)),
    "maxinc": dict(alpha=1.0, beta=0.75, n=1, paths=10**5, grid=(0.5, 1.0), lags=(0.5, 0.25)),
    "timechange": dict(alpha=1.5, beta=0.75, n=1, paths=10**5, grid=(0.3, 1.0)),
    "vnseq": dict(alpha=1.0, beta=0.75, n=10, paths=10**4, grid=()),
    "rates": dict(alpha=1.5, beta=0.75, n=10**6, paths=100, grid=()),
}

_TUPLE_FIELDS = {"grid", "thresholds", "scales", "lags"}
_INT_FIELDS = {"n", "paths", "master_seed", "truncation_J", "workers"}
_FLOAT_FIELDS = {"alpha", "beta", "level"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    alpha: float = 1.5
    beta: float = 0.75
    n: int = 10**5
    paths: int = 2000
    grid: tuple = ()
    thresholds: tuple = ()
    master_seed: int = 20240601
    truncation_J: int = 1000
    output_dir: str = "runs"
    workers: int = 1
    level: float = 0.05
    scales: tuple = (0.5, 2.0)
    lags: tuple = (0.5, 0.25)

    def __post_init__(self):
        validate(self)

    def to_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}


def validate(cfg: ExperimentConfig):
    if cfg.experiment_id not in EXPERIMENTS:
        raise ParameterError(
            f"unknown experiment_id {cfg.experiment_id!r}; expected one of {', '.join(EXPERIMENTS)}"
        )
    if cfg.paths < 100:
        raise ParameterError(f"paths must be at least 100, got {cfg.paths}")
    if not 0 < cfg.alpha < 2:
        raise ParameterError(f"alpha must lie in (0, 2), got {cfg.alpha}")
    if not 0.5 < cfg.beta <= 1.0:
        raise ParameterError(f"beta must lie in (1/2, 1], got {cfg.beta}")
    if cfg.experiment_id in ("marginal", "fidi", "hitting", "rates") and not cfg.beta < 1.0:
        raise ParameterError("the ladder chain needs beta < 1")
    if cfg.n < 1 or cfg.truncation_J < 1 or cfg.workers < 1:
        raise ParameterError("n, truncation_J and workers must be positive")
    if not 0 < cfg.level < 1:
        raise ParameterError(f"level must lie in (0, 1), got {cfg.level}")
    g = cfg.grid
    if any(t <= 0 for t in g) or any(b <= a for a, b in zip(g, g[1:])):
        raise ParameterError(f"grid must be positive and strictly increasing: {g}")
    if cfg.thresholds and any(x <= 0 for x in cfg.thresholds):
        raise ParameterError("thresholds must be positive")


def default_config(experiment_id: str, **overrides) -> ExperimentConfig:
    if experiment_id not in _DEFAULTS:
        raise ParameterError(f"unknown experiment_id {experiment_id!r}")
    values = {**_DEFAULTS[experiment_id], **overrides}
    return ExperimentConfig(experiment_id=experiment_id, **values)


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _TUPLE_FIELDS:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    if key in _INT_FIELDS:
        return int(float(raw)) if "e" in raw.lower() else int(raw)
    if key in _FLOAT_FIELDS:
        return float(raw)
    return raw


def parse_config_text(text: str) -> dict:
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ParameterError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise ParameterError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path, experiment_id: str, **overrides) -> ExperimentConfig:
    values = parse_config_text(Path(path).read_text()) if path is not None else {}
    file_id = values.pop("experiment_id", experiment_id)
    if file_id != experiment_id:
        raise ParameterError(f"config is for {file_id!r}, not {experiment_id!r}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return default_config(experiment_id, **values)


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
