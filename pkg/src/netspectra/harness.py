"""Experiment driver: repeated trials, k_ave sweeps and aggregation.

Every output file starts with ``# key=value`` metadata rows that echo the
full configuration, so :func:`config_from_header` can rebuild the run that
produced it.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import __version__
from .errors import ConfigError, NetSpectraError
from .generators import MODELS, WEIGHT_KINDS, GenConfig, WeightDistribution, generate_connected, make_rng
from .graph import degree_stats
from .spectral import (
    R_MODES, EigenHistogram, SemicircleFit, eigenvalue_histogram, fit_semicircle, semicircle_relative_error, spectrum,
)
from .walk import m_tilde, mean_first_arrival, relative_error_m

__all__ = [
    "ExperimentConfig",
    "TrialResult",
    "SweepRow",
    "METRICS",
    "DEFAULT_K_GRID",
    "run_trial",
    "run_sweep",
    "aggregate",
    "write_meta",
    "read_meta",
    "config_from_header",
    "format_value",
    "write_trials_csv",
    "write_sweep_csv",
    "sweep_to_json",
]

DEFAULT_K_GRID = (8, 12, 16, 20, 24, 28, 32, 36, 40)
FORMATS = ("csv", "json")

# config key -> (attribute, parser); keys mirror the CLI flags
_KEYS = {
    "model": ("model", str),
    "n": ("n", int),
    "k-ave": ("k_ave", None),
    "q": ("q", float),
    "weights": ("weights", str),
    "w-mean": ("w_mean", float),
    "n-h": ("n_h", int),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "r-mode": ("r_mode", str),
    "max-attempts": ("max_attempts", int),
    "out": ("out", str),
    "format": ("format", str),
}


def _parse_k_list(value) -> tuple[float, ...]:
    if isinstance(value, str):
        items = [v for v in value.replace(",", " ").split() if v]
    elif isinstance(value, (int, float)):
        items = [value]
    else:
        items = list(value)
    try:
        ks = tuple(_num(v) for v in items)
    except ValueError:
        raise ConfigError(f"cannot parse k-ave list {value!r}") from None
    if not ks:
        raise ConfigError("at least one k-ave value is required")
    return ks


def _num(v):
    x = float(v)
    return int(x) if x.is_integer() else x


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep parameters.  Defaults: n=1000, uniform weights with mean 1,
    50 histogram bins and 100 trials per point."""

    model: str = "er"
    n: int = 1000
    k_ave: tuple = (20,)
    q: float = 0.5
    weights: str = "uniform"
    w_mean: float = 1.0
    n_h: int = 50
    trials: int = 100
    seed: int = 0
    r_mode: str = "mean"
    max_attempts: int = 1000
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "k_ave", _parse_k_list(self.k_ave))
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.weights not in WEIGHT_KINDS:
            raise ConfigError(f"unknown weights {self.weights!r}; choose from {WEIGHT_KINDS}")
        if self.r_mode not in R_MODES:
            raise ConfigError(f"unknown r-mode {self.r_mode!r}; choose from {R_MODES}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; choose from {FORMATS}")
        if self.n < 3:
            raise ConfigError(f"n must be at least 3, got {self.n}")
        if self.n_h < 2:
            raise ConfigError(f"n-h must be at least 2, got {self.n_h}")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.max_attempts < 1:
            raise ConfigError("max-attempts must be at least 1")
        if not 0 <= self.q < 1:
            raise ConfigError(f"cut probability q must be in [0, 1), got {self.q}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        WeightDistribution(self.weights, self.w_mean)
        for k in self.k_ave:
            self.gen_config(k, 0)

    @property
    def distribution(self) -> WeightDistribution:
        return WeightDistribution(self.weights, self.w_mean)

    def gen_config(self, k_ave, trial_index: int) -> GenConfig:
        return GenConfig(model=self.model, n=self.n, k_ave=k_ave, q=self.q, seed=self.trial_seed(trial_index))

    def trial_seed(self, trial_index: int) -> int:
        return self.seed + int(trial_index)

    def to_mapping(self) -> dict:
        out = {}
        for key, (attr, _) in _KEYS.items():
            val = getattr(self, attr)
            if val is None:
                continue
            if attr == "k_ave":
                val = ",".join(format_value(k) for k in val)
            out[key] = val
        return out

    def header_meta(self) -> dict:
        """The mapping echoed into output headers; the output path is left
        out so identical runs give identical bytes wherever they are written."""
        meta = self.to_mapping()
        meta.pop("out", None)
        return meta

    def to_text(self) -> str:
        """Flat ``key = value`` text, the config-file format."""
        return "".join(f"{k} = {format_value(v)}\n" for k, v in self.to_mapping().items())

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        kwargs = {}
        for key, raw in mapping.items():
            norm = key.strip().replace("_", "-")
            if norm not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            attr, parse = _KEYS[norm]
            try:
                kwargs[attr] = parse(raw) if parse is not None and isinstance(raw, str) else raw
            except ValueError:
                raise ConfigError(f"bad value {raw!r} for {norm}") from None
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls.from_mapping(parse_kv_text(text))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())


def parse_kv_text(text: str) -> dict:
    """Parse ``key = value`` (or ``key value``) lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, val = line.split("=", 1)
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
            key, val = parts
        out[key.strip()] = val.strip()
    return out


def format_value(v) -> str:
    """Deterministic text form; floats use shortest round-trip repr."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


@contextlib.contextmanager
def open_text(target):
    """Yield ``target`` if it is a text stream, else open it for writing."""
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="") as fh:
            yield fh


def write_meta(fh, meta: dict) -> None:
    fh.write(f"# tool=netspectra\n# version={__version__}\n")
    for k, v in meta.items():
        fh.write(f"# {k}={format_value(v)}\n")


def read_meta(path_or_text) -> dict:
    """Collect leading ``# key=value`` rows from a file path or text."""
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        lines = path_or_text.splitlines()
    else:
        with open(path_or_text) as fh:
            lines = fh.read().splitlines()
    meta = {}
    for line in lines:
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" in body:
            k, v = body.split("=", 1)
            meta[k.strip()] = v.strip()
    return meta


def config_from_header(path_or_text) -> ExperimentConfig:
    meta = read_meta(path_or_text)
    return ExperimentConfig.from_mapping({k: v for k, v in meta.items() if k in _KEYS})


METRICS = ("k_min", "k_min_sq", "k_ave", "d_min", "d_ave", "lambda2", "lambdan", "r", "eps", "m", "m_tilde",
           "eps_m", "rejections")


@dataclass(frozen=True, eq=False)
class TrialResult:
    k_ave_requested: float
    trial: int
    seed: int
    rejections: int
    k_min: int
    k_ave: float
    d_min: float
    d_ave: float
    lambda2: float
    lambdan: float
    r: float
    eps: float
    m: float
    m_tilde: float
    eps_m: float
    histogram: EigenHistogram | None = field(default=None, repr=False)

    @property
    def k_min_sq(self) -> int:
        return self.k_min**2

    def metric(self, name: str) -> float:
        return float(getattr(self, name))

    def record(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "histogram"}
        d["k_min_sq"] = self.k_min_sq
        return d

    def same_as(self, other: "TrialResult") -> bool:
        return self.record() == other.record()


@dataclass(frozen=True, eq=False)
class SweepRow:
    k_ave: float
    trials: tuple
    mean: dict
    std: dict

    @property
    def count(self) -> int:
        return len(self.trials)


def aggregate(k_ave, trials) -> SweepRow:
    """Per-metric arithmetic mean and sample standard deviation (ddof=1)."""
    trials = tuple(trials)
    mean, std = {}, {}
    for name in METRICS:
        vals = np.array([t.metric(name) for t in trials], dtype=float)
        mean[name] = float(np.mean(vals))
        std[name] = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
    return SweepRow(k_ave=k_ave, trials=trials, mean=mean, std=std)


def run_trial(config: ExperimentConfig, trial_index: int, k_ave=None, keep_histogram: bool = False) -> TrialResult:
    """Generate one weighted network and measure its spectrum and hitting times.

    The RNG is seeded with ``config.seed + trial_index``; disconnected draws
    are discarded and redrawn from the same stream.
    """
    k = config.k_ave[0] if k_ave is None else k_ave
    gen = config.gen_config(k, trial_index)
    try:
        rng = make_rng(gen.seed)
        g, rejections = generate_connected(gen, config.distribution, rng, max_attempts=config.max_attempts)
        stats = degree_stats(g)
        dec = spectrum(g)
        hist = eigenvalue_histogram(dec, config.n_h)
        fit: SemicircleFit = fit_semicircle(dec, config.r_mode)
        eps = semicircle_relative_error(hist, fit)
        m = mean_first_arrival(dec)
        mt = m_tilde(g.n, fit.r)
    except NetSpectraError as exc:
        msg = f"trial {trial_index} (model={config.model}, k_ave={k}, seed={gen.seed}): {exc}"
        raise type(exc)(msg) from exc
    return TrialResult(
        k_ave_requested=k, trial=int(trial_index), seed=gen.seed, rejections=rejections,
        k_min=stats.k_min, k_ave=stats.k_ave, d_min=stats.d_min, d_ave=stats.d_ave,
        lambda2=dec.lambda2, lambdan=dec.lambdan, r=fit.r, eps=eps, m=m, m_tilde=mt,
        eps_m=relative_error_m(m, mt), histogram=hist if keep_histogram else None,
    )


def _trial_job(args):
    config, index, k, keep = args
    return run_trial(config, index, k, keep)


def run_sweep(config: ExperimentConfig, jobs: int = 1, keep_histogram: bool = False) -> list[SweepRow]:
    """Run ``config.trials`` trials at every requested ``k_ave``.

    With ``jobs > 1`` trials run in worker processes; results are collected
    in trial order, so aggregates do not depend on scheduling.
    """
    rows = []
    for k in config.k_ave:
        tasks = [(config, i, k, keep_histogram) for i in range(config.trials)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                trials = list(pool.map(_trial_job, tasks))
        else:
            trials = [_trial_job(t) for t in tasks]
        rows.append(aggregate(k, trials))
    return rows


TRIAL_COLUMNS = ("k_ave_requested", "trial", "seed", "rejections", "k_min", "k_min_sq", "k_ave", "d_min", "d_ave",
                 "lambda2", "lambdan", "r", "eps", "m", "m_tilde", "eps_m")


def sweep_columns() -> list[str]:
    cols = ["k_ave", "trials"]
    for name in METRICS:
        cols += [f"{name}_mean", f"{name}_std"]
    return cols


def _meta(config: ExperimentConfig, extra: dict | None) -> dict:
    meta = config.header_meta()
    meta.update(extra or {})
    return meta


def write_trials_csv(rows, fh, config: ExperimentConfig, extra_meta: dict | None = None) -> None:
    write_meta(fh, _meta(config, extra_meta))
    fh.write(",".join(TRIAL_COLUMNS) + "\n")
    for row in rows:
        for t in row.trials:
            rec = t.record()
            fh.write(",".join(format_value(rec[c]) for c in TRIAL_COLUMNS) + "\n")


def write_sweep_csv(rows, fh, config: ExperimentConfig, extra_meta: dict | None = None) -> None:
    write_meta(fh, _meta(config, extra_meta))
    fh.write(",".join(sweep_columns()) + "\n")
    for row in rows:
        vals = [format_value(row.k_ave), str(row.count)]
        for name in METRICS:
            vals += [format_value(row.mean[name]), format_value(row.std[name])]
        fh.write(",".join(vals) + "\n")


def sweep_to_json(rows, config: ExperimentConfig, extra_meta: dict | None = None) -> str:
    doc = {
        "meta": {"tool": "netspectra", "version": __version__, **_meta(config, extra_meta)},
        "rows": [
            {"k_ave": r.k_ave, "trials": r.count, "mean": r.mean, "std": r.std,
             "per_trial": [t.record() for t in r.trials]}
            for r in rows
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def sweep_csv_text(rows, config: ExperimentConfig, extra_meta: dict | None = None) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf, config, extra_meta)
    return buf.getvalue()
