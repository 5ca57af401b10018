"""First-arrival times of the simple random walk on a weighted graph.

The walk moves from node ``i`` to neighbour ``j`` with probability
``w_ij / d_i`` (no lazy self-transition).  Hitting times are computed from
the normalized Laplacian spectrum, their stationary average ``m`` needs only
the eigenvalues, and ``m_tilde`` is its closed form under a semicircular
eigenvalue density.  :func:`mc_first_arrival` is an independent simulation
used to validate the spectral formula.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import CensoredEstimateError, ConfigError, DisconnectedGraphError, NumericError
from .graph import WeightedGraph, volume
from .spectral import SpectralDecomposition, fit_semicircle, spectrum

__all__ = [
    "ArrivalReport",
    "McEstimate",
    "transition_step",
    "stationary_distribution",
    "first_arrival_spectral",
    "first_arrival_from",
    "first_arrival_matrix",
    "mean_first_arrival",
    "m_tilde",
    "m_tilde_quadrature",
    "relative_error_m",
    "mc_first_arrival",
    "arrival_report",
    "write_arrival_csv",
    "write_summary_json",
]

GAP_TOL = 1e-9


def transition_step(g: WeightedGraph, x) -> np.ndarray:
    """Propagate a distribution one step: ``y_i = sum_j (w_ji / d_j) x_j``."""
    x = np.asarray(x, dtype=float)
    return g.sparse_adjacency() @ (x / g.degree)


def stationary_distribution(g: WeightedGraph) -> np.ndarray:
    return g.degree / volume(g)


def _check_gap(dec: SpectralDecomposition):
    if dec.n < 2 or dec.lambdas[1] <= GAP_TOL:
        gap = dec.lambdas[1] if dec.n > 1 else 0.0
        raise DisconnectedGraphError(f"spectral gap lambda_2={gap:.3g} <= {GAP_TOL}; graph is disconnected")


def first_arrival_matrix(dec: SpectralDecomposition, g: WeightedGraph) -> np.ndarray:
    """All expected hitting times; entry ``[a, i]`` is the time from ``a`` to ``i``."""
    _check_gap(dec)
    q = dec.vectors[:, 1:]
    inv = 1.0 / dec.lambdas[1:]
    d = g.degree
    self_term = (q * q) @ inv / d
    cross = (q * inv) @ q.T / np.sqrt(np.outer(d, d))
    return volume(g) * (self_term[None, :] - cross)


def first_arrival_from(dec: SpectralDecomposition, g: WeightedGraph, a: int) -> np.ndarray:
    _check_gap(dec)
    _check_node(g, a)
    q = dec.vectors[:, 1:]
    inv = 1.0 / dec.lambdas[1:]
    d = g.degree
    self_term = (q * q) @ inv / d
    cross = q @ (inv * q[a]) / np.sqrt(d[a] * d)
    return volume(g) * (self_term - cross)


def first_arrival_spectral(dec: SpectralDecomposition, g: WeightedGraph, a: int, i: int) -> float:
    """Expected number of steps for a walk started at ``a`` to first reach ``i``."""
    _check_gap(dec)
    _check_node(g, a)
    _check_node(g, i)
    inv = 1.0 / dec.lambdas[1:]
    qa = dec.vectors[a, 1:]
    qi = dec.vectors[i, 1:]
    da, di = g.degree[a], g.degree[i]
    return float(volume(g) * np.sum(inv * (qi * qi / di - qa * qi / math.sqrt(da * di))))


def _check_node(g, v):
    if not 0 <= v < g.n:
        raise ConfigError(f"node {v} out of range for n={g.n}")


def mean_first_arrival(dec: SpectralDecomposition) -> float:
    """Stationary-target average hitting time, ``sum_{l>=2} 1/lambda_l``."""
    _check_gap(dec)
    return float(np.sum(1.0 / dec.lambdas[1:]))


def m_tilde(n: int, r: float) -> float:
    """Closed-form average hitting time for a semicircle of radius ``r``.

    Evaluated as ``2(n-1) / (1 + sqrt(1 - r^2))``, algebraically equal to
    ``2(n-1)/r^2 * (1 - sqrt(1 - r^2))`` but free of cancellation at small r.
    """
    if n < 2:
        raise ConfigError(f"n must be at least 2, got {n}")
    if not 0 < r < 1:
        raise ConfigError(f"radius must lie in (0, 1), got {r}")
    return 2.0 * (n - 1) / (1.0 + math.sqrt(1.0 - r * r))


def m_tilde_quadrature(n: int, r: float, rel_tol: float = 1e-13) -> float:
    """``(n-1) * integral of rho(lam)/lam`` over the semicircle support, numerically.

    The square-root endpoint behaviour is absorbed into an algebraic
    quadrature weight, leaving the smooth factor ``1/lam`` to integrate.
    """
    if n < 2:
        raise ConfigError(f"n must be at least 2, got {n}")
    if not 0 < r < 1:
        raise ConfigError(f"radius must lie in (0, 1), got {r}")
    lo, hi = 1.0 - r, 1.0 + r
    val, err = integrate.quad(lambda lam: 1.0 / lam, lo, hi, weight="alg", wvar=(0.5, 0.5),
                              epsabs=0.0, epsrel=rel_tol, limit=200)
    if not math.isfinite(val) or err > 1e-9 * abs(val):
        raise NumericError(f"quadrature did not converge (estimate {val}, error {err})")
    return 2.0 * (n - 1) / (math.pi * r * r) * val


def relative_error_m(m: float, mt: float) -> float:
    if not m > 0:
        raise ConfigError(f"m must be positive, got {m}")
    return abs(mt - m) / m


@dataclass(frozen=True, eq=False)
class McEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    runs: int
    t_max: int


def default_t_max(n: int) -> int:
    return int(math.ceil(100 * n * math.log(max(n, 2))))


def mc_first_arrival(g: WeightedGraph, a: int, runs: int, rng: np.random.Generator,
                     t_max: int | None = None, batch: int = 20000) -> McEstimate:
    """Simulate ``runs`` walks from ``a`` and record first-visit steps per node.

    Walks advance together in batches of at most ``batch``; a walk is retired
    once it has visited every node.  Raises :class:`CensoredEstimateError` if
    any walk still has unvisited nodes after ``t_max`` steps.
    """
    _check_node(g, a)
    if runs < 1:
        raise ConfigError(f"runs must be at least 1, got {runs}")
    if t_max is None:
        t_max = default_t_max(g.n)
    adj = g.sparse_adjacency()
    adj.sort_indices()
    indptr, indices, data = adj.indptr, adj.indices, adj.data
    cum = np.cumsum(data)
    before = np.concatenate([[0.0], cum])[indptr[:-1]]
    first_node = indptr[:-1]
    last_node = indptr[1:] - 1
    if np.any(last_node < first_node):
        raise CensoredEstimateError(f"node {int(np.flatnonzero(last_node < first_node)[0])} is isolated")
    n = g.n
    total = np.zeros(n)
    total_sq = np.zeros(n)
    done = 0
    while done < runs:
        size = min(batch, runs - done)
        first = np.full((size, n), -1, dtype=np.int64)
        first[:, a] = 0
        remaining = np.full(size, n - 1, dtype=np.int64)
        walker = np.arange(size)
        pos = np.full(size, a, dtype=np.int64)
        t = 0
        while walker.size and t < t_max:
            t += 1
            u = rng.random(walker.size)
            target = before[pos] + u * g.degree[pos]
            k = np.searchsorted(cum, target, side="right")
            k = np.clip(k, first_node[pos], last_node[pos])
            pos = indices[k]
            new = first[walker, pos] < 0
            first[walker[new], pos[new]] = t
            remaining[walker[new]] -= 1
            alive = remaining[walker] > 0
            walker, pos = walker[alive], pos[alive]
        if walker.size:
            missing = int(np.flatnonzero(first[walker[0]] < 0)[0])
            raise CensoredEstimateError(
                f"{walker.size} walk(s) from node {a} never reached node {missing} within t_max={t_max}"
            )
        f = first.astype(float)
        total += f.sum(axis=0)
        total_sq += (f * f).sum(axis=0)
        done += size
    mean = total / runs
    if runs > 1:
        var = np.clip((total_sq - runs * mean * mean) / (runs - 1), 0.0, None)
        stderr = np.sqrt(var / runs)
    else:
        stderr = np.zeros(n)
    return McEstimate(mean=mean, stderr=stderr, runs=int(runs), t_max=int(t_max))


@dataclass(frozen=True, eq=False)
class ArrivalReport:
    source: int
    f: np.ndarray
    m: float
    m_tilde: float
    eps_m: float
    r: float
    mode: str
    lambda2: float
    lambdan: float
    mc: McEstimate | None = None


def arrival_report(g: WeightedGraph, source: int = 0, mode: str = "mean",
                   dec: SpectralDecomposition | None = None, mc_runs: int = 0,
                   rng: np.random.Generator | None = None) -> ArrivalReport:
    """Spectral hitting times from ``source`` plus ``m``, ``m_tilde`` and their error.

    With ``mc_runs > 0`` a Monte Carlo estimate (using ``rng``) is attached.
    """
    if dec is None:
        dec = spectrum(g)
    fit = fit_semicircle(dec, mode)
    m = mean_first_arrival(dec)
    mt = m_tilde(g.n, fit.r)
    mc = None
    if mc_runs:
        if rng is None:
            raise ConfigError("Monte Carlo estimate requested without an rng")
        mc = mc_first_arrival(g, source, mc_runs, rng)
    return ArrivalReport(
        source=int(source), f=first_arrival_from(dec, g, source), m=m, m_tilde=mt,
        eps_m=relative_error_m(m, mt), r=fit.r, mode=mode,
        lambda2=dec.lambda2, lambdan=dec.lambdan, mc=mc,
    )


def write_arrival_csv(report: ArrivalReport, path, meta: dict | None = None) -> None:
    """``node,f_spectral,mc_mean,mc_stderr``; MC columns empty when absent."""
    from .harness import format_value, open_text, write_meta

    with open_text(path) as fh:
        write_meta(fh, dict(meta or {}, source=report.source))
        fh.write("node,f_spectral,mc_mean,mc_stderr\n")
        for i, fi in enumerate(report.f):
            if report.mc is None:
                fh.write(f"{i},{format_value(fi)},,\n")
            else:
                fh.write(f"{i},{format_value(fi)},{format_value(report.mc.mean[i])},"
                         f"{format_value(report.mc.stderr[i])}\n")


def summary_dict(report: ArrivalReport) -> dict:
    return {
        "m": report.m, "m_tilde": report.m_tilde, "eps_m": report.eps_m, "r": report.r,
        "lambda2": report.lambda2, "lambdan": report.lambdan,
    }


def write_summary_json(report: ArrivalReport, path, meta: dict | None = None) -> None:
    from .harness import open_text

    doc = {"meta": dict(meta or {}), **summary_dict(report)}
    with open_text(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
