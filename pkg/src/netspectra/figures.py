"""Plot-ready CSV tables for each figure of the experiment suite.

==========  ===============================================================
figure      columns
==========  ===============================================================
fig1        series (er, ba, ba_original), degree, probability
fig2        model, k_ave, k_min_sq_mean/std, k_ave_actual_mean/std, trials
fig3, fig4  k_ave, bin, theta, f_N, P, rho_N (ER / cut-BA; trial means)
fig5        model, weights, k_ave, eps_mean, eps_std, trials
fig6        r, m_tilde
fig7        model, weights, k_ave, eps_m_mean, eps_m_std, trials
==========  ===============================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .generators import MODELS, WEIGHT_KINDS, attachment_count, cut_links, degree_histogram, gen_ba, gen_er, make_rng
from .harness import DEFAULT_K_GRID, ExperimentConfig, format_value, run_sweep, write_meta
from .spectral import SemicircleFit, bin_probability, semicircle_density
from .walk import m_tilde

__all__ = ["FIGURE_COLUMNS", "FigureData", "default_k_values", "sweep_grid", "compute_figure", "emit_figure_data"]

FIGURE_COLUMNS = {
    "fig1": ("series", "degree", "probability"),
    "fig2": ("model", "k_ave", "k_min_sq_mean", "k_min_sq_std", "k_ave_actual_mean", "k_ave_actual_std", "trials"),
    "fig3": ("k_ave", "bin", "theta", "f_N", "P", "rho_N"),
    "fig4": ("k_ave", "bin", "theta", "f_N", "P", "rho_N"),
    "fig5": ("model", "weights", "k_ave", "eps_mean", "eps_std", "trials"),
    "fig6": ("r", "m_tilde"),
    "fig7": ("model", "weights", "k_ave", "eps_m_mean", "eps_m_std", "trials"),
}

_DEFAULT_K = {"fig1": (20,), "fig3": (8, 36), "fig4": (8, 36)}


@dataclass
class FigureData:
    figure: str
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)


def default_k_values(figure: str) -> tuple:
    _check_figure(figure)
    return _DEFAULT_K.get(figure, DEFAULT_K_GRID)


def _check_figure(figure):
    if figure not in FIGURE_COLUMNS:
        raise ConfigError(f"unknown figure {figure!r}; choose from {sorted(FIGURE_COLUMNS)}")


def sweep_grid(config: ExperimentConfig, models=MODELS, weights=WEIGHT_KINDS, jobs: int = 1,
               keep_histogram: bool = False) -> dict:
    """Run the sweep for every (model, weight distribution) pair."""
    out = {}
    for model in models:
        for w in weights:
            cfg = replace(config, model=model, weights=w)
            out[(model, w)] = run_sweep(cfg, jobs=jobs, keep_histogram=keep_histogram)
    return out


def _hist_rows(sweep_rows, mode):
    rows = []
    for row in sweep_rows:
        theta = np.mean([t.histogram.theta for t in row.trials], axis=0)
        f = np.mean([t.histogram.f for t in row.trials], axis=0)
        p = np.mean([bin_probability(t.histogram.theta, t.histogram.h_b, SemicircleFit(t.r, mode))
                     for t in row.trials], axis=0)
        rho = np.mean([semicircle_density(t.histogram.theta, SemicircleFit(t.r, mode)) for t in row.trials], axis=0)
        for b in range(theta.size):
            rows.append((row.k_ave, b, theta[b], f[b], p[b], rho[b]))
    return rows


def compute_figure(figure: str, config: ExperimentConfig, jobs: int = 1, grid: dict | None = None) -> FigureData:
    """Compute the table for ``figure``; ``grid`` may carry a precomputed
    :func:`sweep_grid` result for fig5/fig7."""
    _check_figure(figure)
    meta = {"figure": figure}
    if figure == "fig1":
        k = config.k_ave[0]
        rng = make_rng(config.seed)
        er = gen_er(config.n, k, rng)
        orig = gen_ba(config.n, attachment_count(k, config.q), rng)
        ba = cut_links(orig, config.q, rng)
        rows = [(name, deg, p) for name, g in (("er", er), ("ba", ba), ("ba_original", orig))
                for deg, p in degree_histogram(g)]
        meta.update(er_mean_degree=float(er.links.mean()), ba_mean_degree=float(ba.links.mean()),
                    ba_original_mean_degree=float(orig.links.mean()))
    elif figure == "fig2":
        rows = []
        for model in MODELS:
            for r in run_sweep(replace(config, model=model), jobs=jobs):
                rows.append((model, r.k_ave, r.mean["k_min_sq"], r.std["k_min_sq"], r.mean["k_ave"], r.std["k_ave"],
                             r.count))
    elif figure in ("fig3", "fig4"):
        model = "er" if figure == "fig3" else "ba"
        sweep = run_sweep(replace(config, model=model), jobs=jobs, keep_histogram=True)
        rows = _hist_rows(sweep, config.r_mode)
        meta["model"] = model
    elif figure == "fig6":
        rs = np.concatenate([[1e-4, 1e-3], np.round(np.linspace(0.01, 0.99, 99), 10), 1.0 - 10.0 ** -np.arange(3, 7)])
        rows = [(r, m_tilde(config.n, r)) for r in rs]
        meta.update(lower_bound=config.n - 1, upper_bound=2 * (config.n - 1))
    else:
        if grid is None:
            grid = sweep_grid(config, jobs=jobs)
        metric = "eps" if figure == "fig5" else "eps_m"
        rows = [(model, w, r.k_ave, r.mean[metric], r.std[metric], r.count)
                for (model, w), sweep in grid.items() for r in sweep]
    return FigureData(figure, FIGURE_COLUMNS[figure], rows, meta)


def emit_figure_data(figure: str, data: FigureData, fh, config: ExperimentConfig | None = None) -> None:
    """Write ``data`` as CSV to the open text stream ``fh``."""
    _check_figure(figure)
    if data.figure != figure or tuple(data.columns) != FIGURE_COLUMNS[figure]:
        raise ConfigError(f"data for {data.figure} with columns {data.columns} does not match {figure} schema")
    width = len(data.columns)
    for row in data.rows:
        if len(row) != width:
            raise ConfigError(f"{figure} row {row!r} has {len(row)} fields, expected {width}")
    meta = config.header_meta() if config is not None else {}
    meta.update(data.meta)
    write_meta(fh, meta)
    fh.write(",".join(data.columns) + "\n")
    for row in data.rows:
        fh.write(",".join(format_value(v) for v in row) + "\n")
