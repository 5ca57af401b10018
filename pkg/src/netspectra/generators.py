"""Random network generation: ER, preferential attachment with random link
cutting, and random link weights.

All randomness flows through :func:`make_rng`, a PCG64 bit generator
(O'Neill 2014, the numpy default) seeded from a non-negative 64-bit integer.
Outputs are a deterministic function of the seed on every platform that
ships numpy >= 1.17.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GenerationError, GraphError, NumericError
from .graph import WeightedGraph, is_connected

__all__ = [
    "make_rng",
    "WeightDistribution",
    "GenConfig",
    "attachment_count",
    "gen_er",
    "gen_ba",
    "cut_links",
    "gen_ba_cut",
    "assign_weights",
    "generate_connected",
    "degree_histogram",
    "tail_exponent",
]

MODELS = ("er", "ba")
WEIGHT_KINDS = ("constant", "uniform", "exponential")
_SEED_MAX = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed <= _SEED_MAX:
        raise ConfigError(f"seed must be in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class WeightDistribution:
    """Link-weight law with mean ``mean``.

    ``constant`` gives exactly ``mean``; ``uniform`` draws from
    ``[mean/2, 3*mean/2]``; ``exponential`` has rate ``1/mean``.
    """

    kind: str = "uniform"
    mean: float = 1.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ConfigError(f"unknown weight distribution {self.kind!r}; choose from {WEIGHT_KINDS}")
        if not (math.isfinite(self.mean) and self.mean > 0):
            raise ConfigError(f"mean weight must be positive, got {self.mean}")

    @property
    def variance(self) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "uniform":
            return self.mean**2 / 12.0
        return self.mean**2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(size, float(self.mean))
        if self.kind == "uniform":
            return rng.uniform(0.5 * self.mean, 1.5 * self.mean, size)
        w = rng.exponential(self.mean, size)
        zero = w <= 0.0
        while zero.any():
            w[zero] = rng.exponential(self.mean, int(zero.sum()))
            zero = w <= 0.0
        return w


@dataclass(frozen=True)
class GenConfig:
    model: str = "er"
    n: int = 1000
    k_ave: float = 20.0
    q: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if self.k_ave < 1:
            raise ConfigError(f"k_ave must be at least 1, got {self.k_ave}")
        if self.model == "er" and self.k_ave > self.n - 1:
            raise ConfigError(f"k_ave={self.k_ave} exceeds n-1={self.n - 1}")
        if self.model == "ba":
            if not 0 <= self.q < 1:
                raise ConfigError(f"cut probability q must be in [0, 1), got {self.q}")
            na = attachment_count(self.k_ave, self.q)
            if na >= self.n:
                raise ConfigError(f"attachment count {na} must be below n={self.n}")

    def build(self, rng: np.random.Generator) -> WeightedGraph:
        """One unweighted topology draw (no connectivity check)."""
        if self.model == "er":
            return gen_er(self.n, self.k_ave, rng)
        return gen_ba_cut(self.n, self.k_ave, self.q, rng)


def attachment_count(k_ave: float, q: float) -> int:
    """Links added per new node so the cut network keeps mean degree ``k_ave``.

    Preferential attachment gives a mean degree of about ``2 * n_a``; cutting
    links with probability ``q`` scales it by ``1 - q``.
    """
    x = k_ave / (2.0 * (1.0 - q))
    na = int(math.floor(x + 0.5))
    if na < 1:
        raise ConfigError(f"k_ave={k_ave}, q={q} give attachment count {na} < 1")
    return na


def gen_er(n: int, k_ave: float, rng: np.random.Generator) -> WeightedGraph:
    """Erdos-Renyi graph with link probability ``k_ave / (n - 1)``."""
    if n < 2:
        raise ConfigError(f"n must be at least 2, got {n}")
    p = k_ave / (n - 1)
    if not 0 < p <= 1:
        raise ConfigError(f"link probability {p} outside (0, 1]")
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return WeightedGraph(n, iu[keep], ju[keep])


def gen_ba(n: int, n_a: int, rng: np.random.Generator) -> WeightedGraph:
    """Barabasi-Albert graph seeded with a complete graph on ``n_a`` nodes.

    Each new node attaches to ``n_a`` distinct existing nodes drawn with
    probability proportional to their current degree; repeated draws for
    the same node are discarded and redrawn.
    """
    if n_a < 1 or n_a >= n:
        raise ConfigError(f"attachment count must be in [1, n), got {n_a}")
    n0 = n_a
    m_total = n0 * (n0 - 1) // 2 + n_a * (n - n0)
    src = np.empty(m_total, dtype=np.int64)
    dst = np.empty(m_total, dtype=np.int64)
    # every link contributes both endpoints, so a uniform draw from this
    # pool is a degree-proportional node draw
    pool = np.empty(2 * m_total, dtype=np.int64)
    m = 0
    for i in range(n0):
        for j in range(i + 1, n0):
            src[m], dst[m] = i, j
            pool[2 * m], pool[2 * m + 1] = i, j
            m += 1
    for v in range(n0, n):
        size = 2 * m
        chosen: list[int] = []
        if size == 0:
            chosen = list(range(v))[:n_a]
        else:
            picked = set()
            while len(chosen) < n_a:
                t = int(pool[rng.integers(size)])
                if t not in picked:
                    picked.add(t)
                    chosen.append(t)
        for t in chosen:
            src[m], dst[m] = t, v
            pool[2 * m], pool[2 * m + 1] = t, v
            m += 1
    return WeightedGraph(n, src, dst)


def cut_links(g: WeightedGraph, q: float, rng: np.random.Generator) -> WeightedGraph:
    """Delete each link independently with probability ``q``."""
    if not 0 <= q < 1:
        raise ConfigError(f"cut probability q must be in [0, 1), got {q}")
    keep = rng.random(g.num_edges) >= q
    return WeightedGraph(g.n, g.src[keep], g.dst[keep], g.weight[keep])


def gen_ba_cut(n: int, k_ave: float, q: float, rng: np.random.Generator) -> WeightedGraph:
    """Preferential-attachment graph thinned by random link cutting."""
    if not 0 <= q < 1:
        raise ConfigError(f"cut probability q must be in [0, 1), got {q}")
    na = attachment_count(k_ave, q)
    if na >= n:
        raise ConfigError(f"attachment count {na} must be below n={n}")
    g = gen_ba(n, na, rng)
    if q == 0:
        return g
    return cut_links(g, q, rng)


def assign_weights(g: WeightedGraph, dist: WeightDistribution, rng: np.random.Generator) -> WeightedGraph:
    """Draw one independent weight per undirected link."""
    if not g.is_unweighted:
        raise GraphError("assign_weights expects an unweighted graph")
    return g.with_weights(dist.sample(rng, g.num_edges))


def generate_connected(config: GenConfig, dist: WeightDistribution, rng: np.random.Generator,
                       max_attempts: int = 1000):
    """Draw weighted networks from ``rng`` until one is connected.

    Returns
    -------
    graph : WeightedGraph
    rejections : int
        Number of discarded disconnected topologies.
    """
    for attempt in range(max_attempts):
        g = config.build(rng)
        if is_connected(g):
            return assign_weights(g, dist, rng), attempt
    raise GenerationError(
        f"no connected {config.model} network (n={config.n}, k_ave={config.k_ave}) "
        f"in {max_attempts} attempts"
    )


def degree_histogram(g: WeightedGraph) -> list[tuple[int, float]]:
    """Empirical link-count distribution as sorted ``(degree, probability)`` pairs."""
    vals, counts = np.unique(g.links, return_counts=True)
    return [(int(k), c / g.n) for k, c in zip(vals.tolist(), counts.tolist())]


def tail_exponent(hist, k_low: float, method: str = "ccdf") -> float:
    """Power-law exponent of the degree distribution over ``k >= k_low``.

    With ``method="ccdf"`` (default) the least-squares slope ``s`` of
    ``log P(K >= k)`` against ``log k`` is fitted and ``s - 1`` is returned,
    the exponent of the density.  ``method="pdf"`` fits ``log P(k)``
    directly; on finite samples it is pulled toward zero by the run of
    single-count degrees in the tail.
    """
    if k_low < 1:
        raise ConfigError(f"k_low must be at least 1, got {k_low}")
    ks = np.array([k for k, _ in hist], dtype=float)
    ps = np.array([p for _, p in hist], dtype=float)
    sel = (ks >= k_low) & (ps > 0)
    if sel.sum() < 3:
        raise NumericError(f"need at least 3 distinct degrees >= {k_low}, have {int(sel.sum())}")
    if method == "pdf":
        x, y = np.log(ks[sel]), np.log(ps[sel])
        return float(np.polyfit(x, y, 1)[0])
    if method != "ccdf":
        raise ConfigError(f"unknown tail-fit method {method!r}")
    order = np.argsort(ks)
    ks, ps = ks[order], ps[order]
    ccdf = np.cumsum(ps[::-1])[::-1]
    sel = (ks >= k_low) & (ps > 0)
    slope = np.polyfit(np.log(ks[sel]), np.log(ccdf[sel]), 1)[0]
    return float(slope - 1.0)
