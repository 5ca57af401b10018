"""Weighted undirected graphs, degree statistics and edge-list I/O."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EdgeListError, GraphError

__all__ = [
    "WeightedGraph",
    "DegreeStats",
    "volume",
    "degree_stats",
    "is_connected",
    "read_edge_list",
    "write_edge_list",
]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected simple graph on nodes ``0..n-1`` with positive link weights.

    Each undirected link is stored once as ``(src[e], dst[e], weight[e])``
    with ``src < dst``; links are kept in lexicographic order so two graphs
    with the same edge set have identical arrays.  The instance and its
    arrays are read-only.

    Parameters
    ----------
    n : int
        Number of nodes.
    src, dst : array_like of int
        Endpoints of each link.  Order within a pair does not matter.
    weight : array_like of float, optional
        Link weights, all ``> 0``.  Defaults to 1 for every link.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray = None
    degree: np.ndarray = field(init=False, repr=False)
    links: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise GraphError(f"node count must be positive, got {n}")
        src = np.asarray(self.src, dtype=np.int64).ravel()
        dst = np.asarray(self.dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise GraphError("src and dst must have the same length")
        if self.weight is None:
            w = np.ones(src.shape, dtype=float)
        else:
            w = np.asarray(self.weight, dtype=float).ravel()
            if w.shape != src.shape:
                raise GraphError("weight must have one entry per link")
        if src.size:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphError(f"node ids out of range [0, {n})")
            if np.any(src == dst):
                e = int(np.flatnonzero(src == dst)[0])
                raise GraphError(f"self-loop at node {src[e]}")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise GraphError("link weights must be finite and positive")
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if dup.any():
                e = int(np.flatnonzero(dup)[0])
                raise GraphError(f"duplicate link ({lo[e]}, {hi[e]})")
        deg = np.bincount(lo, weights=w, minlength=n) + np.bincount(hi, weights=w, minlength=n)
        cnt = np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "src", _frozen(lo))
        object.__setattr__(self, "dst", _frozen(hi))
        object.__setattr__(self, "weight", _frozen(w))
        object.__setattr__(self, "degree", _frozen(deg.astype(float)))
        object.__setattr__(self, "links", _frozen(cnt.astype(np.int64)))

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    @property
    def is_unweighted(self) -> bool:
        return bool(np.all(self.weight == 1.0))

    def edges(self):
        """Iterate over ``(i, j, w)`` triples with ``i < j``."""
        for i, j, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield i, j, w

    def adjacency(self) -> np.ndarray:
        """Dense symmetric weighted adjacency matrix."""
        a = np.zeros((self.n, self.n))
        a[self.src, self.dst] = self.weight
        a[self.dst, self.src] = self.weight
        return a

    def sparse_adjacency(self):
        """Symmetric adjacency as a ``scipy.sparse`` CSR matrix."""
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        vals = np.concatenate([self.weight, self.weight])
        return coo_matrix((vals, (rows, cols)), shape=(self.n, self.n)).tocsr()

    def with_weights(self, weight) -> "WeightedGraph":
        """Same topology with new link weights (in stored link order)."""
        return WeightedGraph(self.n, self.src, self.dst, weight)

    def scaled(self, c: float) -> "WeightedGraph":
        return self.with_weights(self.weight * float(c))

    def same_as(self, other: "WeightedGraph") -> bool:
        """Exact equality of node count, edge set and weights."""
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )


@dataclass(frozen=True)
class DegreeStats:
    k_min: int
    k_ave: float
    d_min: float
    d_ave: float

    @property
    def ratio(self) -> float:
        """``k_min**2 / k_ave``; the degree condition asks for ratio >> 1."""
        return self.k_min**2 / self.k_ave if self.k_ave > 0 else 0.0

    @property
    def weighted_ratio(self) -> float:
        return self.d_min**2 / self.d_ave if self.d_ave > 0 else 0.0


def volume(g: WeightedGraph) -> float:
    """Sum of weighted degrees, i.e. twice the total link weight."""
    return float(g.degree.sum())


def degree_stats(g: WeightedGraph) -> DegreeStats:
    return DegreeStats(
        k_min=int(g.links.min()),
        k_ave=float(g.links.sum()) / g.n,
        d_min=float(g.degree.min()),
        d_ave=float(g.degree.sum()) / g.n,
    )


def is_connected(g: WeightedGraph) -> bool:
    if g.n == 1:
        return True
    if g.num_edges < g.n - 1:
        return False
    ncomp, _ = connected_components(g.sparse_adjacency(), directed=False)
    return ncomp == 1


def read_edge_list(path, n: int | None = None) -> WeightedGraph:
    """Parse an ``i j w`` edge list.

    Blank lines and lines starting with ``#`` are ignored.  An optional
    ``n <int>`` line before the first edge declares the node count;
    otherwise ``n`` is taken from the argument or inferred as the largest
    id plus one.  A missing weight column means weight 1.
    """
    declared = None
    src, dst, w = [], [], []
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "n":
                if declared is not None or src:
                    raise EdgeListError("node-count header must precede all edges", lineno)
                if len(parts) != 2:
                    raise EdgeListError(f"malformed header {line!r}", lineno)
                try:
                    declared = int(parts[1])
                except ValueError:
                    raise EdgeListError(f"malformed node count {parts[1]!r}", lineno) from None
                if declared < 1:
                    raise EdgeListError("node count must be positive", lineno)
                continue
            if len(parts) not in (2, 3):
                raise EdgeListError(f"expected 'i j w', got {line!r}", lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
                wij = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise EdgeListError(f"cannot parse {line!r}", lineno) from None
            if i < 0 or j < 0:
                raise EdgeListError("node ids must be non-negative", lineno)
            if i == j:
                raise EdgeListError(f"self-loop at node {i}", lineno)
            if not np.isfinite(wij) or wij <= 0:
                raise EdgeListError(f"weight must be positive, got {parts[2]}", lineno)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise EdgeListError(f"duplicate link {key}", lineno)
            seen.add(key)
            src.append(i)
            dst.append(j)
            w.append(wij)
    if declared is not None and n is not None and declared != n:
        raise EdgeListError(f"file declares n={declared} but n={n} was requested")
    size = declared if declared is not None else n
    top = max(max(src), max(dst)) + 1 if src else 1
    if size is None:
        size = top
    elif top > size:
        raise EdgeListError(f"node id {top - 1} out of range for n={size}")
    return WeightedGraph(size, src, dst, w)


def write_edge_list(g: WeightedGraph, path, header: bool = True, meta: dict | None = None) -> None:
    """Write ``g`` as an edge list to a path or open text stream.

    Weights use the shortest round-trip ``repr``, so reading the file back
    reproduces them exactly.  ``meta`` items become leading ``# key=value``
    comment rows.
    """
    if hasattr(path, "write"):
        _write_edges(g, path, header, meta)
    else:
        with Path(path).open("w") as fh:
            _write_edges(g, fh, header, meta)


def _write_edges(g, fh, header, meta):
    for k, v in (meta or {}).items():
        fh.write(f"# {k}={v}\n")
    if header:
        fh.write(f"n {g.n}\n")
    for i, j, w in g.edges():
        fh.write(f"{i} {j} {w!r}\n")
