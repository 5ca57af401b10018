"""Normalized Laplacian spectra and their comparison with the semicircle law."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateNodeError, DegenerateSpectrumError, NumericError
from .graph import WeightedGraph

__all__ = [
    "normalized_laplacian",
    "SpectralDecomposition",
    "eig_sym",
    "spectrum",
    "EigenHistogram",
    "eigenvalue_histogram",
    "SemicircleFit",
    "fit_semicircle",
    "semicircle_density",
    "semicircle_cdf",
    "bin_probability",
    "bin_probabilities",
    "semicircle_relative_error",
    "wigner_density",
    "write_histogram_csv",
]

R_MODES = ("low", "high", "mean", "max")


def normalized_laplacian(g: WeightedGraph) -> np.ndarray:
    """Dense ``D^{-1/2} (D - A) D^{-1/2}``.

    Off-diagonal entries are written pairwise from the same float, so the
    result is exactly symmetric.
    """
    d = g.degree
    if np.any(d <= 0):
        bad = int(np.flatnonzero(d <= 0)[0])
        raise DegenerateNodeError(f"node {bad} has zero degree")
    nmat = np.eye(g.n)
    vals = -g.weight / np.sqrt(d[g.src] * d[g.dst])
    nmat[g.src, g.dst] = vals
    nmat[g.dst, g.src] = vals
    return nmat


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and matching orthonormal eigenvectors (columns)."""

    lambdas: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.lambdas.size)

    @property
    def lambda2(self) -> float:
        return float(self.lambdas[1])

    @property
    def lambdan(self) -> float:
        return float(self.lambdas[-1])

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.lambdas) @ self.vectors.T

    def diagnostics(self, matrix: np.ndarray) -> dict:
        """Orthonormality and residual measures against ``matrix``.

        ``residual`` is ``max_l ||M q_l - lambda_l q_l|| / ||M||_2``.
        """
        q = self.vectors
        n = self.n
        ortho = np.abs(q.T @ q - np.eye(n)).max()
        res = np.linalg.norm(matrix @ q - q * self.lambdas, axis=0).max()
        scale = np.abs(self.lambdas).max() or 1.0
        return {
            "orthonormality": float(ortho),
            "residual": float(res / scale),
            "trace_error": float(abs(self.lambdas.sum() - np.trace(matrix))),
            "reconstruction": float(np.abs(self.reconstruct() - matrix).max()),
        }


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each eigenvector made positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _jacobi(a: np.ndarray, max_sweeps: int, tol: float):
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1.0)
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            return np.diag(a).copy(), v
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise NumericError(f"Jacobi eigensolver did not converge within {max_sweeps} sweeps")


def eig_sym(matrix, method: str = "lapack", max_sweeps: int = 100, tol: float = 1e-10,
            symmetry_tol: float = 1e-12) -> SpectralDecomposition:
    """Full eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    matrix : (n, n) array_like
    method : {"lapack", "jacobi"}
        ``"lapack"`` uses the divide-and-conquer driver behind
        :func:`numpy.linalg.eigh`.  ``"jacobi"`` runs cyclic Jacobi
        rotations in pure numpy; it is O(n^3) per sweep and meant for small
        matrices and cross-checks.
    max_sweeps, tol : Jacobi stopping rule: off-diagonal Frobenius norm
        ``<= tol * ||matrix||_F`` or fail after ``max_sweeps`` sweeps.
    symmetry_tol : maximum tolerated ``|M - M^T|`` entry.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending; each eigenvector signed so that its
        largest-magnitude entry is positive.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {m.shape}")
    asym = np.abs(m - m.T).max() if m.size else 0.0
    if asym > symmetry_tol:
        raise ConfigError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    if method == "lapack":
        try:
            lam, vec = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"LAPACK eigensolver failed: {exc}") from exc
    elif method == "jacobi":
        lam, vec = _jacobi(m, max_sweeps, tol)
    else:
        raise ConfigError(f"unknown eigensolver {method!r}")
    order = np.argsort(lam, kind="stable")
    return SpectralDecomposition(lam[order], _fix_signs(vec[:, order]))


def spectrum(g: WeightedGraph, method: str = "lapack") -> SpectralDecomposition:
    return eig_sym(normalized_laplacian(g), method=method)


def _lambdas(obj) -> np.ndarray:
    if isinstance(obj, SpectralDecomposition):
        return obj.lambdas
    return np.sort(np.asarray(obj, dtype=float))


@dataclass(frozen=True, eq=False)
class EigenHistogram:
    """Eigenvalue frequencies over ``[lambda_2, lambda_n]`` in ``n_h`` equal bins."""

    n_h: int
    lambda2: float
    lambdan: float
    counts: np.ndarray

    @property
    def h_b(self) -> float:
        return (self.lambdan - self.lambda2) / self.n_h

    @property
    def theta(self) -> np.ndarray:
        return self.lambda2 + (np.arange(self.n_h) + 0.5) * self.h_b

    @property
    def f(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    @property
    def peak_theta(self) -> float:
        return float(self.theta[int(np.argmax(self.counts))])


def eigenvalue_histogram(dec, n_h: int = 50) -> EigenHistogram:
    """Bin every eigenvalue except the smallest.

    Bins are half-open ``[left, right)`` except the last, which also holds
    ``lambda_n``.  Frequencies are counts divided by ``n - 1``.
    """
    lam = _lambdas(dec)
    if lam.size < 3:
        raise ConfigError(f"need at least 3 eigenvalues, got {lam.size}")
    if n_h < 2:
        raise ConfigError(f"n_h must be at least 2, got {n_h}")
    bulk = lam[1:]
    l2, ln = float(bulk[0]), float(bulk[-1])
    if not ln > l2:
        raise DegenerateSpectrumError(f"lambda_n == lambda_2 == {l2}; cannot bin")
    h = (ln - l2) / n_h
    edges = l2 + h * np.arange(n_h + 1)
    idx = np.searchsorted(edges, bulk, side="right") - 1
    idx = np.clip(idx, 0, n_h - 1)
    counts = np.bincount(idx, minlength=n_h)
    return EigenHistogram(n_h=int(n_h), lambda2=l2, lambdan=ln, counts=counts)


@dataclass(frozen=True)
class SemicircleFit:
    """Semicircle of radius ``r`` centred at ``center`` (always 1 for N)."""

    r: float
    mode: str = "mean"
    center: float = 1.0

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise NumericError(f"semicircle radius must lie in (0, 1), got {self.r}")

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.r, self.center + self.r


def fit_semicircle(dec, mode: str = "mean") -> SemicircleFit:
    """Radius from the spectral edges.

    ``low``: ``1 - lambda_2``; ``high``: ``lambda_n - 1``; ``mean``:
    ``(lambda_n - lambda_2) / 2``; ``max``: the larger of low and high.
    """
    lam = _lambdas(dec)
    l2, ln = float(lam[1]), float(lam[-1])
    if mode == "low":
        r = 1.0 - l2
    elif mode == "high":
        r = ln - 1.0
    elif mode == "mean":
        r = 0.5 * (ln - l2)
    elif mode == "max":
        r = max(1.0 - l2, ln - 1.0)
    else:
        raise ConfigError(f"unknown radius mode {mode!r}; choose from {R_MODES}")
    return SemicircleFit(r=r, mode=mode)


def semicircle_density(lam, fit: SemicircleFit):
    """``2/(pi r^2) * sqrt(r^2 - (lam - 1)^2)`` inside the support, else 0."""
    u = np.asarray(lam, dtype=float) - fit.center
    inside = np.abs(u) < fit.r
    val = np.where(inside, 2.0 / (math.pi * fit.r**2) * np.sqrt(np.clip(fit.r**2 - u * u, 0.0, None)), 0.0)
    return float(val) if val.ndim == 0 else val


def semicircle_cdf(lam, fit: SemicircleFit):
    # t and sqrt(1 - t^2) come from the same rounded value so the two terms
    # cancel correctly near the support edges
    t = np.clip((np.asarray(lam, dtype=float) - fit.center) / fit.r, -1.0, 1.0)
    val = 0.5 + (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / math.pi
    return float(val) if val.ndim == 0 else val


def bin_probability(theta, h_b: float, fit: SemicircleFit):
    """Exact semicircle mass of ``[theta - h_b/2, theta + h_b/2]``."""
    theta = np.asarray(theta, dtype=float)
    val = semicircle_cdf(theta + 0.5 * h_b, fit) - semicircle_cdf(theta - 0.5 * h_b, fit)
    val = np.clip(val, 0.0, None)
    return float(val) if np.ndim(val) == 0 else val


def bin_probabilities(hist: EigenHistogram, fit: SemicircleFit) -> np.ndarray:
    return bin_probability(hist.theta, hist.h_b, fit)


def semicircle_relative_error(hist: EigenHistogram, fit: SemicircleFit) -> float:
    """Mean over bins of ``|f - P| / P``."""
    p = bin_probabilities(hist, fit)
    if np.any(p <= 0):
        b = int(np.flatnonzero(p <= 0)[0])
        raise NumericError(
            f"semicircle assigns zero probability to bin {b} "
            f"(theta={hist.theta[b]:.6g}, support={fit.support}); relative error undefined"
        )
    return float(np.mean(np.abs(hist.f - p) / p))


def wigner_density(lam, sigma: float):
    """Classical semicircle of a symmetric random matrix with entry s.d. ``sigma``."""
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    x = np.asarray(lam, dtype=float)
    inside = np.abs(x) < 2.0 * sigma
    val = np.where(inside, np.sqrt(np.clip(4.0 * sigma**2 - x * x, 0.0, None)) / (2.0 * math.pi * sigma**2), 0.0)
    return float(val) if val.ndim == 0 else val


def write_histogram_csv(hist: EigenHistogram, fit: SemicircleFit, path, meta: dict | None = None) -> None:
    """CSV with ``theta,f_N,P`` columns after ``# key=value`` metadata rows.

    ``path`` may be a filename or an open text stream.
    """
    from .harness import format_value, open_text, write_meta

    p = bin_probabilities(hist, fit)
    header = {"n": int(hist.counts.sum()) + 1, "n_h": hist.n_h, "r": fit.r, "mode": fit.mode}
    header.update(meta or {})
    with open_text(path) as fh:
        write_meta(fh, header)
        fh.write("theta,f_N,P\n")
        for t, f, pi in zip(hist.theta, hist.f, p):
            fh.write(f"{format_value(t)},{format_value(f)},{format_value(pi)}\n")
