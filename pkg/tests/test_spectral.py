import math

import numpy as np
import pytest
from scipy import integrate

from netspectra import (
    ConfigError, DegenerateNodeError, DegenerateSpectrumError, NumericError, SemicircleFit, WeightedGraph,
    bin_probability, eig_sym, eigenvalue_histogram, fit_semicircle, normalized_laplacian, semicircle_density,
    semicircle_relative_error, spectrum, volume, wigner_density,
)
from netspectra.harness import read_meta
from netspectra.spectral import EigenHistogram, bin_probabilities, semicircle_cdf, write_histogram_csv

from conftest import random_graph


def test_laplacian_k3(k3):
    n = normalized_laplacian(k3)
    np.testing.assert_array_equal(np.diag(n), 1.0)
    off = n[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, -0.5, rtol=1e-15)


@pytest.mark.parametrize("w", [0.1, 1.0, 7.5])
def test_laplacian_single_edge(w):
    n = normalized_laplacian(WeightedGraph(2, [0], [1], [w]))
    np.testing.assert_allclose(n, [[1, -1], [-1, 1]], rtol=1e-15)


def test_laplacian_weighted_path(wpath):
    # d = (1, 5, 4)
    n = normalized_laplacian(wpath)
    assert n[0, 1] == pytest.approx(-1 / math.sqrt(5), rel=1e-15)
    assert n[1, 2] == pytest.approx(-2 / math.sqrt(5), rel=1e-15)
    assert n[0, 2] == 0.0
    assert np.array_equal(n, n.T)


def test_laplacian_isolated_node():
    with pytest.raises(DegenerateNodeError, match="node 2"):
        normalized_laplacian(WeightedGraph(3, [0], [1]))


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_complete_graph_spectra(k3, k4, method):
    d3 = spectrum(k3, method)
    np.testing.assert_allclose(d3.lambdas, [0, 1.5, 1.5], atol=1e-12)
    d4 = spectrum(k4, method)
    np.testing.assert_allclose(d4.lambdas, [0, 4 / 3, 4 / 3, 4 / 3], atol=1e-12)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@pytest.mark.parametrize("seed", [1, 2])
def test_reconstruction_random_er(method, seed):
    g = random_graph(seed, n=50, k_ave=8)
    n = normalized_laplacian(g)
    dec = eig_sym(n, method=method)
    diag = dec.diagnostics(n)
    assert diag["reconstruction"] <= 1e-8
    assert diag["orthonormality"] <= 1e-8
    assert diag["residual"] <= 1e-8
    assert np.all(np.diff(dec.lambdas) >= 0)


def test_jacobi_matches_lapack():
    g = random_graph(9, model="ba", n=40, k_ave=8, weights="exponential")
    n = normalized_laplacian(g)
    a = eig_sym(n, "lapack")
    b = eig_sym(n, "jacobi")
    np.testing.assert_allclose(a.lambdas, b.lambdas, atol=1e-10)


def test_eig_sym_contract_errors():
    with pytest.raises(ConfigError, match="symmetric"):
        eig_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ConfigError):
        eig_sym(np.ones((2, 3)))
    with pytest.raises(ConfigError):
        eig_sym(np.eye(2), method="power")
    m = normalized_laplacian(random_graph(0, n=20, k_ave=6))
    with pytest.raises(NumericError, match="1 sweeps"):
        eig_sym(m, method="jacobi", max_sweeps=1)


def test_eig_sym_deterministic():
    m = normalized_laplacian(random_graph(4, n=60, k_ave=10))
    a, b = eig_sym(m), eig_sym(m)
    assert np.array_equal(a.lambdas, b.lambdas) and np.array_equal(a.vectors, b.vectors)


@pytest.mark.parametrize("seed", range(6))
def test_spectral_invariants(seed):
    model = "er" if seed % 2 else "ba"
    weights = ["constant", "uniform", "exponential"][seed % 3]
    g = random_graph(seed, model=model, n=120, k_ave=12, weights=weights)
    dec = spectrum(g)
    n = g.n
    assert abs(dec.lambdas[0]) <= 1e-9
    assert dec.lambda2 > 0
    assert dec.lambdas.min() >= -1e-10 and dec.lambdan < 2
    assert abs(dec.lambdas.sum() - n) <= 1e-8 * n
    q1 = dec.vectors[:, 0]
    np.testing.assert_allclose(q1, np.sqrt(g.degree / volume(g)), atol=1e-7)


def test_histogram_one_per_bin():
    h = eigenvalue_histogram([0, 0.5, 1.5], 2)
    np.testing.assert_array_equal(h.f, [0.5, 0.5])
    assert h.h_b == 0.5
    np.testing.assert_allclose(h.theta, [0.75, 1.25])


def test_histogram_degenerate():
    with pytest.raises(DegenerateSpectrumError):
        eigenvalue_histogram([0, 1, 1, 1], 2)


def test_histogram_bins_half_open():
    # edges 1, 2, 3: the value 2 belongs to the upper bin, 3 closes the last bin
    h = eigenvalue_histogram([0, 1, 2, 3], 2)
    assert h.counts.tolist() == [1, 2]


def test_histogram_excludes_smallest():
    g = random_graph(3, n=200, k_ave=16)
    h = eigenvalue_histogram(spectrum(g), 50)
    assert h.counts.sum() == g.n - 1
    assert h.f.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(h.f >= 0)


def test_histogram_argument_checks():
    with pytest.raises(ConfigError):
        eigenvalue_histogram([0, 1], 2)
    with pytest.raises(ConfigError):
        eigenvalue_histogram([0, 1, 2], 1)


def test_fit_modes():
    lam = [0, 0.6, 0.9, 1.5]
    assert fit_semicircle(lam, "low").r == pytest.approx(0.4)
    assert fit_semicircle(lam, "high").r == pytest.approx(0.5)
    assert fit_semicircle(lam, "mean").r == pytest.approx(0.45)
    assert fit_semicircle(lam, "max").r == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        fit_semicircle(lam, "median")


def test_fit_radius_domain(k4):
    with pytest.raises(NumericError):
        fit_semicircle(spectrum(k4), "mean")
    with pytest.raises(NumericError):
        SemicircleFit(1.0)


def test_semicircle_density_values():
    fit = SemicircleFit(0.5)
    assert semicircle_density(1.0, fit) == pytest.approx(4 / math.pi, rel=1e-15)
    assert semicircle_density(1.0, fit) == pytest.approx(1.27324, abs=1e-5)
    assert semicircle_density(0.5, fit) == 0.0
    assert semicircle_density(1.5, fit) == 0.0
    assert semicircle_density(0.2, fit) == 0.0


@pytest.mark.parametrize("r", [0.1, 0.5, 0.9])
def test_semicircle_density_normalized(r):
    fit = SemicircleFit(r)
    val, _ = integrate.quad(lambda x: semicircle_density(x, fit), 1 - r, 1 + r, epsabs=1e-13, epsrel=1e-13)
    assert abs(val - 1) <= 1e-10


def test_bin_probability_whole_and_outside():
    fit = SemicircleFit(0.3)
    assert bin_probability(1.0, 0.6, fit) == pytest.approx(1.0, abs=1e-15)
    assert bin_probability(1.0, 2.0, fit) == pytest.approx(1.0, abs=1e-15)
    assert bin_probability(0.2, 0.2, fit) == 0.0
    assert bin_probability(1.8, 0.2, fit) == 0.0


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_bin_probability_matches_quadrature():
    fit = SemicircleFit(0.5)
    h = 0.1
    ref, _ = integrate.quad(lambda x: semicircle_density(x, fit), 1 - h / 2, 1 + h / 2, epsabs=1e-15, epsrel=1e-14)
    assert abs(bin_probability(1.0, h, fit) - ref) <= 1e-12
    for theta in (0.55, 0.7, 1.3, 1.47):
        ref, _ = integrate.quad(lambda x: semicircle_density(x, fit), max(theta - h / 2, 0.5),
                                min(theta + h / 2, 1.5), epsabs=1e-15, epsrel=1e-14)
        assert abs(bin_probability(theta, h, fit) - ref) <= 1e-12


def test_semicircle_cdf_endpoints():
    fit = SemicircleFit(0.4)
    assert semicircle_cdf(0.6, fit) == pytest.approx(0.0, abs=1e-15)
    assert semicircle_cdf(1.0, fit) == pytest.approx(0.5, abs=1e-15)
    assert semicircle_cdf(1.4, fit) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n_h", [2, 7, 50])
def test_bin_probabilities_tile_to_one(n_h):
    lam = np.array([0.0, 0.65, 1.0, 1.35])
    hist = eigenvalue_histogram(lam, n_h)
    fit = fit_semicircle(lam, "mean")
    assert abs(bin_probabilities(hist, fit).sum() - 1) <= 1e-10


def test_relative_error_zero_when_matching():
    lam = [0.0, 0.6, 1.4]
    hist = eigenvalue_histogram(lam, 2)
    fit = fit_semicircle(lam, "mean")
    np.testing.assert_allclose(bin_probabilities(hist, fit), [0.5, 0.5], atol=1e-15)
    assert semicircle_relative_error(hist, fit) == pytest.approx(0.0, abs=1e-14)


def test_relative_error_hand_value():
    # counts (2, 0, 1) against a semicircle split into thirds of [0.6, 1.4]
    hist = EigenHistogram(n_h=3, lambda2=0.6, lambdan=1.4, counts=np.array([2, 0, 1]))
    fit = SemicircleFit(0.4)
    p = bin_probabilities(hist, fit)
    f = np.array([2, 0, 1]) / 3
    assert semicircle_relative_error(hist, fit) == pytest.approx(np.mean(np.abs(f - p) / p), rel=1e-14)


def test_relative_error_undefined_bin():
    hist = EigenHistogram(n_h=4, lambda2=0.2, lambdan=1.8, counts=np.array([1, 1, 1, 1]))
    with pytest.raises(NumericError, match="bin 0"):
        semicircle_relative_error(hist, SemicircleFit(0.1))


def test_eps_scale_invariant():
    g = random_graph(8, n=200, k_ave=20)
    out = []
    for c in (1.0, 3.7, 1e-3):
        dec = spectrum(g.scaled(c))
        hist = eigenvalue_histogram(dec, 50)
        out.append(semicircle_relative_error(hist, fit_semicircle(dec)))
    np.testing.assert_allclose(out, out[0], rtol=1e-10)


def test_wigner_density():
    assert wigner_density(0.0, 1.0) == pytest.approx(1 / math.pi)
    assert wigner_density(2.0, 1.0) == 0.0
    assert wigner_density(-2.0, 1.0) == 0.0
    for sigma in (0.3, 1.0, 2.5):
        val, _ = integrate.quad(lambda x: wigner_density(x, sigma), -2 * sigma, 2 * sigma, epsabs=1e-13,
                                epsrel=1e-13)
        assert abs(val - 1) <= 1e-10
    with pytest.raises(ConfigError):
        wigner_density(0.0, 0.0)


def test_histogram_csv(tmp_path):
    g = random_graph(2, n=100, k_ave=12)
    dec = spectrum(g)
    hist = eigenvalue_histogram(dec, 10)
    fit = fit_semicircle(dec)
    path = tmp_path / "h.csv"
    write_histogram_csv(hist, fit, path, {"seed": 2})
    meta = read_meta(path)
    assert meta["n"] == "100" and meta["n_h"] == "10" and meta["mode"] == "mean" and meta["seed"] == "2"
    assert float(meta["r"]) == fit.r
    body = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert body[0] == "theta,f_N,P"
    rows = np.array([[float(x) for x in l.split(",")] for l in body[1:]])
    np.testing.assert_allclose(rows[:, 0], hist.theta, rtol=0, atol=0)
    np.testing.assert_allclose(rows[:, 1], hist.f, rtol=0, atol=0)
