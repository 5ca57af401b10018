import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import solve

from netspectra import (
    CensoredEstimateError, ConfigError, DisconnectedGraphError, WeightedGraph, first_arrival_matrix,
    first_arrival_spectral, m_tilde, m_tilde_quadrature, make_rng, mc_first_arrival, mean_first_arrival,
    relative_error_m, spectrum, transition_step, volume,
)
from netspectra.harness import read_meta
from netspectra.walk import (
    arrival_report, default_t_max, first_arrival_from, stationary_distribution, write_arrival_csv, write_summary_json,
)

from conftest import random_graph


def hitting_times_linear(g, target):
    """Expected steps to reach ``target`` from every node, by solving the first-step equations."""
    p = g.adjacency() / g.degree[:, None]
    a = np.eye(g.n) - p
    a[target, :] = 0.0
    a[target, target] = 1.0
    b = np.ones(g.n)
    b[target] = 0.0
    return solve(a, b)


def test_transition_k3(k3):
    np.testing.assert_allclose(transition_step(k3, [1, 0, 0]), [0, 0.5, 0.5])


def test_transition_weighted_path(wpath):
    np.testing.assert_allclose(transition_step(wpath, [0, 1, 0]), [0.2, 0, 0.8], rtol=1e-15)


@pytest.mark.parametrize("seed", range(4))
def test_stationary_fixed_point(seed):
    g = random_graph(seed, n=80, k_ave=10, weights="exponential")
    pi = stationary_distribution(g)
    assert np.abs(transition_step(g, pi) - pi).max() <= 1e-12
    x = make_rng(seed).random(g.n)
    x /= x.sum()
    assert transition_step(g, x).sum() == pytest.approx(1.0, abs=1e-12)


def test_k3_first_arrival(k3):
    dec = spectrum(k3)
    for a in range(3):
        for i in range(3):
            expected = 0.0 if a == i else 2.0
            assert first_arrival_spectral(dec, k3, a, i) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("seed,model,weights", [(0, "er", "uniform"), (1, "ba", "exponential"), (2, "er", "constant")])
def test_first_arrival_matches_linear_solve(seed, model, weights):
    g = random_graph(seed, model=model, n=40, k_ave=8, weights=weights)
    dec = spectrum(g)
    f = first_arrival_matrix(dec, g)
    for target in range(g.n):
        ref = hitting_times_linear(g, target)
        np.testing.assert_allclose(f[:, target], ref, rtol=1e-9, atol=1e-8)
    np.testing.assert_allclose(np.diag(f), 0.0, atol=1e-8)
    np.testing.assert_allclose(first_arrival_from(dec, g, 5), f[5], rtol=1e-12, atol=1e-9)
    assert first_arrival_spectral(dec, g, 3, 7) == pytest.approx(f[3, 7], rel=1e-12)


def test_weighted_path_first_arrival(wpath):
    # degrees 1, 5, 4; first-step analysis gives h(1->0) = 9 and h(1->2) = 3/2
    f = first_arrival_matrix(spectrum(wpath), wpath)
    expected = [[0, 1, 2.5], [9, 0, 1.5], [10, 1, 0]]
    np.testing.assert_allclose(f, expected, atol=1e-12)


def test_mean_first_arrival_complete(k3, k4):
    assert mean_first_arrival(spectrum(k3)) == pytest.approx(4 / 3, abs=1e-12)
    assert mean_first_arrival(spectrum(k4)) == pytest.approx(9 / 4, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_start_node_independence(seed):
    g = random_graph(seed, model="ba" if seed % 2 else "er", n=60, k_ave=10, weights="exponential")
    dec = spectrum(g)
    m = mean_first_arrival(dec)
    avg = first_arrival_matrix(dec, g) @ (g.degree / volume(g))
    assert np.abs(avg - m).max() / m <= 1e-9


def test_disconnected_graph():
    g = WeightedGraph(4, [0, 2], [1, 3])
    dec = spectrum(g)
    with pytest.raises(DisconnectedGraphError):
        mean_first_arrival(dec)
    with pytest.raises(DisconnectedGraphError):
        first_arrival_spectral(dec, g, 0, 1)


def test_m_tilde_values():
    assert m_tilde(1000, 0.6) == pytest.approx(1110.0, rel=1e-14)
    assert m_tilde(4, 0.8) == pytest.approx(3.75, rel=1e-14)
    assert m_tilde(1000, 1e-8) == pytest.approx(999.0, rel=1e-12)
    assert m_tilde(1000, 1 - 1e-12) == pytest.approx(1998.0, rel=1e-5)


def test_m_tilde_literal_form():
    for r in (1e-3, 0.3, 0.77, 0.999):
        literal = 2 * 999 / r**2 * (1 - math.sqrt(1 - r**2))
        assert m_tilde(1000, r) == pytest.approx(literal, rel=1e-9)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_m_tilde_domain(bad):
    with pytest.raises(ConfigError):
        m_tilde(100, bad)
    with pytest.raises(ConfigError):
        m_tilde_quadrature(100, bad)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10**6), st.floats(1e-6, 1 - 1e-6), st.floats(1e-6, 1 - 1e-6))
def test_m_tilde_monotone_and_bounded(n, r1, r2):
    lo, hi = sorted((r1, r2))
    a, b = m_tilde(n, lo), m_tilde(n, hi)
    assert n - 1 < a < 2 * (n - 1)
    if hi - lo > 1e-9:
        assert a < b


def test_m_tilde_quadrature_agreement():
    assert m_tilde_quadrature(1000, 0.5) == pytest.approx(m_tilde(1000, 0.5), rel=1e-10)
    assert m_tilde_quadrature(1000, 0.99) == pytest.approx(m_tilde(1000, 0.99), rel=1e-8)
    small = m_tilde_quadrature(1000, 0.1)
    assert small == pytest.approx(m_tilde(1000, 0.1), rel=1e-10)
    assert abs(small - 999) / 999 < 3e-3


def test_relative_error_m():
    assert relative_error_m(5.0, 5.0) == 0.0
    assert relative_error_m(100.0, 105.0) == pytest.approx(0.05)
    assert relative_error_m(100.0, 95.0) == pytest.approx(0.05)
    with pytest.raises(ConfigError):
        relative_error_m(0.0, 1.0)


def test_scale_invariance():
    g = random_graph(5, n=60, k_ave=10)
    base = arrival_report(g, 0)
    for c in (2.5, 1e-3, 17.0):
        rep = arrival_report(g.scaled(c), 0)
        for name in ("m", "m_tilde", "eps_m", "r"):
            assert getattr(rep, name) == pytest.approx(getattr(base, name), rel=1e-10)
        np.testing.assert_allclose(rep.f, base.f, rtol=1e-10, atol=1e-10 * base.f.max())


def test_mc_single_edge():
    g = WeightedGraph(2, [0], [1], [3.0])
    est = mc_first_arrival(g, 0, 1000, make_rng(0))
    assert est.mean.tolist() == [0.0, 1.0]
    assert est.stderr.tolist() == [0.0, 0.0]


def test_mc_k3(k3):
    est = mc_first_arrival(k3, 0, 100_000, make_rng(1))
    assert est.mean[0] == 0
    for i in (1, 2):
        assert abs(est.mean[i] - 2.0) <= 3 * est.stderr[i]
    # hitting time is geometric with p = 1/2: sd = sqrt(2)
    np.testing.assert_allclose(est.stderr[1:], math.sqrt(2) / math.sqrt(100_000), rtol=0.05)


def test_mc_weighted_path(wpath):
    dec = spectrum(wpath)
    f = first_arrival_from(dec, wpath, 1)
    est = mc_first_arrival(wpath, 1, 100_000, make_rng(2))
    for i in (0, 2):
        assert abs(est.mean[i] - f[i]) <= 3 * est.stderr[i]


def test_mc_matches_spectral_random_er():
    g = random_graph(12, n=30, k_ave=6)
    dec = spectrum(g)
    f = first_arrival_from(dec, g, 0)
    est = mc_first_arrival(g, 0, 100_000, make_rng(3))
    z = np.abs(est.mean[1:] - f[1:]) / est.stderr[1:]
    assert np.all(z <= 3), z.max()


def test_mc_deterministic_and_batched(k4):
    a = mc_first_arrival(k4, 0, 5000, make_rng(9), batch=5000)
    b = mc_first_arrival(k4, 0, 5000, make_rng(9), batch=5000)
    assert np.array_equal(a.mean, b.mean)
    c = mc_first_arrival(k4, 0, 5000, make_rng(9), batch=700)
    assert c.runs == 5000 and abs(c.mean[1] - 3.0) < 5 * c.stderr[1]


def test_mc_censoring():
    g = WeightedGraph(6, [0, 1, 2, 3, 4], [1, 2, 3, 4, 5])
    with pytest.raises(CensoredEstimateError, match="never reached"):
        mc_first_arrival(g, 0, 100, make_rng(0), t_max=3)
    with pytest.raises(ConfigError):
        mc_first_arrival(g, 0, 0, make_rng(0))
    assert default_t_max(100) == math.ceil(100 * 100 * math.log(100))


def test_arrival_exports(tmp_path):
    g = random_graph(1, n=20, k_ave=6)
    rep = arrival_report(g, 3, mc_runs=2000, rng=make_rng(0))
    csv_path = tmp_path / "a.csv"
    write_arrival_csv(rep, csv_path, {"seed": 1})
    assert read_meta(csv_path)["source"] == "3"
    lines = [l for l in csv_path.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "node,f_spectral,mc_mean,mc_stderr"
    assert len(lines) == 21
    assert float(lines[4].split(",")[1]) == pytest.approx(0.0, abs=1e-8)
    json_path = tmp_path / "a.json"
    write_summary_json(rep, json_path, {"seed": 1})
    doc = json.loads(json_path.read_text())
    assert set(doc) >= {"m", "m_tilde", "eps_m", "r", "lambda2", "lambdan"}
    assert doc["m"] == rep.m and doc["meta"]["seed"] == 1
    no_mc = arrival_report(g, 0)
    write_arrival_csv(no_mc, csv_path)
    assert csv_path.read_text().splitlines()[-1].endswith(",,")
