import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lattice_bec import gp1d, spectral
from lattice_bec.errors import InvalidParameterError, InvariantViolationError, NonConvergenceError
from lattice_bec.potential import PeriodicPotential

W = PeriodicPotential.sin2(1.0, 0.05)
FREE = PeriodicPotential.zero(1.0, 1.0)


def ground(eps, P=128, M=96):
    lam, _, phi = spectral.ground_state(W, eps, P=P, M=M)
    return lam, phi, float(np.sum(phi ** 4) / P)


def test_hatg_examples():
    assert gp1d.hatg(0.0, 3.0) == 0.0
    assert gp1d.hatg(2 * math.pi, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert gp1d.hatg(10.0, 5.0) == pytest.approx(25 / math.pi, rel=1e-15)
    with pytest.raises(InvalidParameterError):
        gp1d.hatg(-1.0, 1.0)


@pytest.mark.parametrize("N", [1, 3])
def test_energy_a_constant_states(N):
    P = 32
    phi = np.full(N * P, 1 / math.sqrt(N))
    assert gp1d.energy_a(phi, FREE, 1.0, 0.0, N) == pytest.approx(0.0, abs=1e-14)
    assert gp1d.energy_a(phi, FREE, 1.0, 2.5, N) == pytest.approx(2.5 / N, rel=1e-13)


def test_energy_a_of_linear_ground_state():
    lam, phi, _ = ground(0.05)
    assert gp1d.energy_a(phi, W, 0.05, 0.0) == pytest.approx(lam, abs=1e-8)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 50.0), st.integers(1, 3))
def test_gradient_matches_finite_differences(seed, g, N):
    rng = np.random.default_rng(seed)
    P = 32
    x = gp1d.gaussian_comb(W, 0.1, N, P) + 0.2 * rng.standard_normal(N * P)
    d = rng.standard_normal(N * P)
    h = 1e-5
    fd = (gp1d.energy_a(x + h * d, W, 0.1, g, N) - gp1d.energy_a(x - h * d, W, 0.1, g, N)) / (2 * h)
    an = np.sum(gp1d.gradient_a(x, W, 0.1, g, N) * d) / P
    assert abs(fd - an) <= 1e-6 * max(abs(an), 1.0)


def test_linear_minimum_is_lambda1():
    lam, _, _ = ground(0.05)
    st_ = gp1d.minimize_a(W, 0.05, 0.0)
    assert st_.energy == pytest.approx(lam, abs=1e-8)
    assert st_.norm_error() < 1e-12
    assert np.all(np.diff(st_.history) <= 0)


def test_weak_interaction_remainder():
    eps, g = 0.05, 0.04
    assert g * math.sqrt(eps) <= 0.01
    lam, phi, l4 = ground(eps)
    l6 = float(np.sum(phi ** 6) / 128)
    gap = np.diff(spectral.lowest_eigs(spectral.FloquetProblem(W, 0.0, 96, eps), 2)[0])[0]
    bound = 2 ** 2.5 * g ** 1.5 * math.sqrt(l6) * math.sqrt(l4) / math.sqrt(gap)
    m = gp1d.minimize_a(W, eps, g).energy
    assert abs(m - (lam + g * l4)) <= bound


@pytest.mark.parametrize("N,g", [(1, 5.0), (2, 20.0), (4, 1.0)])
def test_descent_is_monotone_and_normalized(N, g):
    st_ = gp1d.minimize_a(W, 0.05, g, N)
    assert np.all(np.diff(st_.history) <= 0)
    assert st_.norm_error() < 1e-12
    assert st_.residual < 1e-8


def test_sandwich_examples():
    eps = 0.05
    lam, _, l4 = ground(eps)
    rep = gp1d.sandwich_a(gp1d.minimize_a(W, eps, 0.0), lam, 0.0, l4)
    assert rep["lower"] == rep["upper"]
    g = 0.4
    m4 = gp1d.minimize_a(W, eps, g, 4)
    single = gp1d.minimize_a(W, eps, g / 4).energy
    rep = gp1d.sandwich_a(m4, lam, g, l4, m_a_single=single)
    assert rep["single_ok"] and m4.energy <= single + 1e-8
    with pytest.raises(InvariantViolationError):
        gp1d.sandwich_a(m4.energy, lam + 1.0, g, l4)


def test_n2_thomas_fermi_matches_single_cell():
    eps, g = 0.05, 400.0
    m2 = gp1d.minimize_a(W, eps, g, 2).energy
    m1 = gp1d.minimize_a(W, eps, g / 2).energy
    assert m2 == pytest.approx(m1, rel=0.01)


def test_translation_covariance():
    eps, g, N, P = 0.05, 2.0, 3, 64
    base = gp1d.gaussian_comb(W, eps, N, P)
    lopsided = base * (1 + 0.3 * np.exp(-((gp1d.Grid1D(1.0, N, P).z) ** 2) / 0.01))
    a = gp1d.minimize_a(W, eps, g, N, init=lopsided, P=P)
    b = gp1d.minimize_a(W, eps, g, N, init=np.roll(lopsided, P), P=P)
    assert a.energy == pytest.approx(b.energy, abs=1e-10)
    assert np.max(np.abs(a.phi - b.phi)) < 1e-6
    assert gp1d.measured_period(a, 1.0) == pytest.approx(1.0)


def test_errors():
    with pytest.raises(NonConvergenceError):
        gp1d.minimize_a(W, 0.05, 10.0, 2, max_iter=1)
    with pytest.raises(InvalidParameterError):
        gp1d.minimize_a(W, 0.05, -1.0)
    with pytest.raises(InvalidParameterError):
        gp1d.minimize_a(W, 0.05, 1.0, tol=0.0)


def test_writers(tmp_path):
    st_ = gp1d.minimize_a(W, 0.05, 1.0, P=64)
    gp1d.write_profile_csv(st_, tmp_path / "gp1d_profile.csv")
    gp1d.write_summary_json(st_, tmp_path / "gp1d.json")
    data = json.load(open(tmp_path / "gp1d.json"))
    assert data["m_A"] == pytest.approx(st_.energy, rel=1e-14)
    assert len(open(tmp_path / "gp1d_profile.csv").read().splitlines()) == 65
