import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from lattice_bec import dnls
from lattice_bec.dnls import DNLSProblem
from lattice_bec.errors import InvalidParameterError
from lattice_bec.potential import PeriodicPotential

W = PeriodicPotential.sin2(1.0, 0.05)
pos = st.floats(0.05, 3.0)


def test_energy_examples():
    p = DNLSProblem(1.0, 0.0, 0.7, 1, 0.0)
    assert dnls.energy_dnls(p, [math.sqrt(0.7)]) == pytest.approx(-2 * 0.7)
    tau, I, nu, N = 0.8, 1.7, 0.6, 5
    p = DNLSProblem(tau, I, nu, N, 0.0)
    c = np.full(N, math.sqrt(nu))
    assert dnls.energy_dnls(p, c) == pytest.approx(-2 * tau * nu * N + I * nu ** 2 * N, rel=1e-14)


def test_linear_minimum_is_band_value():
    tau, nu, N, k = 1.3, 0.5, 4, 0.3
    p = DNLSProblem(tau, 0.0, nu, N, k)
    st_ = dnls.minimize_dnls(p)
    assert st_.energy == pytest.approx(-2 * tau * math.cos(k) * nu * N, rel=1e-10)


def test_wrap_condition_in_energy():
    p = DNLSProblem(1.0, 0.0, 1.0, 3, 0.4)
    g = np.array([1.0, 0.5 + 0.2j, -0.3j])
    a = dnls.energy_dnls(p, dnls.from_gauge(p, g))
    b = float(np.real(np.vdot(g, dnls.hopping_matrix(p) @ g)))
    assert a == pytest.approx(b, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), pos, pos, pos, st.integers(1, 6), st.floats(0, 2 * np.pi))
def test_gradient_matches_finite_differences(seed, tau, I, nu, N, k):
    rng = np.random.default_rng(seed)
    p = DNLSProblem(tau, I, nu, N, k)
    c = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    d = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    h = 1e-5
    fd = (dnls.energy_dnls(p, c + h * d) - dnls.energy_dnls(p, c - h * d)) / (2 * h)
    an = float(np.real(np.vdot(dnls.gradient_dnls(p, c), d)))
    assert abs(fd - an) <= 1e-6 * max(abs(an), 1.0)


def test_closed_branch_examples():
    (label, c, mu, E), = dnls.closed_branches(DNLSProblem(1.0, 1.0, 1.0, 1, 0.0))
    assert (E, mu) == pytest.approx((-1.0, 0.0))
    br = {b[0]: b for b in dnls.closed_branches(DNLSProblem(1.0, 2.0, 1.0, 2, 0.0))}
    assert br["case1+"][3] == pytest.approx(0.0, abs=1e-15)
    assert br["case2"][3] == pytest.approx(4.5)
    br = {b[0]: b for b in dnls.closed_branches(DNLSProblem(1.0, 1.0, 1.0, 2, math.pi / 2))}
    assert br["case3"][3] == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        dnls.closed_branches(DNLSProblem(1.0, 1.0, 1.0, 3, 0.0))


@settings(max_examples=40, deadline=None)
@given(pos, pos, pos, st.floats(0, 2 * np.pi), st.integers(1, 2))
def test_branches_are_critical_points(tau, I, nu, k, N):
    p = DNLSProblem(tau, I, nu, N, k)
    for label, c, mu, E in dnls.closed_branches(p):
        assert np.sum(np.abs(c) ** 2) == pytest.approx(p.Nc, rel=1e-12)
        assert dnls.energy_dnls(p, c) / p.Nc == pytest.approx(E, rel=1e-9, abs=1e-9 * p.scale)
        grad = dnls.gradient_dnls(p, c)
        assert np.max(np.abs(grad - 2 * mu * c)) <= 1e-9 * p.scale * math.sqrt(nu)


@settings(max_examples=40, deadline=None)
@given(pos, pos, pos, st.floats(0, 2 * np.pi))
def test_case2_minus_case1_identity(tau, I, nu, k):
    p = DNLSProblem(tau, I, nu, 2, k)
    ck = math.cos(k)
    assume(abs(tau * ck) <= I * nu)
    br = {b[0]: b[3] for b in dnls.closed_branches(p)}
    best1 = min(br["case1+"], br["case1-"])
    assert br["case2"] - br["case1+"] == pytest.approx((tau * ck / math.sqrt(I * nu) + math.sqrt(I * nu)) ** 2,
                                                       rel=1e-10, abs=1e-12 * p.scale)
    assert br["case2"] >= best1 - 1e-12 * p.scale


def test_minimize_examples():
    assert dnls.minimize_dnls(DNLSProblem(1.0, 1.0, 1.0, 2, 0.0)).E == pytest.approx(-1.0, abs=1e-9)
    assert dnls.minimize_dnls(DNLSProblem(1.0, 0.0, 1.0, 4, 0.0)).E == pytest.approx(-2.0, abs=1e-9)
    st_ = dnls.minimize_dnls(DNLSProblem(0.0, 1.0, 1.0, 4, 0.0))
    assert st_.E == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(np.abs(st_.c), 1.0, atol=1e-5)


@settings(max_examples=25, deadline=None)
@given(pos, pos, pos, st.floats(0, 2 * np.pi), st.integers(1, 2), st.integers(0, 1000))
def test_minimizer_matches_branches(tau, I, nu, k, N, seed):
    p = DNLSProblem(tau, I, nu, N, k)
    st_ = dnls.minimize_dnls(p, seed=seed)
    assert dnls.matches_branches(st_, p)
    assert np.all(np.diff(st_.history) <= 0)
    assert abs(np.sum(np.abs(st_.c) ** 2) - p.Nc) <= 1e-12 * p.Nc


def test_minimize_reproducible():
    p = DNLSProblem(0.4, 1.1, 0.9, 5, 0.2)
    a, b = dnls.minimize_dnls(p, seed=3), dnls.minimize_dnls(p, seed=3)
    assert a.E == b.E and np.array_equal(a.c, b.c)


def test_problem_validation():
    with pytest.raises(InvalidParameterError):
        DNLSProblem(-1.0, 1.0, 1.0, 2)
    with pytest.raises(InvalidParameterError):
        DNLSProblem(1.0, 1.0, 0.0, 2)
    with pytest.raises(InvalidParameterError):
        DNLSProblem(1.0, 1.0, 1.0, 0)


@pytest.fixture(scope="module")
def coeffs():
    return dnls.reduced_coefficients(W, 0.04, 0.05, N=8, M=64, P=256)


def test_reduced_coefficients(coeffs):
    from lattice_bec import spectral
    _, _, phi = spectral.ground_state(W, 0.04, P=256, M=64)
    l4 = np.sum(phi ** 4) / 256
    assert coeffs["U"] / 0.05 == pytest.approx(l4, rel=0.01)
    assert coeffs["tau"] > 0
    zero = dnls.reduced_coefficients(W, 0.04, 0.0, N=4, M=64, P=128)
    assert zero["U"] == 0 and zero["tau_hat"] == 0


def test_minimize_reduced_orders(coeffs):
    one = dnls.minimize_reduced(coeffs, order=1)
    assert one["m_A_N_approx"] == pytest.approx(coeffs["lambda_hat1"] + coeffs["U"] / 8, rel=1e-15)
    flat = dict(coeffs, tau=0.0)
    two = dnls.minimize_reduced(flat, order=2)
    assert two["m_A_N_approx"] == pytest.approx(one["m_A_N_approx"], rel=1e-12)
    with pytest.raises(InvalidParameterError):
        dnls.minimize_reduced(coeffs, order=3)


def test_sweep_rows_json(tmp_path):
    rows = dnls.sweep_rows([DNLSProblem(1.0, 1.0, 1.0, 2, 0.0), DNLSProblem(0.5, 2.0, 1.0, 1, 1.0)])
    dnls.write_rows_json(rows, tmp_path / "dnls.json")
    data = json.load(open(tmp_path / "dnls.json"))
    assert data[0]["E"] == pytest.approx(-1.0, abs=1e-9)
    assert data[1]["E"] == pytest.approx(-2 * 0.5 * math.cos(1.0) + 2.0, rel=1e-9)
