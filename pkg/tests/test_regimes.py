import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lattice_bec import regimes
from lattice_bec.errors import InvalidParameterError, InvariantViolationError
from lattice_bec.regimes import PhysicalParams


def fock_spectrum(omega, Omega, n_max):
    """Rotating 2D oscillator ``omega (a^+a + b^+b + 1) - Omega L_z`` in the Cartesian Fock basis."""
    dim = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    I = np.eye(dim)
    ax, ay = np.kron(a, I), np.kron(I, a)
    num = ax.T @ ax + ay.T @ ay
    Lz = 1j * (ax @ ay.T - ax.T @ ay)
    H = omega * (num + np.eye(dim * dim)) - Omega * Lz
    # truncation is exact inside each shell of fixed total number
    keep = np.rint(np.diag(num).real) <= n_max
    return np.sort(np.linalg.eigvalsh(H[np.ix_(keep, keep)]))


def test_transverse_examples():
    p = PhysicalParams(1.0, 2.0, 0.1)
    assert regimes.transverse_spectrum(p) == 2.0
    assert regimes.transverse_spectrum(p, 1, 0) == 4.0
    assert regimes.transverse_spectrum(p, 0, 1) == 4.0
    q = PhysicalParams(1.0, 2.0, 0.1, Omega=1.8)
    assert regimes.transverse_spectrum(q, 1, 0) - regimes.transverse_spectrum(q) == pytest.approx(0.2)
    with pytest.raises(InvalidParameterError):
        regimes.transverse_spectrum(q, -1, 0)


@pytest.mark.parametrize("omega,Omega", [(1.0, 0.0), (2.0, 0.7), (1.5, 1.4)])
def test_transverse_matches_fock_oracle(omega, Omega):
    n_max = 6
    p = PhysicalParams(1.0, omega, 0.1, Omega=Omega)
    formula = sorted(regimes.transverse_spectrum(p, j, k)
                     for j in range(n_max + 1) for k in range(n_max + 1) if j + k <= n_max)
    assert np.allclose(fock_spectrum(omega, Omega, n_max), formula, atol=1e-10)


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        PhysicalParams(1.0, 1.0, 0.1, Omega=1.0)
    with pytest.raises(InvalidParameterError):
        PhysicalParams(-1.0, 1.0, 0.1)
    with pytest.raises(InvalidParameterError):
        regimes.classify(PhysicalParams(1.0, 1.0, 0.1), rho=1.0)


def test_classify_examples():
    assert regimes.classify(PhysicalParams(0.0, 1.0, 0.05)).regime == "QL"
    p = PhysicalParams(0.01, 1e4, 0.001)
    rep = regimes.classify(p, rho=0.1, c=10.0)
    assert rep.regime == "A-WI"
    assert rep.condition("AWIa").lhs == pytest.approx(10.0)
    assert rep.condition("AWIb").lhs == pytest.approx(0.01 * 1e4 * math.sqrt(0.001))
    # with the bounded-constant c = 1 the same point misses AWIb (3.16 > 1)
    assert not regimes.classify(p, rho=0.1, c=1.0).condition("AWIb").verdict
    u = regimes.classify(PhysicalParams(100.0, 1.0, 0.01))
    assert u.regime == "unclassified"
    assert not u.condition("BTFc").verdict and u.condition("BTFa").verdict
    assert u.condition("BTFb").lhs == pytest.approx(0.316, abs=1e-3)


def test_b_regimes_co_satisfy_ql():
    rep = regimes.classify(PhysicalParams(0.5, 1.0, 1e-4))
    assert "B-TF" in rep.satisfied and rep.regime == "QL"


params = st.builds(PhysicalParams, st.floats(0.0, 100.0), st.floats(0.1, 1e4), st.floats(1e-4, 0.2))


@settings(max_examples=60, deadline=None)
@given(params, st.floats(0.01, 0.5), st.floats(0.5, 0.99))
def test_rho_monotonicity(p, rho1, rho2):
    strict, loose = regimes.classify(p, rho=rho1), regimes.classify(p, rho=rho2)
    for a, b in zip(strict.conditions, loose.conditions):
        if a.verdict:
            assert b.verdict, a.name
    assert set(strict.satisfied) <= set(loose.satisfied)


@settings(max_examples=60, deadline=None)
@given(params, st.floats(0.01, 0.9))
def test_verdicts_follow_ratios(p, rho):
    rep = regimes.classify(p, rho=rho)
    for c in rep.conditions:
        if c.kind in ("<<", ">>"):
            assert c.verdict == (c.ratio <= rho) or math.isclose(c.ratio, rho, rel_tol=1e-12)
        else:
            assert c.verdict == (c.lhs <= rep.c)


def test_measured_orders_recorded():
    rep = regimes.classify(PhysicalParams(0.01, 1e4, 0.001), c=10.0, m_A=1000.0)
    assert rep.m_A_source == "measured" and rep.m_B_source == "predicted order"
    assert rep.predicted_route == "A" and rep.predicted_order == pytest.approx(1000.0)


def test_universal_bounds_examples():
    p = PhysicalParams(0.0, 1.0, 0.1)
    b = regimes.universal_bounds(p, 20.0, 3.761)
    assert b["I_N"] == 0 and b["lower"] == b["upper"]
    p1 = PhysicalParams(1.0, 1.0, 0.1, N=1)
    p2 = PhysicalParams(1.0, 1.0, 0.1, N=2)
    i1 = regimes.interaction_scale(p1, 3.761)
    assert i1 == pytest.approx(3.761 / (2 * math.pi), rel=1e-15)
    assert i1 == pytest.approx(0.5986, abs=1e-4)
    assert regimes.interaction_scale(p2, 3.761) == i1 / 2


def test_compose():
    p = PhysicalParams(0.0, 3.0, 0.1)
    assert regimes.compose(p, "A", 22.0, 3.7, m_A=22.0)["E"] == pytest.approx(25.0)
    assert regimes.compose(p, "B", 22.0, 3.7, m_B=3.0)["E"] == pytest.approx(25.0)
    q = PhysicalParams(1.0, 1.0, 0.1)
    with pytest.raises(InvariantViolationError):
        regimes.compose(q, "A", 22.0, 3.7, m_A=30.0)
    with pytest.raises(InvalidParameterError):
        regimes.compose(q, "C", 22.0, 3.7)
    with pytest.raises(InvalidParameterError):
        regimes.compose(q, "B", 22.0, 3.7)


def test_report_json(tmp_path):
    rep = regimes.classify(PhysicalParams(100.0, 1.0, 0.01))
    regimes.write_report_json(rep, tmp_path / "regime_report.json")
    data = json.load(open(tmp_path / "regime_report.json"))
    assert data["regime"] == "unclassified"
    assert {c["name"] for c in data["conditions"]} >= {"QLa", "BTFc", "RBb"}
