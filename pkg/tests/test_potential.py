import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from lattice_bec.errors import InvalidParameterError, InvalidPotentialError, UnsupportedPotentialError
from lattice_bec.potential import (PeriodicPotential, agmon_action, curvature, eval as w_eval,
                                   tunneling_prefactor)

SIN2_FOURIER = (0.5, -0.5)


def test_eval_examples():
    w = PeriodicPotential.sin2(1.0)
    assert w_eval(w, 0.0) == 0.0
    assert w_eval(w, 0.25) == pytest.approx(0.5, abs=1e-15)
    assert w_eval(w, 1.3) == pytest.approx(w_eval(w, 0.3), abs=1e-14)


@given(st.floats(-5, 5), st.floats(0.3, 4.0))
def test_periodicity_and_evenness(z, T):
    w = PeriodicPotential.sin2(T)
    assert w(z + T) == pytest.approx(w(z), abs=1e-12)
    assert w(-z) == pytest.approx(w(z), abs=1e-12)
    f = PeriodicPotential.fourier((0.6, -0.5, -0.1), T)
    assert f(z + T) == pytest.approx(f(z), abs=1e-12)


def test_fourier_matches_builtin():
    w = PeriodicPotential.sin2(1.0)
    f = PeriodicPotential.fourier(SIN2_FOURIER, 1.0)
    z = np.linspace(-2, 2, 401)
    assert np.max(np.abs(w(z) - f(z))) < 1e-14


def test_curvature_examples():
    assert curvature(PeriodicPotential.sin2(1.0)) == pytest.approx(2 * math.pi ** 2, rel=1e-14)
    assert curvature(PeriodicPotential.sin2(2.0)) == pytest.approx(math.pi ** 2 / 2, rel=1e-14)
    f = PeriodicPotential.fourier(SIN2_FOURIER, 1.0)
    assert abs(curvature(f) - 2 * math.pi ** 2) < 1e-10


def test_curvature_rejects_flat_or_inverted_well():
    with pytest.raises(InvalidPotentialError):
        curvature(PeriodicPotential.fourier((-0.5, 0.5), 1.0))
    with pytest.raises(InvalidPotentialError):
        curvature(PeriodicPotential.zero())


def test_agmon_examples():
    assert agmon_action(PeriodicPotential.sin2(1.0)) == pytest.approx(2 * math.sqrt(2) / math.pi, rel=1e-9)
    assert agmon_action(PeriodicPotential.sin2(2.0)) == pytest.approx(4 * math.sqrt(2) / math.pi, rel=1e-9)
    w4 = PeriodicPotential.fourier((2.0, -2.0), 1.0)
    assert agmon_action(w4) == pytest.approx(2 * agmon_action(PeriodicPotential.sin2(1.0)), rel=1e-9)


@pytest.mark.parametrize("T", [0.5, 1.0, 2.0, 3.0])
def test_tunneling_prefactor_closed_form(T):
    A, c_tau = tunneling_prefactor(PeriodicPotential.sin2(T))
    exact = T / math.pi * math.log(2 * T / math.pi)
    assert A == pytest.approx(exact, rel=1e-8, abs=1e-12)
    assert c_tau == pytest.approx(2 ** 0.75 / math.sqrt(math.pi) * math.exp(A), rel=1e-14)


def test_tunneling_prefactor_sin2_values():
    A, c_tau = tunneling_prefactor(PeriodicPotential.sin2(1.0))
    assert A == pytest.approx(math.log(2 / math.pi) / math.pi, rel=1e-9)
    assert c_tau == pytest.approx(0.8218, abs=5e-5)


def test_tunneling_prefactor_independent_quadrature():
    # direct integral of 1/sqrt(w) - sqrt(2/w''(0))/z over (0, T/2) plus the log term
    w = PeriodicPotential.fourier((0.6, -0.5, -0.1), 1.0)
    A, _ = tunneling_prefactor(w)
    c = math.sqrt(2 / curvature(w))
    body, _ = integrate.quad(lambda z: 1 / math.sqrt(float(w(z))) - c / z, 0, 0.5,
                             epsabs=1e-13, epsrel=1e-13, limit=400)
    assert A == pytest.approx(body + c * math.log(0.5), rel=1e-8)


def test_tunneling_prefactor_rejects_odd_terms():
    w = PeriodicPotential.fourier((0.5, -0.5), 1.0, sin_coeffs=(0.05,))
    with pytest.raises(UnsupportedPotentialError):
        tunneling_prefactor(w)


def test_validate_and_construction_errors():
    PeriodicPotential.sin2(1.0).validate()
    with pytest.raises(InvalidPotentialError):
        PeriodicPotential.fourier((0.5, 0.5), 1.0).validate()  # maximum at z = 0
    with pytest.raises(InvalidParameterError):
        PeriodicPotential.sin2(-1.0)
    with pytest.raises(InvalidParameterError):
        PeriodicPotential.sin2(1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        PeriodicPotential(kind="square")


def test_config_round_trip():
    f = PeriodicPotential.fourier((0.6, -0.5, -0.1), 2.0, 0.03)
    g = PeriodicPotential.from_config(f.to_config())
    assert g == f
    assert PeriodicPotential.from_config({"kind": "sin2", "T": 1, "epsilon": 0.1}).epsilon == 0.1
    assert f.with_epsilon(0.01).epsilon == 0.01


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 3.0))
def test_agmon_linear_in_period(T):
    assert agmon_action(PeriodicPotential.sin2(T)) == pytest.approx(2 * math.sqrt(2) * T / math.pi, rel=1e-8)
