"""Closed-form semi-classical and Thomas-Fermi predictions.

These are the analytic oracles the numerical solvers are checked against:
harmonic levels of a deep well, the tunneling law ``tau ~ c eps^{-3/2}
exp(-S/eps)``, the 1D Thomas-Fermi profile in a general well and the 2D
radial Thomas-Fermi constant.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import InvalidParameterError, NumericalFailureError
from .potential import agmon_action, curvature, tunneling_prefactor

LAMBDA_2D = 2 ** 1.5 / math.sqrt(math.pi)
C_TF = 2 ** 1.5 / (3 * math.sqrt(math.pi))
LAMBDA_1D = 1.5 ** (2 / 3)
E_TF_1D = 0.4 * LAMBDA_1D ** 2.5


@dataclass(frozen=True)
class HarmonicPrediction:
    levels: np.ndarray
    gap: float
    l4: float
    l4_gaussian: float


def harmonic_levels(w, epsilon=None, j_max=3):
    """``lambda_j = (j - 1/2) sqrt(w''(0)) / eps`` for ``j = 1..j_max``.

    Also the gap ``sqrt(w''(0)) / eps`` and the quartic-integral law
    ``l4 = pi^{-1/2} w''(0)^{1/4} eps^{-1/2}``.  The harmonic ground state
    ``exp(-sqrt(w''(0)) z^2 / (2 eps))`` actually has ``int psi^4`` smaller
    by ``2^{-1/2}``; that value is ``l4_gaussian``.
    """
    eps = w.epsilon if epsilon is None else epsilon
    om = math.sqrt(curvature(w))
    j = np.arange(1, j_max + 1)
    l4 = curvature(w) ** 0.25 / math.sqrt(math.pi * eps)
    return HarmonicPrediction((j - 0.5) * om / eps, om / eps, l4, l4 / math.sqrt(2))


def tunneling_prefactor_rederived(w):
    """Hopping prefactor from Herring's formula with WKB tails.

    ``pi^{-1/2} w''(0)^{3/4} exp(sqrt(w''(0)/2) A_tau)``; it coincides with
    :func:`lattice_bec.potential.tunneling_prefactor` when ``w''(0) = 2``.
    """
    A, _ = tunneling_prefactor(w)
    c2 = curvature(w)
    return c2 ** 0.75 / math.sqrt(math.pi) * math.exp(math.sqrt(c2 / 2) * A)


def tau_asymptotic(w, epsilon=None, prefactor="standard"):
    """``c_tau eps^{-3/2} exp(-S / eps)``.

    ``prefactor="standard"`` uses ``c_tau`` of
    :func:`~lattice_bec.potential.tunneling_prefactor`;
    ``"rederived"`` uses :func:`tunneling_prefactor_rederived`.
    """
    eps = w.epsilon if epsilon is None else epsilon
    if prefactor == "standard":
        c = tunneling_prefactor(w)[1]
    elif prefactor == "rederived":
        c = tunneling_prefactor_rederived(w)
    else:
        raise InvalidParameterError(f"unknown prefactor {prefactor!r}")
    return c * eps ** -1.5 * math.exp(-agmon_action(w) / eps)


@dataclass(frozen=True)
class TFProfile1D:
    mu: float
    z: np.ndarray
    phi: np.ndarray
    energy: float
    support: tuple
    overflow: bool
    energy_harmonic: float
    energy_harmonic_printed: float
    norm_error: float


def harmonic_tf_energy(gamma, g_hat, epsilon):
    """TF energy in ``gamma z^2 / (2 eps^2)``: ``(3^{5/3}/10) gamma^{1/3} g^{2/3} eps^{-2/3}``."""
    return 3 ** (5 / 3) / 10 * gamma ** (1 / 3) * g_hat ** (2 / 3) * epsilon ** (-2 / 3)


def harmonic_tf_energy_printed(gamma, g_hat, epsilon):
    """The alternative prefactor ``2^{-4/3} 3^{5/3} 5^{-1} gamma^{2/3}`` (reported only)."""
    return 2 ** (-4 / 3) * 3 ** (5 / 3) / 5 * gamma ** (2 / 3) * g_hat ** (2 / 3) * epsilon ** (-2 / 3)


def tf1d_energy(w, epsilon=None, g_hat=1.0, *, T=None, gamma=None, samples=4097):
    """Thomas-Fermi minimizer of ``int W phi^2 + g_hat phi^4`` on one period.

    ``w`` is a :class:`~lattice_bec.potential.PeriodicPotential` or any
    callable single-well profile on ``[-T/2, T/2]`` with its minimum 0 at
    ``z = 0``, increasing away from it (then pass ``T`` and ``gamma``).
    ``phi^2 = (mu - w/eps^2)_+ / (2 g_hat)`` with ``mu`` fixed by the unit
    mass; the support edges are root-found and the integrals done by quad.
    """
    if not g_hat > 0:
        raise InvalidParameterError("g_hat must be positive")
    eps = w.epsilon if epsilon is None else epsilon
    T = w.T if T is None else T
    gamma = curvature(w) if gamma is None else gamma
    W = lambda z: float(w(z)) / eps ** 2
    half = T / 2

    def edges(mu):
        lo = -half if W(-half) <= mu else optimize.brentq(lambda z: W(z) - mu, -half, 0.0, xtol=1e-15)
        hi = half if W(half) <= mu else optimize.brentq(lambda z: W(z) - mu, 0.0, half, xtol=1e-15)
        return lo, hi

    def mass(mu):
        if mu <= 0:
            return -1.0
        lo, hi = edges(mu)
        val, _ = integrate.quad(lambda z: mu - W(z), lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        return val / (2 * g_hat) - 1.0

    zs = np.linspace(-half, half, 2001)
    mu_hi = float(np.max([W(z) for z in zs])) + 8 * g_hat / T
    mu = optimize.brentq(mass, 0.0, mu_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    norm_err = abs(mass(mu))
    if norm_err > 1e-12:
        raise NumericalFailureError("TF normalization not resolved", residual=norm_err)
    lo, hi = edges(mu)
    energy, _ = integrate.quad(lambda z: (mu ** 2 - W(z) ** 2) / (4 * g_hat), lo, hi,
                               epsabs=1e-13, epsrel=1e-13, limit=200)
    z = np.linspace(-half, half, samples)
    Wz = np.asarray(w(z), dtype=float) / eps ** 2
    phi = np.sqrt(np.clip(mu - Wz, 0.0, None) / (2 * g_hat))
    overflow = (hi - lo) >= T * (1 - 1e-12)
    return TFProfile1D(mu, z, phi, energy, (lo, hi), bool(overflow),
                       harmonic_tf_energy(gamma, g_hat, eps),
                       harmonic_tf_energy_printed(gamma, g_hat, eps), norm_err)


@dataclass(frozen=True)
class TFProfile2D:
    lam: float
    c_tf: float
    upper: float
    lower_rotation: float
    lower_universal: float
    mu: float
    radius: float


def tf2d(g_tilde, omega_perp=1.0, Omega=0.0):
    """Radial Thomas-Fermi constant and the associated energy bounds.

    ``c_TF omega sqrt(g)`` is the TF energy; the rotation lower bound
    scales it by ``sqrt(1 - Omega^2 / omega^2)``.
    """
    if not 0 <= Omega < omega_perp:
        raise InvalidParameterError("rotation must satisfy 0 <= Omega < omega_perp")
    if g_tilde < 0:
        raise InvalidParameterError("g_tilde must be non-negative")
    upper = C_TF * omega_perp * math.sqrt(g_tilde)
    mu = omega_perp * math.sqrt(2 * g_tilde / math.pi)
    return TFProfile2D(LAMBDA_2D, C_TF, upper, upper * math.sqrt(1 - (Omega / omega_perp) ** 2),
                       upper, mu, math.sqrt(2 * mu) / omega_perp)


def tf2d_profile(r, omega_perp, g_tilde):
    """``psi(r) = ((mu - omega^2 r^2 / 2)_+ / (2 g))^{1/2}``, unit mass in ``2 pi r dr``."""
    mu = omega_perp * math.sqrt(2 * g_tilde / math.pi)
    return np.sqrt(np.clip(mu - 0.5 * omega_perp ** 2 * np.asarray(r) ** 2, 0, None) / (2 * g_tilde))


def u_min(r):
    """Scale-free TF minimizer ``0.5 (lambda - r^2)_+^{1/2}``."""
    return 0.5 * np.sqrt(np.clip(LAMBDA_2D - np.asarray(r) ** 2, 0, None))


def constants_report(w, epsilon=None, g_hat=None):
    """Every closed-form constant, labelled, for ``asymptotics.json``."""
    eps = w.epsilon if epsilon is None else epsilon
    A, c_tau = tunneling_prefactor(w)
    hp = harmonic_levels(w, eps)
    gamma = curvature(w)
    out = {
        "curvature": gamma,
        "S": agmon_action(w),
        "A_tau": A,
        "c_tau": c_tau,
        "c_tau_rederived": tunneling_prefactor_rederived(w),
        "tau_asymptotic": tau_asymptotic(w, eps),
        "tau_asymptotic_rederived": tau_asymptotic(w, eps, "rederived"),
        "lambda1_harmonic": float(hp.levels[0]),
        "gap_harmonic": hp.gap,
        "l4_harmonic": hp.l4,
        "l4_gaussian": hp.l4_gaussian,
        "lambda_tf_1d": LAMBDA_1D,
        "e_tf_1d": E_TF_1D,
        "lambda_tf_2d": LAMBDA_2D,
        "c_tf_2d": C_TF,
        "tf1d_prefactor_rederived": 3 ** (5 / 3) / 10 * gamma ** (1 / 3),
        "tf1d_prefactor_printed": 2 ** (-4 / 3) * 3 ** (5 / 3) / 5 * gamma ** (2 / 3),
    }
    if g_hat:
        tf = tf1d_energy(w, eps, g_hat)
        out.update(tf_energy=tf.energy, tf_mu=tf.mu, tf_overflow=tf.overflow,
                   tf_energy_harmonic=tf.energy_harmonic,
                   tf_energy_harmonic_printed=tf.energy_harmonic_printed)
    return out


def write_json(report, path):
    def fmt(v):
        if isinstance(v, bool) or v is None:
            return v
        return float(f"{v:.15g}")
    with open(path, "w") as fh:
        json.dump({k: fmt(v) for k, v in report.items()}, fh, indent=2, sort_keys=True)
    return path
