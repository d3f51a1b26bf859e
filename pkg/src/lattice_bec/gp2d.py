"""Transverse reduced energy on radial states.

    E_B(psi) = 2 pi int_0^R (1/2 psi'^2 + 1/2 omega^2 r^2 psi^2 + g psi^4) r dr,
    2 pi int_0^R psi^2 r dr = 1.

For real radial states the rotation terms drop out, so the computed minimum
is ``m_B``, an upper bound for the rotating problem.  The grid is
cell-centred, ``r_i = (i + 1/2) h``: derivatives are differences across cell
faces (zero flux through ``r = 0``), densities are integrated with the
midpoint rule.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ._optim import QuarticProblem, minimize_sphere
from .asymptotics import C_TF, LAMBDA_2D, tf2d
from .errors import InvalidParameterError, InvariantViolationError
from .potential import curvature

DEFAULT_POINTS = 8192


def tildeg(g, phi1_l4):
    """``g_tilde = g int phi_1^4``."""
    if g < 0 or phi1_l4 < 0:
        raise InvalidParameterError("g and the L4 integral must be non-negative")
    return g * phi1_l4


def tildeg_asymptotic(g, w, epsilon=None):
    """Harmonic law ``g pi^{-1/2} w''(0)^{1/4} eps^{-1/2}``."""
    eps = w.epsilon if epsilon is None else epsilon
    return g * curvature(w) ** 0.25 / math.sqrt(math.pi * eps)


@dataclass
class RadialGrid:
    R: float
    n: int

    @property
    def h(self):
        return self.R / self.n

    @property
    def r(self):
        return (np.arange(self.n) + 0.5) * self.h

    @property
    def faces(self):
        """Interior and outer faces ``r = (i + 1) h``."""
        return (np.arange(self.n) + 1.0) * self.h

    @property
    def weights(self):
        return 2 * np.pi * self.r * self.h


def default_radius(omega_perp, g_tilde):
    """``1.5 max(TF radius, 6 / sqrt(omega))``."""
    r_tf = tf2d(g_tilde, omega_perp).radius if g_tilde > 0 else 0.0
    return 1.5 * max(r_tf, 6 / math.sqrt(omega_perp))


def make_grid(omega_perp, g_tilde, n=DEFAULT_POINTS, R=None):
    return RadialGrid(default_radius(omega_perp, g_tilde) if R is None else R, n)


def _stiffness(grid):
    """Tridiagonal ``K`` with ``psi^T K psi = 2 pi sum 1/2 (dpsi/h)^2 r_face h``.

    The outer face couples to a zero ghost value (Dirichlet at ``R``).
    """
    c = 2 * np.pi * grid.faces / grid.h * 0.5  # 1/2 * (1/h^2) * r_face * h * 2 pi
    n = grid.n
    diag = np.zeros(n)
    diag[:] += c
    diag[1:] += c[:-1]
    off = -c[:-1]
    return diag, off


def energy_b(psi, omega_perp, g_tilde, grid):
    """Discrete :math:`E_B` of a real radial state on ``grid``."""
    psi = np.asarray(psi, dtype=float)
    dpsi = np.diff(np.append(psi, 0.0)) / grid.h
    kinetic = 2 * np.pi * np.sum(0.5 * dpsi ** 2 * grid.faces) * grid.h
    q = grid.weights
    return float(kinetic + np.sum(q * (0.5 * omega_perp ** 2 * grid.r ** 2 * psi ** 2
                                       + g_tilde * psi ** 4)))


def _problem(omega_perp, g_tilde, grid, sigma=None):
    diag, off = _stiffness(grid)
    q = grid.weights
    V = 0.5 * omega_perp ** 2 * grid.r ** 2

    def apply(x):
        Kx = diag * x
        Kx[:-1] += off * x[1:]
        Kx[1:] += off * x[:-1]
        return Kx / q + V * x

    sigma = omega_perp * (1 + math.sqrt(g_tilde)) if sigma is None else sigma
    ab = np.zeros((3, grid.n))
    ab[0, 1:] = off
    ab[1] = diag + q * (V + sigma)
    ab[2, :-1] = off
    precond = lambda v: linalg.solve_banded((1, 1), ab, q * v)
    return QuarticProblem(apply, q, g_tilde, 1.0, precond)


def gradient_b(psi, omega_perp, g_tilde, grid):
    """Gradient of :func:`energy_b` in the weighted inner product."""
    prob = _problem(omega_perp, g_tilde, grid)
    return prob.gradient(np.asarray(psi, dtype=float))


def gaussian(grid, omega_perp):
    return math.sqrt(omega_perp / math.pi) * np.exp(-omega_perp * grid.r ** 2 / 2)


@dataclass
class RadialState:
    r: np.ndarray
    psi: np.ndarray
    energy: float
    mu: float
    residual: float
    iterations: int
    g_tilde: float
    omega_perp: float
    Omega: float = 0.0
    lower_rotation: float = 0.0
    lower_universal: float = 0.0
    history: list = field(default_factory=list)

    @property
    def gap(self):
        return self.energy - self.lower_rotation

    def mass(self):
        h = self.r[1] - self.r[0]
        return float(np.sum(2 * np.pi * self.r * h * self.psi ** 2))

    def summary(self):
        return {"m_B": self.energy, "lower_bound_rot": self.lower_rotation,
                "g_tilde": self.g_tilde, "mu": self.mu, "residual": self.residual,
                "iterations": self.iterations}


def minimize_b(omega_perp=1.0, g_tilde=0.0, Omega=0.0, tol=1e-9, n=DEFAULT_POINTS, R=None,
               init=None, max_iter=20000):
    """Minimize :func:`energy_b` over normalized radial states.

    Returns the state with ``m_B`` and the Thomas-Fermi rotation lower bound.
    """
    if not 0 <= Omega < omega_perp:
        raise InvalidParameterError("rotation must satisfy 0 <= Omega < omega_perp")
    if g_tilde < 0:
        raise InvalidParameterError("g_tilde must be non-negative")
    grid = make_grid(omega_perp, g_tilde, n, R)
    prob = _problem(omega_perp, g_tilde, grid)
    if init is None:
        x0 = gaussian(grid, omega_perp) + (_tf_guess(grid, omega_perp, g_tilde) if g_tilde > 0 else 0)
    else:
        x0 = np.asarray(init, dtype=float)
    res = minimize_sphere(prob, x0, tol=tol, max_iter=max_iter)
    bounds = tf2d(g_tilde, omega_perp, Omega)
    return RadialState(grid.r, np.abs(res.x), res.energy, res.mu, res.residual, res.iterations,
                       g_tilde, omega_perp, Omega, bounds.lower_rotation, bounds.lower_universal,
                       res.history)


def _tf_guess(grid, omega_perp, g_tilde):
    mu = omega_perp * math.sqrt(2 * g_tilde / math.pi)
    return np.sqrt(np.clip(mu - 0.5 * omega_perp ** 2 * grid.r ** 2, 0, None) / (2 * g_tilde))


def tf_trial(grid, omega_perp, g_tilde):
    """Scaled Thomas-Fermi profile, normalized on ``grid``."""
    x = _tf_guess(grid, omega_perp, g_tilde)
    return x / math.sqrt(np.sum(grid.weights * x ** 2))


def check_sandwich(state, trials=(), grid=None, slack=1e-9):
    """``c_TF omega sqrt(g) <= m_B <= E_B(trial)`` for each supplied trial."""
    lower = C_TF * state.omega_perp * math.sqrt(state.g_tilde)
    if state.energy < lower - slack:
        raise InvariantViolationError(f"m_B {state.energy} below TF lower bound {lower}")
    for t in trials:
        e = energy_b(t, state.omega_perp, state.g_tilde, grid)
        if state.energy > e + slack * max(1, abs(e)):
            raise InvariantViolationError(f"m_B {state.energy} above trial energy {e}")
    return lower


def write_profile_csv(state, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["r", "psi"])
        for r, p in zip(state.r, state.psi):
            wr.writerow([f"{r:.15g}", f"{p:.15g}"])
    return path


def write_summary_json(state, path):
    with open(path, "w") as fh:
        json.dump({k: float(f"{v:.15g}") if isinstance(v, float) else v
                   for k, v in state.summary().items()}, fh, indent=2, sort_keys=True)
    return path


__all__ = ["tildeg", "tildeg_asymptotic", "RadialGrid", "RadialState", "energy_b", "gradient_b",
           "minimize_b", "make_grid", "tf_trial", "check_sandwich", "LAMBDA_2D", "C_TF"]
