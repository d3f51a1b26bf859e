"""Projected-gradient descent on a sphere for quadratic-plus-quartic energies.

The energies handled here have the form

    E(x) = <H x, x> + g * sum_i q_i |x_i|^4,     <a, b> = Re sum_i q_i conj(a_i) b_i,

minimized over ``<x, x> = mass``.  Steps follow a preconditioned tangent
direction, lengths come from Barzilai-Borwein and are backtracked until the
energy strictly does not increase.  The energy change of a trial step is
evaluated from the increment itself, so the monotonicity test stays
meaningful when the change is far below the rounding level of ``E``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError


@dataclass
class QuarticProblem:
    apply_H: object
    weights: np.ndarray
    g: float = 0.0
    mass: float = 1.0
    precond: object = None

    def inner(self, a, b):
        return float(np.real(np.sum(self.weights * np.conj(a) * b)))

    def quartic(self, x):
        return float(np.sum(self.weights * np.abs(x) ** 4))

    def energy(self, x):
        return self.inner(self.apply_H(x), x) + self.g * self.quartic(x)

    def gradient(self, x, Hx=None):
        Hx = self.apply_H(x) if Hx is None else Hx
        return 2 * Hx + 4 * self.g * np.abs(x) ** 2 * x

    def delta(self, x, Hx, d):
        """``E(x + d) - E(x)`` without cancellation against ``E(x)``."""
        s = 2 * np.real(np.conj(x) * d) + np.abs(d) ** 2
        quart = float(np.sum(self.weights * s * (2 * np.abs(x) ** 2 + s)))
        return 2 * self.inner(Hx, d) + self.inner(self.apply_H(d), d) + self.g * quart

    def mu(self, x, Hx=None):
        Hx = self.apply_H(x) if Hx is None else Hx
        return (self.inner(Hx, x) + 2 * self.g * self.quartic(x)) / self.mass

    def normalize(self, x):
        return x * np.sqrt(self.mass / self.inner(x, x))

    def residual(self, x, grad):
        r = grad - self.inner(grad, x) / self.mass * x
        return r, np.sqrt(max(self.inner(r, r), 0.0))


@dataclass
class DescentResult:
    x: np.ndarray
    energy: float
    mu: float
    residual: float
    iterations: int
    history: list = field(default_factory=list)
    converged: bool = True


def _retract(prob, x, d, alpha):
    """Increment taking ``x`` to ``(x - alpha d)`` rescaled onto the sphere."""
    dd = prob.inner(d, d)
    xd = prob.inner(x, d)
    # |x - a d|^2 = m - 2 a <x,d> + a^2 |d|^2 ;  scale = sqrt(m / that)
    t = (alpha ** 2 * dd - 2 * alpha * xd) / prob.mass
    root = np.sqrt(1 + t)
    inv_m1 = -t / (root * (1 + root))  # 1/root - 1 without cancellation
    return x * inv_m1 - alpha * (1 + inv_m1) * d


def minimize_sphere(prob, x0, tol=1e-9, max_iter=20000, alpha0=0.5, armijo=1e-4,
                    min_alpha=1e-14, raise_on_fail=True):
    """Minimize ``prob`` from ``x0``.

    Convergence: ``||grad - (<grad,x>/mass) x|| < tol``.  Raises
    :class:`NonConvergenceError` on exhaustion unless ``raise_on_fail`` is
    false.
    """
    x = prob.normalize(np.array(x0, dtype=complex if np.iscomplexobj(x0) else float))
    Hx = prob.apply_H(x)
    E = prob.inner(Hx, x) + prob.g * prob.quartic(x)
    history = [E]
    alpha = alpha0
    prev = None
    res = np.inf
    for it in range(max_iter):
        grad = prob.gradient(x, Hx)
        r, res = prob.residual(x, grad)
        if res < tol:
            return DescentResult(x, prob.energy(x), prob.mu(x, Hx), res, it, history)
        if prob.precond is None:
            d = r
        else:
            pg, px = prob.precond(grad), prob.precond(x)
            d = pg - prob.inner(pg, x) / prob.inner(px, x) * px
        slope = prob.inner(r, d)
        if slope <= 0:
            d, slope = r, prob.inner(r, r)
        if prev is not None:
            s, y = x - prev[0], d - prev[1]
            sy, yy = prob.inner(s, y), prob.inner(y, y)
            if sy > 0 and yy > 0:
                alpha = sy / yy
        a = alpha
        while True:
            step = _retract(prob, x, d, a)
            dE = prob.delta(x, Hx, step)
            if dE <= -armijo * a * slope or (dE <= 0 and a < 1e-3 * alpha):
                break
            a *= 0.5
            if a < min_alpha:
                break
        if a < min_alpha:
            break
        prev = (x, d)
        x = x + step
        x = prob.normalize(x)
        Hx = prob.apply_H(x)
        E = E + dE
        history.append(E)
        alpha = a
    E = prob.energy(x)
    result = DescentResult(x, E, prob.mu(x, Hx), res, it, history, converged=False)
    if raise_on_fail:
        raise NonConvergenceError(f"descent stalled after {it} iterations (residual {res:.3e})",
                                  residual=float(res))
    return result
