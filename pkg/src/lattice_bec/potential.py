"""T-periodic lattice profile ``w`` and its analytic descriptors.

The physical longitudinal potential is ``W_eps(z) = w(z) / eps**2``.  Every
function here works on the bare profile ``w``; the depth parameter ``eps``
only travels along with the potential so that downstream solvers can pick it
up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError, InvalidPotentialError, UnsupportedPotentialError

QUAD_TOL = 1e-10
DEFAULT_ORDER = 64


@dataclass(frozen=True)
class PeriodicPotential:
    """A smooth T-periodic single-well profile.

    ``kind="sin2"`` is ``sin(pi z / T)**2``.  ``kind="fourier"`` is the
    tabulated series ``sum_m coeffs[m] cos(2 pi m z / T) + sum_m
    sin_coeffs[m-1] sin(2 pi m z / T)``, truncated at ``order`` harmonics.
    """

    kind: str = "sin2"
    T: float = 1.0
    epsilon: float = 0.05
    coeffs: tuple = ()
    sin_coeffs: tuple = ()
    order: int = DEFAULT_ORDER
    _cos: np.ndarray = field(init=False, repr=False, compare=False)
    _sin: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("sin2", "fourier"):
            raise InvalidParameterError(f"unknown potential kind {self.kind!r}")
        if not self.T > 0:
            raise InvalidParameterError("period T must be positive")
        if not self.epsilon > 0:
            raise InvalidParameterError("epsilon must be positive")
        if self.kind == "sin2":
            cos = np.array([0.5, -0.5])
            sin = np.zeros(0)
        else:
            if len(self.coeffs) == 0:
                raise InvalidParameterError("fourier potential needs at least a_0")
            cos = np.asarray(self.coeffs, dtype=float)[: self.order + 1]
            sin = np.asarray(self.sin_coeffs, dtype=float)[: self.order]
        object.__setattr__(self, "coeffs", tuple(float(c) for c in cos))
        object.__setattr__(self, "sin_coeffs", tuple(float(s) for s in sin))
        object.__setattr__(self, "_cos", cos)
        object.__setattr__(self, "_sin", sin)

    # constructors -----------------------------------------------------------
    @classmethod
    def sin2(cls, T=1.0, epsilon=0.05):
        return cls(kind="sin2", T=T, epsilon=epsilon)

    @classmethod
    def fourier(cls, coeffs, T=1.0, epsilon=0.05, sin_coeffs=(), order=DEFAULT_ORDER):
        return cls(kind="fourier", T=T, epsilon=epsilon, coeffs=tuple(coeffs),
                   sin_coeffs=tuple(sin_coeffs), order=order)

    @classmethod
    def zero(cls, T=1.0, epsilon=1.0):
        """Free particle (``w = 0``); fails :func:`validate` by design."""
        return cls(kind="fourier", T=T, epsilon=epsilon, coeffs=(0.0,))

    @classmethod
    def from_config(cls, cfg):
        """Build from ``{kind: "sin2"|"fourier", T, epsilon, coeffs}``."""
        kind = cfg.get("kind", "sin2")
        T = float(cfg.get("T", 1.0))
        eps = float(cfg.get("epsilon", 0.05))
        if kind == "sin2":
            return cls.sin2(T, eps)
        return cls.fourier(cfg.get("coeffs", ()), T, eps,
                           sin_coeffs=cfg.get("sin_coeffs", ()),
                           order=int(cfg.get("order", DEFAULT_ORDER)))

    def to_config(self):
        cfg = {"kind": self.kind, "T": self.T, "epsilon": self.epsilon}
        if self.kind == "fourier":
            cfg["coeffs"] = list(self.coeffs)
            if self.sin_coeffs:
                cfg["sin_coeffs"] = list(self.sin_coeffs)
        return cfg

    def with_epsilon(self, epsilon):
        return replace(self, epsilon=epsilon)

    # evaluation -------------------------------------------------------------
    @property
    def even(self):
        return not np.any(self._sin)

    @property
    def harmonics(self):
        """Highest harmonic index present in the Fourier representation."""
        nz = np.flatnonzero(self._cos[1:]) + 1
        ns = np.flatnonzero(self._sin) + 1
        return int(max(nz.max(initial=0), ns.max(initial=0)))

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "sin2":
            return np.sin(np.pi * z / self.T) ** 2
        # w(0) - 2 sum a_m sin^2(pi m z/T) keeps full relative accuracy near the minimum
        m = np.arange(1, len(self._cos))
        zz = z[..., None]
        out = self._cos.sum() - 2.0 * (self._cos[1:] * np.sin(np.pi * m * zz / self.T) ** 2).sum(-1)
        if len(self._sin):
            ms = np.arange(1, len(self._sin) + 1)
            out = out + (self._sin * np.sin(2 * np.pi * ms * zz / self.T)).sum(-1)
        return out

    def fourier_coefficients(self):
        """Complex exponential coefficients ``What[n]`` for ``n = -L..L``.

        Returns ``(n, What)`` with ``w(z) = sum What[n] exp(2 pi i n z / T)``.
        """
        L = max(self.harmonics, 0)
        n = np.arange(-L, L + 1)
        c = np.zeros(2 * L + 1, dtype=complex)
        c[L] = self._cos[0]
        for m in range(1, L + 1):
            a = self._cos[m] if m < len(self._cos) else 0.0
            b = self._sin[m - 1] if m - 1 < len(self._sin) else 0.0
            c[L + m] = 0.5 * a + b / 2j
            c[L - m] = 0.5 * a - b / 2j
        return n, c

    def validate(self, samples=2001):
        """Check the single-well assumptions on a sample grid."""
        z = np.linspace(-self.T / 2, self.T / 2, samples)
        wz = self(z)
        if np.max(np.abs(self(z + self.T) - wz)) > 1e-12:
            raise InvalidPotentialError("potential is not T-periodic")
        if abs(float(self(0.0))) > 1e-12:
            raise InvalidPotentialError("w(0) must vanish")
        away = np.abs(z) > self.T / (samples - 1) / 2
        if np.any(wz[away] <= 0):
            raise InvalidPotentialError("w must be positive away from the lattice sites")
        curvature(self)
        return self


def eval(w, z):  # noqa: A001 - mirrors the operation name
    """Bare profile ``w(z)`` (not divided by ``eps**2``)."""
    return w(z)


def curvature(w):
    """``w''(0)``; raises :class:`InvalidPotentialError` unless positive."""
    if w.kind == "sin2":
        val = 2.0 * math.pi ** 2 / w.T ** 2
    else:
        m = np.arange(len(w._cos))
        val = -float(np.sum(w._cos * (2 * np.pi * m / w.T) ** 2))
    if not val > 0:
        raise InvalidPotentialError(f"non-positive curvature w''(0) = {val}")
    return val


def agmon_action(w):
    """Agmon distance ``S = sqrt(2) * int_{-T/2}^{T/2} sqrt(w) dz`` between wells."""
    f = lambda z: math.sqrt(max(float(w(z)), 0.0))
    half = w.T / 2
    left, _ = integrate.quad(f, -half, 0.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    right, _ = integrate.quad(f, 0.0, half, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return math.sqrt(2.0) * (left + right)


def tunneling_prefactor(w):
    """Return ``(A_tau, c_tau)`` of the hopping asymptotics for even ``w``.

    The log singularity of ``1/sqrt(w)`` at the well is removed analytically
    on ``(0, T/8)``.
    """
    if not w.even:
        raise UnsupportedPotentialError("tunneling prefactor requires an even potential")
    c = math.sqrt(2.0) / math.sqrt(curvature(w))
    R = w.T / 8
    inv = lambda z: 1.0 / math.sqrt(float(w(z)))
    outer, _ = integrate.quad(inv, R, w.T / 2, epsabs=1e-12, epsrel=1e-12, limit=200)
    inner, _ = integrate.quad(lambda z: inv(z) - c / z, 0.0, R,
                              epsabs=1e-12, epsrel=1e-12, limit=200)
    A = outer + inner + c * math.log(R)
    c_tau = 2 ** 0.75 / math.sqrt(math.pi) * math.exp(A)
    return A, c_tau
