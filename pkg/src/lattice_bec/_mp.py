"""Extended-precision refinement of the lowest Floquet eigenpair.

Tunneling quantities scale like exp(-S/eps) and fall below double precision
relative to the band energy once eps is around 0.03.  The lowest eigenpair of
the (real symmetric, banded) plane-wave matrix is therefore polished in
mpmath by shifted inverse iteration: with the shift strictly below the
lowest eigenvalue the shifted matrix is positive definite, so a banded
Cholesky factorization without pivoting is stable.
"""
from __future__ import annotations

import mpmath

from .errors import NumericalFailureError, UnsupportedPotentialError


def floquet_band_mp(potential, k, M, epsilon, ctx):
    """Banded storage ``band[i][d] = H[i, i-d]`` of the plane-wave matrix."""
    if not potential.even:
        raise UnsupportedPotentialError("extended precision requires an even potential")
    L = potential.harmonics
    cos = potential.coeffs
    inv_eps2 = 1 / ctx.mpf(epsilon) ** 2
    two_pi_T = 2 * ctx.pi / ctx.mpf(potential.T)
    kk = ctx.mpf(k)
    a0 = ctx.mpf(cos[0]) * inv_eps2
    off = [ctx.mpf(cos[m]) / 2 * inv_eps2 for m in range(1, L + 1)]
    n_dim = 2 * M + 1
    band = []
    for i in range(n_dim):
        n = i - M
        row = [(kk + two_pi_T * n) ** 2 / 2 + a0]
        for d in range(1, L + 1):
            row.append(off[d - 1] if i - d >= 0 else ctx.zero)
        band.append(row)
    return band


def _cholesky(band, shift, ctx):
    n = len(band)
    b = len(band[0]) - 1
    L = [[ctx.zero] * (b + 1) for _ in range(n)]
    for i in range(n):
        for d in range(b, 0, -1):
            j = i - d
            if j < 0:
                continue
            s = band[i][d]
            # sum over m < j with both L[i, m] and L[j, m] inside the band
            for m in range(max(i - b, 0), j):
                s -= L[i][i - m] * L[j][j - m]
            L[i][d] = s / L[j][0]
        s = band[i][0] - shift
        for d in range(1, b + 1):
            if i - d >= 0:
                s -= L[i][d] ** 2
        if s <= 0:
            raise NumericalFailureError("shift is not below the lowest eigenvalue", residual=float(s))
        L[i][0] = ctx.sqrt(s)
    return L


def _solve(L, rhs, ctx):
    n = len(L)
    b = len(L[0]) - 1
    y = list(rhs)
    for i in range(n):
        s = y[i]
        for d in range(1, b + 1):
            if i - d >= 0:
                s -= L[i][d] * y[i - d]
        y[i] = s / L[i][0]
    x = y
    for i in range(n - 1, -1, -1):
        s = x[i]
        for d in range(1, b + 1):
            if i + d < n:
                s -= L[i + d][d] * x[i + d]
        x[i] = s / L[i][0]
    return x


def _matvec(band, x, ctx):
    n = len(band)
    b = len(band[0]) - 1
    y = [band[i][0] * x[i] for i in range(n)]
    for i in range(n):
        for d in range(1, b + 1):
            j = i - d
            if j >= 0:
                y[i] += band[i][d] * x[j]
                y[j] += band[i][d] * x[i]
    return y


def refine_lowest(potential, k, M, epsilon, lam0, vec0, dps=40, iterations=4):
    """Polish a double-precision lowest eigenpair to ``dps`` digits.

    Returns ``(lam, vec)`` as an mpf and a list of mpf (unit norm, largest
    component positive).
    """
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    band = floquet_band_mp(potential, k, M, epsilon, ctx)
    shift = ctx.mpf(lam0) - ctx.mpf(1e-6) * max(1.0, abs(lam0))
    chol = _cholesky(band, shift, ctx)
    x = [ctx.mpf(float(v)) for v in vec0]
    for _ in range(iterations):
        x = _solve(chol, x, ctx)
        nrm = ctx.sqrt(ctx.fsum(v * v for v in x))
        x = [v / nrm for v in x]
    Hx = _matvec(band, x, ctx)
    lam = ctx.fsum(a * b for a, b in zip(x, Hx))
    res = ctx.sqrt(ctx.fsum((h - lam * v) ** 2 for h, v in zip(Hx, x)))
    if res > ctx.mpf(10) ** (-(dps // 2)) * max(1, abs(lam)):
        raise NumericalFailureError("extended-precision refinement stalled", residual=float(res))
    imax = max(range(len(x)), key=lambda i: abs(x[i]))
    if x[imax] < 0:
        x = [-v for v in x]
    return lam, x, ctx
