"""(NT)-periodic Wannier functions of the lowest band, hopping and overlaps.

The supercell ``[-NT/2, NT/2)`` carries the N Floquet fibers
``k_l = 2 pi l / (N T)``.  Their lowest Bloch functions, once put in a smooth
and conjugation-symmetric gauge, are Fourier-summed into N real orthonormal
orbitals ``psi_j`` centred on the sites ``j T``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np

from . import _mp
from .errors import GaugeFailureError, IllSeparatedBandError, InvalidParameterError
from .potential import agmon_action
from .spectral import (DEFAULT_M, BandStructure, FloquetProblem, band_fourier, bloch_values,
                       lowest_eigs, period_grid)

GAP_THRESHOLD = 1e-6
OVERLAP_THRESHOLD = 1e-3


@dataclass
class BlochFamily:
    """Lowest-band Bloch functions ``phi_1(z, k) = exp(ikz) u_k(z)``.

    ``coeffs[i]`` holds the plane-wave coefficients of ``u_{k_i}`` (unit norm
    on one period); ``k_grid`` is ordered by the integer label ``ell``.
    """

    k_grid: np.ndarray
    ell: np.ndarray
    N: int
    coeffs: np.ndarray
    energies: np.ndarray
    T: float
    P: int = 256
    gauge: dict = field(default_factory=dict)

    @property
    def M(self):
        return (self.coeffs.shape[1] - 1) // 2

    @property
    def z(self):
        return period_grid(self.T, self.P)

    @property
    def values(self):
        z = self.z
        return np.array([bloch_values(c, k, z, self.T) for c, k in zip(self.coeffs, self.k_grid)])

    def index(self, ell):
        return int(np.flatnonzero(self.ell == ell)[0])


@dataclass
class WannierBasis:
    """Real orthonormal orbitals ``orbitals[j] = psi_j^N`` on the supercell grid."""

    N: int
    T: float
    P: int
    z: np.ndarray
    orbitals: np.ndarray
    energies: np.ndarray
    family: BlochFamily
    gap: float
    imag_residual: float
    epsilon: float
    dps: int | None = None

    @property
    def dz(self):
        return self.T / self.P

    @property
    def psi0(self):
        return self.orbitals[0]

    @property
    def psi1(self):
        return self.orbitals[1 % self.N]

    def gram(self):
        return self.orbitals @ self.orbitals.T * self.dz

    def band_hopping(self):
        """``-(1/N) sum_l lambda_1(k_l) cos(k_l T)``: hopping of the N-site ring."""
        return float(-np.mean(self.energies * np.cos(self.family.k_grid * self.T)))


def _labels(N):
    lo = -((N - 1) // 2)
    return np.arange(lo, lo + N)


def bloch_family(w, epsilon=None, N=8, M=DEFAULT_M, P=256):
    """Raw (un-gauged) lowest Bloch functions on the N-point supercell grid.

    Also returns the supercell gap ``min_l lambda_2(k_l) - max_l lambda_1(k_l)``.
    """
    eps = w.epsilon if epsilon is None else epsilon
    ell = _labels(N)
    ks = 2 * np.pi * ell / (N * w.T)
    coeffs, lam1, lam2 = [], [], []
    for k in ks:
        vals, vecs = lowest_eigs(FloquetProblem(w, k, M, eps), 2)
        coeffs.append(vecs[:, 0].astype(complex))
        lam1.append(vals[0])
        lam2.append(vals[1])
    fam = BlochFamily(ks, ell, N, np.array(coeffs), np.array(lam1), w.T, P)
    return fam, float(min(lam2) - max(lam1))


def _conj_partner(c, shift):
    """Coefficients of ``conj(phi(z, k))`` relabelled at ``-k + shift * 2pi/T``.

    ``shift = 0`` maps the fiber ``k`` to ``-k``; ``shift = 1`` maps the zone
    edge ``pi/T`` to itself.
    """
    r = np.conj(c[::-1])
    if shift:
        r = np.roll(r, shift)
        r[:shift] = 0.0
    return r


def gauge_fix(raw):
    """Smooth, conjugation-symmetric gauge for a lowest-band family.

    Parallel transport outward from ``k = 0`` aligns consecutive ``u_k``; the
    ``k = 0`` function is made real positive at its maximum; then ``+-k``
    pairs are symmetrized so that ``conj(phi(z, k)) = phi(z, -k)``.
    """
    fam = replace(raw, coeffs=raw.coeffs.copy(), gauge=dict(raw.gauge))
    c = fam.coeffs
    N = fam.N
    if 0 not in fam.ell:
        raise InvalidParameterError("family must contain k = 0")
    i0 = fam.index(0)
    # global phase: phi(., 0) real positive at its maximum
    phi0 = bloch_values(c[i0], 0.0, fam.z, fam.T)
    imax = np.argmax(np.abs(phi0))
    c *= np.abs(phi0[imax]) / phi0[imax]

    min_overlap = np.inf
    for direction in (1, -1):
        prev = i0
        ell = direction
        while ell in fam.ell:
            cur = fam.index(ell)
            o = np.vdot(c[prev], c[cur])
            min_overlap = min(min_overlap, abs(o))
            if abs(o) < OVERLAP_THRESHOLD:
                raise GaugeFailureError(f"vanishing overlap between k labels {ell - direction} and {ell}",
                                        residual=abs(o))
            c[cur] *= np.conj(o) / abs(o)
            prev = cur
            ell += direction

    # k = 0 is self-conjugate; enforce it exactly
    sym = 0.5 * (c[i0] + _conj_partner(c[i0], 0))
    c[i0] = sym / np.linalg.norm(sym)
    conj_res = 0.0
    for ell in fam.ell:
        if ell <= 0:
            continue
        i = fam.index(ell)
        if -ell in fam.ell:
            j = fam.index(-ell)
            conj_res = max(conj_res, np.max(np.abs(_conj_partner(c[i], 0) - c[j])))
            avg = 0.5 * (c[i] + _conj_partner(c[j], 0))
            avg /= np.linalg.norm(avg)
            c[i] = avg
            c[j] = _conj_partner(avg, 0)
        elif 2 * ell == N:
            # zone edge: J c = exp(i alpha) c, rotate by exp(i alpha / 2)
            Jc = _conj_partner(c[i], 1)
            ratio = np.vdot(c[i], Jc)
            half = np.exp(0.5j * np.angle(ratio))
            cand = c[i] * half
            neighbor = c[fam.index(ell - 1)]
            if np.vdot(neighbor, cand).real < 0:
                cand = -cand
            conj_res = max(conj_res, np.max(np.abs(_conj_partner(cand, 1) - cand)))
            c[i] = cand
    fam.gauge.update(transported=True, min_overlap=float(min_overlap),
                     conjugation_residual_before=float(conj_res))
    return fam


def conjugation_residual(fam):
    """``max |conj(phi(z,k)) - phi(z,-k)|`` over the family, on the period grid."""
    vals = fam.values
    res = 0.0
    for ell in fam.ell:
        if -ell in fam.ell:
            res = max(res, np.max(np.abs(np.conj(vals[fam.index(ell)]) - vals[fam.index(-ell)])))
        elif 2 * ell == fam.N:
            # phi(z, -pi/T) is the same Bloch function as phi(z, pi/T)
            res = max(res, np.max(np.abs(np.conj(vals[fam.index(ell)]) - vals[fam.index(ell)])))
    return float(res)


def _supercell_grid(N, T, P):
    return -N * T / 2 + T * np.arange(N * P) / P


def build_wannier(w, epsilon=None, N=8, M=DEFAULT_M, P=256, dps=None):
    """Construct the (NT)-periodic Wannier orbitals of the lowest band.

    ``psi_j(z) = (1/N) sum_l exp(-i k_l j T) phi_1(z, k_l)``.  With ``dps``
    the Bloch coefficients are refined and the orbitals synthesized in
    extended precision, so that exponentially small tails (and the overlap
    integrals built from them) stay accurate.
    """
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    eps = w.epsilon if epsilon is None else epsilon
    raw, gap = bloch_family(w, eps, N, M, P)
    if N > 1 and gap < GAP_THRESHOLD:
        raise IllSeparatedBandError(f"lowest band not separated (gap {gap:.3e})", residual=gap)
    fam = gauge_fix(raw)
    z = _supercell_grid(N, w.T, P)
    if dps is None:
        phis = np.array([bloch_values(c, k, z, w.T) for c, k in zip(fam.coeffs, fam.k_grid)])
        orbs = []
        for j in range(N):
            psi = (np.exp(-1j * fam.k_grid * j * w.T)[:, None] * phis).mean(axis=0)
            orbs.append(psi)
        orbs = np.array(orbs)
        imag = float(np.max(np.abs(orbs.imag)))
        orbs = orbs.real
    else:
        psi0 = _synthesize_mp(w, eps, fam, M, dps)
        orbs = np.array([np.roll(psi0, j * P) for j in range(N)])
        imag = 0.0
    return WannierBasis(N, w.T, P, z, orbs, fam.energies.copy(), fam, gap, imag, eps, dps)


def _synthesize_mp(w, eps, fam, M, dps):
    """``psi_0`` on the supercell grid from mp-refined Bloch coefficients.

    In the symmetric gauge every Bloch function of an even potential is a
    real eigenvector times a phase in ``{1, i, -1, -i}``; the phase is read off
    the double-precision gauge and the eigenvector refined in mpmath.
    """
    N, P, T = fam.N, fam.P, fam.T
    NP = N * P
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    cut = ctx.mpf(10) ** (-(dps + 5))
    cos_tab = [ctx.cospi(ctx.mpf(2 * j) / NP) for j in range(NP)]
    sin_tab = [ctx.sinpi(ctx.mpf(2 * j) / NP) for j in range(NP)]
    terms = []  # (m, re, im) with psi0 += Re((re + i im) exp(2 pi i m idx / NP)) (-1)^m
    for ell in fam.ell:
        if ell < 0:
            continue
        i = fam.index(ell)
        k = fam.k_grid[i]
        c = fam.coeffs[i]
        vals, vecs = lowest_eigs(FloquetProblem(w, k, M, eps), 1)
        x0 = vecs[:, 0].real
        lam, x, _ = _mp.refine_lowest(w, k, M, eps, vals[0], x0, dps=dps)
        ph = np.vdot(x0, c)
        quarter = int(np.round(np.angle(ph) / (np.pi / 2))) % 4
        if abs(ph - 1j ** quarter) > 1e-6:
            raise GaugeFailureError("gauge phase is not a quarter turn", residual=float(np.angle(ph)))
        weight = 1 if (ell == 0 or 2 * ell == N) else 2
        re_f, im_f = [(1, 0), (0, 1), (-1, 0), (0, -1)][quarter]
        for n_idx, xv in enumerate(x):
            if abs(xv) < cut:
                continue
            m = ell + (n_idx - M) * N
            terms.append((m, weight * re_f * xv, weight * im_f * xv))
    norm = 1 / (N * ctx.sqrt(ctx.mpf(T)))
    out = np.empty(NP)
    for idx in range(NP):
        acc = ctx.zero
        for m, re, im in terms:
            j = (m * idx) % NP
            val = re * cos_tab[j] - im * sin_tab[j]
            acc += -val if m % 2 else val
        out[idx] = float(acc * norm)
    return out


def hopping_from_band(band, T=None):
    """``tau = -a(T)``, minus the first Fourier coefficient of the lowest band."""
    return float(-np.real(band_fourier(band, T)[1]))


def _spectral_derivative(f, dz):
    k = 2 * np.pi * np.fft.rfftfreq(len(f), d=dz)
    return np.fft.irfft(1j * k * np.fft.rfft(f), n=len(f))


def hopping_matrix_element(basis, w=None, epsilon=None):
    """``tau = -<H_z psi_0, psi_1>`` through the quadratic form on the supercell."""
    if basis.N < 3:
        raise InvalidParameterError("hopping matrix element needs N >= 3")
    w = basis.family if w is None else w
    eps = basis.epsilon if epsilon is None else epsilon
    if isinstance(w, BlochFamily):
        raise InvalidParameterError("pass the potential explicitly")
    dz = basis.dz
    p0, p1 = basis.psi0, basis.psi1
    d0, d1 = _spectral_derivative(p0, dz), _spectral_derivative(p1, dz)
    form = np.sum(0.5 * d0 * d1 + w(basis.z) / eps ** 2 * p0 * p1) * dz
    return float(-form)


def overlaps(basis):
    """Nonlinear overlap integrals of the Wannier orbitals.

    ``q4 = int psi_0^4``, ``q31 = int psi_0^3 psi_1``, ``q22 = int psi_0^2 psi_1^2``.
    """
    if basis.N < 3:
        raise InvalidParameterError("overlaps need N >= 3")
    p0, p1 = basis.psi0, basis.psi1
    dz = basis.dz
    return {
        "q4": float(np.sum(p0 ** 4) * dz),
        "q31": float(np.sum(p0 ** 3 * p1) * dz),
        "q22": float(np.sum(p0 ** 2 * p1 ** 2) * dz),
    }


def fit_decay_rate(eps, values, power=0.0):
    """Least-squares rate ``S`` in ``|values| ~ C eps^power exp(-S/eps)``.

    Returns ``(S, log C)`` from the regression of ``log|v| - power log eps``
    on ``1/eps``.
    """
    eps = np.asarray(eps, dtype=float)
    y = np.log(np.abs(np.asarray(values, dtype=float))) - power * np.log(eps)
    slope, intercept = np.polyfit(1 / eps, y, 1)
    return float(-slope), float(intercept)


def tunneling_summary(w, basis, band=None, S_fit=None):
    """Collect the quantities written to ``hopping.json``.

    ``S_fit`` (a rate fitted over an eps sweep) is optional; the Agmon
    distance is always included for comparison.
    """
    out = {"tau_matrix": hopping_matrix_element(basis, w), "S": agmon_action(w)}
    out["tau_band"] = hopping_from_band(band) if band is not None else basis.band_hopping()
    out.update(overlaps(basis))
    out["S_fit"] = S_fit
    return out


def write_wannier_csv(basis, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["z"] + [f"psi{j}" for j in range(basis.N)])
        for i, z in enumerate(basis.z):
            wr.writerow([f"{z:.15g}"] + [f"{basis.orbitals[j, i]:.15g}" for j in range(basis.N)])
    return path


def write_hopping_json(summary, path):
    with open(path, "w") as fh:
        json.dump({k: None if v is None else float(f"{v:.15g}") for k, v in summary.items()},
                  fh, indent=2, sort_keys=True)
    return path
