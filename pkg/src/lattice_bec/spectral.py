"""Floquet-Bloch spectral theory of ``H_z = -1/2 d^2/dz^2 + w(z)/eps^2``.

Each fiber ``H_{z,k} = -1/2 (d/dz + ik)^2 + W_eps`` acts on T-periodic
functions and is discretized in the plane-wave basis ``exp(2 pi i n z / T)``,
``n = -M..M``.  In that basis the kinetic part is diagonal and the potential
couples ``n`` and ``m`` through the Fourier coefficient ``What[n - m]``.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import _mp
from .errors import InvalidParameterError, NumericalFailureError
from .potential import PeriodicPotential

DEFAULT_M = 128
RESIDUAL_TOL = 1e-9


def default_workers():
    try:
        return max(1, int(os.environ.get("LATTICE_BEC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FloquetProblem:
    potential: PeriodicPotential
    k: float = 0.0
    M: int = DEFAULT_M
    epsilon: float | None = None

    def __post_init__(self):
        if self.M < 8:
            raise InvalidParameterError("plane-wave basis needs M >= 8")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", self.potential.epsilon)

    @property
    def size(self):
        return 2 * self.M + 1

    @property
    def wavenumbers(self):
        """``k + 2 pi n / T`` for the basis ordering ``n = -M..M``."""
        return self.k + 2 * np.pi * np.arange(-self.M, self.M + 1) / self.potential.T


@dataclass
class BandStructure:
    """Floquet eigenvalues ``bands[i, j] = lambda_{j+1}(k_grid[i])``.

    ``dispersion[i, j] = lambda_{j+1}(k_i) - lambda_{j+1}(k_0)`` is kept
    separately because for deep lattices the band width is far below the
    resolution of ``bands`` itself; when the band was refined in extended
    precision this array carries the accurate differences.
    """

    k_grid: np.ndarray
    bands: np.ndarray
    T: float
    dispersion: np.ndarray
    vectors: np.ndarray | None = None
    M: int = DEFAULT_M
    m_convergence: float = float("nan")
    dps: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_bands(self):
        return self.bands.shape[1]

    def gap(self):
        """``lambda_2(0) - lambda_1(0)`` (the longitudinal gap)."""
        return float(self.bands[0, 1] - self.bands[0, 0])

    def width(self, j=0):
        return float(self.dispersion[:, j].max() - self.dispersion[:, j].min())


def assemble(problem):
    """Plane-wave matrix of the fiber operator ``H_{z,k}``.

    Real symmetric for even potentials, complex Hermitian otherwise.
    """
    pot = problem.potential
    q = problem.wavenumbers
    n_idx, what = pot.fourier_coefficients()
    L = (len(what) - 1) // 2
    size = problem.size
    even = pot.even
    H = np.zeros((size, size), dtype=float if even else complex)
    scale = 1.0 / problem.epsilon ** 2
    for d in range(-min(L, size - 1), min(L, size - 1) + 1):
        c = what[L + d] * scale
        if even:
            c = c.real
        if c == 0:
            continue
        idx = np.arange(max(d, 0), size + min(d, 0))
        # H[n, m] = What[n - m]
        H[idx, idx - d] = c
    H[np.diag_indices(size)] += 0.5 * q ** 2
    return H


def _fix_phase(vecs):
    """Make the largest-modulus entry of every column real positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    ph = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(ph) / ph)[None, :]


def lowest_eigs(problem, n=1):
    """``n`` lowest eigenpairs of :func:`assemble`, ascending, orthonormal."""
    if not 1 <= n <= problem.size:
        raise InvalidParameterError(f"need 1 <= n <= {problem.size}")
    H = assemble(problem)
    try:
        vals, vecs = linalg.eigh(H, subset_by_index=(0, n - 1))
    except linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailureError(f"eigensolver failed: {exc}") from exc
    vecs = _fix_phase(vecs)
    res = np.linalg.norm(H @ vecs - vecs * vals[None, :], axis=0)
    if np.any(res > RESIDUAL_TOL * max(1.0, np.max(np.abs(vals)))):
        raise NumericalFailureError("eigenpair residual above tolerance", residual=float(res.max()))
    return vals, vecs


def k_grid(T, k_count):
    """Uniform grid on ``[0, 2 pi / T)``, endpoint excluded."""
    return 2 * np.pi * np.arange(k_count) / (k_count * T)


def band_structure(w, epsilon=None, k_count=64, n_bands=3, M=DEFAULT_M, *,
                   vectors=False, dps=None, workers=None, check_convergence=True):
    """Sample the lowest ``n_bands`` bands on a uniform quasi-momentum grid.

    With ``dps`` set the lowest band is additionally refined to ``dps``
    decimal digits (even potentials only) so that ``dispersion[:, 0]`` resolves
    exponentially narrow bands.
    """
    if k_count < 4:
        raise InvalidParameterError("k_count must be at least 4")
    eps = w.epsilon if epsilon is None else epsilon
    ks = k_grid(w.T, k_count)

    def solve(k):
        return lowest_eigs(FloquetProblem(w, k, M, eps), n_bands)

    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(solve, ks))
    else:
        results = [solve(k) for k in ks]
    bands = np.array([r[0] for r in results])
    vecs = np.array([r[1] for r in results]) if vectors else None
    dispersion = bands - bands[0][None, :]
    meta = {}
    if dps is not None:
        lam_mp = []
        for k, (vals, vv) in zip(ks, results):
            lam, _, _ = _mp.refine_lowest(w, k, M, eps, vals[0], vv[:, 0].real, dps=dps)
            lam_mp.append(lam)
        dispersion[:, 0] = [float(l - lam_mp[0]) for l in lam_mp]
        bands[:, 0] = [float(l) for l in lam_mp]
        meta["lambda1_k0_mp"] = str(lam_mp[0])
    conv = float("nan")
    if check_convergence:
        fine = lowest_eigs(FloquetProblem(w, 0.0, 2 * M, eps), 1)[0][0]
        conv = abs(fine - bands[0, 0])
    return BandStructure(ks, bands, w.T, dispersion, vecs, M, conv, dps, meta)


def nt_spectrum(w, epsilon=None, N=1, n=None, M=DEFAULT_M):
    """Spectrum of the (NT)-periodic operator as a union of Floquet spectra.

    The fibers at ``k_l = 2 pi l / (N T)``, ``l = 0..N-1`` are merged and the
    ``n`` lowest values returned (default ``n = N + 1``).
    """
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    eps = w.epsilon if epsilon is None else epsilon
    n = N + 1 if n is None else n
    vals = []
    for ell in range(N):
        k = 2 * np.pi * ell / (N * w.T)
        vals.append(lowest_eigs(FloquetProblem(w, k, M, eps), min(n, 2 * M + 1))[0])
    return np.sort(np.concatenate(vals))[:n]


def band_fourier(band, T=None):
    """Fourier coefficients ``a(l T)`` of a band sampled on a periodic k-grid.

    ``a(l) = (T / 2 pi) int lambda(k) exp(i k l T) dk`` evaluated with the
    trapezoid rule (exact for trigonometric polynomials of low degree).
    Accepts either a :class:`BandStructure` (band 1, using the accurate
    dispersion) or an array of samples together with ``T``.
    Returns coefficients for ``l = 0..K//2``.
    """
    if isinstance(band, BandStructure):
        T = band.T
        ref = band.bands[0, 0]
        vals = band.dispersion[:, 0]
    else:
        if T is None:
            raise InvalidParameterError("T is required with raw band samples")
        vals = np.asarray(band, dtype=float)
        ref = 0.0
    K = len(vals)
    ks = k_grid(T, K)
    ell = np.arange(K // 2 + 1)
    a = (vals[None, :] * np.exp(1j * np.outer(ell, ks) * T)).mean(axis=1)
    a[0] += ref
    if np.max(np.abs(a.imag)) <= 1e-12 * max(np.max(np.abs(a.real)), 1e-300):
        return a.real
    return a


def bloch_values(coeffs, k, z, T):
    """Evaluate ``phi(z, k) = exp(ikz) sum_n c_n exp(2 pi i n z/T) / sqrt(T)``."""
    coeffs = np.asarray(coeffs)
    M = (len(coeffs) - 1) // 2
    q = k + 2 * np.pi * np.arange(-M, M + 1) / T
    return np.exp(1j * np.outer(z, q)) @ coeffs / math.sqrt(T)


def period_grid(T, P):
    """``P`` uniform points on ``[-T/2, T/2)``."""
    return -T / 2 + T * np.arange(P) / P


def ground_state(w, epsilon=None, P=256, M=DEFAULT_M, N=1):
    """Periodic ground state ``phi_1`` sampled on ``[-NT/2, NT/2)``.

    Returns ``(lambda_1, z, phi)`` with ``phi`` real, positive and
    L2-normalized on the ``N``-cell (trapezoid rule).
    """
    eps = w.epsilon if epsilon is None else epsilon
    vals, vecs = lowest_eigs(FloquetProblem(w, 0.0, M, eps), 1)
    z = period_grid(N * w.T, N * P)
    phi = bloch_values(vecs[:, 0], 0.0, z, w.T).real
    dz = w.T / P
    phi /= math.sqrt(np.sum(phi ** 2) * dz)
    return float(vals[0]), z, phi


def write_bands_csv(bs, path):
    """``k,lambda1,...,lambdaJ`` with 15 significant digits."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["k"] + [f"lambda{j + 1}" for j in range(bs.n_bands)])
        for k, row in zip(bs.k_grid, bs.bands):
            wr.writerow([f"{k:.15g}"] + [f"{v:.15g}" for v in row])
    return path
