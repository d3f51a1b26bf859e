"""Discrete nonlinear Schrodinger model with a Floquet wrap condition.

    H(c) = -tau sum_j (conj(c_j) c_{j+1} + c_j conj(c_{j+1})) + I sum_j |c_j|^4,
    c_{N+1} = exp(ikN) c_1,  sum_j |c_j|^2 = N_c = nu N.

Internally ``c_j = exp(ikj) g_j`` with ``g`` periodic, so ``k`` sits on every
bond as ``exp(ik)``.  The reduced lattice functionals of the continuum
problem map onto this model with ``N_c = 1``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._optim import QuarticProblem, minimize_sphere
from .errors import InvalidParameterError, NonConvergenceError
from .wannier import build_wannier, overlaps

DEFAULT_RESTARTS = 16
MATCH_RTOL = 1e-8
RANDOM_ITER = 3000


@dataclass(frozen=True)
class DNLSProblem:
    tau: float
    I: float
    nu: float
    N: int
    k: float = 0.0

    def __post_init__(self):
        if self.tau < 0 or self.I < 0:
            raise InvalidParameterError("tau and I must be non-negative")
        if not self.nu > 0:
            raise InvalidParameterError("nu must be positive")
        if self.N < 1:
            raise InvalidParameterError("N must be >= 1")

    @property
    def Nc(self):
        return self.nu * self.N

    @property
    def scale(self):
        """Energy scale used for relative comparisons."""
        return self.tau + self.I * self.nu


@dataclass
class DNLSState:
    c: np.ndarray
    energy: float
    E: float
    mu: float
    residual: float
    restart: str = ""
    degenerate: bool = False
    history: list = field(default_factory=list)


def hopping_matrix(problem):
    """Hermitian quadratic form in the gauged variables ``g``."""
    N, t, ph = problem.N, problem.tau, np.exp(1j * problem.k)
    A = np.zeros((N, N), dtype=complex)
    for j in range(N):
        A[j, (j + 1) % N] += -t * ph
        A[(j + 1) % N, j] += -t * np.conj(ph)
    return A


def to_gauge(problem, c):
    j = np.arange(1, problem.N + 1)
    return np.exp(-1j * problem.k * j) * np.asarray(c, dtype=complex)


def from_gauge(problem, g):
    j = np.arange(1, problem.N + 1)
    return np.exp(1j * problem.k * j) * np.asarray(g, dtype=complex)


def energy_dnls(problem, c):
    """``H(c)`` evaluated directly on the amplitudes with the wrap bond."""
    c = np.asarray(c, dtype=complex)
    nxt = np.roll(c, -1)
    nxt[-1] = np.exp(1j * problem.k * problem.N) * c[0]
    hop = np.sum(np.conj(c) * nxt)
    return float(-problem.tau * 2 * hop.real + problem.I * np.sum(np.abs(c) ** 4))


def gradient_dnls(problem, c):
    """``dH / d Re c + i dH / d Im c`` (equal to ``2 dH / d conj(c)``)."""
    c = np.asarray(c, dtype=complex)
    g = to_gauge(problem, c)
    A = hopping_matrix(problem)
    grad_g = 2 * A @ g + 4 * problem.I * np.abs(g) ** 2 * g
    return from_gauge(problem, grad_g)


def _quartic_problem(problem):
    A = hopping_matrix(problem)
    return QuarticProblem(lambda x: A @ x, np.ones(problem.N), problem.I, problem.Nc)


def closed_branches(problem):
    """Critical branches for ``N = 1`` and ``N = 2``.

    Returns ``[(label, c, mu, E)]``, with ``E`` the energy per particle.
    Existence conditions are applied; the N = 2 equal-moduli family has an
    in-phase and an anti-phase member.
    """
    t, I, nu, k = problem.tau, problem.I, problem.nu, problem.k
    ck = math.cos(k)
    out = []
    if problem.N == 1:
        c = np.array([math.sqrt(nu)], dtype=complex)
        out.append(("N1", c, -2 * t * ck + 2 * I * nu, -2 * t * ck + I * nu))
        return out
    if problem.N != 2:
        raise InvalidParameterError("closed branches exist only for N = 1 and N = 2; use minimize_dnls")
    s = math.sqrt(nu)
    for sign, label in ((1, "case1+"), (-1, "case1-")):
        g = np.array([s, sign * s], dtype=complex)
        out.append((label, from_gauge(problem, g), -2 * sign * t * ck + 2 * I * nu,
                    -2 * sign * t * ck + I * nu))
    tc = abs(t * ck)
    if I > 0 and tc <= I * nu:
        # unequal moduli: |g_1|^2 = nu + x, |g_2|^2 = nu - x, sqrt(nu^2 - x^2) = tc / I
        x = math.sqrt(max(nu ** 2 - (tc / I) ** 2, 0.0))
        sign = -1 if t * ck >= 0 else 1
        g = np.array([math.sqrt(nu + x), sign * math.sqrt(nu - x)], dtype=complex)
        out.append(("case2", from_gauge(problem, g), 4 * I * nu, tc ** 2 / (I * nu) + 2 * I * nu))
    if abs(ck) < 1e-15:
        out.append(("case3", from_gauge(problem, np.array([s, s], dtype=complex)), 2 * I * nu, I * nu))
    return out


def _starts(problem, restarts, rng):
    N, nu = problem.N, problem.nu
    yield "uniform", np.full(N, math.sqrt(nu), dtype=complex)
    alt = math.sqrt(nu) * (-1.0) ** np.arange(N)
    yield "staggered", alt.astype(complex)
    site = np.zeros(N, dtype=complex)
    site[0] = math.sqrt(problem.Nc)
    yield "single-site", site + 1e-3 * math.sqrt(nu)
    for i in range(max(restarts - 3, 0)):
        amp = rng.uniform(0.2, 1.0, N) * math.sqrt(nu)
        yield f"random{i}", amp * np.exp(2j * np.pi * rng.uniform(size=N))


def minimize_dnls(problem, restarts=DEFAULT_RESTARTS, tol=1e-11, rng=None, seed=0,
                  max_iter=50000, random_iter=RANDOM_ITER):
    """Multi-start projected gradient on ``sum |c|^2 = N_c``; best state wins.

    The uniform, staggered and single-site starts get ``max_iter`` steps;
    random starts only explore and get ``random_iter``.  When ``tau << I nu``
    the phase directions are nearly flat and random starts can stall, in
    which case they are skipped.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    qp = _quartic_problem(problem)
    tol_abs = tol * max(problem.scale, 1e-300) * math.sqrt(problem.Nc)
    best = None
    for label, x0 in _starts(problem, restarts, rng):
        try:
            budget = random_iter if label.startswith("random") else max_iter
            res = minimize_sphere(qp, x0, tol=tol_abs, max_iter=budget)
        except NonConvergenceError:
            continue
        if best is None or res.energy < best[1].energy - 1e-13 * problem.scale * problem.Nc:
            best = (label, res)
    if best is None:
        raise NonConvergenceError("no restart converged")
    label, res = best
    c = from_gauge(problem, res.x)
    degenerate = problem.N == 2 and abs(math.cos(problem.k)) < 1e-15
    return DNLSState(c, res.energy, res.energy / problem.Nc, res.mu, res.residual, label,
                     degenerate, res.history)


def branch_minimum(problem):
    return min(b[3] for b in closed_branches(problem))


def matches_branches(state, problem, rtol=MATCH_RTOL):
    """Relative agreement with the best closed branch, on the scale ``max(|E|, tau + I nu)``."""
    ref = branch_minimum(problem)
    return abs(state.E - ref) <= rtol * max(abs(ref), problem.scale)


# reduced lattice functionals --------------------------------------------------

def reduced_coefficients(w, epsilon=None, g_hat=0.0, N=8, M=64, P=256, dps=None, basis=None):
    """Lattice coefficients from the Wannier orbitals of the lowest band.

    ``lambda_hat1`` is the mean of the N supercell band energies, ``tau`` the
    hopping of the N-site ring, ``U = g_hat int psi_0^4`` and
    ``tau_hat = g_hat int psi_0^3 psi_1``.
    """
    eps = w.epsilon if epsilon is None else epsilon
    basis = build_wannier(w, eps, N, M, P, dps) if basis is None else basis
    ov = overlaps(basis)
    lam_hat = float(np.mean(basis.energies))
    lam0 = float(basis.energies[basis.family.index(0)])
    return {"lambda_hat1": lam_hat, "lambda1": lam0, "lambda_deviation": lam_hat - lam0,
            "tau": basis.band_hopping(), "U": g_hat * ov["q4"], "tau_hat": g_hat * ov["q31"],
            "q4": ov["q4"], "q31": ov["q31"], "q22": ov["q22"], "N": N, "g_hat": g_hat}


def minimize_reduced(coeffs, N=None, order=2, restarts=DEFAULT_RESTARTS, seed=0):
    """Minimum of the reduced lattice energy with unit total mass.

    ``order=1`` drops tunneling: ``lambda_hat1 + U / N`` at ``c_j = N^{-1/2}``.
    ``order=2`` keeps nearest-neighbour hopping and solves the DNLS problem
    with ``nu = 1/N``, ``I = U``, ``k = 0``.
    """
    N = coeffs["N"] if N is None else N
    if order == 1:
        return {"m_A_N_approx": coeffs["lambda_hat1"] + coeffs["U"] / N,
                "c": np.full(N, N ** -0.5)}
    if order != 2:
        raise InvalidParameterError("order must be 1 or 2")
    prob = DNLSProblem(max(coeffs["tau"], 0.0), coeffs["U"], 1.0 / N, N, 0.0)
    st = minimize_dnls(prob, restarts, seed=seed)
    return {"m_A_N_approx": coeffs["lambda_hat1"] + st.E, "c": st.c}


def sweep_rows(problems, restarts=DEFAULT_RESTARTS, seed=0):
    """Rows ``{tau, I, nu, N, k, E, branch}`` for the JSON sweep output."""
    rows = []
    for p in problems:
        st = minimize_dnls(p, restarts, seed=seed)
        rows.append({"tau": p.tau, "I": p.I, "nu": p.nu, "N": p.N, "k": p.k, "E": st.E,
                     "branch": st.restart})
    return rows


def write_rows_json(rows, path):
    def fmt(v):
        return float(f"{v:.15g}") if isinstance(v, float) else v
    with open(path, "w") as fh:
        json.dump([{k: fmt(v) for k, v in r.items()} for r in rows], fh, indent=2)
    return path
