"""Walkthrough: reduced GP energies along both routes and the regime classifier.

Run with ``python3 demos/gp_and_regimes.py``.
"""
import math

from lattice_bec import dnls, gp1d, gp2d, regimes
from lattice_bec.asymptotics import C_TF
from lattice_bec.potential import PeriodicPotential
from lattice_bec.regimes import PhysicalParams

w = PeriodicPotential.sin2(1.0, 0.05)

# Route A: 1D lattice energy as the coupling grows.
for g_hat in (0.0, 1.0, 10.0, 100.0):
    st = gp1d.minimize_a(w, g_hat=g_hat, P=128)
    print(f"m_A(g_hat={g_hat:>5}) = {st.energy:.5f}  ({len(st.history)} steps)")

# Route B: transverse radial problem approaching the TF law.
for g_t in (10.0, 100.0, 1000.0):
    st = gp2d.minimize_b(1.0, g_t, n=2048)
    print(f"m_B(g~={g_t:>6}) = {st.energy:.4f}   TF law {C_TF * math.sqrt(g_t):.4f}")

# Discrete NLS on a ring of two sites at k = 0: the uniform state wins,
# with energy -2 tau + I nu, for every interaction strength.
for I in (0.5, 1.0, 4.0):
    st = dnls.minimize_dnls(dnls.DNLSProblem(1.0, I, 1.0, 2, 0.0))
    occ = ", ".join(f"{abs(c) ** 2:.3f}" for c in st.c)
    print(f"DNLS I={I}: E={st.E:.4f}  |c|^2=[{occ}]")

# Which reduced picture applies?
for p in (PhysicalParams(0.0, 1.0, 0.05), PhysicalParams(0.01, 1e4, 1e-3),
          PhysicalParams(0.5, 1.0, 1e-4), PhysicalParams(100.0, 1.0, 0.01)):
    rep = regimes.classify(p, c=10.0)
    print(f"g={p.g:<6} omega={p.omega_perp:<8} eps={p.epsilon:<7} -> {rep.regime:13} satisfied={rep.satisfied}")
