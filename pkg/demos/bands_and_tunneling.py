"""Walkthrough: lowest bands of sin^2(pi z) and the exponentially small hopping.

Run with ``python3 demos/bands_and_tunneling.py``.
"""
import numpy as np

from lattice_bec import asymptotics, spectral, wannier
from lattice_bec.potential import PeriodicPotential, agmon_action

w = PeriodicPotential.sin2(1.0, 0.05)

# Band structure on a modest k grid; the first band is almost flat.
bs = spectral.band_structure(w, k_count=32, n_bands=3)
print("band minima   :", np.round(bs.bands.min(axis=0), 4))
print("harmonic      :", np.round(asymptotics.harmonic_levels(w).levels, 4))
print("gap 1->2      : %.4f" % (bs.bands[:, 1].min() - bs.bands[:, 0].max()))

# Hopping from the band width versus the semi-classical law.
S = agmon_action(w)
print("Agmon action S: %.6f" % S)
for eps in (0.05, 0.03, 0.02):
    band = spectral.band_structure(w, eps, k_count=16, n_bands=1, M=64, dps=40)
    tau = wannier.hopping_from_band(band)
    std = asymptotics.tau_asymptotic(w, eps)
    red = asymptotics.tau_asymptotic(w, eps, prefactor="rederived")
    print(f"eps={eps:<5} tau={tau:.4e}  tau/law={tau / std:.3f}  tau/law(rederived)={tau / red:.3f}")

# Wannier orbitals on an 8-cell ring.
basis = wannier.build_wannier(w, N=8, P=128, M=64)
print("overlaps      :", {k: float(v) for k, v in wannier.overlaps(basis).items()})
