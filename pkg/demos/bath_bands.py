"""
Quasiparticle bands of the two bath phases
==========================================

The waveguide is a Bose-Hubbard chain. Deep in the superfluid it carries
gapless-or-gapped Bogoliubov phonons; deep in the Mott insulator it carries
doublon and holon bands. This walkthrough prints both and the decay rate of a
single emitter across each band.
"""
import warnings

import numpy as np

from bhwqed import mi_bath, sf_bath
from bhwqed.core import LatticeParams, MiParams, RegimeWarning, SfParams

warnings.simplefilter("ignore", RegimeWarning)
g = 0.1

# %%
# Superfluid side. With omega_c = 2 J - U n0 the band touches zero and the
# low end becomes a linear phonon branch; a larger omega_c opens a gap.
sf = SfParams(n0=1.0)
for wc in (1.5, 2.0):
    lp = LatticeParams(omega_c=wc, U=0.5)
    lo, hi = sf_bath.band_edges_sf(lp, sf)
    print(f"SF omega_c={wc}: band [{lo:.3f}, {hi:.3f}] J")
    for k in np.linspace(0, np.pi, 5):
        print(f"   k={k:.3f}  omega_k={float(sf_bath.dispersion_sf(k, lp, sf)):.4f}")

# %%
# Single-emitter decay follows the inverse group velocity, so it grows at
# the top of the band where the velocity vanishes.
lp = LatticeParams(omega_c=2.0, U=0.5)
lo, hi = sf_bath.band_edges_sf(lp, sf)
for w in np.linspace(lo, hi, 7)[1:-1]:
    print(f"SF omega={w:.3f}  Gamma_1D={sf_bath.gamma_sf(0, 0, w, lp, sf, g):.5f}")

# %%
# Mott side. The doublon band sits near omega_c + U n, the holon band near
# omega_c - U (n - 1); both widths scale with the filling.
mi = MiParams(n_bar=1)
lp = LatticeParams(omega_c=10.0, U=3.0)
for sigma, label in ((1, "doublon"), (-1, "holon")):
    lo, hi = mi_bath.band_edges_mi(sigma, lp, mi)
    print(f"MI {label} band [{lo:.3f}, {hi:.3f}] J")

for w in (9.5, 10.5, 13.0, 15.5):
    r = mi_bath.gamma_mi(0, 0, w, lp, mi, g)
    print(f"MI omega={w:.1f}  Gamma_1D={r.gamma:.5f}")
