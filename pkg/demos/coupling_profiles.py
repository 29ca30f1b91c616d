"""
Coherent coupling inside the upper gap
======================================

Above the band the bath only mediates coherent exchange. In the superfluid
the condensate adds a distance-independent piece, so distant emitters stay
coupled. In the Mott insulator the exchange dies off exponentially.
"""
import warnings

import numpy as np

from bhwqed import dynamics, mi_bath, sf_bath
from bhwqed.core import EmitterArray, LatticeParams, MiParams, RegimeWarning, SfParams

warnings.simplefilter("ignore", RegimeWarning)
g = 0.1

# %%
# Superfluid, emitter 0.2 J above the band top.
sf = SfParams(n0=1.0)
lp = LatticeParams(omega_c=1.5, U=0.5)
we = sf_bath.band_edges_sf(lp, sf)[1] + 0.2
plateau = 4 * g * g * sf.n0 / we
print(f"SF omega_e={we:.4f}, plateau 4 g^2 n0 / omega_e = {plateau:.6f}")
for m in (0, 1, 2, 5, 10, 20, 40):
    print(f"   |i-j|={m:2d}  Delta={sf_bath.delta_sf(m, 0, we, lp, sf, g).delta:.6f}")

# %%
# The plateau comes from the rotating term alone. The counter-rotating
# partner at -omega_e carries the opposite sign, so in the full effective
# Hamiltonian two far-apart emitters no longer exchange.
pair = EmitterArray((0, 40), omega_e=we, g=g)
rwa = dynamics.build_liouvillian("sf", lp, sf, pair, include_counter_rotating=False)
full = dynamics.build_liouvillian("sf", lp, sf, pair)
print(f"exchange frequency without / with counter-rotating terms: "
      f"{dynamics.exchange_frequency(rwa):.6f} / {dynamics.exchange_frequency(full):.2e}")

# %%
# Mott insulator above the doublon band. The sign alternates and the
# magnitude decays with a single length.
mi = MiParams(n_bar=1)
lp = LatticeParams(omega_c=10.0, U=2.0)
we = float(mi_bath.e_plus(np.pi, lp, mi)) + 0.2
vals = np.array([mi_bath.delta_mi(m, 0, we, lp, mi, g).delta for m in range(9)])
for m, v in enumerate(vals):
    print(f"MI |i-j|={m}  Delta={v:+.3e}")
slope = np.polyfit(np.arange(2, 9), np.log(np.abs(vals[2:])), 1)[0]
print(f"MI decay length {-1 / slope:.3f} sites")
