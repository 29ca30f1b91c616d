"""
Where the superradiant burst happens
====================================

A fully inverted array bursts when the emitted waveguide power first rises.
The criterion depends on the number of emitters and on k_1D d, and k_1D is
set by the interaction U through the bath dispersion. Sweeping U therefore
moves the array in and out of the bursting region.
"""
import warnings

import numpy as np

from bhwqed import superradiance as sr
from bhwqed.core import RegimeWarning

warnings.simplefilter("ignore", RegimeWarning)

SYMBOL = {sr.BURST: "#", sr.NO_BURST: ".", sr.UNDEFINED: " "}


def show(m):
    print("      U  " + " ".join(f"{n:>2d}" for n in m.ne_grid))
    for a, u in enumerate(m.u_grid):
        print(f"{u:7.3f}  " + " ".join(f"{SYMBOL[s]:>2s}" for s in m.state[a]))


# %%
# Two emitters never burst: the left side is 1 + cos^2(k d) and never beats 2.
for x in (0.3, np.pi / 2, 2.8):
    c = sr.burst_condition(2, x)
    print(f"N_e=2 k d={x:.2f}: lhs {c.lhs:.3f} vs rhs {c.rhs:.1f}")

# %%
# Superfluid map with a small parasitic loss. The N_e = 6 column flips from
# bursting to quiet at large U.
ne = list(range(2, 11))
show(sr.burst_phase_map("sf", np.linspace(0, 0.5, 11), ne, omega_e=2.0, omega_c=2.0,
                        g=0.1, gamma_prime=0.009))

# %%
# Mott map. Above U = 5 J the emitter frequency leaves both bands and the
# criterion is not defined (blank).
show(sr.burst_phase_map("mi", np.linspace(2, 6, 17), ne, omega_e=11.0, omega_c=10.0,
                        g=0.1, gamma_prime=0.03))
