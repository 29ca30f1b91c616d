"""
Watching a burst in the master equation
=======================================

The burst inequality is a statement about the initial slope of the emitted
power. Here the full emitter density matrix is integrated for a few arrays
and the power trace is compared against the inequality.
"""
import numpy as np

from bhwqed import dynamics as dy
from bhwqed import superradiance as sr

# %%
# Six emitters at k d = pi/2 lie well inside the bursting region.
for n, kd in ((6, np.pi / 2), (2, np.pi / 2), (8, np.pi / 6)):
    liou = dy.EmitterLiouvillian.from_matrices(dy.cosine_decay_matrix(n, kd))
    tr = dy.evolve(liou, dy.excited_state(n), 3.0, n_out=151)
    res = dy.detect_burst(tr)
    c = sr.burst_condition(n, kd)
    print(f"N_e={n} kd={kd:.3f}: criterion {c.burst} (margin {c.margin:+.3f}), "
          f"dynamics {res.burst}, peak P={res.peak_power:.3f} at t={res.peak_time:.3f}")

# %%
# Power profile of the bursting array, sampled coarsely.
liou = dy.EmitterLiouvillian.from_matrices(dy.cosine_decay_matrix(6, np.pi / 2))
tr = dy.evolve(liou, dy.excited_state(6), 3.0, n_out=31)
for t, p, n in zip(tr.times[::3], tr.waveguide_power[::3], tr.population[::3]):
    print(f"t={t:.2f}  P={p:.3f}  N={n:.3f}  " + "*" * int(10 * p))

# %%
# Parasitic loss raises the right-hand side and can quench the burst.
for ratio in (0.0, 0.5, 2.0):
    c = sr.burst_condition(6, np.pi / 2, ratio)
    liou = dy.EmitterLiouvillian.from_matrices(dy.cosine_decay_matrix(6, np.pi / 2),
                                               gamma_prime=ratio)
    tr = dy.evolve(liou, dy.excited_state(6), 3.0 / (1 + ratio), n_out=151)
    print(f"Gamma'/Gamma_1D={ratio}: criterion {c.burst}, dynamics {dy.detect_burst(tr).burst}")
