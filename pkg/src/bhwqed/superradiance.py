"""Superradiant burst criterion and (U, N_e) phase maps."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import mi_bath, sf_bath
from .core import LatticeParams, MiParams, OutOfBandError, SfParams

BURST, NO_BURST, UNDEFINED = 1, 0, -1


@dataclass(frozen=True)
class BurstCriterion:
    n_e: int
    k1d_d: float
    gamma_ratio: float
    lhs: float
    rhs: float

    @property
    def burst(self) -> bool:
        return self.lhs > self.rhs

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


def interference_ratio(n_e: int, x: float) -> float:
    """``sin^2(n x) / sin^2(x)`` with its limit ``n^2`` at ``sin x = 0``."""
    s = np.sin(x)
    if abs(s) < 1e-7:
        # Taylor about the nearest multiple of pi: ratio = n^2 (1 - (n^2-1) y^2/3)
        y = x - np.pi * round(x / np.pi)
        return float(n_e ** 2 * (1 - (n_e ** 2 - 1) * y * y / 3))
    return float(np.sin(n_e * x) ** 2 / s ** 2)


def burst_condition(n_e: int, k1d_d: float, gamma_ratio: float = 0.0) -> BurstCriterion:
    """Waveguide burst inequality ``N/2 + sin^2(N kd)/(2N sin^2 kd) > 2 + G'/G_1D``."""
    if n_e < 1:
        raise ValueError("n_e must be at least 1")
    lhs = n_e / 2 + interference_ratio(n_e, k1d_d) / (2 * n_e)
    return BurstCriterion(n_e=int(n_e), k1d_d=float(k1d_d), gamma_ratio=float(gamma_ratio),
                          lhs=float(lhs), rhs=2.0 + float(gamma_ratio))


def burst_condition_matrix(gamma: np.ndarray, gamma_prime: float = 0.0) -> BurstCriterion:
    """Same inequality for an arbitrary decay matrix.

    The initial slope of the power emitted into the waveguide from the fully
    excited state is ``sum_{i != j} G_ij^2 - sum_i G_ii (G_ii + G')``. Dividing
    by ``N G_1D^2`` (``G_1D`` the mean diagonal) gives
    ``lhs = sum_ij G_ij^2 / (N G_1D^2)``; ``rhs`` collects the diagonal terms and
    equals ``2 + G'/G_1D`` for a uniform diagonal. For cosine matrices this
    reproduces ``burst_condition``; the ``k1d_d`` field is NaN.
    """
    g = np.asarray(gamma, dtype=float)
    n = g.shape[0]
    g1d = float(np.mean(np.diag(g)))
    if g1d <= 0:
        raise OutOfBandError("single-emitter decay rate is zero; burst ratio undefined")
    dg = np.diag(g)
    lhs = float(np.sum(g * g) / (n * g1d * g1d))
    rhs = float(np.sum(dg * dg + dg * (dg + gamma_prime)) / (n * g1d * g1d))
    return BurstCriterion(n_e=n, k1d_d=float("nan"), gamma_ratio=gamma_prime / g1d,
                          lhs=lhs, rhs=float(rhs))


def gamma_1d(phase: str, omega_e: float, lp: LatticeParams, params, g: float) -> float:
    """Single-emitter decay rate; raises when ``omega_e`` sits in a gap."""
    if phase == "sf":
        val = sf_bath.gamma_sf(0, 0, omega_e, lp, params, g)
    elif phase == "mi":
        val = mi_bath.gamma_mi(0, 0, omega_e, lp, params, g).gamma
    else:
        raise ValueError(f"unknown phase {phase!r}")
    if not val > 0:
        raise OutOfBandError(f"omega_e = {omega_e} J is not inside a band; Gamma_1D = 0")
    return float(val)


def phase_momentum(phase, omega_e, lp, params, branch=1) -> float:
    if phase == "sf":
        return sf_bath.k1d_sf(omega_e, lp, params)
    return mi_bath.k1d_mi(omega_e, branch, lp, params)


@dataclass
class BurstMap:
    """Tri-state grid ``state[u, n_e]`` in {1 burst, 0 none, -1 undefined}."""

    phase: str
    u_grid: np.ndarray
    ne_grid: np.ndarray
    state: np.ndarray
    k_1d: np.ndarray
    gamma_1d: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    def rows(self) -> List[Dict]:
        out = []
        for a, u in enumerate(self.u_grid):
            for b, n in enumerate(self.ne_grid):
                out.append({"U": float(u), "N_e": int(n), "state": int(self.state[a, b]),
                            "k_1d": float(self.k_1d[a]), "gamma_1d": float(self.gamma_1d[a]),
                            "lhs": float(self.lhs[a, b]), "rhs": float(self.rhs[a, b])})
        return out


def burst_phase_map(phase: str, u_grid: Sequence[float], ne_grid: Sequence[int], *,
                    omega_e: float, omega_c: float, g: float, gamma_prime: float = 0.0,
                    n0: float = 1.0, n_bar: int = 1, J: float = 1.0,
                    branch: int = 1, executor=None) -> BurstMap:
    """Burst verdict over interaction strength and emitter number.

    For each ``U`` the resonant momentum and ``Gamma_1D`` are recomputed; a
    fixed ``gamma_prime`` (units of J) then gives a U dependent ratio. Cells
    where ``omega_e`` leaves the band are undefined. In the Mott phase
    ``branch`` picks which band fixes ``k_1D`` when both are resonant.
    """
    ug = np.asarray(list(u_grid), dtype=float)
    ng = np.asarray(list(ne_grid), dtype=int)
    params = SfParams(n0) if phase == "sf" else MiParams(n_bar)
    state = np.full((ug.size, ng.size), UNDEFINED, dtype=int)
    lhs = np.full(state.shape, np.nan)
    rhs = np.full(state.shape, np.nan)
    kk = np.full(ug.size, np.nan)
    g1 = np.full(ug.size, np.nan)

    def row(a):
        lp = LatticeParams(omega_c=omega_c, U=float(ug[a]), J=J)
        try:
            k = phase_momentum(phase, omega_e, lp, params, branch)
            rate = gamma_1d(phase, omega_e, lp, params, g)
        except OutOfBandError:
            return a, None
        return a, (k, rate)

    rows = executor.map(row, range(ug.size)) if executor else map(row, range(ug.size))
    for a, res in rows:
        if res is None:
            continue
        k, rate = res
        kk[a], g1[a] = k, rate
        for b, n in enumerate(ng):
            bc = burst_condition(int(n), k, gamma_prime / rate)
            lhs[a, b], rhs[a, b] = bc.lhs, bc.rhs
            state[a, b] = BURST if bc.burst else NO_BURST
    return BurstMap(phase=phase, u_grid=ug, ne_grid=ng, state=state, k_1d=kk,
                    gamma_1d=g1, lhs=lhs, rhs=rhs)
