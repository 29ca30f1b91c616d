"""Numerical ground truth for the bath response.

The time-domain correlator is a discrete momentum sum over ``N`` modes; its
half Fourier transform is done analytically mode by mode with a Lorentzian
regulator ``eta``::

    int_0^inf dt exp(i (omega + i eta) t) exp(-i w_k t) = i / (omega + i eta - w_k)

In-band results are extrapolated to ``eta -> 0`` with Richardson steps over a
halving ladder. Frequencies farther than ``GAP_SPACINGS`` mode spacings from every mode
are evaluated at ``eta = 0`` directly, where the trapezoidal momentum sum of
an analytic periodic integrand converges exponentially.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import mi_bath, sf_bath
from .core import LatticeParams, MiParams, PhysicsError, SfParams

DEFAULT_ETAS = (0.02, 0.01, 0.005)
GAP_SPACINGS = 50
# default ladder top is kept below this fraction of the distance to the nearest band edge
EDGE_FRACTION = 1 / 40


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CorrelatorSpec:
    """What to sum: phase parameters, the emitter pair and numerical knobs.

    ``k_grid_size=None`` picks the smallest power of two (at least 4096) for
    which the narrowest Lorentzian spans five mode spacings of the fastest band.
    ``weights`` selects the Mott correlator weights: ``"even"`` keeps the
    reflection-symmetric part, ``"literal"`` adds the odd pairing piece.
    """

    phase: str
    lp: LatticeParams
    params: object
    i: int = 0
    j: int = 0
    k_grid_size: Optional[int] = None
    eta: float = DEFAULT_ETAS[0]
    dispersion_mode: str = "exact"
    weights: str = "even"

    def __post_init__(self):
        if self.phase not in ("sf", "mi"):
            raise ValueError(f"phase must be 'sf' or 'mi', got {self.phase!r}")
        if self.dispersion_mode not in ("exact", "approximated"):
            raise ValueError(f"unknown dispersion_mode {self.dispersion_mode!r}")
        if self.weights not in ("even", "literal"):
            raise ValueError(f"unknown weights {self.weights!r}")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.k_grid_size is not None and (self.k_grid_size < 256 or self.k_grid_size % 2):
            raise ValueError("k_grid_size must be even and at least 256")

    def grid_size(self) -> int:
        if self.k_grid_size is not None:
            return int(self.k_grid_size)
        eta_min = self.eta / 4
        v = max_velocity(self.phase, self.lp, self.params)
        n = 4096
        while 5 * v * 2 * np.pi / n > eta_min:
            n *= 2
        return n


@dataclass(frozen=True)
class QuadratureResult:
    I: complex
    gamma: float
    delta: float
    gamma_err: float
    delta_err: float
    converged: bool
    method: str
    n_k: int


def max_velocity(phase, lp, params) -> float:
    if phase == "sf":
        return 2 * lp.J
    return 2 * lp.J * (params.n_bar + 1) * 1.05


def _modes(spec: CorrelatorSpec, k):
    """Return ``[(weight_k, omega_k), ...]`` per branch plus the condensate weight."""
    lp, p = spec.lp, spec.params
    if spec.phase == "sf":
        f = sf_bath.f_sf(k, lp, p)
        un = lp.U * p.n0
        if spec.dispersion_mode == "exact":
            wk = sf_bath.dispersion_sf(k, lp, p)
        else:
            wk = f
        with np.errstate(invalid="ignore", divide="ignore"):
            if spec.dispersion_mode == "exact":
                # (u - v)^2 = sqrt((f - U n0)/(f + U n0)), which stays finite at omega_k = 0
                weight = np.sqrt(np.clip((f - un) / (f + un), 0.0, None))
            else:
                weight = (f - un) / f
        # a zero mode at U = 0 is free and carries unit weight
        weight = np.where(np.isfinite(weight), weight, 1.0)
        return [(weight, wk)], 4 * p.n0
    n = p.n_bar
    root = np.sqrt(n * (n + 1))
    if spec.dispersion_mode == "exact":
        out = []
        for s in (1, -1):
            w_even = mi_bath.branch_weight(k, s, lp, p)
            if spec.weights == "literal":
                # odd pairing piece: +/- sqrt(n(n+1)) Delta_k / eta_k
                odd = s * root * mi_bath.pair_amplitude(k, lp, p) / mi_bath.eta(k, lp, p)
                w_even = w_even + odd
            out.append((w_even, mi_bath.dispersion_mi(k, s, lp, p)))
        return out, 0.0
    vs = mi_bath.varsigma(k, lp, p)
    wp, wm = np.full_like(k, n + 1.0), np.full_like(k, float(n))
    if spec.weights == "literal":
        odd = 2 * root * mi_bath.pair_amplitude(k, lp, p) / vs
        wp, wm = wp + odd, wm - odd
    return [(wp, mi_bath.e_plus(k, lp, p)), (wm, mi_bath.e_minus(k, lp, p))], 0.0


def correlator_xx(spec: CorrelatorSpec, t: float) -> complex:
    """``<x_i(t) x_j(0)>`` in the bath ground state as a discrete momentum sum."""
    n = spec.grid_size()
    k = 2 * np.pi * np.arange(n) / n
    branches, cond = _modes(spec, k)
    phase = np.exp(1j * k * (spec.i - spec.j))
    total = complex(cond)
    for weight, wk in branches:
        total += np.mean(weight * phase * np.exp(-1j * wk * t))
    return total


def _half_fourier(branches, cond, k, m, z):
    """``sum_k W_k e^{ikm} i/(z - w_k)`` averaged over the grid, plus condensate."""
    phase = np.exp(1j * k * m)
    total = 1j * cond / z
    for weight, wk in branches:
        total += np.mean(weight * phase * 1j / (z - wk))
    return total


def _evaluate(spec, omega, eta, g):
    n = spec.grid_size()
    k = 2 * np.pi * np.arange(n) / n
    branches, cond = _modes(spec, k)
    m = spec.i - spec.j
    g2 = g * g
    z = omega + 1j * eta
    i_ij = g2 * _half_fourier(branches, cond, k, m, z)
    i_ji = g2 * _half_fourier(branches, cond, k, -m, z)
    gamma = i_ij + np.conj(i_ji)
    delta = (i_ij - np.conj(i_ji)) / 2j
    return i_ij, gamma, delta, branches, cond


def _richardson(values):
    """Eliminate O(h) then O(h^2) from values at h, h/2, h/4, ..."""
    table = [np.asarray(values, dtype=complex)]
    for order in range(1, len(values)):
        prev = table[-1]
        fac = 2.0 ** order
        table.append((fac * prev[1:] - prev[:-1]) / (fac - 1))
    return table


def response_quadrature(spec: CorrelatorSpec, omega: float, g: float = 1.0,
                        etas: Optional[Sequence[float]] = None,
                        tol: Optional[float] = None,
                        method: str = "auto") -> QuadratureResult:
    """Bath response ``I_ij``, ``Gamma_ij`` and ``Delta_ij`` at frequency ``omega``.

    ``Gamma = I_ij + I_ji^*`` and ``Delta = (I_ij - I_ji^*)/(2i)``. With
    ``method="auto"`` a frequency isolated from every mode by more than
    ``GAP_SPACINGS`` mode spacings is summed at ``eta = 0``; otherwise the ladder ``etas``
    (default ``spec.eta * (1, 1/2, 1/4)``) is Richardson extrapolated. The default
    ladder is narrowed near a band edge so the Lorentzian stays inside the band.
    """
    default_etas = etas is None
    n = spec.grid_size()
    k = 2 * np.pi * np.arange(n) / n
    branches, cond = _modes(spec, k)
    gap = min(np.min(np.abs(omega - wk)) for _, wk in branches)
    if cond:
        gap = min(gap, abs(omega))
    spacing = max_velocity(spec.phase, spec.lp, spec.params) * 2 * np.pi / n
    if method == "auto":
        method = "direct" if gap > GAP_SPACINGS * spacing else "richardson"
    if method == "direct":
        if gap == 0:
            raise PhysicsError("direct summation hit a mode frequency exactly")
        spec_half = CorrelatorSpec(**{**spec.__dict__, "k_grid_size": n // 2})
        i_ij, gam, dlt, _, _ = _evaluate(spec, omega, 0.0, g)
        _, gam2, dlt2, _, _ = _evaluate(spec_half, omega, 0.0, g)
        res = QuadratureResult(I=complex(i_ij), gamma=float(gam.real), delta=float(dlt.real),
                               gamma_err=float(abs(gam - gam2)), delta_err=float(abs(dlt - dlt2)),
                               converged=True, method="direct", n_k=n)
    elif method == "richardson":
        if default_etas:
            edge = min(min(abs(omega - wk.min()), abs(omega - wk.max())) for _, wk in branches)
            if 0 < EDGE_FRACTION * edge < spec.eta:
                spec = replace(spec, eta=EDGE_FRACTION * edge)
                n = spec.grid_size()
            etas = (spec.eta, spec.eta / 2, spec.eta / 4)
        etas = tuple(float(e) for e in etas)
        vals = [_evaluate(spec, omega, e, g) for e in etas]
        ii = _richardson([v[0] for v in vals])
        gg = _richardson([v[1] for v in vals])
        dd = _richardson([v[2] for v in vals])
        g_best, d_best = gg[-1][-1], dd[-1][-1]
        g_err = abs(g_best - gg[-2][-1]) if len(etas) > 1 else abs(g_best)
        d_err = abs(d_best - dd[-2][-1]) if len(etas) > 1 else abs(d_best)
        scale = max(abs(g_best), abs(d_best), 1e-300)
        converged = tol is None or max(g_err, d_err) <= tol * scale
        if not converged:
            warnings.warn(f"eta ladder not converged at omega={omega}: "
                          f"errors {g_err:.2e}, {d_err:.2e}", ConvergenceWarning, stacklevel=2)
        res = QuadratureResult(I=complex(ii[-1][-1]), gamma=float(g_best.real),
                               delta=float(d_best.real), gamma_err=float(g_err),
                               delta_err=float(d_err), converged=bool(converged),
                               method="richardson", n_k=n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return res


def coupling_matrix(phase, lp, params, positions, omega, g, **kw):
    """Oracle ``Gamma_ij`` and ``Delta_ij`` matrices for a set of emitter sites."""
    pos = list(positions)
    n = len(pos)
    gam = np.zeros((n, n))
    dlt = np.zeros((n, n))
    cache = {}
    for a in range(n):
        for b in range(n):
            m = pos[a] - pos[b]
            if abs(m) not in cache:
                spec = CorrelatorSpec(phase=phase, lp=lp, params=params, i=abs(m), j=0, **kw)
                cache[abs(m)] = response_quadrature(spec, omega, g)
            r = cache[abs(m)]
            gam[a, b], dlt[a, b] = r.gamma, r.delta
    return gam, dlt
