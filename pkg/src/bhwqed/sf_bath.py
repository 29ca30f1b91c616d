"""Superfluid bath: Bogoliubov band, collective decay and gap couplings.

Conventions: ``f_k = omega_c + 2 U n0 - 2 J cos k`` and
``omega_k = sqrt(f_k^2 - U^2 n0^2)``, ``tanh 2 alpha_k = U n0 / f_k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (LatticeParams, OutOfBandError, PhysicsError, ReducedUnits,
                   SfParams, as_sites, decay_length, inner_root, z_pm)

EDGE_CLAMP = 1e-9


@dataclass(frozen=True)
class SfMode:
    k: float
    f_k: float
    omega_k: float
    u_k: float
    v_k: float
    alpha_k: float


@dataclass(frozen=True)
class SfResponse:
    """Closed-form bath response at one frequency and separation.

    ``delta = plateau + f1 * z1**m + f2 * z2**m`` with ``m = |i - j|``. The
    poles ``z1, z2`` sit inside the unit circle and may be negative, in which
    case the corresponding term alternates in sign; ``lambda1, lambda2`` are
    the decay lengths ``1/log(1/|z|)`` of the envelopes.
    """

    gamma: float
    delta: float
    k_1d: Optional[float]
    kernel: float
    plateau: float
    f1: float
    f2: float
    z1: float
    z2: float
    lambda1: float
    lambda2: float
    band_edge: bool = False


def f_sf(k, lp: LatticeParams, sf: SfParams):
    return lp.omega_c + 2 * lp.U * sf.n0 - 2 * lp.J * np.cos(k)


def dispersion_sf(k, lp: LatticeParams, sf: SfParams):
    """Bogoliubov frequency ``omega_k``; vectorized over ``k``."""
    f = f_sf(k, lp, sf)
    un = lp.U * sf.n0
    arg = f * f - un * un
    if np.any(arg < -1e-12 * max(1.0, un * un)) or np.any(f < 0):
        raise PhysicsError("imaginary Bogoliubov frequency: f_k^2 < U^2 n0^2")
    return np.sqrt(np.maximum(arg, 0.0))


def bogoliubov_coeffs_sf(k, lp: LatticeParams, sf: SfParams):
    """Return ``(u_k, v_k) = (cosh alpha_k, sinh alpha_k)``."""
    f = f_sf(k, lp, sf)
    un = lp.U * sf.n0
    if np.any(f <= un):
        raise PhysicsError("Bogoliubov solution requires f_k > U n0")
    alpha = 0.5 * np.arctanh(un / f)
    return np.cosh(alpha), np.sinh(alpha)


def mode_sf(k: float, lp: LatticeParams, sf: SfParams) -> SfMode:
    f = float(f_sf(k, lp, sf))
    u, v = bogoliubov_coeffs_sf(k, lp, sf)
    return SfMode(k=k, f_k=f, omega_k=float(dispersion_sf(k, lp, sf)),
                  u_k=float(u), v_k=float(v),
                  alpha_k=0.5 * float(np.arctanh(lp.U * sf.n0 / f)))


def band_edges_sf(lp: LatticeParams, sf: SfParams):
    w0 = float(dispersion_sf(0.0, lp, sf))
    wpi = float(dispersion_sf(np.pi, lp, sf))
    return w0, wpi


def ground_energy_sf(lp: LatticeParams, sf: SfParams, n_k: int = 4096) -> float:
    """Quadratic ground-state energy per site, ``(1/2N) sum_k (omega_k - f_k)``.

    Bookkeeping constant only; nothing downstream consumes it.
    """
    k = 2 * np.pi * np.arange(n_k) / n_k
    return float(0.5 * np.mean(dispersion_sf(k, lp, sf) - f_sf(k, lp, sf)))


def _big_omega(omega, lp, sf):
    return np.sqrt(omega * omega + (lp.U * sf.n0) ** 2)


def k1d_sf(omega: float, lp: LatticeParams, sf: SfParams) -> float:
    """Resonant momentum in ``(0, pi)`` from ``2J cos k = omega_c + 2U n0 - Omega``."""
    c = (lp.omega_c + 2 * lp.U * sf.n0 - _big_omega(omega, lp, sf)) / (2 * lp.J)
    if not -1.0 <= c <= 1.0 or omega < 0:
        raise OutOfBandError(f"omega = {omega} J lies outside the Bogoliubov band")
    return float(np.arccos(c))


def kernel_sf(omega: float, lp: LatticeParams, sf: SfParams):
    """Dimensionless prefactor of the decay rate; zero outside the band.

    Returns ``(kernel, clamped)`` where ``clamped`` flags an evaluation moved
    ``EDGE_CLAMP`` inside a band edge to keep the edge singularity finite.
    """
    w0, wpi = band_edges_sf(lp, sf)
    if omega < w0 or omega > wpi:
        return 0.0, False
    clamped = False
    if omega - w0 < EDGE_CLAMP * lp.J:
        omega, clamped = w0 + EDGE_CLAMP * lp.J, True
    if wpi - omega < EDGE_CLAMP * lp.J:
        omega, clamped = wpi - EDGE_CLAMP * lp.J, True
    J, un = lp.J, lp.U * sf.n0
    big = _big_omega(omega, lp, sf)
    root = np.sqrt(max(4 * J * J - (lp.omega_c + 2 * un - big) ** 2, 0.0))
    if root == 0.0:
        return float("inf"), True
    return float(2 * J * (big - un) / (big * root)), clamped


def gamma_sf(i, j, omega, lp: LatticeParams, sf: SfParams, g: float) -> float:
    """Collective decay ``(g^2/J) K(omega) cos(k_1D |i - j|)``."""
    kern, _ = kernel_sf(omega, lp, sf)
    if kern == 0.0:
        return 0.0
    w0, wpi = band_edges_sf(lp, sf)
    om = min(max(omega, w0 + EDGE_CLAMP * lp.J), wpi - EDGE_CLAMP * lp.J)
    k1 = k1d_sf(om, lp, sf)
    return float(g * g / lp.J * kern * np.cos(k1 * as_sites(i, j)))


def approx_band_sf(lp: LatticeParams, sf: SfParams):
    """Band ``[f_0, f_pi]`` of the small-U dispersion ``omega_k ~ f_k``."""
    base = lp.omega_c + 2 * lp.U * sf.n0
    return base - 2 * lp.J, base + 2 * lp.J


def delta_sf(i, j, omega, lp: LatticeParams, sf: SfParams, g: float) -> SfResponse:
    """Gap coupling from the residue evaluation with ``omega_k ~ f_k``.

    Valid above the band and at negative frequency (the counter-rotating
    term). Positive frequencies below the band edge also work when the band
    is gapped.
    """
    if omega == 0:
        raise OutOfBandError("coupling is singular at omega = 0")
    w0, wpi = band_edges_sf(lp, sf)
    f0, fpi = approx_band_sf(lp, sf)
    lo, hi = min(w0, f0), max(wpi, fpi)
    if lo <= omega <= hi:
        raise OutOfBandError(
            f"omega = {omega} J lies inside the band [{lo:g}, {hi:g}]; "
            "use bath_oracle for principal-value couplings")
    ru = ReducedUnits.from_physical(omega, lp)
    w, wc, uc, n0 = ru.w, ru.w_c, ru.u_cal, sf.n0
    m = as_sites(i, j)
    gj = g * g / lp.J
    c_in, c_out = inner_root(*z_pm(wc - w, 2 * uc, n0))
    c_in, c_out = float(c_in), float(c_out)
    if uc * n0 == 0.0:
        # the first exponential carries a factor U n0 and its pole may sit on the unit circle
        f1, b_in = 0.0, 0.0
    else:
        b_in, b_out = (float(x) for x in inner_root(*z_pm(wc, 2 * uc, n0)))
        f1 = -gj * uc * n0 / (w * (b_out - b_in))
    f2 = gj * (w - uc * n0) / (w * (c_in - c_out))
    plateau = 4 * g * g * sf.n0 / omega
    delta = plateau + (f1 * b_in ** m if f1 else 0.0) + f2 * c_in ** m
    return SfResponse(gamma=0.0, delta=float(delta), k_1d=None, kernel=0.0,
                      plateau=plateau, f1=f1, f2=f2, z1=b_in, z2=c_in,
                      lambda1=float(decay_length(b_in)),
                      lambda2=float(decay_length(c_in)))
