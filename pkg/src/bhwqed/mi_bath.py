"""Mott bath: doublon and holon bands, collective decay and gap couplings.

Band structure of the unconstrained-fermion description::

    E_+(k) = omega_c + U n - 2J (n+1) cos k        (doublons)
    E_-(k) = omega_c - U (n-1) - 2J n cos k        (holons)
    Delta(k) = -2i J sqrt(n (n+1)) sin k
    eps_{k,s} = s delta_k + eta_k,  2 delta = E_+ - E_-,  2 eta = sqrt(vs^2 + 4|Delta|^2)

with ``vs = E_+ + E_-`` and ``n`` the integer filling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (LatticeParams, MiParams, OutOfBandError, ReducedUnits,
                   as_sites, decay_length)

EDGE_CLAMP = 1e-9


@dataclass(frozen=True)
class MiMode:
    k: float
    e_plus: float
    e_minus: float
    delta_pair: complex
    small_delta: float
    varsigma: float
    eta: float
    eps_plus: float
    eps_minus: float
    theta: float
    u: float
    v: complex


@dataclass(frozen=True)
class ResiduePoles:
    """Pole pairs of the small-J coupling integrals (products equal one)."""

    z0_minus: float
    z0_plus: float
    z1_minus: float
    z1_plus: float
    z2_minus: float
    z2_plus: float

    @property
    def lambda0_minus(self):
        return float(decay_length(self.z0_minus))

    @property
    def lambda1_plus(self):
        return float(decay_length(self.z1_plus))

    @property
    def lambda2_plus(self):
        return float(decay_length(self.z2_plus))


@dataclass(frozen=True)
class MiResponse:
    gamma: float
    delta: float
    k_1d_plus: Optional[float] = None
    k_1d_minus: Optional[float] = None
    kernel_plus: float = 0.0
    kernel_minus: float = 0.0
    chi_plus: int = 0
    chi_minus: int = 0
    poles: Optional[ResiduePoles] = None
    amp_plus: float = 0.0
    amp_minus: float = 0.0
    pairing_term: float = 0.0
    extra: dict = field(default_factory=dict)


def e_plus(k, lp: LatticeParams, mi: MiParams):
    n = mi.n_bar
    return lp.omega_c + lp.U * n - 2 * lp.J * (n + 1) * np.cos(k)


def e_minus(k, lp: LatticeParams, mi: MiParams):
    n = mi.n_bar
    return lp.omega_c - lp.U * (n - 1) - 2 * lp.J * n * np.cos(k)


def pair_amplitude(k, lp: LatticeParams, mi: MiParams):
    """Imaginary pairing amplitude ``Delta(k)``."""
    n = mi.n_bar
    return -2j * lp.J * np.sqrt(n * (n + 1)) * np.sin(k)


def varsigma(k, lp, mi):
    return e_plus(k, lp, mi) + e_minus(k, lp, mi)


def small_delta(k, lp, mi):
    return 0.5 * (e_plus(k, lp, mi) - e_minus(k, lp, mi))


def eta(k, lp, mi):
    vs = varsigma(k, lp, mi)
    return 0.5 * np.sqrt(vs * vs + 4 * np.abs(pair_amplitude(k, lp, mi)) ** 2)


def dispersion_mi(k, sigma: int, lp: LatticeParams, mi: MiParams):
    """``eps_{k,sigma}``; ``sigma=+1`` doublons, ``sigma=-1`` holons."""
    s = _sign(sigma)
    return s * small_delta(k, lp, mi) + eta(k, lp, mi)


def theta(k, lp, mi):
    """Mixing angle with ``tan theta = 2i Delta / vs`` (a real ratio)."""
    two_i_delta = (2j * pair_amplitude(k, lp, mi)).real
    return np.arctan2(two_i_delta, varsigma(k, lp, mi))


def bogoliubov_coeffs_mi(k, lp: LatticeParams, mi: MiParams):
    """Return ``(u, v_im)`` with ``u = cos(theta/2)``, ``v = i sin(theta/2)``."""
    th = theta(k, lp, mi)
    return np.cos(th / 2), np.sin(th / 2)


def mode_mi(k: float, lp: LatticeParams, mi: MiParams) -> MiMode:
    u, vim = bogoliubov_coeffs_mi(k, lp, mi)
    return MiMode(k=k, e_plus=float(e_plus(k, lp, mi)), e_minus=float(e_minus(k, lp, mi)),
                  delta_pair=complex(pair_amplitude(k, lp, mi)),
                  small_delta=float(small_delta(k, lp, mi)),
                  varsigma=float(varsigma(k, lp, mi)), eta=float(eta(k, lp, mi)),
                  eps_plus=float(dispersion_mi(k, 1, lp, mi)),
                  eps_minus=float(dispersion_mi(k, -1, lp, mi)),
                  theta=float(theta(k, lp, mi)), u=float(u), v=1j * float(vim))


def constants_mi(lp: LatticeParams, mi: MiParams, n_k: int = 4096):
    """Per-site constants ``E0`` (atomic limit) and the fermion ground energy.

    Bookkeeping only; the second uses ``sum_k (E_- - eps_-)`` from normal
    ordering the quasiparticle Hamiltonian.
    """
    n = mi.n_bar
    e0 = lp.omega_c * n + 0.5 * lp.U * n * (n - 1)
    k = 2 * np.pi * np.arange(n_k) / n_k
    shift = np.mean(dispersion_mi(k, -1, lp, mi) - e_minus(k, lp, mi))
    return float(e0), float(e0 - shift)


def band_edges_mi(sigma: int, lp: LatticeParams, mi: MiParams):
    a = float(dispersion_mi(0.0, sigma, lp, mi))
    b = float(dispersion_mi(np.pi, sigma, lp, mi))
    return (a, b) if a <= b else (b, a)


def chi_mi(omega, sigma, lp, mi) -> int:
    lo, hi = band_edges_mi(sigma, lp, mi)
    return int(lo <= omega <= hi)


def _sign(sigma) -> int:
    if sigma in (1, "+", "plus"):
        return 1
    if sigma in (-1, "-", "minus"):
        return -1
    raise ValueError(f"branch must be +1 or -1, got {sigma!r}")


def k1d_mi(omega: float, sigma: int, lp: LatticeParams, mi: MiParams) -> float:
    """Resonant momentum on branch ``sigma`` by exact inversion.

    ``eps_{k,+} = omega`` reduces to ``(E_+ - omega)(E_- + omega) + |Delta|^2 = 0``,
    which is linear in ``cos k``; the holon branch follows from ``omega -> -omega``.
    """
    s = _sign(sigma)
    lo, hi = band_edges_mi(s, lp, mi)
    if not lo <= omega <= hi:
        raise OutOfBandError(f"omega = {omega} J outside branch {s:+d} band [{lo:g}, {hi:g}]")
    J, U, wc, n = lp.J, lp.U, lp.omega_c, mi.n_bar
    w = s * omega
    num = 4 * J * J * n * (n + 1) + (wc - U * (n - 1) + w) * (wc + U * n - w)
    den = 2 * J * ((2 * n + 1) * wc + U + w)
    c = num / den
    if not -1.0 - 1e-12 <= c <= 1.0 + 1e-12:
        raise OutOfBandError(f"omega = {omega} J has no real momentum on branch {s:+d}")
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def branch_weight(k, sigma, lp, mi):
    """Reflection-even correlator weight ``(n + 1/2) vs/(2 eta) + sigma/2``."""
    s = _sign(sigma)
    return (mi.n_bar + 0.5) * varsigma(k, lp, mi) / (2 * eta(k, lp, mi)) + 0.5 * s


def group_velocity_mi(k, sigma, lp, mi):
    """``d eps_{k,sigma}/dk = sigma J [1 + sigma R_k] sin k``."""
    s = _sign(sigma)
    n = mi.n_bar
    r = ((2 * n + 1) * (2 * lp.omega_c + lp.U) - 2 * lp.J * np.cos(k)) / (2 * eta(k, lp, mi))
    return s * lp.J * (1 + s * r) * np.sin(k)


def kernel_mi(omega, sigma, lp, mi):
    """Dimensionless prefactor ``2 W / |(1 + sigma R) sin k|`` at the resonant k.

    Frequencies within ``EDGE_CLAMP`` of a band edge are moved inside it so
    the van Hove divergence stays finite.
    """
    if not chi_mi(omega, sigma, lp, mi):
        return 0.0, None
    lo, hi = band_edges_mi(sigma, lp, mi)
    omega = min(max(omega, lo + EDGE_CLAMP * lp.J), hi - EDGE_CLAMP * lp.J)
    k = k1d_mi(omega, sigma, lp, mi)
    vel = abs(group_velocity_mi(k, sigma, lp, mi)) / lp.J
    if vel == 0.0:
        return float("inf"), k
    return float(2 * branch_weight(k, sigma, lp, mi) / vel), k


def gamma_mi(i, j, omega, lp: LatticeParams, mi: MiParams, g: float) -> MiResponse:
    """Collective decay summed over the doublon and holon branches."""
    m = as_sites(i, j)
    gj = g * g / lp.J
    kp, k1p = kernel_mi(omega, 1, lp, mi)
    km, k1m = kernel_mi(omega, -1, lp, mi)
    total = 0.0
    if k1p is not None:
        total += gj * kp * np.cos(k1p * m)
    if k1m is not None:
        total += gj * km * np.cos(k1m * m)
    return MiResponse(gamma=float(total), delta=0.0, k_1d_plus=k1p, k_1d_minus=k1m,
                      kernel_plus=kp, kernel_minus=km,
                      chi_plus=int(k1p is not None), chi_minus=int(k1m is not None))


def residue_poles(omega, lp: LatticeParams, mi: MiParams) -> ResiduePoles:
    ru = ReducedUnits.from_physical(omega, lp)
    n, wc, uc, w = mi.n_bar, ru.w_c, ru.u_cal, ru.w

    def pair(x, scale):
        r = np.sqrt(x * x - scale * scale)
        return (x - r) / scale, (x + r) / scale

    z0m, z0p = pair(2 * wc + uc, 2 * n + 1)
    z1m, z1p = pair(wc - w + uc * n, n + 1)
    z2m, z2p = pair(wc - w - uc * (n - 1), n)
    return ResiduePoles(*(float(z) for z in (z0m, z0p, z1m, z1p, z2m, z2p)))


def _res4(z, m, za, zb, z0m, z0p):
    """Residue of ``z^m (z^2-1) / ((z-za)(z-zb)(z-z0m)(z-z0p))`` at ``z = za``."""
    return z ** m * (z * z - 1) / ((z - zb) * (z - z0m) * (z - z0p))


def pairing_residues(m, poles: ResiduePoles, n: int):
    """Contour integrals carrying the odd ``Delta_k / vs_k`` weight (units 1/J)."""
    p = poles
    g1 = (_res4(p.z1_plus, m, p.z1_plus, p.z1_minus, p.z0_minus, p.z0_plus)
          + _res4(p.z0_minus, m, p.z0_minus, p.z0_plus, p.z1_plus, p.z1_minus))
    g2 = (_res4(p.z2_plus, m, p.z2_plus, p.z2_minus, p.z0_minus, p.z0_plus)
          + _res4(p.z0_minus, m, p.z0_minus, p.z0_plus, p.z2_plus, p.z2_minus))
    return n / (2 * n + 1) * g1 - (n + 1) / (2 * n + 1) * g2


def delta_mi(i, j, omega, lp: LatticeParams, mi: MiParams, g: float,
             include_pairing: bool = False) -> MiResponse:
    """Upper-gap coupling in the small-J limit ``eps ~ E_pm``, ``eta ~ vs/2``.

    The reflection-even branch weights reduce to ``n+1`` and ``n``, leaving one
    interior pole per branch::

        Delta = (g^2/J) [z1+^m / (z1+ - z1-) + z2+^m / (z2+ - z2-)]

    The odd pairing weight proportional to ``Delta_k/vs_k`` cancels between
    ``I_ij`` and ``I_ji^*``; its stand-alone residue sum is still reported in
    ``pairing_term`` and added only when ``include_pairing`` is set.
    """
    n = mi.n_bar
    top = max(band_edges_mi(1, lp, mi)[1], band_edges_mi(-1, lp, mi)[1],
              float(e_plus(np.pi, lp, mi)), float(e_minus(np.pi, lp, mi)))
    bottom = min(band_edges_mi(1, lp, mi)[0], band_edges_mi(-1, lp, mi)[0],
                 float(e_plus(0.0, lp, mi)), float(e_minus(0.0, lp, mi)))
    if omega < bottom:
        raise OutOfBandError(
            "lower-gap Mott couplings have no closed form here; "
            "use bath_oracle.response_quadrature")
    if omega <= top:
        raise OutOfBandError(f"omega = {omega} J is not above the bands (top {top:g} J)")
    m = as_sites(i, j)
    gj = g * g / lp.J
    p = residue_poles(omega, lp, mi)
    a_plus = 1.0 / (p.z1_plus - p.z1_minus)
    a_minus = 1.0 / (p.z2_plus - p.z2_minus)
    even = gj * (a_plus * p.z1_plus ** m + a_minus * p.z2_plus ** m)
    odd = gj * pairing_residues(m, p, n)
    total = even + odd if include_pairing else even
    return MiResponse(gamma=0.0, delta=float(total), poles=p,
                      amp_plus=gj * a_plus, amp_minus=gj * a_minus,
                      pairing_term=float(odd))
