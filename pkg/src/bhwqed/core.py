"""Parameter containers, unit conventions and regime checks.

All frequencies are measured in units of the hopping rate ``J`` and the
lattice constant is fixed to one, so emitter separations are plain site
differences.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np


class PhysicsError(ValueError):
    """Raised when a request violates a physical or regime precondition."""


class OutOfBandError(PhysicsError):
    """Frequency lies on the wrong side of a band edge for the requested formula."""


class RegimeWarning(UserWarning):
    """Soft regime threshold crossed; results may be outside the model's validity."""


@dataclass(frozen=True)
class LatticeParams:
    """Photonic Bose-Hubbard lattice.

    Parameters
    ----------
    omega_c : float
        Resonator frequency.
    U : float
        On-site repulsion, ``U >= 0``.
    J : float
        Hopping rate. Everything else is quoted in units of it.
    N_p : int
        Number of sites used by discrete sums and exact diagonalization.
    """

    omega_c: float
    U: float = 0.0
    J: float = 1.0
    N_p: int = 64
    d: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.J > 0:
            raise PhysicsError(f"J must be positive, got {self.J}")
        if not self.U >= 0:
            raise PhysicsError(f"U must be non-negative, got {self.U}")
        if not self.omega_c > 0:
            raise PhysicsError(f"omega_c must be positive, got {self.omega_c}")
        if int(self.N_p) != self.N_p or self.N_p < 1:
            raise PhysicsError(f"N_p must be a positive integer, got {self.N_p}")
        if self.omega_c < 5 * self.J:
            warnings.warn(
                f"omega_c = {self.omega_c} J is not much larger than J; "
                "the rotating-frame expansions assume omega_c >> J",
                RegimeWarning, stacklevel=3)


@dataclass(frozen=True)
class SfParams:
    """Superfluid filling data: condensate fraction ``n0 = N_0 / N_p``."""

    n0: float

    def __post_init__(self):
        if not self.n0 > 0:
            raise PhysicsError(f"n0 must be positive, got {self.n0}")


@dataclass(frozen=True)
class MiParams:
    """Mott filling data: integer filling factor ``n_bar``."""

    n_bar: int

    def __post_init__(self):
        if int(self.n_bar) != self.n_bar or self.n_bar < 1:
            raise PhysicsError(f"n_bar must be a positive integer, got {self.n_bar}")


@dataclass(frozen=True)
class EmitterArray:
    """Two-level emitters sitting on lattice sites.

    Parameters
    ----------
    positions : sequence of int
        Strictly increasing site indices.
    omega_e : float
        Transition frequency.
    g : float
        Dipole coupling to the local field quadrature.
    gamma_prime : float
        Parasitic decay into channels other than the waveguide.
    """

    positions: Tuple[int, ...]
    omega_e: float
    g: float
    gamma_prime: float = 0.0

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        object.__setattr__(self, "positions", pos)
        if len(pos) == 0:
            raise PhysicsError("at least one emitter is required")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise PhysicsError(f"positions must be strictly increasing, got {pos}")
        if pos[0] < 0:
            raise PhysicsError("positions must be non-negative")
        if not self.omega_e > 0:
            raise PhysicsError(f"omega_e must be positive, got {self.omega_e}")
        if not self.g > 0:
            raise PhysicsError(f"g must be positive, got {self.g}")
        if not self.gamma_prime >= 0:
            raise PhysicsError(f"gamma_prime must be non-negative, got {self.gamma_prime}")
        if self.g > 0.5:
            warnings.warn(f"g = {self.g} J is not small; Born-Markov may fail",
                          RegimeWarning, stacklevel=3)

    @property
    def n(self) -> int:
        return len(self.positions)

    def check_lattice(self, lp: LatticeParams) -> None:
        if self.positions[-1] >= lp.N_p:
            raise PhysicsError(
                f"emitter at site {self.positions[-1]} outside lattice of {lp.N_p} sites")


@dataclass(frozen=True)
class ReducedUnits:
    """Frequencies divided by ``2J``: ``w = omega/2J``, ``w_c``, ``u_cal = U/2J``."""

    w: float
    w_c: float
    u_cal: float

    @classmethod
    def from_physical(cls, omega, lp: LatticeParams) -> "ReducedUnits":
        two_j = 2.0 * lp.J
        return cls(w=omega / two_j, w_c=lp.omega_c / two_j, u_cal=lp.U / two_j)

    def omega(self, J: float = 1.0):
        return self.w * 2.0 * J


def z_pm(x, y, n):
    """Roots ``x + y n -+ sqrt((x + y n)^2 - 1)`` of ``z^2 - 2(x + y n) z + 1``.

    Returns ``(z_minus, z_plus)``. For ``|x + y n| > 1`` both roots are real
    with product one, and exactly one of them lies inside the unit circle.
    """
    s = np.asarray(x + y * n, dtype=float)
    r = np.sqrt(s * s - 1.0)
    return s - r, s + r


def inner_root(z_minus, z_plus):
    """Pick the root of a reciprocal pair lying inside the unit circle."""
    zm = np.asarray(z_minus)
    zp = np.asarray(z_plus)
    inside_minus = np.abs(zm) < np.abs(zp)
    return np.where(inside_minus, zm, zp), np.where(inside_minus, zp, zm)


def decay_length(z) -> float:
    """``lambda = 1 / log(1/|z|)`` for a pole inside the unit circle."""
    a = np.abs(z)
    with np.errstate(divide="ignore"):
        return np.where(a > 0, 1.0 / np.log(1.0 / a), 0.0)


def validate_sf_regime(lp: LatticeParams, sf: SfParams) -> List[str]:
    """Return human readable diagnostics; an empty list means the regime is fine.

    Two checks are made: the weak interaction threshold ``U <= 0.5 J`` and the
    existence condition ``f_k > U n0`` of the Bogoliubov solution, which is
    tightest at ``k = 0``. The gapless point ``f_0 = U n0`` is accepted.
    """
    out = []
    if lp.U > 0.5 * lp.J:
        out.append(f"U = {lp.U:g} J exceeds the weak-interaction threshold 0.5 J")
    margin = lp.omega_c + lp.U * sf.n0 - 2.0 * lp.J
    if margin < -1e-12 * lp.J:
        out.append(
            "Bogoliubov existence condition f_k > U n0 violated at k = 0: "
            f"omega_c + U n0 - 2J = {margin:g} J < 0")
    return out


def validate_mi_regime(lp: LatticeParams, mi: MiParams) -> Tuple[float, float, bool]:
    """U-window ``(u_min, u_max)`` of the unconstrained-fermion description.

    The window follows from requiring a positive doublon band. ``ok`` also
    demands the soft Mott threshold ``U >= 2J``.
    """
    J, wc, n = lp.J, lp.omega_c, mi.n_bar
    if wc <= 2 * J:
        raise PhysicsError(f"omega_c = {wc} J <= 2J is outside the validity table")
    if n == 1:
        u_min = 4 * J - wc if wc < 4 * J else 0.0
        u_max = math.inf
    else:
        a = (wc - 2 * n * J) / (n - 1)
        b = (wc - 2 * (n + 1) * J) / n
        if wc < 2 * n * J:
            u_min, u_max = 0.0, (2 * (n + 1) * J - wc) / n
        elif wc < 2 * (n + 1) * J:
            u_min, u_max = min(a, b), max(a, b)
        else:
            u_min, u_max = 0.0, a
    ok = (u_min < lp.U < u_max) and lp.U >= 2 * J
    return float(u_min), float(u_max), bool(ok)


def as_sites(i, j) -> int:
    """Separation ``|i - j|`` in lattice units."""
    return abs(int(i) - int(j))


def k_grid(n: int) -> np.ndarray:
    """Uniform periodic momentum grid ``2 pi j / n`` folded into ``(-pi, pi]``."""
    k = 2 * np.pi * np.arange(n) / n
    return np.where(k > np.pi, k - 2 * np.pi, k)


def separations(positions: Sequence[int]) -> np.ndarray:
    p = np.asarray(positions)
    return np.abs(p[:, None] - p[None, :])
