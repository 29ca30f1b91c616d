"""Exact diagonalization of small Bose-Hubbard rings.

Used only to check the quasiparticle bands. The Hamiltonian is::

    H = omega_c sum_r n_r - J sum_<rs> (a_r^dag a_s + h.c.) + (U/2) sum_r n_r (n_r - 1)

in a fixed total-number sector with an occupation cap per site. Rings with
``N_p >= 3`` are periodic and can be block diagonalized by lattice momentum;
``N_p = 2`` keeps a single bond.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import mi_bath, sf_bath
from .core import (LatticeParams, MiParams, PhysicsError, RegimeWarning, SfParams,
                   validate_mi_regime)

MAX_DIM = 200_000
DENSE_DIM = 2000


@dataclass(frozen=True)
class HubbardParams:
    """Bare Hubbard couplings; unlike ``LatticeParams`` it admits ``J = 0``."""

    omega_c: float
    U: float = 0.0
    J: float = 1.0

    def __post_init__(self):
        if self.J < 0 or self.U < 0:
            raise PhysicsError("J and U must be non-negative")

    @classmethod
    def from_lattice(cls, lp: LatticeParams) -> "HubbardParams":
        return cls(omega_c=lp.omega_c, U=lp.U, J=lp.J)


def _count(n_sites, n_max, total):
    # inclusion-exclusion over sites exceeding the cap
    out = 0
    for j in range(n_sites + 1):
        rest = total - j * (n_max + 1)
        if rest < 0:
            break
        out += (-1) ** j * comb(n_sites, j) * comb(rest + n_sites - 1, n_sites - 1)
    return out


def _compositions(n_sites, n_max, total):
    """Occupation vectors in descending lexicographic order."""
    if n_sites == 1:
        if total <= n_max:
            yield (total,)
        return
    for first in range(min(n_max, total), -1, -1):
        rest = total - first
        if rest > (n_sites - 1) * n_max:
            continue
        for tail in _compositions(n_sites - 1, n_max, rest):
            yield (first,) + tail


@dataclass
class FockBasis:
    """Fixed-number Fock states with at most ``n_max`` bosons per site.

    States are ordered lexicographically from the left-most site, largest
    occupation first, so ``N_p = 2, total_n = 2`` gives ``|20>, |11>, |02>``.
    """

    n_sites: int
    n_max: int
    total_n: int

    def __post_init__(self):
        if not 1 <= self.n_sites <= 8:
            raise PhysicsError(f"n_sites must be in 1..8, got {self.n_sites}")
        if not 1 <= self.n_max <= 4:
            raise PhysicsError(f"n_max must be in 1..4, got {self.n_max}")
        if not 0 <= self.total_n <= self.n_sites * self.n_max:
            raise PhysicsError(f"total_n = {self.total_n} does not fit the cap")
        dim = _count(self.n_sites, self.n_max, self.total_n)
        if dim > MAX_DIM:
            raise PhysicsError(f"basis dimension {dim} exceeds {MAX_DIM}")
        self.states = np.array(list(_compositions(self.n_sites, self.n_max, self.total_n)),
                               dtype=np.int64).reshape(-1, self.n_sites)
        self._base = (self.n_max + 1) ** np.arange(self.n_sites - 1, -1, -1)
        keys = self.states @ self._base
        self._order = np.argsort(keys)
        self._keys = keys[self._order]

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    def index(self, occ) -> np.ndarray:
        """Row indices of occupation vectors (``-1`` where absent)."""
        occ = np.atleast_2d(occ)
        keys = occ @ self._base
        pos = np.searchsorted(self._keys, keys)
        pos = np.clip(pos, 0, self._keys.size - 1)
        found = self._keys[pos] == keys
        return np.where(found, self._order[pos], -1)

    def translation(self) -> np.ndarray:
        """Index map of the cyclic shift ``n_r -> n_{r+1}``."""
        return self.index(np.roll(self.states, 1, axis=1))


def _bonds(n_sites, boundary):
    if n_sites == 1:
        return []
    if n_sites == 2 or boundary == "open":
        return [(r, r + 1) for r in range(n_sites - 1)]
    return [(r, (r + 1) % n_sites) for r in range(n_sites)]


def build_hamiltonian(basis: FockBasis, lp,
                      boundary: str = "periodic") -> sp.csr_matrix:
    """Sparse Bose-Hubbard matrix in ``basis``; ``N_p = 2`` always uses one bond.

    ``lp`` is a ``LatticeParams`` or a ``HubbardParams``.
    """
    if boundary not in ("periodic", "open"):
        raise ValueError(f"unknown boundary {boundary!r}")
    st = basis.states
    n = st.astype(float)
    diag = lp.omega_c * n.sum(axis=1) + 0.5 * lp.U * np.sum(n * (n - 1), axis=1)
    rows, cols, vals = [np.arange(basis.dim)], [np.arange(basis.dim)], [diag]
    for r, s in _bonds(basis.n_sites, boundary):
        for a, b in ((r, s), (s, r)):
            # a_a^dag a_b
            ok = (st[:, b] > 0) & (st[:, a] < basis.n_max)
            src = np.nonzero(ok)[0]
            new = st[src].copy()
            amp = np.sqrt((new[:, a] + 1.0) * new[:, b])
            new[:, a] += 1
            new[:, b] -= 1
            dst = basis.index(new)
            rows.append(dst)
            cols.append(src)
            vals.append(-lp.J * amp)
    H = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(basis.dim, basis.dim)).tocsr()
    H.sum_duplicates()
    return H


def momentum_projector(basis: FockBasis, q: int) -> sp.csr_matrix:
    """Isometry onto translation eigenstates with ``T = exp(-i k)``, ``k = 2 pi q / N_p``."""
    L = basis.n_sites
    t = basis.translation()
    seen = np.zeros(basis.dim, dtype=bool)
    rows, cols, vals = [], [], []
    col = 0
    for start in range(basis.dim):
        if seen[start]:
            continue
        orbit = [start]
        nxt = t[start]
        while nxt != start:
            orbit.append(nxt)
            nxt = t[nxt]
        seen[orbit] = True
        p = len(orbit)
        if (q * p) % L:
            continue
        ph = np.exp(-2j * np.pi * q * np.arange(p) / L) / np.sqrt(p)
        rows.extend(orbit)
        cols.extend([col] * p)
        vals.extend(ph)
        col += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, col))


def lowest_eigenvalues(H, n_eig: int = 1) -> np.ndarray:
    """Smallest eigenvalues; dense below ``DENSE_DIM``, Lanczos above."""
    dim = H.shape[0]
    if dim == 0:
        return np.array([])
    if dim <= DENSE_DIM:
        return np.linalg.eigvalsh(H.toarray())[:n_eig]
    v0 = np.ones(dim) / np.sqrt(dim)
    vals = spla.eigsh(H, k=n_eig, which="SA", v0=v0, tol=1e-12,
                      return_eigenvectors=False)
    return np.sort(np.real(vals))


def momentum_resolved_minima(basis: FockBasis, lp) -> np.ndarray:
    """Lowest energy in each momentum block ``q = 0..N_p-1`` of a periodic ring."""
    if basis.n_sites < 3:
        raise PhysicsError("momentum resolution needs a periodic ring, N_p >= 3")
    H = build_hamiltonian(basis, lp)
    out = np.empty(basis.n_sites)
    for q in range(basis.n_sites):
        V = momentum_projector(basis, q)
        if V.shape[1] == 0:
            out[q] = np.nan
            continue
        Hk = (V.getH() @ H @ V).tocsr()
        if Hk.shape[0] <= DENSE_DIM:
            out[q] = np.linalg.eigvalsh(Hk.toarray())[0]
        else:
            out[q] = lowest_eigenvalues(Hk)[0]
    return out


@dataclass
class ExcitationSpectrum:
    """Particle and hole excitation energies on the momentum grid ``2 pi q / N_p``.

    ``doublon[q] = E_{N+1}(k_q) - E_N(0)`` and ``holon[q] = E_N(0) - E_{N-1}(k_q)``.
    ``offset`` is the ground-state energy minus the atomic value.
    """

    k: np.ndarray
    doublon: np.ndarray
    holon: np.ndarray
    ground: float
    offset: float
    n_max: int
    diagnostics: list


def mott_reference_energy(lp, mi: MiParams, n_sites: int) -> float:
    n = mi.n_bar
    return n_sites * (lp.omega_c * n + 0.5 * lp.U * n * (n - 1))


def excitation_spectrum(lp, mi: MiParams, n_sites: int = 6,
                        n_max: Optional[int] = None) -> ExcitationSpectrum:
    """Doublon and holon bands of a Mott ring from three number sectors.

    ``lp`` may be a ``HubbardParams`` with ``J = 0``, where the regime check
    is skipped.
    """
    n = mi.n_bar
    n_max = n + 2 if n_max is None else n_max
    diags = []
    if isinstance(lp, LatticeParams):
        try:
            _, _, ok = validate_mi_regime(lp, mi)
            if not ok:
                diags.append(f"U = {lp.U} J is outside the Mott validity window")
        except PhysicsError as exc:
            diags.append(str(exc))
    for msg in diags:
        warnings.warn(msg, RegimeWarning, stacklevel=2)
    total = n_sites * n
    e = {}
    for key, tot in (("g", total), ("p", total + 1), ("h", total - 1)):
        e[key] = momentum_resolved_minima(FockBasis(n_sites, n_max, tot), lp)
    ground = float(e["g"][0])
    if np.nanmin(e["g"]) < ground - 1e-9 * max(1.0, abs(ground)):
        diags.append("ground state is not in the k = 0 block")
    k = 2 * np.pi * np.arange(n_sites) / n_sites
    return ExcitationSpectrum(k=k, doublon=e["p"] - ground, holon=ground - e["h"],
                              ground=ground, offset=ground - mott_reference_energy(lp, mi, n_sites),
                              n_max=n_max, diagnostics=diags)


def curvature_error(spec: ExcitationSpectrum, lp: LatticeParams, mi: MiParams,
                    sigma: int = 1) -> float:
    """``max_k |dE_ED(k) - d eps(k)| / |eps(pi) - eps(0)|``, band shapes measured from k = 0.

    ``sigma = +1`` compares the doublon band with ``eps_{k,+}``. ``-1``
    compares the removal energies with ``E_-(k + pi)``: the hole created by
    removing a boson of momentum ``k`` hops with the opposite sign, so the
    removal band is the holon band shifted by ``pi``.
    """
    if sigma == 1:
        ed = spec.doublon
        th = mi_bath.dispersion_mi(spec.k, 1, lp, mi)
        width = mi_bath.dispersion_mi(np.pi, 1, lp, mi) - mi_bath.dispersion_mi(0.0, 1, lp, mi)
    else:
        ed = spec.holon
        th = mi_bath.e_minus(spec.k + np.pi, lp, mi)
        width = mi_bath.e_minus(0.0, lp, mi) - mi_bath.e_minus(np.pi, lp, mi)
    d_ed = ed - ed[0]
    d_th = th - th[0]
    return float(np.max(np.abs(d_ed - d_th)) / abs(width))


@dataclass
class SfCheck:
    """Fixed-number excitation energies against the Bogoliubov band.

    Only ``k_1 = 2 pi / N_p`` is a clean single-phonon comparison; at larger
    momenta several long-wavelength phonons undercut one fast phonon on a
    small ring.
    """

    k: np.ndarray
    ed_gap: np.ndarray
    bogoliubov_gap: np.ndarray

    @property
    def first_mode_error(self) -> float:
        return float(abs(self.ed_gap[1] - self.bogoliubov_gap[1]) / self.bogoliubov_gap[1])


def sf_excitation_check(U: float = 0.1, n_sites: int = 8, n0: int = 1,
                        n_max: int = 4, J: float = 1.0) -> SfCheck:
    """``E_N(k) - E_N(0)`` at the gapless point ``omega_c = 2J - U n0``.

    There ``omega_k - omega_0`` is the number-conserving excitation energy.
    The ring is far from the thermodynamic limit, so only the trend of the
    lowest mode is meaningful.
    """
    wc = 2 * J - U * n0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        lp = LatticeParams(omega_c=wc, U=U, J=J, N_p=n_sites)
    basis = FockBasis(n_sites, n_max, n_sites * n0)
    e = momentum_resolved_minima(basis, lp)
    k = 2 * np.pi * np.arange(n_sites) / n_sites
    sf = SfParams(n0)
    bog = sf_bath.dispersion_sf(k, lp, sf) - sf_bath.dispersion_sf(0.0, lp, sf)
    return SfCheck(k=k, ed_gap=e - e[0], bogoliubov_gap=np.asarray(bog))
