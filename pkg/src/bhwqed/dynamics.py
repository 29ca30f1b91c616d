"""Emitter-only Lindblad dynamics and burst detection.

The master equation is written with a non-Hermitian Hamiltonian and jump
operators built from the eigenvectors of the total decay matrix
``G + G' 1``::

    drho/dt = -i (H_nh rho - rho H_nh^dag) + sum_nu g_nu L_nu rho L_nu^dag
    H_nh = H - (i/2) sum_ij (G + G' 1)_ij s_i^dag s_j

Operators are sparse, the density matrix is dense.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.integrate import DOP853, RK45

from . import bath_oracle, mi_bath, sf_bath
from .core import (EmitterArray, LatticeParams, MiParams, OutOfBandError,
                   PhysicsError, SfParams)

MAX_EMITTERS = 10


class IntegrationError(RuntimeError):
    def __init__(self, msg, last_time=None, last_state=None):
        super().__init__(msg)
        self.last_time = last_time
        self.last_state = last_state


def lowering_ops(n: int) -> List[sp.csr_matrix]:
    """``sigma_i = |g><e|`` on qubit ``i``; bit ``n-1-i`` of the index is 1 when excited."""
    low = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    eye = sp.identity(2, format="csr")
    ops = []
    for i in range(n):
        op = sp.identity(1, format="csr")
        for q in range(n):
            op = sp.kron(op, low if q == i else eye, format="csr")
        ops.append(op.tocsr())
    return ops


def excitation_numbers(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    return np.array([bin(x).count("1") for x in idx], dtype=float)


@dataclass
class EmitterLiouvillian:
    """Coefficient matrices of the emitter master equation.

    ``h_eff[i, j]`` multiplies ``s_i^dag s_j``. ``gamma_matrix`` is the
    collective decay matrix and ``gamma_prime`` the parasitic rate.
    """

    n: int
    h_eff: np.ndarray
    gamma_matrix: np.ndarray
    gamma_prime: float = 0.0
    gamma_eigs: np.ndarray = field(default=None)
    sources: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n > MAX_EMITTERS:
            raise PhysicsError(f"at most {MAX_EMITTERS} emitters supported, got {self.n}")
        h = np.asarray(self.h_eff, dtype=complex)
        g = np.asarray(self.gamma_matrix, dtype=float)
        if h.shape != (self.n, self.n) or g.shape != (self.n, self.n):
            raise ValueError("coefficient matrices must be n x n")
        if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(h))):
            raise ValueError("h_eff is not Hermitian")
        if np.max(np.abs(g - g.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(g))):
            raise ValueError("gamma_matrix is not symmetric")
        g = 0.5 * (g + g.T)
        eigs, vecs = np.linalg.eigh(g)
        scale = max(np.max(np.abs(eigs)), 1e-300)
        bad = eigs < -1e-10 * scale
        if np.any(bad):
            warnings.warn(f"clipping negative decay eigenvalues {eigs[bad]}", RuntimeWarning,
                          stacklevel=2)
        clipped = np.clip(eigs, 0.0, None)
        self.gamma_eigs = eigs
        self.gamma_matrix = (vecs * clipped) @ vecs.T
        self.h_eff = 0.5 * (h + h.conj().T)
        self._ops = None

    @classmethod
    def from_matrices(cls, gamma, h_eff=None, gamma_prime=0.0):
        g = np.asarray(gamma, dtype=float)
        n = g.shape[0]
        h = np.zeros((n, n), dtype=complex) if h_eff is None else h_eff
        return cls(n=n, h_eff=h, gamma_matrix=g, gamma_prime=float(gamma_prime))

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def operators(self):
        """Sparse ``H_nh``, weighted jump operators, number and waveguide-power operators."""
        if self._ops is not None:
            return self._ops
        n = self.n
        low = lowering_ops(n)
        raise_ = [s.getH().tocsr() for s in low]
        dim = 2 ** n
        H = sp.csr_matrix((dim, dim), dtype=complex)
        Q = sp.csr_matrix((dim, dim), dtype=complex)
        for i in range(n):
            for j in range(n):
                hop = raise_[i] @ low[j]
                if self.h_eff[i, j] != 0:
                    H = H + self.h_eff[i, j] * hop
                if self.gamma_matrix[i, j] != 0:
                    Q = Q + self.gamma_matrix[i, j] * hop
        total = self.gamma_matrix + self.gamma_prime * np.eye(n)
        rates, vecs = np.linalg.eigh(total)
        jumps = []
        for nu in range(n):
            if rates[nu] <= 1e-15 * max(1.0, rates.max()):
                continue
            L = sp.csr_matrix((dim, dim), dtype=complex)
            for j in range(n):
                if vecs[j, nu] != 0:
                    L = L + vecs[j, nu] * low[j]
            jumps.append(np.sqrt(rates[nu]) * L)
        decay = sp.csr_matrix((dim, dim), dtype=complex)
        for L in jumps:
            decay = decay + L.getH() @ L
        H_nh = (H - 0.5j * decay).tocsr()
        self._ops = dict(H=H.tocsr(), H_nh=H_nh, jumps=[L.tocsr() for L in jumps],
                         jumps_dag=[L.getH().tocsr() for L in jumps],
                         N=excitation_numbers(n), Q=Q.tocsr())
        return self._ops

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        ops = self.operators()
        a = ops["H_nh"] @ rho
        out = -1j * (a - a.conj().T)
        for L in ops["jumps"]:
            # L rho L^dag evaluated as (L (L rho)^dag)^dag, two sparse-dense products
            out += (L @ (L @ rho).conj().T).conj().T
        return out


def _coupling_sf(positions, omega, lp, sf, g):
    """Delta matrix from the closed form when possible, otherwise the PV oracle."""
    n = len(positions)
    out = np.zeros((n, n))
    src = "closed-form"
    cache = {}
    for a in range(n):
        for b in range(n):
            m = abs(positions[a] - positions[b])
            if m not in cache:
                try:
                    cache[m] = sf_bath.delta_sf(m, 0, omega, lp, sf, g).delta
                except OutOfBandError:
                    spec = bath_oracle.CorrelatorSpec("sf", lp, sf, i=m, j=0)
                    cache[m] = bath_oracle.response_quadrature(spec, omega, g).delta
                    src = "oracle"
            out[a, b] = cache[m]
    return out, src


def _coupling_mi(positions, omega, lp, mi, g):
    n = len(positions)
    out = np.zeros((n, n))
    src = "closed-form"
    cache = {}
    for a in range(n):
        for b in range(n):
            m = abs(positions[a] - positions[b])
            if m not in cache:
                try:
                    cache[m] = mi_bath.delta_mi(m, 0, omega, lp, mi, g).delta
                except OutOfBandError:
                    spec = bath_oracle.CorrelatorSpec("mi", lp, mi, i=m, j=0)
                    cache[m] = bath_oracle.response_quadrature(spec, omega, g).delta
                    src = "oracle"
            out[a, b] = cache[m]
    return out, src


def build_liouvillian(phase: str, lp: LatticeParams, params, emitters: EmitterArray,
                      include_counter_rotating: bool = True,
                      include_lamb_shift: bool = True) -> EmitterLiouvillian:
    """Populate decay and coherent coupling matrices for an emitter array.

    ``s_i s_j^dag = s_j^dag s_i`` for ``i != j`` and ``1 - s_i^dag s_i`` for
    ``i = j``, so the counter-rotating couplings enter as
    ``h_ij = Delta_ij(w_e) + Delta_ji(-w_e)`` off the diagonal and
    ``h_ii = Delta_ii(w_e) - Delta_ii(-w_e)`` on it (constants dropped).
    """
    if emitters.n > MAX_EMITTERS:
        raise PhysicsError(f"at most {MAX_EMITTERS} emitters supported, got {emitters.n}")
    emitters.check_lattice(lp)
    pos = list(emitters.positions)
    n, we, g = emitters.n, emitters.omega_e, emitters.g
    gam = np.zeros((n, n))
    if phase == "sf":
        if not isinstance(params, SfParams):
            raise TypeError("superfluid phase needs SfParams")
        for a in range(n):
            for b in range(n):
                gam[a, b] = sf_bath.gamma_sf(pos[a], pos[b], we, lp, params, g)
        assert sf_bath.gamma_sf(0, 0, -we, lp, params, g) == 0.0
        d_plus, src_plus = _coupling_sf(pos, we, lp, params, g)
        d_minus, src_minus = _coupling_sf(pos, -we, lp, params, g)
    elif phase == "mi":
        if not isinstance(params, MiParams):
            raise TypeError("Mott phase needs MiParams")
        for a in range(n):
            for b in range(n):
                gam[a, b] = mi_bath.gamma_mi(pos[a], pos[b], we, lp, params, g).gamma
        assert mi_bath.gamma_mi(0, 0, -we, lp, params, g).gamma == 0.0
        d_plus, src_plus = _coupling_mi(pos, we, lp, params, g)
        d_minus, src_minus = _coupling_mi(pos, -we, lp, params, g)
    else:
        raise ValueError(f"unknown phase {phase!r}")
    if not include_counter_rotating:
        d_minus = np.zeros_like(d_minus)
    h = d_plus + d_minus.T
    np.fill_diagonal(h, np.diag(d_plus) - np.diag(d_minus))
    if not include_lamb_shift:
        np.fill_diagonal(h, 0.0)
    return EmitterLiouvillian(n=n, h_eff=h.astype(complex), gamma_matrix=gam,
                              gamma_prime=emitters.gamma_prime,
                              sources={"delta_plus": src_plus, "delta_minus": src_minus})


def excited_state(n: int) -> np.ndarray:
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[-1, -1] = 1.0
    return rho


def basis_state(n: int, excited) -> np.ndarray:
    """Projector on the product state with the listed emitters excited."""
    idx = sum(1 << (n - 1 - i) for i in excited)
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


@dataclass
class Trajectory:
    times: np.ndarray
    population: np.ndarray
    power: np.ndarray
    waveguide_power: np.ndarray
    trace: np.ndarray
    min_eig: np.ndarray
    purity: np.ndarray
    slope0: float
    waveguide_slope0: float
    rho: Optional[List[np.ndarray]] = None
    excited_probs: Optional[np.ndarray] = None

    @property
    def trace_drift(self) -> np.ndarray:
        return np.abs(self.trace - 1.0)


def _observe(liou, rho):
    ops = liou.operators()
    N = ops["N"]
    d = np.real(np.diag(rho))
    drho = liou.rhs(rho)
    pop = float(N @ d)
    power = -float(N @ np.real(np.diag(drho)))
    wg = float(np.real(np.sum(ops["Q"].multiply(rho.T))))
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    purity = float(np.real(np.vdot(rho, rho)))
    return pop, power, wg, float(np.sum(d)), float(ev[0]), purity, drho


def _site_probs(n, rho):
    d = np.real(np.diag(rho))
    idx = np.arange(2 ** n)
    return np.array([d[(idx >> (n - 1 - i)) & 1 == 1].sum() for i in range(n)])


def evolve(liou: EmitterLiouvillian, rho0: np.ndarray, t_final: float,
           dt_max: Optional[float] = None, n_out: int = 201, rtol: float = 1e-10,
           atol: float = 1e-12, store_states: Optional[bool] = None,
           method: str = "DOP853", drift_tol: float = 1e-6) -> Trajectory:
    """Integrate from ``rho0`` to ``t_final``; observables on a uniform grid.

    The trace is never renormalized. Drift above ``drift_tol`` or a failed
    step raises ``IntegrationError`` carrying the last good state.
    """
    dim = liou.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 must be {dim} x {dim}")
    if store_states is None:
        store_states = liou.n <= 6
    times = np.linspace(0.0, t_final, n_out)
    shape = (dim, dim)

    def fun(t, y):
        return liou.rhs(y.reshape(shape)).ravel()

    stepper = {"DOP853": DOP853, "RK45": RK45}[method]
    solver = stepper(fun, 0.0, rho0.ravel(), t_final, rtol=rtol, atol=atol,
                     max_step=np.inf if dt_max is None else dt_max)
    cols = {k: np.empty(n_out) for k in ("pop", "pow", "wg", "tr", "mev", "pur")}
    states = [] if store_states else None
    probs = np.empty((n_out, liou.n))

    def record(idx, rho):
        pop, pw, wg, tr, mev, pur, drho = _observe(liou, rho)
        for key, val in zip(("pop", "pow", "wg", "tr", "mev", "pur"), (pop, pw, wg, tr, mev, pur)):
            cols[key][idx] = val
        probs[idx] = _site_probs(liou.n, rho)
        if states is not None:
            states.append(rho.copy())
        if abs(tr - 1.0) > drift_tol:
            raise IntegrationError(f"trace drift {abs(tr - 1.0):.3e} at t={times[idx]:.6g}",
                                   last_time=float(times[idx]), last_state=rho)
        return drho

    drho0 = record(0, rho0)
    ops = liou.operators()
    slope0 = -float(ops["N"] @ np.real(np.diag(liou.rhs(drho0))))
    wslope0 = float(np.real(np.sum(ops["Q"].multiply(drho0.T))))
    nxt = 1
    while nxt < n_out:
        msg = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"integrator failed: {msg}", last_time=solver.t,
                                   last_state=solver.y.reshape(shape))
        dense = solver.dense_output()
        while nxt < n_out and times[nxt] <= solver.t + 1e-14 * max(1.0, t_final):
            record(nxt, dense(times[nxt]).reshape(shape))
            nxt += 1
        if solver.status == "finished" and nxt < n_out:
            while nxt < n_out:
                record(nxt, solver.y.reshape(shape))
                nxt += 1
    return Trajectory(times=times, population=cols["pop"], power=cols["pow"],
                      waveguide_power=cols["wg"], trace=cols["tr"], min_eig=cols["mev"],
                      purity=cols["pur"], slope0=slope0, waveguide_slope0=wslope0,
                      rho=states, excited_probs=probs)


@dataclass(frozen=True)
class BurstResult:
    burst: bool
    peak_time: float
    peak_power: float
    initial_slope: float


def detect_burst(traj: Trajectory, margin: float = 1e-6,
                 channel: str = "waveguide") -> BurstResult:
    """Burst iff ``max_{t>0} P(t) > (1 + margin) P(0)``.

    ``channel="waveguide"`` follows the photons emitted into the bath,
    ``sum G_ij <s_i^dag s_j>``, which is the quantity the waveguide burst
    inequality refers to. ``channel="total"`` uses ``-dN/dt`` including
    parasitic losses. The analytic initial slope is reported alongside.
    """
    if channel == "waveguide":
        p, slope = traj.waveguide_power, traj.waveguide_slope0
    elif channel == "total":
        p, slope = traj.power, traj.slope0
    else:
        raise ValueError(f"unknown channel {channel!r}")
    k = int(np.argmax(p[1:])) + 1 if p.size > 1 else 0
    burst = bool(p.size > 1 and p[k] > (1 + margin) * p[0])
    if not burst:
        k = 0
    return BurstResult(burst=burst, peak_time=float(traj.times[k]),
                       peak_power=float(p[k]), initial_slope=float(slope))


def cosine_decay_matrix(n: int, k1d_d: float, gamma_1d: float = 1.0) -> np.ndarray:
    """``G_ij = G_1D cos(k d |i - j|)`` for emitters on consecutive sites."""
    sep = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return gamma_1d * np.cos(k1d_d * sep)


def exchange_frequency(liou: EmitterLiouvillian) -> float:
    """Splitting of the single-excitation block, the Rabi-type exchange frequency."""
    ev = np.linalg.eigvalsh(liou.h_eff)
    return float(ev[-1] - ev[0])
