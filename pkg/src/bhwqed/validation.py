"""Invariant suite shared by ``bhwqed validate`` and the tests.

Each check returns the measured error next to its tolerance so a report can
be printed without re-running anything.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import bath_oracle, dynamics, ed_oracle, mi_bath, sf_bath
from .core import LatticeParams, MiParams, RegimeWarning, SfParams, validate_mi_regime


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)


def _rel(a, b, floor=1e-300):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def _quiet_lattice(**kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return LatticeParams(**kw)


def random_sf_params(rng, count):
    """Superfluid parameter sets with ``f_k > U n0`` on the whole zone."""
    out = []
    for _ in range(count):
        U = rng.uniform(0.0, 0.5)
        n0 = rng.uniform(0.5, 2.0)
        wc = 2.0 - U * n0 + rng.uniform(0.05, 10.0)
        out.append((_quiet_lattice(omega_c=wc, U=U), SfParams(n0)))
    return out


def random_mi_params(rng, count):
    """Mott parameter sets drawn inside the validity window."""
    out = []
    while len(out) < count:
        n = int(rng.integers(1, 4))
        lp = _quiet_lattice(omega_c=rng.uniform(2.5, 20.0), U=rng.uniform(2.0, 10.0))
        if validate_mi_regime(lp, MiParams(n))[2]:
            out.append((lp, MiParams(n)))
    return out


def sf_identity_error(lp, sf, k) -> float:
    u, v = sf_bath.bogoliubov_coeffs_sf(k, lp, sf)
    w = sf_bath.dispersion_sf(k, lp, sf)
    f = sf_bath.f_sf(k, lp, sf)
    un = lp.U * sf.n0
    errs = [np.max(np.abs(u * u - v * v - 1.0))]
    if un > 0:
        errs.append(_rel(u * v, un / (2 * w)))
    # with v = sinh(alpha) > 0 the plus combination carries f + U n0
    errs.append(_rel((u + v) ** 2, (f + un) / w))
    errs.append(_rel((u - v) ** 2, (f - un) / w))
    return float(max(errs))


def mi_identity_error(lp, mi, k) -> float:
    u, vim = mi_bath.bogoliubov_coeffs_mi(k, lp, mi)
    v = 1j * vim
    dk = mi_bath.pair_amplitude(k, lp, mi)
    et = mi_bath.eta(k, lp, mi)
    vs = mi_bath.varsigma(k, lp, mi)
    scale = np.max(np.abs(dk / (2 * et))) or 1.0
    e1 = np.max(np.abs(u * v + dk / (2 * et))) / scale
    e2 = _rel(u * u + vim * vim, np.ones_like(k))
    e3 = _rel(u * u - vim * vim, vs / (2 * et))
    e4 = _rel((u + v) ** 2, (vs - 2 * dk) / (2 * et))
    e5 = _rel((u - v) ** 2, (vs + 2 * dk) / (2 * et))
    return float(max(e1, e2, e3, e4, e5))


def _sf_suite(rng) -> List[CheckResult]:
    k = 2 * np.pi * np.arange(512) / 512
    out = []
    err = max(sf_identity_error(lp, sf, k) for lp, sf in random_sf_params(rng, 20))
    out.append(CheckResult("sf", "bogoliubov identities", err, 1e-10))
    lp0 = _quiet_lattice(omega_c=2.0, U=0.0)
    out.append(CheckResult("sf", "U=0 gamma_ii = g^2/J",
                           abs(sf_bath.gamma_sf(0, 0, 2.0, lp0, SfParams(1.0), 1.0) - 1.0), 1e-10))
    lp = _quiet_lattice(omega_c=2.0, U=0.5)
    sf = SfParams(1.0)
    w0, wpi = sf_bath.band_edges_sf(lp, sf)
    ws = np.linspace(w0, wpi, 9)[1:-1]
    rt = max(abs(sf_bath.dispersion_sf(sf_bath.k1d_sf(w, lp, sf), lp, sf) - w) for w in ws)
    out.append(CheckResult("sf", "k_1D round trip", rt, 1e-10))
    errs = []
    for w in ws[::2]:
        ref = bath_oracle.response_quadrature(bath_oracle.CorrelatorSpec("sf", lp, sf, i=1), w, 0.1)
        cf = sf_bath.gamma_sf(1, 0, w, lp, sf, 0.1)
        errs.append(abs(cf - ref.gamma) / abs(sf_bath.gamma_sf(0, 0, w, lp, sf, 0.1)))
    out.append(CheckResult("sf", "gamma vs oracle", max(errs), 1e-3))
    lpa = _quiet_lattice(omega_c=1.5, U=0.5)
    we = sf_bath.band_edges_sf(lpa, sf)[1] + 0.2
    spec = dict(dispersion_mode="approximated")
    errs = []
    for m in (0, 1, 5):
        ref = bath_oracle.response_quadrature(
            bath_oracle.CorrelatorSpec("sf", lpa, sf, i=m, **spec), we, 0.1)
        errs.append(abs(sf_bath.delta_sf(m, 0, we, lpa, sf, 0.1).delta - ref.delta) / abs(ref.delta))
    out.append(CheckResult("sf", "delta vs oracle (approximated)", max(errs), 1e-6))
    return out


def _mi_suite(rng) -> List[CheckResult]:
    k = 2 * np.pi * np.arange(512) / 512
    out = []
    err = max(mi_identity_error(lp, mi, k) for lp, mi in random_mi_params(rng, 20))
    out.append(CheckResult("mi", "bogoliubov identities", err, 1e-10))
    lp = _quiet_lattice(omega_c=10.0, U=3.0)
    mi = MiParams(1)
    lo, hi = mi_bath.band_edges_mi(1, lp, mi)
    # fractions chosen away from the holon band edge at 12 J
    ws = lo + (hi - lo) * np.array([0.1, 0.3, 0.6, 0.9])
    rt = max(abs(mi_bath.dispersion_mi(mi_bath.k1d_mi(w, 1, lp, mi), 1, lp, mi) - w) for w in ws)
    out.append(CheckResult("mi", "k_1D round trip", rt, 1e-10))
    errs = []
    for w in ws:
        ref = bath_oracle.response_quadrature(bath_oracle.CorrelatorSpec("mi", lp, mi, i=1), w, 0.1)
        cf = mi_bath.gamma_mi(1, 0, w, lp, mi, 0.1).gamma
        errs.append(abs(cf - ref.gamma) / abs(mi_bath.gamma_mi(0, 0, w, lp, mi, 0.1).gamma))
    out.append(CheckResult("mi", "gamma vs oracle", max(errs), 1e-3))
    lpc = _quiet_lattice(omega_c=10.0, U=2.0)
    we = float(mi_bath.e_plus(np.pi, lpc, mi)) + 0.2
    errs = []
    for m in (0, 1, 5):
        ref = bath_oracle.response_quadrature(
            bath_oracle.CorrelatorSpec("mi", lpc, mi, i=m, dispersion_mode="approximated"), we, 0.1)
        errs.append(abs(mi_bath.delta_mi(m, 0, we, lpc, mi, 0.1).delta - ref.delta) / abs(ref.delta))
    out.append(CheckResult("mi", "delta vs oracle (approximated)", max(errs), 1e-6))
    return out


def _ed_suite(rng) -> List[CheckResult]:
    out = []
    b = ed_oracle.FockBasis(2, 2, 2)
    H = ed_oracle.build_hamiltonian(b, ed_oracle.HubbardParams(10.0, U=3.0, J=0.0)).toarray()
    out.append(CheckResult("ed", "N_p=2 J=0 diagonal",
                           float(np.max(np.abs(H - np.diag([23.0, 20.0, 23.0])))), 1e-12))
    spec = ed_oracle.excitation_spectrum(ed_oracle.HubbardParams(10.0, U=6.0, J=0.0), MiParams(1))
    err = max(np.max(np.abs(spec.doublon - 16.0)), np.max(np.abs(spec.holon - 10.0))) / 16.0
    out.append(CheckResult("ed", "J=0 flat bands", float(err), 1e-13))
    return out


def _dynamics_suite(rng) -> List[CheckResult]:
    liou = dynamics.EmitterLiouvillian.from_matrices([[0.01]])
    tr = dynamics.evolve(liou, dynamics.excited_state(1), 400.0)
    out = [CheckResult("dynamics", "n=1 exponential",
                       float(np.max(np.abs(tr.population - np.exp(-0.01 * tr.times)))), 1e-6)]
    liou = dynamics.EmitterLiouvillian.from_matrices(dynamics.cosine_decay_matrix(4, np.pi / 3))
    tr = dynamics.evolve(liou, dynamics.excited_state(4), 4.0)
    out.append(CheckResult("dynamics", "trace drift", float(np.max(tr.trace_drift)), 1e-8))
    out.append(CheckResult("dynamics", "positivity", float(max(0.0, -tr.min_eig.min())), 1e-8))
    return out


SUITES: Dict[str, Callable] = {"sf": _sf_suite, "mi": _mi_suite, "ed": _ed_suite,
                               "dynamics": _dynamics_suite}


def run_suites(names: Sequence[str] = tuple(SUITES), seed: int = 0) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        out.extend(SUITES[name](rng))
    return out
