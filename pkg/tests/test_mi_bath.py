import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from bhwqed import bath_oracle, mi_bath
from bhwqed.core import LatticeParams, MiParams, OutOfBandError, validate_mi_regime

MI = MiParams(1)
LP3 = LatticeParams(omega_c=10.0, U=3.0)
LP2 = LatticeParams(omega_c=10.0, U=2.0)
K512 = 2 * np.pi * np.arange(512) / 512


def test_flat_band_limit():
    lp = LatticeParams(omega_c=10.0, U=3.0, J=1e-9)
    e = mi_bath.dispersion_mi(K512, 1, lp, MI)
    assert np.allclose(e, 13.0, atol=1e-7)
    lo, hi = mi_bath.band_edges_mi(1, lp, MI)
    assert hi - lo < 1e-7


def test_band_values():
    d0 = (3.0 - 2.0) / 2
    assert mi_bath.small_delta(0.0, LP3, MI) == pytest.approx(d0)
    assert mi_bath.eta(0.0, LP3, MI) == pytest.approx(mi_bath.varsigma(0.0, LP3, MI) / 2)
    assert mi_bath.dispersion_mi(0.0, 1, LP3, MI) == pytest.approx(d0 + (13 - 4 + 8) / 2)
    for n in (1, 2, 3):
        mi = MiParams(n)
        gap = mi_bath.dispersion_mi(np.pi / 2, 1, LP3, mi) - mi_bath.dispersion_mi(np.pi / 2, -1, LP3, mi)
        assert gap == pytest.approx((2 * n - 1) * 3.0)


def test_band_edges_order():
    lo_p, hi_p = mi_bath.band_edges_mi(1, LP3, MI)
    lo_m, hi_m = mi_bath.band_edges_mi(-1, LP3, MI)
    assert lo_p < hi_p and lo_m < hi_m
    assert np.all(mi_bath.dispersion_mi(K512, -1, LP3, MI) < mi_bath.dispersion_mi(K512, 1, LP3, MI))


def test_coefficients_at_symmetric_points():
    for k in (0.0, np.pi):
        u, v = mi_bath.bogoliubov_coeffs_mi(k, LP3, MI)
        assert u == pytest.approx(1.0) and v == pytest.approx(0.0, abs=1e-15)
    u, vim = mi_bath.bogoliubov_coeffs_mi(np.pi / 2, LP3, MI)
    dk = mi_bath.pair_amplitude(np.pi / 2, LP3, MI)
    assert u * 1j * vim == pytest.approx(-dk / (2 * mi_bath.eta(np.pi / 2, LP3, MI)), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.floats(2, 12), st.floats(3, 25))
def test_identities_on_grid(n, U, wc):
    mi, lp = MiParams(n), LatticeParams(omega_c=wc, U=U)
    assume(validate_mi_regime(lp, mi)[2])
    u, vim = mi_bath.bogoliubov_coeffs_mi(K512, lp, mi)
    v = 1j * vim
    dk = mi_bath.pair_amplitude(K512, lp, mi)
    et = mi_bath.eta(K512, lp, mi)
    vs = mi_bath.varsigma(K512, lp, mi)
    assert np.max(np.abs(u * u + vim * vim - 1)) < 1e-12
    assert np.max(np.abs(u * v + dk / (2 * et))) < 1e-10 * np.max(np.abs(dk / et))
    assert np.allclose(u * u + v * v, vs / (2 * et), rtol=1e-10, atol=0)
    assert np.allclose((u + v) ** 2, (vs - 2 * dk) / (2 * et), rtol=1e-10, atol=0)
    assert np.allclose((u - v) ** 2, (vs + 2 * dk) / (2 * et), rtol=1e-10, atol=0)
    # parity: u and eps even, v odd
    assert np.allclose(u, mi_bath.bogoliubov_coeffs_mi(-K512, lp, mi)[0])
    assert np.allclose(vim, -mi_bath.bogoliubov_coeffs_mi(-K512, lp, mi)[1])


def test_k1d_examples():
    w = float(mi_bath.dispersion_mi(np.pi / 2, 1, LP3, MI))
    assert mi_bath.k1d_mi(w, 1, LP3, MI) == pytest.approx(np.pi / 2, abs=1e-10)
    with pytest.raises(OutOfBandError):
        mi_bath.k1d_mi(mi_bath.band_edges_mi(1, LP3, MI)[1] + 0.1, 1, LP3, MI)


@settings(max_examples=100)
@given(st.floats(0.001, 0.999), st.sampled_from([1, -1]), st.integers(1, 3))
def test_k1d_round_trip(frac, s, n):
    mi = MiParams(n)
    lo, hi = mi_bath.band_edges_mi(s, LP3, mi)
    w = lo + frac * (hi - lo)
    k = mi_bath.k1d_mi(w, s, LP3, mi)
    assert mi_bath.dispersion_mi(k, s, LP3, mi) == pytest.approx(w, abs=1e-8)


def test_gamma_zero_in_gaps():
    lo_m = mi_bath.band_edges_mi(-1, LP2, MI)[0]
    hi_p = mi_bath.band_edges_mi(1, LP2, MI)[1]
    for w in np.concatenate([np.linspace(0.5, lo_m - 1e-3, 40), np.linspace(hi_p + 1e-3, 40, 40)]):
        r = mi_bath.gamma_mi(0, 0, w, LP2, MI, 0.1)
        assert r.gamma == 0.0 and r.chi_plus == 0 and r.chi_minus == 0


def test_gamma_gap_between_bands():
    lp = LatticeParams(omega_c=10.0, U=8.0)
    gap = (mi_bath.band_edges_mi(-1, lp, MI)[1] + mi_bath.band_edges_mi(1, lp, MI)[0]) / 2
    assert mi_bath.gamma_mi(0, 0, gap, lp, MI, 0.1).gamma == 0.0


def test_gamma_mid_band_vs_oracle():
    w = 15.0
    ref = bath_oracle.response_quadrature(bath_oracle.CorrelatorSpec("mi", LP3, MI), w, 0.1)
    assert mi_bath.gamma_mi(0, 0, w, LP3, MI, 0.1).gamma == pytest.approx(ref.gamma, rel=1e-3)


def test_gamma_overlapping_bands_additive():
    w = 10.5
    r = mi_bath.gamma_mi(2, 0, w, LP3, MI, 0.1)
    assert r.chi_plus == 1 and r.chi_minus == 1
    parts = 0.01 * (r.kernel_plus * np.cos(2 * r.k_1d_plus) + r.kernel_minus * np.cos(2 * r.k_1d_minus))
    assert r.gamma == pytest.approx(parts)
    ref = bath_oracle.response_quadrature(bath_oracle.CorrelatorSpec("mi", LP3, MI, i=2), w, 0.1)
    assert r.gamma == pytest.approx(ref.gamma, abs=1e-3 * mi_bath.gamma_mi(0, 0, w, LP3, MI, 0.1).gamma)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(2, 8), st.integers(1, 3))
def test_pole_products(offset, U, n):
    lp, mi = LatticeParams(omega_c=10.0, U=U), MiParams(n)
    we = float(mi_bath.e_plus(np.pi, lp, mi)) + 0.2 + abs(offset)
    p = mi_bath.residue_poles(we, lp, mi)
    for a, b in ((p.z0_minus, p.z0_plus), (p.z1_minus, p.z1_plus), (p.z2_minus, p.z2_plus)):
        assert a * b == pytest.approx(1.0, rel=1e-10)
    assert abs(p.z0_minus) < 1 and abs(p.z1_plus) < 1 and abs(p.z2_plus) < 1


def test_delta_gap_shape():
    we = float(mi_bath.e_plus(np.pi, LP2, MI)) + 0.2
    vals = [mi_bath.delta_mi(m, 0, we, LP2, MI, 0.1).delta for m in range(7)]
    assert np.all(np.diff(np.abs(vals)) < 0)
    far = mi_bath.delta_mi(80, 0, we, LP2, MI, 0.1).delta
    assert abs(far) < 1e-6 * abs(vals[0])
    assert mi_bath.delta_mi(3, 0, we, LP2, MI, 0.1).delta == mi_bath.delta_mi(0, 3, we, LP2, MI, 0.1).delta


@pytest.mark.parametrize("m", [0, 3, 7])
def test_delta_vs_approximated_oracle(m):
    we = float(mi_bath.e_plus(np.pi, LP2, MI)) + 0.5
    spec = bath_oracle.CorrelatorSpec("mi", LP2, MI, i=m, dispersion_mode="approximated")
    ref = bath_oracle.response_quadrature(spec, we, 0.1).delta
    assert mi_bath.delta_mi(m, 0, we, LP2, MI, 0.1).delta == pytest.approx(ref, rel=1e-6)


def test_pairing_cancels_in_literal_oracle():
    # the odd pairing weight drops out of Delta = (I_ij - I_ji^*)/2i
    we = float(mi_bath.e_plus(np.pi, LP2, MI)) + 0.2
    for m in (1, 2):
        kw = dict(i=m, dispersion_mode="approximated")
        even = bath_oracle.response_quadrature(bath_oracle.CorrelatorSpec("mi", LP2, MI, **kw), we, 0.1)
        lit = bath_oracle.response_quadrature(
            bath_oracle.CorrelatorSpec("mi", LP2, MI, weights="literal", **kw), we, 0.1)
        assert lit.delta == pytest.approx(even.delta, rel=1e-12)
    r = mi_bath.delta_mi(1, 0, we, LP2, MI, 0.1, include_pairing=True)
    base = mi_bath.delta_mi(1, 0, we, LP2, MI, 0.1)
    assert r.delta == pytest.approx(base.delta + base.pairing_term)


def test_delta_errors():
    with pytest.raises(OutOfBandError, match="bath_oracle"):
        mi_bath.delta_mi(0, 1, 2.0, LP2, MI, 0.1)
    with pytest.raises(OutOfBandError):
        mi_bath.delta_mi(0, 1, 11.0, LP2, MI, 0.1)
