import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bhwqed import bath_oracle, sf_bath
from bhwqed.core import LatticeParams, OutOfBandError, PhysicsError, SfParams

SF = SfParams(1.0)
K512 = 2 * np.pi * np.arange(512) / 512


def lat(wc, U):
    return LatticeParams(omega_c=wc, U=U)


def test_dispersion_examples():
    assert sf_bath.dispersion_sf(np.pi / 2, lat(2, 0), SF) == pytest.approx(2.0)
    assert sf_bath.dispersion_sf(0.0, lat(1.5, 0.5), SF) == pytest.approx(0.0, abs=1e-12)
    assert sf_bath.dispersion_sf(np.pi, lat(1.5, 0.5), SF) == pytest.approx(np.sqrt(4.5 ** 2 - 0.25))


def test_dispersion_regime_error():
    with pytest.raises(PhysicsError):
        sf_bath.dispersion_sf(0.0, lat(0.1, 0.5), SF)


def test_band_edges():
    assert sf_bath.band_edges_sf(lat(2, 0), SF) == pytest.approx((0.0, 4.0))
    assert sf_bath.band_edges_sf(lat(1.5, 0.5), SF) == pytest.approx((0.0, np.sqrt(20)), abs=1e-12)
    assert sf_bath.band_edges_sf(lat(2, 0.5), SF) == pytest.approx(
        (np.sqrt(1 - 0.25), np.sqrt(25 - 0.25)))


def test_coefficients():
    u, v = sf_bath.bogoliubov_coeffs_sf(K512, lat(2.5, 0), SF)
    assert np.allclose(u, 1) and np.allclose(v, 0)
    lp = lat(2, 0.5)
    u, v = sf_bath.bogoliubov_coeffs_sf(np.pi, lp, SF)
    assert u * u - v * v == pytest.approx(1.0, abs=1e-12)
    assert u * v == pytest.approx(0.5 / (2 * sf_bath.dispersion_sf(np.pi, lp, SF)), rel=1e-12)
    with pytest.raises(PhysicsError):
        sf_bath.bogoliubov_coeffs_sf(0.0, lat(1.5, 0.5), SF)


def test_gapless_limit_u_minus_v_finite():
    lp = lat(1.5, 0.5)
    k = np.array([1e-2, 1e-3, 1e-4])
    u, v = sf_bath.bogoliubov_coeffs_sf(k, lp, SF)
    assert np.all(np.diff(u) > 0)
    ref = (sf_bath.f_sf(k, lp, SF) - 0.5) / sf_bath.dispersion_sf(k, lp, SF)
    assert np.allclose((u - v) ** 2, ref, rtol=1e-8)
    assert np.all((u - v) ** 2 < 1e-2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.5), st.floats(0.5, 2.0), st.floats(0.01, 8))
def test_identities_on_grid(U, n0, extra):
    sf = SfParams(n0)
    lp = lat(2 - U * n0 + extra, U)
    u, v = sf_bath.bogoliubov_coeffs_sf(K512, lp, sf)
    w = sf_bath.dispersion_sf(K512, lp, sf)
    f = sf_bath.f_sf(K512, lp, sf)
    assert np.max(np.abs(u * u - v * v - 1)) < 1e-12
    assert np.allclose((u - v) ** 2, (f - U * n0) / w, rtol=1e-10, atol=0)
    assert np.allclose(u * u + v * v, f / w, rtol=1e-10, atol=0)
    assert np.allclose(w, sf_bath.dispersion_sf(-K512, lp, sf), rtol=0, atol=0)


def test_k1d_examples():
    assert sf_bath.k1d_sf(2.0, lat(2, 0), SF) == pytest.approx(np.pi / 2)
    lp = lat(2, 0.5)
    k = sf_bath.k1d_sf(2.0, lp, SF)
    assert k == pytest.approx(np.arccos((3 - np.sqrt(4.25)) / 2))
    assert sf_bath.dispersion_sf(k, lp, SF) == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(OutOfBandError):
        sf_bath.k1d_sf(sf_bath.band_edges_sf(lp, SF)[1] + 0.1, lp, SF)


@settings(max_examples=100)
@given(st.floats(0.001, 0.999))
def test_k1d_round_trip(frac):
    lp = lat(2, 0.5)
    w0, wpi = sf_bath.band_edges_sf(lp, SF)
    w = w0 + frac * (wpi - w0)
    assert sf_bath.dispersion_sf(sf_bath.k1d_sf(w, lp, SF), lp, SF) == pytest.approx(w, abs=1e-10)


def test_gamma_examples():
    lp = lat(2, 0)
    assert sf_bath.gamma_sf(0, 0, 2.0, lp, SF, 0.1) == pytest.approx(0.01, rel=1e-12)
    lp = lat(2, 0.5)
    wpi = sf_bath.band_edges_sf(lp, SF)[1]
    assert sf_bath.gamma_sf(0, 3, wpi + 0.2, lp, SF, 0.1) == 0.0
    w = 3.0
    k = sf_bath.k1d_sf(w, lp, SF)
    gii = sf_bath.gamma_sf(0, 0, w, lp, SF, 0.1)
    assert sf_bath.gamma_sf(4, 2, w, lp, SF, 0.1) == pytest.approx(gii * np.cos(2 * k))
    assert sf_bath.gamma_sf(2, 4, w, lp, SF, 0.1) == sf_bath.gamma_sf(4, 2, w, lp, SF, 0.1)


def test_gamma_vanishes_at_lower_edge_when_gapless():
    lp = lat(1.5, 0.5)
    vals = [sf_bath.gamma_sf(0, 0, w, lp, SF, 0.1) for w in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] < 1e-5


def test_gamma_band_edge_clamped_finite():
    lp = lat(2, 0)
    val = sf_bath.gamma_sf(0, 0, 4.0, lp, SF, 0.1)
    assert np.isfinite(val) and val > 1e2
    kern, clamped = sf_bath.kernel_sf(4.0, lp, SF)
    assert clamped


@settings(max_examples=60)
@given(st.floats(0.02, 0.98), st.integers(0, 12))
def test_gamma_bounded_by_onsite(frac, m):
    lp = lat(2, 0.3)
    w0, wpi = sf_bath.band_edges_sf(lp, SF)
    w = w0 + frac * (wpi - w0)
    assert abs(sf_bath.gamma_sf(m, 0, w, lp, SF, 0.1)) <= sf_bath.gamma_sf(0, 0, w, lp, SF, 0.1) + 1e-15


def test_delta_plateau_and_parts():
    lp = lat(1.5, 0.5)
    we = np.sqrt(20) + 0.2
    r = sf_bath.delta_sf(0, 40, we, lp, SF, 0.1)
    assert r.plateau == pytest.approx(4 * 0.01 / we)
    assert r.delta == pytest.approx(8.56e-3, rel=1e-3)
    assert abs(r.delta - r.plateau) < 1e-3 * r.plateau
    assert r.lambda1 > 0 and r.lambda2 > 0
    assert abs(r.z1) < 1 and abs(r.z2) < 1
    r0 = sf_bath.delta_sf(0, 0, we, lp, SF, 0.1)
    assert r0.delta == pytest.approx(r0.plateau + r0.f1 + r0.f2)


def test_delta_u0_single_exponential():
    r = sf_bath.delta_sf(0, 3, 4.5, lat(2, 0), SF, 0.1)
    assert r.f1 == 0.0
    assert r.delta == pytest.approx(r.plateau + r.f2 * r.z2 ** 3)


def test_lambda1_independent_of_omega():
    lp = lat(1.5, 0.5)
    a = sf_bath.delta_sf(0, 1, 5.0, lp, SF, 0.1)
    b = sf_bath.delta_sf(0, 1, 6.0, lp, SF, 0.1)
    assert a.lambda1 == b.lambda1 and a.lambda2 != b.lambda2


def test_delta_in_band_error():
    lp = lat(2, 0.5)
    with pytest.raises(OutOfBandError):
        sf_bath.delta_sf(0, 1, 3.0, lp, SF, 0.1)


def test_delta_u0_matches_exact_oracle():
    # at U = 0 the small-U dispersion is exact
    lp = lat(2, 0)
    for m in (0, 2, 7):
        spec = bath_oracle.CorrelatorSpec("sf", lp, SF, i=m)
        ref = bath_oracle.response_quadrature(spec, 4.6, 0.1).delta
        assert sf_bath.delta_sf(m, 0, 4.6, lp, SF, 0.1).delta == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("wc, U", [(1.5, 0.5), (2.0, 0.5), (1.9, 0.1)])
def test_delta_small_u_vs_exact_oracle(wc, U):
    # omega_k ~ f_k costs a few percent at U = 0.5 J; measured against the on-site
    # coupling because Delta_ij nearly cancels at odd separations
    lp = lat(wc, U)
    we = sf_bath.band_edges_sf(lp, SF)[1] + 0.2
    ref = [bath_oracle.response_quadrature(bath_oracle.CorrelatorSpec("sf", lp, SF, i=m), we, 0.1).delta
           for m in range(11)]
    cf = [sf_bath.delta_sf(m, 0, we, lp, SF, 0.1).delta for m in range(11)]
    err = np.max(np.abs(np.subtract(cf, ref))) / abs(ref[0])
    assert err <= (0.05 if U > 0.25 else 0.005)


def test_negative_frequency_coupling():
    lp = lat(1.5, 0.5)
    spec = bath_oracle.CorrelatorSpec("sf", lp, SF, i=2, dispersion_mode="approximated")
    ref = bath_oracle.response_quadrature(spec, -4.8, 0.1).delta
    assert sf_bath.delta_sf(0, 2, -4.8, lp, SF, 0.1).delta == pytest.approx(ref, rel=1e-8)


def test_ground_energy_finite():
    assert sf_bath.ground_energy_sf(lat(2, 0.5), SF) < 0
