import numpy as np
import pytest

from bhwqed import ed_oracle as ed
from bhwqed.core import LatticeParams, MiParams

MI1 = MiParams(1)


@pytest.fixture(scope="module")
def spectra():
    out = {}
    for U in (4.0, 6.0, 10.0):
        lp = LatticeParams(omega_c=10.0, U=U)
        out[U] = (lp, ed.excitation_spectrum(lp, MI1))
    return out


@pytest.mark.parametrize("n_sites,n_max,total", [(3, 2, 3), (4, 3, 4), (6, 3, 6), (5, 4, 7)])
def test_basis_size_matches_count(n_sites, n_max, total):
    b = ed.FockBasis(n_sites, n_max, total)
    assert b.dim == ed._count(n_sites, n_max, total)
    assert np.all(b.states.sum(axis=1) == total) and b.states.max() <= n_max
    assert np.array_equal(b.index(b.states), np.arange(b.dim))


def test_two_site_hamiltonian():
    b = ed.FockBasis(2, 2, 2)
    H = ed.build_hamiltonian(b, LatticeParams(omega_c=10.0, U=3.0)).toarray()
    s2 = np.sqrt(2.0)
    ref = np.array([[23.0, -s2, 0.0], [-s2, 20.0, -s2], [0.0, -s2, 23.0]])
    assert np.allclose(H, ref)
    b1 = ed.FockBasis(2, 2, 1)
    H1 = ed.build_hamiltonian(b1, LatticeParams(omega_c=10.0, U=3.0)).toarray()
    assert np.allclose(H1, [[10.0, -1.0], [-1.0, 10.0]])


def test_hamiltonian_hermitian_and_translation_invariant():
    b = ed.FockBasis(5, 3, 5)
    H = ed.build_hamiltonian(b, LatticeParams(omega_c=10.0, U=4.0))
    assert abs(H - H.T).max() < 1e-14
    T = sp_perm(b.translation())
    assert abs(T @ H - H @ T).max() < 1e-12


def sp_perm(p):
    import scipy.sparse as sp
    n = p.size
    return sp.csr_matrix((np.ones(n), (p, np.arange(n))), shape=(n, n))


def test_dimension_guard():
    with pytest.raises(ValueError):
        ed.FockBasis(9, 2, 9)


def test_ground_state_below_mott_reference():
    lp = LatticeParams(omega_c=10.0, U=6.0)
    b = ed.FockBasis(6, 3, 6)
    e0 = ed.lowest_eigenvalues(ed.build_hamiltonian(b, lp))[0]
    assert e0 < ed.mott_reference_energy(lp, MI1, 6)


def test_ground_state_at_zero_momentum(spectra):
    for _, s in spectra.values():
        assert not any("ground" in d for d in s.diagnostics)


@pytest.mark.parametrize("n_bar,n_sites", [(1, 6), (2, 4)])
def test_flat_bands_without_hopping(n_bar, n_sites):
    U, wc = 6.0, 10.0
    s = ed.excitation_spectrum(ed.HubbardParams(wc, U=U, J=0.0), MiParams(n_bar), n_sites=n_sites)
    assert np.allclose(s.doublon, wc + U * n_bar, rtol=1e-13)
    assert np.allclose(s.holon, wc + U * (n_bar - 1), rtol=1e-13)


def test_n_max_convergence():
    lp = LatticeParams(omega_c=10.0, U=6.0)
    a = ed.excitation_spectrum(lp, MI1, n_max=3)
    b = ed.excitation_spectrum(lp, MI1, n_max=4)
    assert np.max(np.abs(a.doublon - b.doublon)) < 0.02


def test_curvature_gate_and_trend(spectra):
    dbl = {U: ed.curvature_error(s, lp, MI1) for U, (lp, s) in spectra.items()}
    hol = {U: ed.curvature_error(s, lp, MI1, sigma=-1) for U, (lp, s) in spectra.items()}
    # frozen at N_p = 6, n_max = 3
    assert dbl[4.0] == pytest.approx(0.290, abs=5e-3)
    assert dbl[6.0] == pytest.approx(0.131, abs=5e-3)
    assert dbl[10.0] == pytest.approx(0.0559, abs=2e-3)
    assert dbl[6.0] < 0.15
    assert dbl[4.0] > dbl[6.0] > dbl[10.0]
    assert hol[4.0] > hol[6.0] > hol[10.0]


def test_superfluid_first_mode_improves_with_u():
    errs = [ed.sf_excitation_check(U).first_mode_error for U in (0.05, 0.2, 0.4)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.02
