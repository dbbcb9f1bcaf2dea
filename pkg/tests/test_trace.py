import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdstab.catalog import ab3_centered, crank_nicolson, lax_friedrichs, leapfrog, leapfrog_2d, wave_leapfrog
from fdstab.errors import EdgeSymbolVanishes
from fdstab.poly import poly_roots
from fdstab.scheme import edge_symbol_coeffs
from fdstab.trace import (boundary_symbols, boundary_symbols_dz, central_margin_scan, companions,
                          gauss_lucas_check, hull_distance, split_spectrum, stable_decay, trace_ratio,
                          trace_scan, trace_terms, z_samples)

moduli = st.floats(1.0, np.e)
angles = st.floats(0, 2 * np.pi)


def test_leapfrog_boundary_symbols():
    lam = 0.8
    sch = leapfrog(lam, velocity=1.0)
    for z in (1.0, 2j, 1.5 - 0.5j):
        assert np.allclose(boundary_symbols(sch, z), [-lam * z, z ** 2 - 1, lam * z])


def test_symbols_at_one_sum_coefficients():
    sch = ab3_centered()
    c = edge_symbol_coeffs(sch)
    assert np.allclose(boundary_symbols(sch, 1.0), c.sum(axis=1))
    assert np.allclose(boundary_symbols(sch, 1.0, eta=(0.7,)), boundary_symbols(sch, 1.0))


def test_leapfrog_companions_closed_form():
    lam = 0.8
    sch = leapfrog(lam, velocity=1.0)
    for z in (1.0, 1j, 2.0 + 1j):
        pair = companions(sch, z)
        assert np.allclose(pair.M_mat, [[-2 * z / lam, 1], [1, 0]])
        assert np.allclose(pair.L_mat, [[(1 - z ** 2) / (lam * z), 1], [1, 0]])
        assert pair.M_split.counts == {"stable": 1, "central": 0, "unstable": 1}


def test_leapfrog_margin_example():
    pair = companions(leapfrog(0.8, velocity=1.0), 1j)
    assert np.allclose(np.sort(np.abs(pair.M_split.eigenvalues)), [0.5, 2.0])
    assert pair.central_margin == pytest.approx(0.5)


@pytest.mark.parametrize("scheme", [leapfrog(), ab3_centered(), crank_nicolson(), leapfrog(0.5, velocity=1.0)],
                         ids=lambda s: s.name)
@settings(max_examples=30, deadline=None)
@given(moduli, angles)
def test_companion_eigenvalues_are_kappa_roots(scheme, rho, phi):
    z = rho * np.exp(1j * phi)
    pair = companions(scheme, z)
    for mat, sym in ((pair.L_mat, boundary_symbols(scheme, z)), (pair.M_mat, boundary_symbols_dz(scheme, z))):
        eig = np.sort_complex(np.linalg.eigvals(mat))
        roots = np.sort_complex(poly_roots(sym))
        assert np.allclose(eig, roots, atol=1e-8)


@pytest.mark.parametrize("scheme", [leapfrog(), ab3_centered(), leapfrog(0.5, velocity=1.0)],
                         ids=lambda s: s.name)
@settings(max_examples=30, deadline=None)
@given(moduli, angles)
def test_projector_algebra_and_decay(scheme, rho, phi):
    pair = companions(scheme, rho * np.exp(1j * phi))
    split = pair.M_split
    assert split.counts["central"] == 0
    assert split.projector_residual() <= 1e-10
    ps, pu = split.projectors["stable"], split.projectors["unstable"]
    assert np.abs(ps + pu - np.eye(len(ps))).max() <= 1e-10
    c, delta = stable_decay(pair)
    assert delta < 1 and np.isfinite(c)


def test_split_of_a_known_matrix():
    mat = np.array([[0.5, 1.0, 0], [0, 1.0, 0], [0, 0, 3.0]])
    split = split_spectrum(mat)
    assert split.counts == {"stable": 1, "central": 1, "unstable": 1}
    assert split.projector_residual() <= 1e-12


@pytest.mark.parametrize("lam", [0.5, 0.8])
def test_leapfrog_margin_scan(lam):
    scan = central_margin_scan(leapfrog(lam, velocity=1.0), z_samples(1000))
    assert scan.verdict
    # |kappa| = 1 would force |z| <= lam; the closest approach is at z = i
    assert scan.min_margin == pytest.approx(1 - (1 / lam - np.sqrt(lam ** -2 - 1)), rel=1e-6)
    assert scan.max_projector_residual <= 1e-10


def test_planted_double_root_is_flagged():
    scan = central_margin_scan(wave_leapfrog(), z_samples(200))
    assert not scan.verdict and scan.min_margin < 1e-6


def test_single_sample_scan():
    scan = central_margin_scan(leapfrog(), [np.e])
    assert scan.n_samples == 1 and 0 < scan.min_margin < np.inf


def test_samples_cover_band():
    zs = z_samples(500, 2.0, seed=3)
    assert len(zs) == 500
    assert np.all((np.abs(zs) >= 1 - 1e-15) & (np.abs(zs) <= 2 + 1e-12))
    assert np.array_equal(zs, z_samples(500, 2.0, seed=3))


def test_vanishing_edge_symbol_raises():
    with pytest.raises(EdgeSymbolVanishes):
        companions(lax_friedrichs(), 1.5)
    with pytest.raises(ValueError):
        companions(leapfrog(), 0.5)


def test_gauss_lucas():
    assert gauss_lucas_check(ab3_centered()) <= 1e-9
    assert gauss_lucas_check(leapfrog_2d()) <= 1e-9
    pts = np.array([0, 1, 1j])
    assert hull_distance(pts, 0.2 + 0.2j) <= 1e-12
    assert hull_distance(pts, 2.0) == pytest.approx(1.0)


def test_zero_window_gives_zero_ratio():
    w = np.zeros(5)
    w[-1] = 1.0
    assert trace_ratio(leapfrog(), 2.0, (), w, P1=3, start=10) == 0.0


def test_spike_closed_form():
    sch = leapfrog(0.8, velocity=1.0)
    for z in (1.5, 2j, 1.1 - 0.4j):
        terms = trace_terms(sch, z, (), np.array([1.0]), P1=5, start=0)
        a, b = boundary_symbols(sch, z), boundary_symbols_dz(sch, z)
        # the spike at 0 appears in row j = -l with weight a_l; rows j <= 0 need l >= 0
        assert terms.lhs == 1.0
        assert terms.interior == pytest.approx(np.sum(np.abs(a) ** 2))
        assert terms.boundary == pytest.approx(np.sum(np.abs(b[1:]) ** 2))


def test_ratio_against_direct_sums():
    sch = ab3_centered()
    rng = np.random.default_rng(0)
    w = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    start, P1, z = -4, 2, 1.3 + 0.2j
    a, b = boundary_symbols(sch, z), boundary_symbols_dz(sch, z)
    full = dict(zip(range(start, start + 9), w))
    get = lambda j: full.get(j, 0)
    lhs = sum(abs(get(j)) ** 2 for j in range(-2, P1 + 1))
    rhs = sum(abs(sum(a[l + 1] * get(j + l) for l in (-1, 0, 1))) ** 2 for j in range(-20, 20))
    rhs += sum(abs(sum(b[l + 1] * get(j + l) for l in (-1, 0, 1))) ** 2 for j in range(-20, 1))
    assert trace_ratio(sch, z, (), w, P1, start) == pytest.approx(lhs / rhs, rel=1e-12)


def test_trace_scan_is_stable_under_doubling():
    scan = trace_scan(leapfrog(), 4000, P1=5, seed=1)
    assert np.isfinite(scan.max_ratio) and scan.doubling_factor <= 2
