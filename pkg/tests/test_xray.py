import numpy as np
import pytest

from tensorray.geometry import LineRule, PlaneGrid, build_atlas
from tensorray.phantoms import (
    PotentialSpec,
    gaussian_phantom,
    potential_field,
)
from tensorray.xray import (
    PsiExtension,
    extended_J,
    ray_integral,
    transform,
)
from tests.test_phantoms import linear_vector_phantom, unit_gaussian

RULE = LineRule.build(t_max=12.0, n_t=97)


def test_ray_integral_gaussian_center():
    ph = unit_gaussian()
    xi = np.array([0.0, 0.0, 1.0])
    got = ray_integral(ph, np.zeros(3), xi, RULE)
    assert got.real == pytest.approx(np.sqrt(2 * np.pi), rel=1e-12)
    assert got.imag == pytest.approx(0.0, abs=1e-15)


def test_ray_integral_gaussian_offset():
    ph = unit_gaussian()
    xi = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    got = ray_integral(ph, x, xi, RULE)
    assert got.real == pytest.approx(np.sqrt(2 * np.pi) * np.exp(-0.5), rel=1e-12)


def test_ray_integral_odd_integrand_vanishes():
    ph = linear_vector_phantom()
    rng = np.random.default_rng(0)
    for _ in range(5):
        xi = rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        x = rng.standard_normal(3)
        x -= np.dot(x, xi) * xi
        got = ray_integral(ph, x, xi, RULE)
        assert abs(got) <= 1e-12


def test_ray_integral_rejects_non_unit_direction():
    ph = unit_gaussian()
    with pytest.raises(ValueError):
        ray_integral(ph, np.zeros(3), np.array([0.0, 0.0, 2.0]), RULE)


def test_extended_J_homogeneity_and_shift():
    ph = linear_vector_phantom()  # m = 1
    rng = np.random.default_rng(1)
    x = rng.standard_normal(3)
    xi = rng.standard_normal(3)
    v1 = extended_J(ph, x, xi, RULE)
    assert extended_J(ph, x, 2 * xi, RULE) == pytest.approx(v1, rel=1e-12)
    assert extended_J(ph, x + 5 * xi, xi, RULE) == pytest.approx(v1, rel=1e-12)

    ph0 = unit_gaussian()  # m = 0: degree -1 homogeneity
    v1 = extended_J(ph0, x, xi, RULE)
    assert extended_J(ph0, x, 2 * xi, RULE) == pytest.approx(v1 / 2, rel=1e-12)


def test_extended_J_rejects_zero_direction():
    with pytest.raises(ValueError):
        extended_J(unit_gaussian(), np.zeros(3), np.zeros(3), RULE)


@pytest.fixture(scope="module")
def small_setup():
    atlas = build_atlas(3, (4, 8))
    grid = PlaneGrid.build(8.0, 24)
    return atlas, grid


def test_transform_gaussian_closed_form(small_setup):
    atlas, grid = small_setup
    sino = transform(unit_gaussian(), atlas, grid, RULE)
    for k in (0, 5, len(atlas) - 1):
        pts = grid.embed(atlas.frames[k])
        want = np.sqrt(2 * np.pi) * np.exp(-np.sum(pts**2, axis=1) / 2)
        np.testing.assert_allclose(
            sino.values[k].ravel().real, want, rtol=1e-10, atol=1e-13
        )
        np.testing.assert_allclose(sino.values[k].ravel().imag, 0.0, atol=1e-14)


def test_transform_parity_defect(small_setup):
    atlas, grid = small_setup
    for m, seed in ((1, 3), (2, 4)):
        ph = gaussian_phantom(3, m, degree=2, seed=seed)
        sino = transform(ph, atlas, grid, RULE)
        flipped = sino.values[atlas.antipode]
        defect = np.max(np.abs(flipped - (-1.0) ** m * sino.values))
        assert defect <= 1e-10 * sino.scale_abs()


def test_transform_potential_in_kernel(small_setup):
    atlas, grid = small_setup
    for m in (1, 2):
        v = gaussian_phantom(3, m - 1, degree=2, seed=m)
        f = potential_field(PotentialSpec(v))
        sino = transform(f, atlas, grid, RULE)
        scale = np.max(np.abs(f.eval_components(grid.embed(atlas.frames[0]))))
        assert np.max(np.abs(sino.values)) <= 1e-8 * max(scale, 1e-30)


def test_transform_linearity_kernel_split(small_setup):
    atlas, grid = small_setup
    from tensorray.phantoms import curl_phantom

    pot = gaussian_phantom(3, 1, degree=2, seed=9)
    f_sol = curl_phantom(pot)
    f_pot = potential_field(PotentialSpec(gaussian_phantom(3, 0, degree=2, seed=10)))
    f_sum = f_sol + f_pot
    s_sum = transform(f_sum, atlas, grid, RULE)
    s_sol = transform(f_sol, atlas, grid, RULE)
    num = np.max(np.abs(s_sum.values - s_sol.values))
    assert num <= 1e-7 * s_sol.scale_abs()


def test_transform_quadrature_saturation(small_setup):
    atlas, grid = small_setup
    ph = gaussian_phantom(3, 1, degree=2, seed=5)
    dense = LineRule.build(t_max=12.0, n_t=193)
    s1 = transform(ph, atlas, grid, RULE)
    s2 = transform(ph, atlas, grid, dense)
    diff = np.max(np.abs(s1.values - s2.values))
    assert diff <= 1e-10 * s2.scale_abs()


def test_transform_workers_deterministic(small_setup):
    atlas, grid = small_setup
    ph = gaussian_phantom(3, 1, degree=2, seed=6)
    s1 = transform(ph, atlas, grid, RULE, workers=1)
    s2 = transform(ph, atlas, grid, RULE, workers=4)
    np.testing.assert_array_equal(s1.values, s2.values)


@pytest.fixture(scope="module")
def psi_setup():
    atlas = build_atlas(3, (8, 16))
    grid = PlaneGrid.build(8.0, 48)
    ph = gaussian_phantom(3, 1, degree=2, seed=7)
    sino = transform(ph, atlas, grid, RULE)
    return PsiExtension(sino), sino, ph


class TestPsiExtension:
    @pytest.fixture
    def psi(self, psi_setup):
        return psi_setup

    def test_restriction_at_nodes(self, psi):
        ext, sino, _ = psi
        k = 11
        pts = sino.grid.embed(sino.atlas.frames[k])
        sel = np.flatnonzero(np.max(np.abs(pts), axis=1) < 4.0)[:50]
        xis = np.broadcast_to(sino.atlas.directions[k], (len(sel), 3))
        got = ext.eval_batch_xxi(pts[sel], xis)
        want = sino.values[k].ravel()[sel]
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-12)

    def test_homogeneity_and_shift(self, psi):
        ext, sino, _ = psi
        rng = np.random.default_rng(2)
        x = np.array([0.4, -0.3, 0.2])
        xi = rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        base = ext.eval_batch_xxi(x[None], xi[None])[0]
        scaled = ext.eval_batch_xxi(x[None], (2 * xi)[None])[0]
        assert scaled == pytest.approx(2.0 ** (sino.m - 1) * base, rel=1e-12)
        shifted = ext.eval_batch_xxi((x + 3 * xi)[None], xi[None])[0]
        assert shifted == pytest.approx(base, rel=1e-12)

    def test_interpolation_error_shrinks_with_atlas_resolution(self, psi):
        # the direction interpolation is first order: doubling the atlas
        # resolution should cut the requadrature mismatch by >= ~3x
        ext_coarse, sino, ph = psi
        from tensorray.xray import batch_extended_J

        atlas_fine = build_atlas(3, (16, 32))
        sino_fine = transform(ph, atlas_fine, sino.grid, RULE)
        ext_fine = PsiExtension(sino_fine)

        rng = np.random.default_rng(3)
        xis = rng.standard_normal((60, 3))
        xis /= np.linalg.norm(xis, axis=1)[:, None]
        xis = xis[np.abs(xis[:, 2]) < 0.8]  # stay away from the polar gap
        xs = 0.5 * rng.standard_normal((len(xis), 3))
        want = batch_extended_J(ph, xs, xis, RULE)
        scale = sino.scale_abs()

        err_coarse = np.max(np.abs(ext_coarse.eval_batch_xxi(xs, xis) - want))
        err_fine = np.max(np.abs(ext_fine.eval_batch_xxi(xs, xis) - want))
        assert err_fine <= 5e-2 * scale
        assert err_fine <= err_coarse / 2.5

    def test_out_of_window_marker(self, psi):
        ext, sino, _ = psi
        xi = sino.atlas.directions[0]
        x = 100.0 * sino.atlas.frames[0][0]
        got = ext.eval_batch_xxi(x[None], xi[None])[0]
        assert np.isnan(got.real)
        # polar gap
        pole = np.array([0.0, 0.0, 1.0])
        got = ext.eval_batch_xxi(np.array([[0.2, 0.0, 0.0]]), pole[None])[0]
        assert np.isnan(got.real)
