import itertools

import numpy as np
import pytest

from tensorray.geometry import (
    LineRule,
    PlaneGrid,
    build_atlas,
    frame_of,
    integrate_plane,
    sphere_area,
    sphere_monomial_moment,
)


def test_atlas_weights_sum_to_sphere_area():
    atlas = build_atlas(3, 8)
    assert atlas.integrate(np.ones(len(atlas))).real == pytest.approx(4 * np.pi, abs=1e-10)
    atlas2 = build_atlas(2, 16)
    assert atlas2.integrate(np.ones(len(atlas2))).real == pytest.approx(2 * np.pi, abs=1e-12)
    atlas4 = build_atlas(4, 6)
    assert atlas4.integrate(np.ones(len(atlas4))).real == pytest.approx(
        sphere_area(4), rel=1e-10
    )


def test_atlas_second_moment():
    atlas = build_atlas(3, 8)
    vals = atlas.directions[:, 0] ** 2
    assert atlas.integrate(vals).real == pytest.approx(4 * np.pi / 3, abs=1e-10)


@pytest.mark.parametrize("n,res", [(2, 16), (3, (6, 12)), (4, 4)])
def test_atlas_monomial_exactness_up_to_declared_degree(n, res):
    atlas = build_atlas(n, res)
    deg = min(atlas.degree, 6)
    for total in range(deg + 1):
        for alpha in itertools.combinations_with_replacement(range(n), total):
            exps = [alpha.count(i) for i in range(n)]
            vals = np.prod(atlas.directions ** np.array(exps)[None, :], axis=1)
            got = atlas.integrate(vals).real
            want = sphere_monomial_moment(n, exps)
            assert got == pytest.approx(want, abs=1e-10), (n, exps)


def test_atlas_antipodal_pairing_exact():
    for atlas in (build_atlas(2, 12), build_atlas(3, 6), build_atlas(4, 4)):
        pairing = atlas.antipode
        assert np.all(pairing[pairing] == np.arange(len(atlas)))
        assert np.all(pairing != np.arange(len(atlas)))
        np.testing.assert_array_equal(
            atlas.directions[pairing], -atlas.directions
        )
        np.testing.assert_array_equal(atlas.weights[pairing], atlas.weights)
        np.testing.assert_array_equal(atlas.frames[pairing], atlas.frames)


def test_atlas_unit_directions_and_frames():
    atlas = build_atlas(3, 6)
    norms = np.linalg.norm(atlas.directions, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-14)
    for k in range(len(atlas)):
        basis = np.vstack([atlas.frames[k], atlas.directions[k]])
        np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-13)


def test_frame_of_examples():
    f = frame_of(np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(f, np.eye(3)[:2], atol=1e-15)

    f = frame_of(np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(f @ np.array([1.0, 0.0, 0.0]), 0.0, atol=1e-14)

    rng = np.random.default_rng(0)
    for _ in range(20):
        xi = rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        f = frame_of(xi)
        basis = np.vstack([f, xi])
        np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-14)


def test_frame_of_deterministic():
    xi = np.array([0.3, -0.4, np.sqrt(1 - 0.25)])
    np.testing.assert_array_equal(frame_of(xi), frame_of(xi.copy()))


def test_line_rule_gaussian_moments():
    rule = LineRule.build(t_max=12.0, n_t=97)
    got = np.sum(rule.weights * np.exp(-rule.nodes**2 / 2))
    assert got == pytest.approx(np.sqrt(2 * np.pi), rel=1e-12)
    # moments int t^{2k} e^{-t^2/2} dt = sqrt(2 pi) (2k-1)!!
    dfact = 1.0
    for k in range(1, 5):
        dfact *= 2 * k - 1
        got = np.sum(rule.weights * rule.nodes ** (2 * k) * np.exp(-rule.nodes**2 / 2))
        assert got == pytest.approx(np.sqrt(2 * np.pi) * dfact, rel=1e-10), k


def test_plane_grid_symmetry_and_spacing():
    grid = PlaneGrid.build(10.0, 64)
    assert grid.spacing == pytest.approx(20.0 / 64)
    np.testing.assert_allclose(grid.axis, -grid.axis[::-1], atol=0)
    assert len(grid.axis) == 64


def test_plane_grid_embedding_incidence():
    atlas = build_atlas(3, 6)
    grid = PlaneGrid.build(5.0, 16)
    for k in (0, 7, len(atlas) - 1):
        pts = grid.embed(atlas.frames[k])
        inc = pts @ atlas.directions[k]
        assert np.max(np.abs(inc)) <= 1e-13 * 5.0


def test_integrate_plane_constant_and_gaussian():
    grid = PlaneGrid.build(10.0, 128)
    nodes = grid.nodes(2)
    ones = np.ones(len(nodes))
    assert integrate_plane(ones, grid, 2).real == pytest.approx(20.0**2)

    g = np.exp(-np.sum(nodes**2, axis=1) / 2)
    assert integrate_plane(g, grid, 2).real == pytest.approx(2 * np.pi, abs=1e-8)

    odd = nodes[:, 0] * g
    assert abs(integrate_plane(odd, grid, 2)) <= 1e-12


def test_integrate_plane_resolution_plateau():
    vals = []
    for npts in (96, 192):
        grid = PlaneGrid.build(10.0, npts)
        nodes = grid.nodes(2)
        g = np.exp(-np.sum(nodes**2, axis=1) / 2)
        vals.append(integrate_plane(g, grid, 2).real)
    assert abs(vals[0] - vals[1]) <= 1e-12 * abs(vals[1])


def test_integrate_plane_rejects_nan():
    grid = PlaneGrid.build(1.0, 4)
    bad = np.full(16, np.nan)
    with pytest.raises(ValueError):
        integrate_plane(bad, grid, 2)


def test_build_atlas_rejects_unsupported():
    with pytest.raises(ValueError):
        build_atlas(5, 4)
    with pytest.raises(ValueError):
        build_atlas(3, 7)  # odd polar count
