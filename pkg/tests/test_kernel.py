import math

import numpy as np
import pytest

from cadact.errors import EmptySolid, RemoveFromEmpty, SelfIntersecting, ZeroDepth
from cadact.geometry import CircleGeom, ExtrudeParams, LineGeom, SketchGeom
from cadact.kernel import (
    Solid,
    build_region,
    contains,
    count_through_holes,
    extrude,
    mc_volume,
    render_isometric,
    sample_points,
)


def square_geom(cx=0.5, cy=0.5, half=0.2, half_y=None):
    hy = half if half_y is None else half_y
    pts = [(cx - half, cy - hy), (cx + half, cy - hy),
           (cx + half, cy + hy), (cx - half, cy + hy)]
    lines = tuple(LineGeom(pts[i], pts[(i + 1) % 4]) for i in range(4))
    return SketchGeom(loops=(lines,))


def circle_geom(cx=0.5, cy=0.5, r=0.25):
    return SketchGeom(loops=((CircleGeom((cx, cy), r),),))


def params(e1=0.2, e2=0.0, op="new", sides="one_sided"):
    return ExtrudeParams(e1=e1, e2=e2, op=op, sides=sides, scale_s=0.5)


def cuboid(half=0.2, depth=0.2, offset=0.0):
    region = build_region(square_geom(half=half), axis=2, offset=offset)
    return extrude(None, region, params(e1=depth), offset)


def test_circle_region_area_analytic():
    r = 0.25
    region = build_region(circle_geom(r=r))
    assert abs(region.area - math.pi * r * r) / (math.pi * r * r) < 0.005


def test_tessellation_convergence():
    r = 0.25
    exact = math.pi * r * r
    err1 = abs(build_region(circle_geom(r=r), tau=2e-3).area - exact)
    err2 = abs(build_region(circle_geom(r=r), tau=1e-3).area - exact)
    assert err1 / err2 >= 3.0


def test_annulus_containment_tree():
    geom = SketchGeom(loops=(square_geom(half=0.3).loops[0],
                             (CircleGeom((0.5, 0.5), 0.1),)))
    region = build_region(geom)
    depths = sorted(l.depth for l in region.loops)
    assert depths == [0, 1]
    assert region.area == pytest.approx(0.36 - math.pi * 0.01, rel=0.01)


def test_figure_eight_rejected():
    bow = (
        LineGeom((0.3, 0.3), (0.7, 0.7)),
        LineGeom((0.7, 0.7), (0.3, 0.7)),
        LineGeom((0.3, 0.7), (0.7, 0.3)),
        LineGeom((0.7, 0.3), (0.3, 0.3)),
    )
    with pytest.raises(SelfIntersecting):
        build_region(SketchGeom(loops=(bow,)))


def test_cuboid_volume_matches_analytic():
    side, depth = 0.4, 0.25
    solid = cuboid(half=side / 2, depth=depth)
    vol = mc_volume(solid, 100_000, seed=0)
    assert vol == pytest.approx(side * side * depth, rel=0.01)


def test_union_idempotent_and_cut_additivity():
    a = cuboid(half=0.2, depth=0.3)
    a_again = cuboid(half=0.2, depth=0.3)
    union = Solid("union", left=a, right=a_again)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-0.4, 0.6, size=(100_000, 3))
    in_a = a.contains(pts)
    assert np.array_equal(union.contains(pts), in_a)

    inner_region = build_region(circle_geom(r=0.1), axis=2, offset=0.0)
    cut = extrude(a, inner_region, params(e1=0.3, op="remove"), 0.0)
    in_cut = cut.contains(pts)
    in_inner = Solid("prism", prism=cut.right.prism).contains(pts)
    # 1_{A\B} + 1_{A∩B} = 1_A pointwise.
    assert np.array_equal(in_cut | (in_a & in_inner), in_a)


def test_remove_reduces_volume_by_inner_prism():
    outer = cuboid(half=0.2, depth=0.2)
    inner_region = build_region(circle_geom(r=0.08), axis=2, offset=0.0)
    cut = extrude(outer, inner_region, params(e1=0.2, op="remove"), 0.0)
    vol_outer = mc_volume(outer, 200_000, seed=2)
    vol_cut = mc_volume(cut, 200_000, seed=2)
    expected = 0.4 * 0.4 * 0.2 - math.pi * 0.08 ** 2 * 0.2
    assert vol_cut == pytest.approx(expected, rel=0.02)
    assert vol_cut < vol_outer


def test_zero_depth_and_remove_from_empty():
    region = build_region(square_geom())
    with pytest.raises(ZeroDepth):
        extrude(None, region, params(e1=0.0), 0.0)
    with pytest.raises(RemoveFromEmpty):
        extrude(None, region, params(e1=0.1, op="remove"), 0.0)


def test_contains_basics():
    solid = cuboid(half=0.2, depth=0.2)
    assert contains(solid, (0.0, 0.0, 0.1))
    assert not contains(solid, (1.0, 1.0, 1.0))


def test_contains_agrees_with_halfspace_oracle():
    # Cuboid membership has a closed form; compare away from the surface.
    solid = cuboid(half=0.2, depth=0.2)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.5, 0.7, size=(20_000, 3))
    exact = (np.abs(pts[:, 0]) <= 0.2) & (np.abs(pts[:, 1]) <= 0.2) \
        & (pts[:, 2] >= 0.0) & (pts[:, 2] <= 0.2)
    dist_to_surface = np.min(np.stack([
        np.abs(np.abs(pts[:, 0]) - 0.2), np.abs(np.abs(pts[:, 1]) - 0.2),
        np.abs(pts[:, 2]), np.abs(pts[:, 2] - 0.2)]), axis=0)
    away = dist_to_surface > 1e-4
    got = solid.contains(pts)
    assert np.mean(got[away] == exact[away]) >= 0.999


def test_sampling_deterministic_and_on_surface():
    solid = cuboid(half=0.2, depth=0.25)
    c1 = sample_points(solid, 2000, seed=5)
    c2 = sample_points(solid, 2000, seed=5)
    assert np.array_equal(c1, c2)
    # Surface invariant: membership flips across +/- tau_surf along a normal.
    # Cuboid faces are axis-aligned, so probe all six axis directions.
    eps = 1e-4
    flips = np.zeros(len(c1), dtype=bool)
    for axis in range(3):
        for sign in (1.0, -1.0):
            offset = np.zeros(3)
            offset[axis] = sign * eps
            flips |= solid.contains(c1 + offset) != solid.contains(c1 - offset)
    assert flips.all()


def test_sampling_face_counts_proportional_to_area():
    # Cuboid 0.4 x 0.4 x 0.25: caps 0.16 each, walls 0.1 each.
    solid = cuboid(half=0.2, depth=0.25)
    n = 6000
    cloud = sample_points(solid, n, seed=7)
    areas = {"cap_lo": 0.16, "cap_hi": 0.16}
    for i in range(4):
        areas[f"wall{i}"] = 0.4 * 0.25
    total = sum(areas.values())
    counts = {
        "cap_lo": int(np.sum(np.abs(cloud[:, 2]) < 1e-9)),
        "cap_hi": int(np.sum(np.abs(cloud[:, 2] - 0.25) < 1e-9)),
        "wall0": int(np.sum(np.abs(cloud[:, 0] - 0.2) < 1e-9)),
        "wall1": int(np.sum(np.abs(cloud[:, 0] + 0.2) < 1e-9)),
        "wall2": int(np.sum(np.abs(cloud[:, 1] - 0.2) < 1e-9)),
        "wall3": int(np.sum(np.abs(cloud[:, 1] + 0.2) < 1e-9)),
    }
    assert sum(counts.values()) == n
    for name, area in areas.items():
        p = area / total
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(counts[name] - n * p) <= 3 * sigma + 1


def test_sample_empty_solid():
    outer = cuboid(half=0.1, depth=0.1)
    big_region = build_region(square_geom(half=0.4), axis=2, offset=-0.1)
    gone = extrude(outer, big_region, params(e1=0.4, op="remove"), -0.1)
    with pytest.raises(EmptySolid):
        sample_points(gone, 100, seed=0)
    with pytest.raises(EmptySolid):
        sample_points(None, 10, seed=0)


# --- rendering -----------------------------------------------------------------

def test_render_cuboid_hexagonal_three_shades():
    solid = cuboid(half=0.2, depth=0.2)
    img = render_isometric(solid, res=160)
    shades = sorted(set(img[img > 0].tolist()))
    assert len(shades) == 3
    assert (img > 0).sum() > 1000


def test_render_pixel_count_scales_quadratically():
    small = cuboid(half=0.1, depth=0.1)
    big = cuboid(half=0.2, depth=0.2)
    img_small = render_isometric(small, res=200, extent=1.2)
    img_big = render_isometric(big, res=200, extent=1.2)
    ratio = (img_big > 0).sum() / (img_small > 0).sum()
    assert ratio == pytest.approx(4.0, rel=0.02)


def test_render_empty_raises():
    with pytest.raises(EmptySolid):
        render_isometric(None)


# --- topology --------------------------------------------------------------------

def washer():
    outer = build_region(circle_geom(r=0.3), axis=2, offset=0.0)
    solid = extrude(None, outer, params(e1=0.15), 0.0)
    inner = build_region(circle_geom(r=0.12), axis=2, offset=0.0)
    return extrude(solid, inner, params(e1=0.2, op="remove"), -0.01)


def plate_with_holes(n_holes):
    solid = extrude(None, build_region(square_geom(half=0.35), axis=2, offset=0.0),
                    params(e1=0.1), 0.0)
    xs = [-0.2, 0.0, 0.2]
    for i in range(n_holes):
        hole = build_region(circle_geom(cx=0.5 + xs[i], cy=0.5, r=0.06), axis=2, offset=0.0)
        solid = extrude(solid, hole, params(e1=0.2, op="remove", sides="symmetric"), 0.0)
    return solid


def test_hole_counts():
    assert count_through_holes(cuboid()) == 0
    assert count_through_holes(washer()) == 1
    assert count_through_holes(plate_with_holes(3)) == 3


def test_hole_count_rotation_invariant():
    # Same washer sketched on the three default planes.
    for axis in range(3):
        outer = build_region(circle_geom(r=0.3), axis=axis, offset=0.0)
        solid = extrude(None, outer, params(e1=0.15), 0.0)
        inner = build_region(circle_geom(r=0.12), axis=axis, offset=0.0)
        solid = extrude(solid, inner, params(e1=0.2, op="remove"), -0.01)
        assert count_through_holes(solid) == 1


def test_symmetry_planes_cuboid_and_bracket():
    from cadact.kernel import symmetry_planes

    assert symmetry_planes(cuboid(half=0.2, depth=0.2)) == {"x", "y", "z"}
    # L-bracket: base slab plus a tall wall along one x side; the L profile in
    # xz leaves only the y mirror.
    base = cuboid(half=0.2, depth=0.1)
    wall_geom = square_geom(cx=0.35, cy=0.5, half=0.05, half_y=0.2)
    bracket = extrude(base, build_region(wall_geom, axis=2, offset=0.0),
                      params(e1=0.4, op="union"), 0.0)
    assert symmetry_planes(bracket) == {"y"}


def test_symmetry_planes_cylinder():
    from cadact.kernel import symmetry_planes

    cyl = extrude(None, build_region(circle_geom(r=0.2), axis=2, offset=0.0),
                  params(e1=0.3), 0.0)
    assert symmetry_planes(cyl) == {"x", "y", "z"}
