from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatloc.errors import GeometryDegenerate, InvalidSpec
from heatloc.geometry import (
    PRESETS,
    DomainSpec,
    PolygonDomain,
    area,
    build_domain,
    contains,
    contains_points,
    disk_chain_necks,
    distance_to_boundary,
    domain_from_rows,
    polygon_rows,
    regular_polygon,
    signed_area,
    unit_square,
)

SLIT = DomainSpec("slit_box", {"width": 2.0, "height": 1.0, "slit_length": 0.6, "slit_thickness": 0.01, "gap": 0.1})


def winding_number(ring: np.ndarray, p) -> int:
    """Independent oracle: total signed angle swept around p."""
    d = ring - np.asarray(p)
    ang = np.arctan2(d[:, 1], d[:, 0])
    step = np.diff(np.append(ang, ang[0]))
    step = (step + np.pi) % (2 * np.pi) - np.pi
    return int(round(step.sum() / (2 * np.pi)))


def inside_by_winding(dom: PolygonDomain, p) -> bool:
    return winding_number(dom.outer, p) != 0 and all(winding_number(hh, p) == 0 for hh in dom.holes)


def mc_area(dom: PolygonDomain, n: int, seed: int = 0) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = dom.bbox
    pts = rng.uniform([xmin, ymin], [xmax, ymax], size=(n, 2))
    f = contains_points(dom, pts).mean()
    box = (xmax - xmin) * (ymax - ymin)
    return f * box, math.sqrt(f * (1 - f) / n) * box


def test_unit_square_basics():
    sq = unit_square()
    assert len(sq.outer) == 4
    assert area(sq) == 1.0
    assert contains(sq, (0.5, 0.5))
    assert not contains(sq, (1.5, 0.5))


def test_triangle_area():
    tri = build_domain(DomainSpec("raw_polygon", {"outer": [[0, 0], [1, 0], [0, 1]]}))
    assert area(tri) == pytest.approx(0.5, abs=1e-15)


def test_raw_polygon_clockwise_input_is_reoriented():
    dom = build_domain(DomainSpec("raw_polygon", {"outer": [[0, 0], [0, 1], [1, 1], [1, 0]]}))
    assert area(dom) == pytest.approx(1.0)


def test_slit_box_holes_and_area():
    dom = build_domain(SLIT)
    assert len(dom.holes) == 2
    for hole in dom.holes:
        assert signed_area(hole) == pytest.approx(-0.006)
    assert area(dom) == pytest.approx(2 - 0.012, abs=1e-12)


def test_slit_centre_of_upper_hole_is_outside():
    dom = build_domain(SLIT)
    p = dom.landmarks["upper_slit_center"]
    assert not contains(dom, p)
    assert not inside_by_winding(dom, p)
    assert contains(dom, dom.landmarks["gap_center"])


def test_disk_chain_area_monte_carlo():
    spec = DomainSpec("disk_chain", {"n_disks": 3, "r0": 1.0, "neck_floor": 0.05})
    dom = build_domain(spec)
    assert len(dom.holes) == 0
    expected = math.pi * (1 + 1 / 4 + 1 / 16)
    assert area(dom) == pytest.approx(expected, rel=0.02)
    est, se = mc_area(dom, 400_000)
    assert abs(est - area(dom)) < 4 * se


def test_disk_chain_neck_widths():
    w = disk_chain_necks(4, None)
    assert w[0] == pytest.approx(2.0**-4)
    assert w[1] == pytest.approx(2.0**-16)
    assert disk_chain_necks(4, 0.01) == [0.0625, 0.01, 0.01]


def test_disk_chain_with_channels():
    spec = DomainSpec("disk_chain", {"n_disks": 3, "r0": 4.0, "neck_length": 3.0, "neck_floor": 0.125})
    dom = build_domain(spec)
    names = [f.name for f in dom.features]
    assert names == ["neck_1", "neck_2"]
    # each channel adds a rectangle of length ~3 (plus polygon chords)
    disks = math.pi * 16 * (1 + 1 / 4 + 1 / 16)
    assert area(dom) == pytest.approx(disks + 3 * (0.25 + 0.125), rel=0.01)
    for f in dom.features:
        assert contains(dom, f.center)


@pytest.mark.parametrize("direction", ["out", "in"])
@pytest.mark.parametrize("jitter_seed", [0, 7])
def test_spiked_square_is_valid_and_deterministic(direction, jitter_seed):
    spec = DomainSpec(
        "spiked_square", {"n_spikes": 8, "spike_depth": 0.2, "spike_angle": math.pi / 6, "direction": direction, "jitter_seed": jitter_seed}
    )
    a, b = build_domain(spec), build_domain(spec)
    assert a.same_vertices(b)
    apexes = [v for k, v in a.landmarks.items() if k.startswith("apex")]
    assert len(apexes) == 8
    base = 1.0
    if direction == "out":
        assert area(a) > base
    else:
        assert area(a) < base


def test_spiked_square_overlapping_spikes_rejected():
    with pytest.raises(GeometryDegenerate):
        build_domain(DomainSpec("spiked_square", {"n_spikes": 8, "spike_depth": 0.4, "spike_angle": math.pi / 3}))


def test_wedge():
    dom = build_domain(DomainSpec("wedge", {"alpha": math.pi / 3, "radius": 1.0}))
    assert dom.landmarks["apex"] == (0.0, 0.0)
    assert area(dom) == pytest.approx(math.pi / 6, rel=1e-3)
    assert contains(dom, (0.5, 0.1))
    assert not contains(dom, (0.1, 0.5))


@pytest.mark.parametrize(
    "spec, param",
    [
        (DomainSpec("nope"), "variant"),
        (DomainSpec("slit_box", {"gap": -1.0}), "gap"),
        (DomainSpec("spiked_square", {"spike_angle": 4.0}), "spike_angle"),
        (DomainSpec("disk_chain", {"n_disks": 0}), "n_disks"),
        (DomainSpec("wedge", {"alpha": 4.0}), "alpha"),
    ],
)
def test_invalid_spec_names_parameter(spec, param):
    with pytest.raises(InvalidSpec) as err:
        build_domain(spec)
    assert err.value.param == param


def test_self_intersecting_ring_rejected():
    with pytest.raises(GeometryDegenerate):
        PolygonDomain(np.array([[0, 0], [1, 1], [1, 0], [0, 1]]))


def test_hole_outside_rejected():
    with pytest.raises(GeometryDegenerate):
        PolygonDomain(unit_square().outer, (np.array([[2, 2], [2, 3], [3, 3], [3, 2]]),))


def test_on_edge_rule():
    sq = unit_square()
    assert contains(sq, (1.0, 0.5))
    dom = build_domain(SLIT)
    hole = dom.holes[0]
    # a point on a hole edge belongs to the hole and is excluded
    assert not contains(dom, tuple(0.5 * (hole[0] + hole[1])))


def test_malformed_json():
    with pytest.raises(InvalidSpec) as err:
        DomainSpec.from_json("{not json")
    assert err.value.param == "spec"


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_roundtrip_through_rows_and_json(name):
    spec = PRESETS[name]
    dom = build_domain(spec)
    again = domain_from_rows(polygon_rows(dom))
    assert again.same_vertices(dom)
    assert build_domain(DomainSpec.from_json(spec.to_json())).same_vertices(dom)
    assert area(dom) > 0


def test_distance_to_boundary_square():
    pts = np.array([[0.5, 0.5], [0.1, 0.5], [0.5, 0.97]])
    np.testing.assert_allclose(distance_to_boundary(unit_square(), pts), [0.5, 0.1, 0.03])


star = st.lists(st.floats(0.3, 1.0), min_size=3, max_size=12)


@given(star, st.floats(0, 2 * math.pi))
def test_star_polygon_containment_matches_winding(radii, phase):
    m = len(radii)
    ang = phase + 2 * np.pi * np.arange(m) / m
    ring = np.column_stack([np.cos(ang), np.sin(ang)]) * np.asarray(radii)[:, None]
    dom = PolygonDomain(ring)
    assert area(dom) > 0
    pts = np.random.default_rng(m).uniform(-1.1, 1.1, size=(200, 2))
    got = contains_points(dom, pts)
    want = [inside_by_winding(dom, p) for p in pts]
    assert list(got) == want


@given(st.integers(3, 64), st.floats(0.1, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_regular_polygon_area(m, r, cx, cy):
    dom = PolygonDomain(regular_polygon((cx, cy), r, m))
    assert area(dom) == pytest.approx(0.5 * m * r * r * math.sin(2 * math.pi / m), rel=1e-9)
    assert contains(dom, (cx, cy))


@given(st.floats(0.02, 0.3), st.floats(0.005, 0.05))
def test_slit_box_area_formula(gap, th):
    dom = build_domain(SLIT.with_params(gap=gap, slit_thickness=th))
    assert area(dom) == pytest.approx(2 - 2 * 0.6 * th, rel=1e-12)


def test_monte_carlo_area_consistency_million_points():
    dom = build_domain(PRESETS["spiked_square"])
    est, se = mc_area(dom, 1_000_000, seed=3)
    assert abs(est - area(dom)) < 4 * se
