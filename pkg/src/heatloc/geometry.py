"""Planar polygonal domains: construction, containment and area.

All rings are stored as ``(n, 2)`` float arrays without a repeated closing
vertex. The outer ring is counter-clockwise, holes are clockwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import GeometryDegenerate, InvalidSpec

VARIANTS = ("raw_polygon", "spiked_square", "slit_box", "disk_chain", "wedge")

# Relative tolerance for the on-edge test, scaled by the bbox diagonal.
_EDGE_RTOL = 1e-12


@dataclass(frozen=True)
class ThinFeature:
    """A narrow part of a domain whose resolution must be checked on a grid.

    ``kind`` is ``"channel"`` for open passages (gaps, necks) and ``"wall"``
    for excluded material (slits). Width is measured along ``axis``
    through ``center``.
    """

    name: str
    width: float
    center: tuple[float, float]
    axis: str = "y"
    kind: str = "channel"


@dataclass(frozen=True, eq=False)
class PolygonDomain:
    outer: np.ndarray
    holes: tuple[np.ndarray, ...] = ()
    features: tuple[ThinFeature, ...] = ()
    # named reference points (apex, ball centers, slit center, ...)
    landmarks: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        outer = _as_ring(self.outer, "outer")
        holes = tuple(_as_ring(hh, f"holes[{i}]") for i, hh in enumerate(self.holes))
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", holes)
        object.__setattr__(self, "landmarks", dict(self.landmarks))
        _validate(outer, holes)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        xmin, ymin = self.outer.min(axis=0)
        xmax, ymax = self.outer.max(axis=0)
        return float(xmin), float(ymin), float(xmax), float(ymax)

    @property
    def rings(self) -> list[np.ndarray]:
        return [self.outer, *self.holes]

    def perimeter(self) -> float:
        return float(sum(_ring_length(r) for r in self.rings))

    def same_vertices(self, other: "PolygonDomain") -> bool:
        if len(self.holes) != len(other.holes):
            return False
        return all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip(self.rings, other.rings)
        )


@dataclass(frozen=True)
class DomainSpec:
    variant: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"variant": self.variant, "params": dict(self.params)}, indent=2)

    @classmethod
    def from_mapping(cls, doc: Mapping[str, Any]) -> "DomainSpec":
        if not isinstance(doc, Mapping) or "variant" not in doc:
            raise InvalidSpec("variant", "spec document needs a 'variant' field")
        params = doc.get("params", {})
        if not isinstance(params, Mapping):
            raise InvalidSpec("params", "must be a JSON object")
        return cls(str(doc["variant"]), dict(params))

    @classmethod
    def from_json(cls, text: str) -> "DomainSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec("spec", f"malformed JSON ({exc.msg})") from exc
        return cls.from_mapping(doc)

    def with_params(self, **updates) -> "DomainSpec":
        return DomainSpec(self.variant, {**self.params, **updates})


# ---------------------------------------------------------------------------
# ring primitives


def _as_ring(ring, name: str) -> np.ndarray:
    arr = np.array(ring, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryDegenerate(f"{name}: expected an (n, 2) vertex array")
    if len(arr) > 1 and np.array_equal(arr[0], arr[-1]):
        arr = arr[:-1]
    if len(arr) < 3:
        raise GeometryDegenerate(f"{name}: a ring needs at least 3 vertices")
    if not np.all(np.isfinite(arr)):
        raise GeometryDegenerate(f"{name}: non-finite coordinates")
    arr.setflags(write=False)
    return arr


def signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _ring_length(ring: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(ring, -1, axis=0) - ring, axis=1).sum())


def _segments(ring: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return ring, np.roll(ring, -1, axis=0)


def _orient(p, q, r):
    return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (
        r[..., 0] - p[..., 0]
    )


def _segments_touch(a0, a1, b0, b1, eps: float) -> np.ndarray:
    """Pairwise closed-segment intersection test for broadcastable arrays."""
    d1 = _orient(b0, b1, a0)
    d2 = _orient(b0, b1, a1)
    d3 = _orient(a0, a1, b0)
    d4 = _orient(a0, a1, b1)
    proper = (((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))) & (
        ((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps))
    )

    def on_seg(p0, p1, q, d):
        return (
            (np.abs(d) <= eps)
            & (q[..., 0] >= np.minimum(p0[..., 0], p1[..., 0]) - eps)
            & (q[..., 0] <= np.maximum(p0[..., 0], p1[..., 0]) + eps)
            & (q[..., 1] >= np.minimum(p0[..., 1], p1[..., 1]) - eps)
            & (q[..., 1] <= np.maximum(p0[..., 1], p1[..., 1]) + eps)
        )

    touching = on_seg(b0, b1, a0, d1) | on_seg(b0, b1, a1, d2) | on_seg(a0, a1, b0, d3) | on_seg(a0, a1, b1, d4)
    return proper | touching


def ring_is_simple(ring: np.ndarray) -> bool:
    n = len(ring)
    a0, a1 = _segments(ring)
    scale = float(np.ptp(ring, axis=0).max()) or 1.0
    eps = 1e-12 * scale * scale
    i, j = np.triu_indices(n, k=2)
    # the first and last segments share vertex 0
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return abs(signed_area(ring)) > 0
    hit = _segments_touch(a0[i], a1[i], a0[j], a1[j], eps)
    if hit.any():
        return False
    # adjacent segments must not fold back onto each other
    prev = np.roll(ring, 1, axis=0)
    nxt = np.roll(ring, -1, axis=0)
    cross = _orient(prev, ring, nxt)
    dot = np.einsum("ij,ij->i", ring - prev, nxt - ring)
    if np.any((np.abs(cross) <= eps) & (dot < 0)):
        return False
    return True


def rings_intersect(r1: np.ndarray, r2: np.ndarray) -> bool:
    a0, a1 = _segments(r1)
    b0, b1 = _segments(r2)
    scale = float(max(np.ptp(r1, axis=0).max(), np.ptp(r2, axis=0).max())) or 1.0
    eps = 1e-12 * scale * scale
    hit = _segments_touch(a0[:, None], a1[:, None], b0[None, :], b1[None, :], eps)
    return bool(hit.any())


def _validate(outer: np.ndarray, holes: tuple[np.ndarray, ...]) -> None:
    if not ring_is_simple(outer):
        raise GeometryDegenerate("outer ring is not simple")
    if signed_area(outer) <= 0:
        raise GeometryDegenerate("outer ring must be counter-clockwise with positive area")
    for k, hole in enumerate(holes):
        if not ring_is_simple(hole):
            raise GeometryDegenerate(f"hole {k} is not simple")
        if signed_area(hole) >= 0:
            raise GeometryDegenerate(f"hole {k} must be clockwise")
        if rings_intersect(outer, hole):
            raise GeometryDegenerate(f"hole {k} intersects the outer ring")
        if not _ring_contains(outer, hole[:1])[0]:
            raise GeometryDegenerate(f"hole {k} is not inside the outer ring")
    for a in range(len(holes)):
        for b in range(a + 1, len(holes)):
            if rings_intersect(holes[a], holes[b]):
                raise GeometryDegenerate(f"holes {a} and {b} intersect")
            if _ring_contains(holes[a], holes[b][:1])[0] or _ring_contains(holes[b], holes[a][:1])[0]:
                raise GeometryDegenerate(f"holes {a} and {b} are nested")


# ---------------------------------------------------------------------------
# containment and area


def _ring_crossings(ring: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd parity of a horizontal ray cast to +x, per point."""
    px, py = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    x0, y0 = ring[:, 0], ring[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for a, b, c, d in zip(x0, y0, x1, y1):
        straddle = (b > py) != (d > py)
        if not straddle.any():
            continue
        xi = a + (py - b) * (c - a) / (d - b if d != b else 1.0)
        inside ^= straddle & (px < xi)
    return inside


def _ring_on_edge(ring: np.ndarray, pts: np.ndarray, tol: float) -> np.ndarray:
    on = np.zeros(len(pts), dtype=bool)
    a0, a1 = _segments(ring)
    for p, q in zip(a0, a1):
        d = q - p
        ll = float(d @ d)
        s = np.clip(((pts - p) @ d) / ll, 0.0, 1.0) if ll > 0 else np.zeros(len(pts))
        proj = p + s[:, None] * d
        on |= np.hypot(*(pts - proj).T) <= tol
    return on


def _ring_contains(ring: np.ndarray, pts: np.ndarray, tol: float | None = None) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if tol is None:
        tol = _EDGE_RTOL * float(np.hypot(*np.ptp(ring, axis=0)))
    return _ring_crossings(ring, pts) | _ring_on_edge(ring, pts, tol)


def contains_points(domain: PolygonDomain, pts) -> np.ndarray:
    """Vectorized containment; closed outer ring, closed (excluded) holes."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    xmin, ymin, xmax, ymax = domain.bbox
    tol = _EDGE_RTOL * math.hypot(xmax - xmin, ymax - ymin)
    cand = (
        (pts[:, 0] >= xmin - tol)
        & (pts[:, 0] <= xmax + tol)
        & (pts[:, 1] >= ymin - tol)
        & (pts[:, 1] <= ymax + tol)
    )
    out = np.zeros(len(pts), dtype=bool)
    idx = np.flatnonzero(cand)
    if len(idx) == 0:
        return out
    sub = pts[idx]
    ok = _ring_contains(domain.outer, sub, tol)
    for hole in domain.holes:
        live = np.flatnonzero(ok)
        if len(live) == 0:
            break
        ok[live] &= ~_ring_contains(hole, sub[live], tol)
    out[idx] = ok
    return out


def contains(domain: PolygonDomain, point) -> bool:
    return bool(contains_points(domain, np.asarray(point, dtype=float)[None, :])[0])


def area(domain: PolygonDomain) -> float:
    return signed_area(domain.outer) + sum(signed_area(hh) for hh in domain.holes)


def distance_to_boundary(domain: PolygonDomain, pts) -> np.ndarray:
    """Euclidean distance from each point to the nearest ring edge."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    best = np.full(len(pts), np.inf)
    for ring in domain.rings:
        for p, q in zip(*_segments(ring)):
            d = q - p
            ll = float(d @ d)
            s = np.clip(((pts - p) @ d) / ll, 0.0, 1.0) if ll > 0 else np.zeros(len(pts))
            np.minimum(best, np.hypot(*(pts - p - s[:, None] * d).T), out=best)
    return best


# ---------------------------------------------------------------------------
# domain families


def _param(params: Mapping[str, Any], name: str, default=None, *, positive=False, integer=False):
    if name not in params or params[name] is None:
        if default is None:
            raise InvalidSpec(name, "required parameter is missing")
        value = default
    else:
        value = params[name]
    try:
        value = int(value) if integer else float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidSpec(name, f"expected a number, got {params[name]!r}") from exc
    if integer and float(params.get(name, value)) != value:
        raise InvalidSpec(name, "expected an integer")
    if not math.isfinite(value):
        raise InvalidSpec(name, "must be finite")
    if positive and value <= 0:
        raise InvalidSpec(name, f"must be strictly positive, got {value}")
    return value


def regular_polygon(center, radius: float, m: int, phase: float = 0.0) -> np.ndarray:
    ang = phase + 2 * np.pi * np.arange(m) / m
    return np.column_stack([center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)])


def _raw_polygon(p) -> PolygonDomain:
    if "outer" not in p:
        raise InvalidSpec("outer", "required parameter is missing")
    outer = np.asarray(p["outer"], dtype=float)
    if outer.ndim != 2 or outer.shape[1] != 2:
        raise InvalidSpec("outer", "expected a list of [x, y] pairs")
    if signed_area(outer) < 0:
        outer = outer[::-1]
    holes = []
    for k, hole in enumerate(p.get("holes", []) or []):
        hole = np.asarray(hole, dtype=float)
        if hole.ndim != 2 or hole.shape[1] != 2:
            raise InvalidSpec(f"holes[{k}]", "expected a list of [x, y] pairs")
        holes.append(hole[::-1] if signed_area(hole) > 0 else hole)
    return PolygonDomain(outer, tuple(holes))


def _spiked_square(p) -> PolygonDomain:
    side = _param(p, "side", 1.0, positive=True)
    n = _param(p, "n_spikes", 8, integer=True)
    depth = _param(p, "spike_depth", 0.25 * side, positive=True)
    alpha = _param(p, "spike_angle", math.pi / 6, positive=True)
    seed = _param(p, "jitter_seed", 0, integer=True)
    direction = str(p.get("direction", "out"))
    if n < 1:
        raise InvalidSpec("n_spikes", "need at least one spike")
    if not alpha < math.pi:
        raise InvalidSpec("spike_angle", "apex angle must lie in (0, pi)")
    if direction not in ("out", "in"):
        raise InvalidSpec("direction", "expected 'out' or 'in'")
    depths = np.full(n, depth)
    if seed != 0:
        rng = np.random.default_rng(seed)
        depths = depth * (1.0 + 0.2 * rng.uniform(-1.0, 1.0, n))
    half = depth * math.tan(alpha / 2)
    spacing = side / n
    if 2 * half > spacing * (1 + 1e-12):
        raise GeometryDegenerate(
            f"spikes overlap: base width {2 * half:.4g} exceeds spacing {spacing:.4g}"
        )
    if direction == "in" and depths.max() >= side:
        raise GeometryDegenerate("inward spikes would cut through the square")
    sign = 1.0 if direction == "out" else -1.0
    verts = [(0.0, 0.0), (side, 0.0), (side, side)]
    apexes = {}
    # top edge walked right to left keeps the ring counter-clockwise
    for i in reversed(range(n)):
        c = (i + 0.5) * spacing
        apex = (c, side + sign * depths[i])
        verts += [(c + half, side), apex, (c - half, side)]
        apexes[f"apex_{i}"] = apex
    verts.append((0.0, side))
    verts = _dedupe(verts, 1e-12 * side)
    landmarks = {"center": (side / 2, side / 2), **apexes}
    return PolygonDomain(np.array(verts), (), (), landmarks)


def _dedupe(verts, tol):
    out = []
    for v in verts:
        if not out or math.dist(out[-1], v) > tol:
            out.append(tuple(v))
    if len(out) > 1 and math.dist(out[0], out[-1]) <= tol:
        out.pop()
    return out


def _slit_box(p) -> PolygonDomain:
    w = _param(p, "width", 2.0, positive=True)
    h = _param(p, "height", 1.0, positive=True)
    length = _param(p, "slit_length", 0.6, positive=True)
    th = _param(p, "slit_thickness", 0.01, positive=True)
    gap = _param(p, "gap", 0.1, positive=True)
    if length >= w:
        raise GeometryDegenerate("slit_length must be shorter than the box width")
    if gap + 2 * th >= h:
        raise GeometryDegenerate("slit pair does not fit inside the box height")
    cx, cy = w / 2, h / 2
    x0, x1 = cx - length / 2, cx + length / 2

    def rect_cw(ya, yb):
        return np.array([(x0, ya), (x0, yb), (x1, yb), (x1, ya)])

    lower = rect_cw(cy - gap / 2 - th, cy - gap / 2)
    upper = rect_cw(cy + gap / 2, cy + gap / 2 + th)
    outer = np.array([(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)])
    features = (
        ThinFeature("slit_gap", gap, (cx, cy), "y", "channel"),
        ThinFeature("lower_slit", th, (cx, cy - gap / 2 - th / 2), "y", "wall"),
        ThinFeature("upper_slit", th, (cx, cy + gap / 2 + th / 2), "y", "wall"),
    )
    landmarks = {
        "gap_center": (cx, cy),
        "upper_slit_center": (cx, cy + gap / 2 + th / 2),
        "lower_slit_center": (cx, cy - gap / 2 - th / 2),
    }
    return PolygonDomain(outer, (upper, lower), features, landmarks)


def disk_chain_necks(n_disks: int, neck_floor: float | None, r0: float = 1.0, widths=None) -> list[float]:
    """Neck widths ``max(r0 * 2**-(4**n), floor)``; neck n joins ball n-1 to
    ball n, n = 1..n_disks-1."""
    if widths is not None:
        raw = [float(x) for x in widths]
    else:
        raw = []
        for n in range(1, n_disks):
            e = 4.0**n
            raw.append(r0 * 2.0 ** (-e) if e < 1000 else 0.0)
    floor = 0.0 if neck_floor is None else float(neck_floor)
    return [max(w, floor) for w in raw]


def _disk_chain(p) -> PolygonDomain:
    import shapely
    from shapely.geometry import Polygon, box

    n = _param(p, "n_disks", 4, integer=True)
    r0 = _param(p, "r0", 1.0, positive=True)
    m = _param(p, "m_poly", 128, integer=True)
    neck_len = _param(p, "neck_length", 0.0)
    floor = p.get("neck_floor")
    if n < 1:
        raise InvalidSpec("n_disks", "need at least one disk")
    if m < 8:
        raise InvalidSpec("m_poly", "need at least 8 segments per disk")
    if neck_len < 0:
        raise InvalidSpec("neck_length", "must be nonnegative")
    if floor is not None:
        floor = _param(p, "neck_floor", positive=True)
    widths = disk_chain_necks(n, floor, r0, p.get("neck_widths"))
    if len(widths) != n - 1:
        raise InvalidSpec("neck_widths", f"need {n - 1} widths, got {len(widths)}")
    radii = [r0 * 2.0**-k for k in range(n)]
    for k, w in enumerate(widths):
        if not w > 0:
            raise InvalidSpec("neck_floor", f"neck {k + 1} has zero width; set a positive neck_floor")
        if w >= 2 * min(radii[k], radii[k + 1]):
            raise InvalidSpec("neck_widths", f"neck {k + 1} width {w:.4g} exceeds the smaller disk diameter")
    centers = [0.0]
    for k, w in enumerate(widths):
        a = w / 2
        if neck_len > 0:
            step = radii[k] + radii[k + 1] + neck_len
        else:
            # overlapping disks whose common chord has length w
            step = math.sqrt(radii[k] ** 2 - a * a) + math.sqrt(radii[k + 1] ** 2 - a * a)
        centers.append(centers[-1] + step)
    shapes = [Polygon(regular_polygon((c, 0.0), r, m)) for c, r in zip(centers, radii)]
    if neck_len > 0:
        for k, w in enumerate(widths):
            shapes.append(box(centers[k], -w / 2, centers[k + 1], w / 2))
    union = shapely.union_all(shapes)
    if union.geom_type != "Polygon" or len(union.interiors) > 0:
        raise GeometryDegenerate("disk chain union is not a single simply connected polygon")
    union = shapely.set_precision(union, 0.0)
    outer = np.asarray(union.exterior.coords)[:-1]
    # drop vertices that are collinear with their neighbours
    prev, nxt = np.roll(outer, 1, axis=0), np.roll(outer, -1, axis=0)
    keep = np.abs(_orient(prev, outer, nxt)) > 1e-15 * r0 * r0
    outer = outer[keep]
    if signed_area(outer) < 0:
        outer = outer[::-1]
    features = []
    for k, w in enumerate(widths):
        if neck_len > 0:
            xm = 0.5 * (centers[k] + radii[k] + centers[k + 1] - radii[k + 1])
        else:
            xm = centers[k] + math.sqrt(radii[k] ** 2 - (w / 2) ** 2)
        features.append(ThinFeature(f"neck_{k + 1}", w, (xm, 0.0), "y", "channel"))
    landmarks = {f"ball_{k}": (c, 0.0) for k, c in enumerate(centers)}
    return PolygonDomain(outer, (), tuple(features), landmarks)


def disk_chain_balls(spec: DomainSpec) -> list[tuple[tuple[float, float], float]]:
    """(center, radius) of each ball of a disk-chain spec, in order."""
    dom = build_domain(spec)
    r0 = _param(spec.params, "r0", 1.0, positive=True)
    n = _param(spec.params, "n_disks", 4, integer=True)
    return [(dom.landmarks[f"ball_{k}"], r0 * 2.0**-k) for k in range(n)]


def _wedge(p) -> PolygonDomain:
    alpha = _param(p, "alpha", math.pi / 2, positive=True)
    radius = _param(p, "radius", 1.0, positive=True)
    m_arc = _param(p, "m_arc", 0, integer=True)
    if not alpha <= math.pi:
        raise InvalidSpec("alpha", "opening angle must lie in (0, pi]")
    if m_arc <= 0:
        m_arc = max(8, int(math.ceil(128 * alpha / math.pi)))
    ang = np.linspace(0.0, alpha, m_arc + 1)
    arc = np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])
    outer = np.vstack([[0.0, 0.0], arc])
    landmarks = {"apex": (0.0, 0.0)}
    return PolygonDomain(outer, (), (), landmarks)


_BUILDERS = {
    "raw_polygon": _raw_polygon,
    "spiked_square": _spiked_square,
    "slit_box": _slit_box,
    "disk_chain": _disk_chain,
    "wedge": _wedge,
}


def build_domain(spec: DomainSpec) -> PolygonDomain:
    if spec.variant not in _BUILDERS:
        raise InvalidSpec("variant", f"unknown variant {spec.variant!r}; expected one of {VARIANTS}")
    return _BUILDERS[spec.variant](spec.params)


def unit_square() -> PolygonDomain:
    return build_domain(DomainSpec("raw_polygon", {"outer": [[0, 0], [1, 0], [1, 1], [0, 1]]}))


PRESETS: dict[str, DomainSpec] = {
    "square": DomainSpec("raw_polygon", {"outer": [[0, 0], [1, 0], [1, 1], [0, 1]]}),
    "spiked_square": DomainSpec(
        "spiked_square", {"side": 1.0, "n_spikes": 8, "spike_depth": 0.2, "spike_angle": math.pi / 6}
    ),
    "slit_box": DomainSpec(
        "slit_box", {"width": 2.0, "height": 1.0, "slit_length": 0.6, "slit_thickness": 0.01, "gap": 0.1}
    ),
    "disk_chain": DomainSpec("disk_chain", {"n_disks": 3, "r0": 1.0, "neck_floor": 0.05}),
    "wedge": DomainSpec("wedge", {"alpha": math.pi / 4, "radius": 1.0}),
}


def polygon_rows(domain: PolygonDomain) -> list[tuple[int, int, float, float]]:
    """Rows ``(ring_id, vertex_index, x, y)``; ring 0 is the outer ring."""
    rows = []
    for rid, ring in enumerate(domain.rings):
        rows += [(rid, k, float(x), float(y)) for k, (x, y) in enumerate(ring)]
    return rows


def domain_from_rows(rows: Sequence[Sequence[float]]) -> PolygonDomain:
    rings: dict[int, list] = {}
    for rid, k, x, y in rows:
        rings.setdefault(int(rid), []).append((int(k), float(x), float(y)))
    ordered = [np.array([(x, y) for _, x, y in sorted(rings[r])]) for r in sorted(rings)]
    return PolygonDomain(ordered[0], tuple(ordered[1:]))
