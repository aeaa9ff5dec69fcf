"""Planar geometry kernel: points, convex chains, tangents, weighted bisectors.

Conventions used throughout the package:

* points are plain ``(x, y)`` tuples of floats;
* obstacle rings are stored counterclockwise, so the obstacle interior is to
  the left of the directed boundary and free space to the right;
* a convex chain is an open polyline that turns consistently one way; a
  wavelet wrapping forward along a left-turning chain hugs an obstacle on its
  left (and mirrored for right-turning chains).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    GeometryError,
    InvalidScene,
    NoIntersection,
    NoTangent,
    Unreachable,
)

Point = tuple[float, float]

_EPS = 1e-12


# ---------------------------------------------------------------------------
# vector basics
# ---------------------------------------------------------------------------

def sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def scale(a: Point, s: float) -> Point:
    return (a[0] * s, a[1] * s)


def dot(a: Point, b: Point) -> float:
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Point, b: Point) -> float:
    return a[0] * b[1] - a[1] * b[0]


def orient(a: Point, b: Point, c: Point) -> float:
    """Twice the signed area of triangle abc; > 0 means c is left of ab."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def norm(a: Point) -> float:
    return math.hypot(a[0], a[1])


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def unit(a: Point) -> Point:
    n = norm(a)
    if n < _EPS:
        raise GeometryError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n)


def rot90(a: Point) -> Point:
    """Counterclockwise quarter turn."""
    return (-a[1], a[0])


def lerp(a: Point, b: Point, t: float) -> Point:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def midpoint(a: Point, b: Point) -> Point:
    return ((a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5)


# ---------------------------------------------------------------------------
# segments and rings
# ---------------------------------------------------------------------------

def seg_point_distance(a: Point, b: Point, p: Point) -> float:
    ab = sub(b, a)
    denom = dot(ab, ab)
    if denom < _EPS * _EPS:
        return dist(a, p)
    t = dot(sub(p, a), ab) / denom
    t = min(1.0, max(0.0, t))
    return dist(lerp(a, b, t), p)


def segments_properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when the open segments share exactly one interior point."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return (o1 * o2 < 0.0) and (o3 * o4 < 0.0)


def segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Optional[Point]:
    """Intersection point of segments ab and cd, or None.

    Touching at endpoints counts; parallel overlap returns None.
    """
    r = sub(b, a)
    s = sub(d, c)
    denom = cross(r, s)
    if abs(denom) < _EPS * max(1.0, norm(r) * norm(s)):
        return None
    t = cross(sub(c, a), s) / denom
    u = cross(sub(c, a), r) / denom
    tol = 1e-12
    if -tol <= t <= 1.0 + tol and -tol <= u <= 1.0 + tol:
        return lerp(a, b, min(1.0, max(0.0, t)))
    return None


def ray_segment_intersection(origin: Point, direction: Point,
                             a: Point, b: Point) -> Optional[float]:
    """Parameter t >= 0 with origin + t*direction on segment ab, else None."""
    s = sub(b, a)
    denom = cross(direction, s)
    if abs(denom) < _EPS * max(1.0, norm(s)):
        return None
    qp = sub(a, origin)
    t = cross(qp, s) / denom
    u = cross(qp, direction) / denom
    if t >= -1e-12 and -1e-12 <= u <= 1.0 + 1e-12:
        return max(t, 0.0)
    return None


def polygon_area(ring: Sequence[Point]) -> float:
    """Signed area; positive for counterclockwise rings."""
    total = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total * 0.5


def is_ccw(ring: Sequence[Point]) -> bool:
    return polygon_area(ring) > 0.0


def point_in_ring(p: Point, ring: Sequence[Point]) -> bool:
    """Even-odd test; points exactly on the boundary may go either way."""
    x, y = p
    inside = False
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xs = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if x < xs:
                inside = not inside
    return inside


def point_on_ring(p: Point, ring: Sequence[Point], tol: float) -> bool:
    n = len(ring)
    for i in range(n):
        if seg_point_distance(ring[i], ring[(i + 1) % n], p) <= tol:
            return True
    return False


def ring_is_simple(ring: Sequence[Point]) -> bool:
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = ring[j], ring[(j + 1) % n]
            if segments_properly_cross(a, b, c, d):
                return False
    return True


def bbox_of(points: Iterable[Point]) -> tuple[float, float, float, float]:
    xs = []
    ys = []
    for x, y in points:
        xs.append(x)
        ys.append(y)
    return (min(xs), min(ys), max(xs), max(ys))


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Convex hull in counterclockwise order, collinear points dropped."""
    ps = sorted(set(points))
    if len(ps) <= 2:
        return list(ps)
    lower: list[Point] = []
    for p in ps:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= _EPS:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(ps):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= _EPS:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# convex chains
# ---------------------------------------------------------------------------

@dataclass
class ConvexChain:
    """Open polyline turning consistently one way.

    ``orientation`` is "ccw" for left-turning chains (obstacle hugged on the
    left when traversed forward) and "cw" for right-turning ones.  Straight
    chains carry whichever tag their ring context supplies.
    """

    vertices: list[Point]
    prefix_lengths: list[float] = field(default_factory=list)
    orientation: str = "ccw"
    chain_id: int = -1

    def __post_init__(self) -> None:
        if not self.prefix_lengths:
            acc = [0.0]
            for i in range(len(self.vertices) - 1):
                acc.append(acc[-1] + dist(self.vertices[i], self.vertices[i + 1]))
            self.prefix_lengths = acc
        if self.orientation not in ("ccw", "cw"):
            raise GeometryError("orientation must be 'ccw' or 'cw'")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def length(self) -> float:
        return self.prefix_lengths[-1]

    def vertex(self, i: int) -> Point:
        return self.vertices[i]

    def edge_dir(self, i: int) -> Point:
        """Unit direction of edge i (from vertex i to vertex i+1)."""
        return unit(sub(self.vertices[i + 1], self.vertices[i]))

    def reversed(self) -> "ConvexChain":
        flipped = "cw" if self.orientation == "ccw" else "ccw"
        return ConvexChain(list(reversed(self.vertices)), orientation=flipped,
                           chain_id=self.chain_id)

    def turn_sign(self) -> float:
        return 1.0 if self.orientation == "ccw" else -1.0

    def is_straight(self, tol: float = 1e-9) -> bool:
        scale_ = max(self.length, 1.0)
        for i in range(1, len(self.vertices) - 1):
            if abs(orient(self.vertices[i - 1], self.vertices[i],
                          self.vertices[i + 1])) > tol * scale_ * scale_:
                return False
        return True


def chain_subpath_length(chain: ConvexChain, i: int, j: int) -> float:
    """Arc length from vertex i to vertex j along the chain."""
    if not (0 <= i < len(chain.vertices)) or not (0 <= j < len(chain.vertices)):
        raise IndexError("chain vertex index out of range")
    return abs(chain.prefix_lengths[j] - chain.prefix_lengths[i])


def _check_convex_run(ring: Sequence[Point], tol: float) -> None:
    if len(ring) < 3:
        raise InvalidScene("ring needs at least 3 vertices")
    for i in range(len(ring)):
        if dist(ring[i], ring[(i + 1) % len(ring)]) <= tol:
            raise InvalidScene("degenerate (zero-length) ring edge")


def validate_ring(ring: Sequence[Point]) -> list[Point]:
    """Validate a simple obstacle ring and return it oriented CCW."""
    pts = [(float(x), float(y)) for x, y in ring]
    span = max(1.0, max(abs(c) for p in pts for c in p))
    _check_convex_run(pts, 1e-12 * span)
    area = polygon_area(pts)
    if abs(area) < 1e-12 * span * span:
        raise InvalidScene("ring has (near) zero area")
    if not ring_is_simple(pts):
        raise InvalidScene("ring is self-intersecting")
    if area < 0:
        pts = list(reversed(pts))
    return pts


def rectilinear_extreme_indices(ring: Sequence[Point]) -> list[int]:
    """Indices of the bottom/right/top/left extreme vertices of a CCW ring.

    Ties are broken so that each extreme vertex starts the boundary chain
    that continues counterclockwise from it: bottom prefers smaller x, right
    smaller y, top larger x, left larger y.
    """
    n = len(ring)

    def best(key) -> int:
        idx = 0
        for i in range(1, n):
            if key(ring[i]) < key(ring[idx]):
                idx = i
        return idx

    bottom = best(lambda p: (p[1], p[0]))
    right = best(lambda p: (-p[0], p[1]))
    top = best(lambda p: (-p[1], -p[0]))
    left = best(lambda p: (p[0], -p[1]))
    marks = []
    for i in (bottom, right, top, left):
        if i not in marks:
            marks.append(i)
    marks.sort()
    return marks


def _reflex_indices(ring: Sequence[Point], tol: float) -> list[int]:
    out = []
    n = len(ring)
    for i in range(n):
        if orient(ring[(i - 1) % n], ring[i], ring[(i + 1) % n]) < -tol:
            out.append(i)
    return out


def elementary_chains(polygon: Sequence[Point]) -> list[ConvexChain]:
    """Split an obstacle ring into convex, xy-monotone boundary chains.

    The ring is cut at its rectilinear extreme vertices; non-convex rings are
    additionally cut at reflex vertices so every returned chain turns left
    (counterclockwise ring orientation throughout).
    """
    ring = validate_ring(polygon)
    span = max(dist(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring)))
    cuts = set(rectilinear_extreme_indices(ring))
    cuts.update(_reflex_indices(ring, 1e-12 * span * span))
    marks = sorted(cuts)
    n = len(ring)
    chains: list[ConvexChain] = []
    for k, start in enumerate(marks):
        stop = marks[(k + 1) % len(marks)]
        verts = [ring[start]]
        i = start
        while i != stop:
            i = (i + 1) % n
            verts.append(ring[i])
        if len(verts) >= 2:
            chains.append(ConvexChain(verts, orientation="ccw"))
    return chains


# ---------------------------------------------------------------------------
# tangents
# ---------------------------------------------------------------------------

def _is_support(chain: ConvexChain, p: Point, i: int, want_left: bool) -> bool:
    """Whole chain weakly on one side of the line p -> vertex i."""
    v = chain.vertices[i]
    d = sub(v, p)
    if norm(d) < _EPS:
        return False
    for j in (i - 1, i + 1):
        if 0 <= j < len(chain.vertices):
            side = cross(d, sub(chain.vertices[j], p))
            if want_left:
                if side < -1e-12:
                    return False
            else:
                if side > 1e-12:
                    return False
    return True


def tangent_from_point(chain: ConvexChain, p: Point, side: str) -> int:
    """Index of the chain vertex supporting the tangent from p.

    ``side`` is "left" or "right": the chain lies weakly on that side of
    the directed line from p through the returned vertex.  Raises NoTangent
    when no vertex supports such a line (p engulfed by the chain's hull).
    """
    if side not in ("left", "right"):
        raise GeometryError("side must be 'left' or 'right'")
    want_left = side == "left"
    n = len(chain.vertices)
    if n == 1:
        return 0
    # binary search on the side-of-line predicate; convexity makes the
    # sequence of signs unimodal except in degenerate alignments, so a
    # short local fix-up scan follows.
    lo, hi = 0, n - 1
    while hi - lo > 2:
        m = (lo + hi) // 2
        v = chain.vertices[m]
        d = sub(v, p)
        nxt = cross(d, sub(chain.vertices[m + 1], p))
        good_forward = (nxt >= 0.0) if want_left else (nxt <= 0.0)
        if good_forward:
            hi = m
        else:
            lo = m
    for i in range(max(0, lo - 2), min(n, hi + 3)):
        if _is_support(chain, p, i, want_left):
            return i
    for i in range(n):  # degenerate fallback
        if _is_support(chain, p, i, want_left):
            return i
    raise NoTangent(f"no {side} tangent from {p}")


def common_tangent(chain_a: ConvexChain, chain_b: ConvexChain,
                   side_a: str = "left", side_b: str = "left") -> tuple[int, int]:
    """Vertex indices (ia, ib) of a common tangent line of two convex chains.

    chain_a lies weakly on ``side_a`` of the directed line a->b, chain_b on
    ``side_b``.  Found by alternating point tangencies, with an exhaustive
    verified fallback; raises GeometryError when no such line exists.
    """

    def valid(ia: int, ib: int) -> bool:
        va, vb = chain_a.vertices[ia], chain_b.vertices[ib]
        if dist(va, vb) < _EPS:
            return False
        return (_is_support(chain_a, vb, ia, side_a == "right")
                and _is_support(chain_b, va, ib, side_b == "left"))
        # note: seen from b, "a on side_a of line a->b" flips handedness

    ia, ib = 0, 0
    for _ in range(len(chain_a) + len(chain_b) + 4):
        try:
            new_ib = tangent_from_point(chain_b, chain_a.vertices[ia], side_b)
            new_ia = tangent_from_point(chain_a, chain_b.vertices[new_ib],
                                        "right" if side_a == "left" else "left")
        except NoTangent:
            break
        if new_ia == ia and new_ib == ib:
            if valid(ia, ib):
                return ia, ib
            break
        ia, ib = new_ia, new_ib
    best = None
    for ca in range(len(chain_a)):
        for cb in range(len(chain_b)):
            if valid(ca, cb):
                cost = dist(chain_a.vertices[ca], chain_b.vertices[cb])
                if best is None or cost < best[0]:
                    best = (cost, ca, cb)
    if best is None:
        raise GeometryError("chains admit no common tangent on requested sides")
    return best[1], best[2]


# ---------------------------------------------------------------------------
# generators (weighted wrapped sources)
# ---------------------------------------------------------------------------

@dataclass
class Generator:
    """A weighted wavelet source: a directed convex chain plus initial vertex.

    The chain is stored in wrap order (the wavelet hugs it moving forward
    from ``start``); ``weight`` is the distance already accumulated at the
    initial vertex; ``ray`` bounds the claimed sector at the initial vertex
    (None means unrestricted, e.g. the global source).
    """

    chain: ConvexChain
    start: int = 0
    weight: float = 0.0
    ray: Optional[Point] = None
    gen_id: int = -1
    parent_id: int = -1
    # attachment point on the parent wavelet, for path reconstruction
    attach: Optional[Point] = None

    @property
    def initial_vertex(self) -> Point:
        return self.chain.vertices[self.start]

    def is_point(self) -> bool:
        return len(self.chain.vertices) - self.start == 1

    def arc_to(self, i: int) -> float:
        return chain_subpath_length(self.chain, self.start, i)


def point_generator(p: Point, weight: float = 0.0, ray: Optional[Point] = None,
                    gen_id: int = -1) -> Generator:
    return Generator(ConvexChain([p], orientation="ccw"), 0, weight, ray,
                     gen_id=gen_id)


def _release_at(g: Generator, i: int, dep: Point, tol: float) -> bool:
    """Is the departure direction valid at chain vertex i for this wavelet?

    For a left-turning (obstacle-left) chain the departure must have left
    the incoming edge's sweep (cross(e_in, dep) >= 0) but not yet reached
    the outgoing edge (cross(e_out, dep) < 0); mirrored for right-turning.
    """
    s = g.chain.turn_sign()
    verts = g.chain.vertices
    if i == g.start:
        e_in = g.ray
    else:
        e_in = sub(verts[i], verts[i - 1])
    if e_in is not None and s * cross(e_in, dep) < -tol:
        return False
    if i + 1 < len(verts):
        e_out = sub(verts[i + 1], verts[i])
        if s * cross(e_out, dep) > tol:
            return False
    return True


def generator_tangent(g: Generator, q: Point) -> tuple[int, float]:
    """Release vertex index and total weighted distance from g to q.

    Raises Unreachable when q lies outside the wavelet's claimed sector
    (behind the bounding ray, or past the chain's far end).
    """
    verts = g.chain.vertices
    n = len(verts)
    span = max(1.0, g.chain.length, dist(g.initial_vertex, q))
    tol = 1e-12 * span
    # A point beyond the chain's far end can satisfy both an interior wedge
    # and the permissive terminal wedge; the first (taut) release is the
    # right one, so scan forward from the initial vertex.
    for i in range(g.start, n):
        dep = sub(q, verts[i])
        if norm(dep) <= tol:
            return i, g.weight + g.arc_to(i)
        if _release_at(g, i, dep, tol):
            return i, g.weight + g.arc_to(i) + norm(dep)
    raise Unreachable(f"{q} outside wavelet sector")


def generator_distance(g: Generator, q: Point) -> float:
    """Weighted wrap distance from a generator to a point."""
    return generator_tangent(g, q)[1]


def generator_distance_or_inf(g: Generator, q: Point) -> float:
    try:
        return generator_distance(g, q)
    except Unreachable:
        return math.inf


# ---------------------------------------------------------------------------
# weighted bisectors
# ---------------------------------------------------------------------------

@dataclass
class WeightedSite:
    point: Point
    weight: float = 0.0


@dataclass
class HyperbolaArc:
    """One piece of the bisector of two weighted point sites.

    kind is "hyperbola" (proper branch), "line" (equal weights), or "ray"
    (weight difference equal to the focal distance; the degenerate
    collinear-extension case).  ``u_range`` clips the parameterization.
    """

    site1: WeightedSite
    site2: WeightedSite
    kind: str = "hyperbola"
    u_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self) -> None:
        f1, f2 = self.site1.point, self.site2.point
        d = dist(f1, f2)
        c = self.site2.weight - self.site1.weight
        self._center = midpoint(f1, f2)
        self._d = d
        self._c = c
        if d < _EPS:
            raise GeometryError("coincident foci have no bisector")
        self._ex = unit(sub(f2, f1))
        self._ey = rot90(self._ex)
        if abs(c) > d + 1e-12 * max(1.0, d):
            raise NoIntersection("empty bisector: weight gap exceeds distance")
        if abs(abs(c) - d) <= 1e-12 * max(1.0, d):
            self.kind = "ray"
        elif abs(c) <= 1e-12 * max(1.0, d):
            self.kind = "line"
        else:
            self.kind = "hyperbola"
        self._a = c / 2.0
        bb = (d / 2.0) ** 2 - self._a ** 2
        self._b = math.sqrt(max(bb, 0.0))

    def point_at(self, u: float) -> Point:
        if self.kind == "line":
            fx, fy = 0.0, u
        elif self.kind == "ray":
            # from the nearer focus, directly away from the farther one
            t = abs(u)
            if self._c > 0:
                fx, fy = self._d / 2.0 + t, 0.0
            else:
                fx, fy = -self._d / 2.0 - t, 0.0
        else:
            fx = self._a * math.cosh(u)
            fy = self._b * math.sinh(u)
        cx, cy = self._center
        ex, ey = self._ex, self._ey
        return (cx + fx * ex[0] + fy * ey[0], cy + fx * ex[1] + fy * ey[1])

    def sample(self, count: int) -> list[Point]:
        u0, u1 = self.u_range
        if count == 1:
            return [self.point_at((u0 + u1) / 2.0)]
        return [self.point_at(u0 + (u1 - u0) * i / (count - 1))
                for i in range(count)]

    def residual(self, p: Point) -> float:
        """Weighted-distance imbalance at p; zero on the bisector."""
        return (self.site1.weight + dist(p, self.site1.point)
                - self.site2.weight - dist(p, self.site2.point))


def bisector_point(site1: WeightedSite, site2: WeightedSite,
                   constraint: tuple[Point, Point]) -> Point:
    """Point on the weighted bisector of two sites lying on a constraint line.

    ``constraint`` is (origin, direction).  Solved in closed form via the
    doubly-squared quadratic; candidate roots are validated against the
    defining equation, so the spurious branch is rejected.  When two valid
    roots exist the one with smaller line parameter is returned.
    Raises NoIntersection when the line misses the bisector.
    """
    o, dvec = constraint
    dvec = unit(dvec)
    f1, f2 = site1.point, site2.point
    k = site2.weight - site1.weight

    # |p-f1|^2 and |p-f2|^2 as quadratics in t
    def quad(f: Point) -> tuple[float, float, float]:
        dx, dy = o[0] - f[0], o[1] - f[1]
        return (1.0, 2.0 * (dx * dvec[0] + dy * dvec[1]), dx * dx + dy * dy)

    a2, a1, a0 = quad(f1)
    b2, b1, b0 = quad(f2)
    # (A + B - k^2)^2 = 4 A B  collapses to a quadratic in t
    s2, s1, s0 = a2 + b2, a1 + b1, a0 + b0 - k * k
    # left side coefficients up to t^4
    l4 = s2 * s2
    l3 = 2 * s2 * s1
    l2 = s1 * s1 + 2 * s2 * s0
    l1 = 2 * s1 * s0
    l0 = s0 * s0
    # right side 4*A*B
    r4 = 4 * a2 * b2
    r3 = 4 * (a2 * b1 + a1 * b2)
    r2 = 4 * (a2 * b0 + a1 * b1 + a0 * b2)
    r1 = 4 * (a1 * b0 + a0 * b1)
    r0 = 4 * a0 * b0
    c4, c3 = l4 - r4, l3 - r3
    c2, c1, c0 = l2 - r2, l1 - r1, l0 - r0
    scale_ = max(abs(c2), abs(c1), abs(c0), 1e-300)
    if abs(c4) > 1e-9 * scale_ or abs(c3) > 1e-9 * scale_:
        # numerically should never happen: quartic terms cancel exactly
        raise GeometryError("bisector-line reduction failed to collapse")

    roots: list[float] = []
    if abs(c2) < 1e-14 * scale_:
        if abs(c1) > 1e-14 * scale_:
            roots.append(-c0 / c1)
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc >= -1e-12 * scale_ * scale_:
            disc = max(disc, 0.0)
            sq = math.sqrt(disc)
            roots.extend(((-c1 - sq) / (2 * c2), (-c1 + sq) / (2 * c2)))

    span = max(1.0, dist(f1, f2), abs(site1.weight), abs(site2.weight))
    good: list[tuple[float, Point]] = []
    for t in sorted(roots):
        p = add(o, scale(dvec, t))
        # Newton polish on the residual along the line
        for _ in range(3):
            r = (site1.weight + dist(p, f1)) - (site2.weight + dist(p, f2))
            if abs(r) < 1e-15 * span:
                break
            g1v = unit(sub(p, f1)) if dist(p, f1) > _EPS else (0.0, 0.0)
            g2v = unit(sub(p, f2)) if dist(p, f2) > _EPS else (0.0, 0.0)
            dr = dot(g1v, dvec) - dot(g2v, dvec)
            if abs(dr) < 1e-14:
                break
            t -= r / dr
            p = add(o, scale(dvec, t))
        r = (site1.weight + dist(p, f1)) - (site2.weight + dist(p, f2))
        if abs(r) <= 1e-9 * span:
            if not good or abs(good[-1][0] - t) > 1e-9 * span:
                good.append((t, p))
    if not good:
        raise NoIntersection("constraint line misses the weighted bisector")
    return good[0][1]


def bisector_points_on_segment(site1: WeightedSite, site2: WeightedSite,
                               a: Point, b: Point) -> list[Point]:
    """All weighted-bisector crossings strictly on segment ab (0, 1 or 2)."""
    seg_len = dist(a, b)
    if seg_len < _EPS:
        return []
    direction = unit(sub(b, a))
    try:
        # reuse the quadratic machinery, then filter to the segment
        o = a
        f1, f2 = site1.point, site2.point
        k = site2.weight - site1.weight

        def quad(f: Point) -> tuple[float, float, float]:
            dx, dy = o[0] - f[0], o[1] - f[1]
            return (1.0, 2.0 * (dx * direction[0] + dy * direction[1]),
                    dx * dx + dy * dy)

        a2, a1, a0 = quad(f1)
        b2, b1, b0 = quad(f2)
        s2, s1, s0 = a2 + b2, a1 + b1, a0 + b0 - k * k
        c2 = s1 * s1 + 2 * s2 * s0 - 4 * (a2 * b0 + a1 * b1 + a0 * b2)
        c1 = 2 * s1 * s0 - 4 * (a1 * b0 + a0 * b1)
        c0 = s0 * s0 - 4 * a0 * b0
        roots: list[float] = []
        scale_ = max(abs(c2), abs(c1), abs(c0), 1e-300)
        if abs(c2) < 1e-14 * scale_:
            if abs(c1) > 1e-14 * scale_:
                roots.append(-c0 / c1)
        else:
            disc = c1 * c1 - 4 * c2 * c0
            if disc >= 0.0:
                sq = math.sqrt(disc)
                roots.extend(((-c1 - sq) / (2 * c2), (-c1 + sq) / (2 * c2)))
        span = max(1.0, dist(f1, f2), seg_len)
        out: list[Point] = []
        kept: list[float] = []
        for t in sorted(roots):
            if -1e-12 * span <= t <= seg_len + 1e-12 * span:
                if kept and abs(t - kept[-1]) <= 1e-9 * span:
                    continue
                p = add(o, scale(direction, min(max(t, 0.0), seg_len)))
                r = (site1.weight + dist(p, f1)) - (site2.weight + dist(p, f2))
                if abs(r) <= 1e-7 * span:
                    out.append(p)
                    kept.append(t)
        return out
    except GeometryError:
        return []


def bisector_hyperbola(site1: WeightedSite, site2: WeightedSite) -> HyperbolaArc:
    """The full (unclipped) bisector branch of two weighted sites."""
    return HyperbolaArc(site1, site2)
