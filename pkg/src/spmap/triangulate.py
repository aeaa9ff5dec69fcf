"""Triangulation of the boxed free space (polygon with holes).

Classic sweep-line monotone decomposition followed by per-piece fan
triangulation.  The outer box ring runs counterclockwise, obstacle rings
clockwise, so the interior is to the left of every directed input edge.
The source point is inserted afterwards as a triangulation vertex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import GeometryError, InvalidScene
from . import geometry as G
from .geometry import Point
from .scene import Scene


def _above(p: Point, q: Point) -> bool:
    """Sweep order: higher first, ties leftmost first."""
    return (p[1] > q[1]) or (p[1] == q[1] and p[0] < q[0])


@dataclass
class Triangulation:
    points: list[Point]
    triangles: list[tuple[int, int, int]]
    constrained: set[frozenset]
    source_index: int = -1
    # ring index per constrained edge endpoint's origin (-1 = box)
    point_ring: list[int] = field(default_factory=list)

    def tri_neighbors(self) -> list[list[int]]:
        """For each triangle, adjacent triangle indices across unconstrained edges."""
        edge_map: dict[frozenset, list[int]] = {}
        for ti, (a, b, c) in enumerate(self.triangles):
            for e in (frozenset((a, b)), frozenset((b, c)), frozenset((c, a))):
                edge_map.setdefault(e, []).append(ti)
        out: list[list[int]] = [[] for _ in self.triangles]
        for e, tris in edge_map.items():
            if len(tris) == 2 and e not in self.constrained:
                out[tris[0]].append(tris[1])
                out[tris[1]].append(tris[0])
        return out

    def triangle_points(self, ti: int) -> tuple[Point, Point, Point]:
        a, b, c = self.triangles[ti]
        return self.points[a], self.points[b], self.points[c]

    def area(self) -> float:
        total = 0.0
        for a, b, c in self.triangles:
            total += G.orient(self.points[a], self.points[b], self.points[c])
        return total * 0.5

    def locate(self, p: Point) -> Optional[int]:
        for ti, (a, b, c) in enumerate(self.triangles):
            pa, pb, pc = self.points[a], self.points[b], self.points[c]
            if (G.orient(pa, pb, p) >= -1e-12 and G.orient(pb, pc, p) >= -1e-12
                    and G.orient(pc, pa, p) >= -1e-12):
                return ti
        return None


# ---------------------------------------------------------------------------
# monotone decomposition (sweep line)
# ---------------------------------------------------------------------------

class _SweepEdge:
    """Status-structure entry: a boundary edge with the interior to its right."""

    __slots__ = ("a", "b", "pa", "pb", "helper")

    def __init__(self, a: int, b: int, pa: Point, pb: Point, helper: int):
        self.a, self.b = a, b
        self.pa, self.pb = pa, pb
        self.helper = helper

    def x_at(self, y: float) -> float:
        (x0, y0), (x1, y1) = self.pa, self.pb
        if y0 == y1:
            return min(x0, x1)
        t = (y - y0) / (y1 - y0)
        t = min(1.0, max(0.0, t))
        return x0 + t * (x1 - x0)


def _make_monotone(points: list[Point], rings: list[list[int]]
                   ) -> set[frozenset]:
    """Diagonals that cut the polygon-with-holes into monotone pieces."""
    nxt: dict[int, int] = {}
    prv: dict[int, int] = {}
    for ring in rings:
        m = len(ring)
        for i in range(m):
            nxt[ring[i]] = ring[(i + 1) % m]
            prv[ring[(i + 1) % m]] = ring[i]

    order = sorted(nxt.keys(), key=lambda i: (-points[i][1], points[i][0]))
    status: list[_SweepEdge] = []
    diagonals: set[frozenset] = set()

    def find_left(p: Point) -> Optional[_SweepEdge]:
        best = None
        best_x = -math.inf
        for e in status:
            x = e.x_at(p[1])
            if x <= p[0] + 1e-12 and x > best_x:
                # the edge must actually span this y
                ylo = min(e.pa[1], e.pb[1])
                yhi = max(e.pa[1], e.pb[1])
                if ylo - 1e-12 <= p[1] <= yhi + 1e-12:
                    best, best_x = e, x
        return best

    def remove_edge(a: int) -> Optional[_SweepEdge]:
        for k, e in enumerate(status):
            if e.a == a:
                return status.pop(k)
        return None

    def classify(v: int) -> str:
        p, pn, pp = points[v], points[nxt[v]], points[prv[v]]
        up_n = _above(pn, p)
        up_p = _above(pp, p)
        turn = G.orient(pp, p, pn)
        if not up_n and not up_p:      # both neighbors below
            return "start" if turn > 0 else "split"
        if up_n and up_p:              # both above
            return "end" if turn > 0 else "merge"
        return "regular"

    def fix_merge_helper(e: Optional[_SweepEdge], v: int) -> None:
        if e is not None:
            if e.helper >= 0 and classify(e.helper) == "merge":
                diagonals.add(frozenset((v, e.helper)))
            e.helper = v

    for v in order:
        kind = classify(v)
        p = points[v]
        if kind == "start":
            status.append(_SweepEdge(v, nxt[v], p, points[nxt[v]], v))
        elif kind == "end":
            e = remove_edge(prv[v])
            if e is not None and e.helper >= 0 and classify(e.helper) == "merge":
                diagonals.add(frozenset((v, e.helper)))
        elif kind == "split":
            left = find_left(p)
            if left is None:
                raise GeometryError("sweep lost its left edge at a split vertex")
            diagonals.add(frozenset((v, left.helper)))
            left.helper = v
            status.append(_SweepEdge(v, nxt[v], p, points[nxt[v]], v))
        elif kind == "merge":
            e = remove_edge(prv[v])
            if e is not None and e.helper >= 0 and classify(e.helper) == "merge":
                diagonals.add(frozenset((v, e.helper)))
            fix_merge_helper(find_left(p), v)
        else:  # regular
            if _above(points[prv[v]], p):
                # interior lies right of the sweep through v: edge chain on the left
                e = remove_edge(prv[v])
                if e is not None and e.helper >= 0 and classify(e.helper) == "merge":
                    diagonals.add(frozenset((v, e.helper)))
                status.append(_SweepEdge(v, nxt[v], p, points[nxt[v]], v))
            else:
                fix_merge_helper(find_left(p), v)
    return diagonals


# ---------------------------------------------------------------------------
# face extraction and monotone triangulation
# ---------------------------------------------------------------------------

def _extract_faces(points: list[Point], directed: list[tuple[int, int]]
                   ) -> list[list[int]]:
    """Walk faces of the planar graph, returning CCW (interior) cycles."""
    out_edges: dict[int, list[int]] = {}
    for a, b in directed:
        out_edges.setdefault(a, []).append(b)

    def angle(a: int, b: int) -> float:
        pa, pb = points[a], points[b]
        return math.atan2(pb[1] - pa[1], pb[0] - pa[0])

    for a in out_edges:
        out_edges[a].sort(key=lambda b: angle(a, b))

    unused = set(directed)
    faces = []
    for start in list(directed):
        if start not in unused:
            continue
        cycle = []
        edge = start
        guard = 0
        while True:
            guard += 1
            if guard > len(directed) + 8:
                raise GeometryError("face walk failed to close")
            unused.discard(edge)
            a, b = edge
            cycle.append(a)
            # next edge: the tightest clockwise turn from the reversed edge,
            # which walks the face lying to the left of each directed edge
            nbrs = out_edges[b]
            back = angle(b, a)
            idx = None
            best = None
            for j, c in enumerate(nbrs):
                d = angle(b, c)
                delta = (back - d) % (2 * math.pi)
                if delta <= 1e-13:
                    delta += 2 * math.pi
                if best is None or delta < best:
                    best = delta
                    idx = j
            edge = (b, nbrs[idx])
            if edge == start:
                break
        if len(cycle) >= 3:
            area = G.polygon_area([points[i] for i in cycle])
            if area > 0:
                faces.append(cycle)
    return faces


def _triangulate_monotone(points: list[Point], ring: list[int]
                          ) -> list[tuple[int, int, int]]:
    """Fan-triangulate one y-monotone CCW piece with the two-chain stack."""
    m = len(ring)
    if m == 3:
        return [tuple(ring)]  # type: ignore[list-item]
    top = min(range(m), key=lambda i: (-points[ring[i]][1], points[ring[i]][0]))
    bot = max(range(m), key=lambda i: (-points[ring[i]][1], points[ring[i]][0]))
    left_chain = set()
    i = top
    while i != bot:
        left_chain.add(ring[i])
        i = (i + 1) % m
    merged = sorted(ring, key=lambda v: (-points[v][1], points[v][0]))
    tris: list[tuple[int, int, int]] = []
    stack = [merged[0], merged[1]]
    for k in range(2, m - 1):
        v = merged[k]
        if (v in left_chain) != (stack[-1] in left_chain):
            while len(stack) > 1:
                a, b = stack[-2], stack[-1]
                tris.append(_ccw_tri(points, v, b, a))
                stack.pop()
            stack = [merged[k - 1], v]
        else:
            while len(stack) > 1:
                a, b = stack[-2], stack[-1]
                turn = G.orient(points[a], points[b], points[v])
                ok = turn > 1e-13 if v in left_chain else turn < -1e-13
                if not ok:
                    break
                tris.append(_ccw_tri(points, v, b, a))
                stack.pop()
            stack.append(v)
    v = merged[m - 1]
    while len(stack) > 1:
        a, b = stack[-2], stack[-1]
        tris.append(_ccw_tri(points, v, b, a))
        stack.pop()
    return tris


def _ccw_tri(points: list[Point], a: int, b: int, c: int) -> tuple[int, int, int]:
    if G.orient(points[a], points[b], points[c]) < 0:
        return (a, c, b)
    return (a, b, c)


# ---------------------------------------------------------------------------
# public construction
# ---------------------------------------------------------------------------

def triangulate_free_space(scene: Scene, insert_source: bool = True
                           ) -> Triangulation:
    """Triangulate the boxed free space, with the source as a vertex.

    With ``insert_source=False`` the source is left out, which gives the
    plain polygon-with-holes triangulation.
    """
    box = list(reversed(scene.box_ring()))  # counterclockwise outer ring
    points: list[Point] = []
    rings: list[list[int]] = []
    point_ring: list[int] = []

    def add_ring(ring: Sequence[Point], tag: int) -> list[int]:
        idx = []
        for p in ring:
            idx.append(len(points))
            points.append(p)
            point_ring.append(tag)
        rings.append(idx)
        return idx

    add_ring(box, -1)
    for ri, ring in enumerate(scene.obstacles):
        add_ring(list(reversed(ring)), ri)  # clockwise holes

    constrained: set[frozenset] = set()
    directed: list[tuple[int, int]] = []
    for ring in rings:
        m = len(ring)
        for i in range(m):
            a, b = ring[i], ring[(i + 1) % m]
            constrained.add(frozenset((a, b)))
            # ring edges are walked only in their stored direction, which
            # keeps free space on the left; the reverse side is obstacle
            # interior (or the unbounded outside) and must not seed a face
            directed.append((a, b))

    if scene.h == 0:
        tri = Triangulation(points, [], constrained, point_ring=point_ring)
        if insert_source:
            _fan_from_source(tri, scene.source, rings[0])
        else:
            b = rings[0]
            tri.triangles.extend((_ccw_tri(points, b[0], b[1], b[2]),
                                  _ccw_tri(points, b[0], b[2], b[3])))
        return tri

    diagonals = _make_monotone(points, rings)
    for d in diagonals:
        a, b = tuple(d)
        directed.append((a, b))
        directed.append((b, a))

    faces = _extract_faces(points, directed)
    triangles: list[tuple[int, int, int]] = []
    for face in faces:
        triangles.extend(_triangulate_monotone(points, face))

    tri = Triangulation(points, triangles, constrained, point_ring=point_ring)
    if insert_source:
        _insert_source(tri, scene.source)
    return tri


def _fan_from_source(tri: Triangulation, s: Point, box_ring: list[int]) -> None:
    si = len(tri.points)
    tri.points.append(s)
    tri.point_ring.append(-2)
    tri.source_index = si
    m = len(box_ring)
    for i in range(m):
        tri.triangles.append(_ccw_tri(tri.points, si, box_ring[i],
                                      box_ring[(i + 1) % m]))


def _insert_source(tri: Triangulation, s: Point) -> None:
    ti = tri.locate(s)
    if ti is None:
        raise InvalidScene("source fell outside the triangulated free space")
    a, b, c = tri.triangles[ti]
    pa, pb, pc = tri.points[a], tri.points[b], tri.points[c]
    si = len(tri.points)
    tri.points.append(s)
    tri.point_ring.append(-2)
    tri.source_index = si
    span = max(G.dist(pa, pb), G.dist(pb, pc), G.dist(pc, pa))
    tol = 1e-9 * span
    # if s sits on one of the triangle's edges, split the two triangles
    # sharing that edge into two each; otherwise split this one into three
    for (u, v) in ((a, b), (b, c), (c, a)):
        if G.seg_point_distance(tri.points[u], tri.points[v], s) <= tol:
            other = [t for t in range(len(tri.triangles))
                     if t != ti and u in tri.triangles[t] and v in tri.triangles[t]]
            _split_edge_at(tri, ti, u, v, si)
            if other and frozenset((u, v)) not in tri.constrained:
                _split_edge_at(tri, other[0], u, v, si)
            return
    tri.triangles[ti] = _ccw_tri(tri.points, a, b, si)
    tri.triangles.append(_ccw_tri(tri.points, b, c, si))
    tri.triangles.append(_ccw_tri(tri.points, c, a, si))


def _split_edge_at(tri: Triangulation, ti: int, u: int, v: int, si: int) -> None:
    a, b, c = tri.triangles[ti]
    w = ({a, b, c} - {u, v}).pop()
    tri.triangles[ti] = _ccw_tri(tri.points, u, si, w)
    tri.triangles.append(_ccw_tri(tri.points, si, v, w))


def audit_triangulation(scene: Scene, tri: Triangulation,
                        rel_tol: float = 1e-9) -> None:
    """Raise when the triangulation fails its structural contracts."""
    free = scene.free_area()
    got = tri.area()
    if abs(got - free) > rel_tol * max(free, 1.0):
        raise GeometryError(f"triangulation area {got} != free area {free}")
    for (a, b, c) in tri.triangles:
        pa, pb, pc = tri.points[a], tri.points[b], tri.points[c]
        if G.orient(pa, pb, pc) <= 0:
            raise GeometryError("degenerate or flipped triangle")
    # diagonals must not properly cross any obstacle edge
    edges = scene.all_edges()
    seen: set[frozenset] = set()
    for (a, b, c) in tri.triangles:
        for (u, v) in ((a, b), (b, c), (c, a)):
            key = frozenset((u, v))
            if key in seen or key in tri.constrained:
                continue
            seen.add(key)
            pu, pv = tri.points[u], tri.points[v]
            for (ea, eb) in edges:
                if G.segments_properly_cross(pu, pv, ea, eb):
                    raise GeometryError("diagonal crosses an obstacle edge")
