"""Free-space decomposition into an ocean, bays, and canals.

The dual graph of the triangulation is peeled (degree-one nodes) and then
smoothed (degree-two nodes).  Triangles that keep three live neighbours
are junctions; each smoothed arc between junctions is a corridor.  Inside
a corridor the two geodesics joining its door endpoints form an hourglass,
either open (the geodesics stay apart) or closed (they share a middle
path between two funnel apices).  Junction triangles, open hourglasses
and funnels make up the ocean; pockets behind the geodesics are bays; the
pinched middle of a closed corridor is a canal carrying its corridor path.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import GeometryError
from . import geometry as G
from .geometry import Point
from .triangulate import Triangulation, triangulate_free_space

__all__ = [
    "Bay",
    "Canal",
    "Corridor",
    "CorridorPath",
    "CorridorStructure",
    "Hourglass",
    "build_corridor_structure",
    "funnel_path",
    "triangulate_free_space",
]


# ---------------------------------------------------------------------------
# geodesics through a triangle sleeve
# ---------------------------------------------------------------------------

def funnel_path(pts: Sequence[Point], start: int, end: int,
                portals: Sequence[tuple[int, int]]) -> list[int]:
    """Shortest path between two sleeve endpoints, as point indices.

    ``portals`` are the crossed diagonals in sleeve order, each directed
    (right, left) as seen walking from ``start`` toward ``end``.
    """
    if start == end:
        return [start]
    seq: list[tuple[int, int]] = [(start, start)]
    seq.extend(portals)
    seq.append((end, end))
    path = [start]
    apex = left = right = start
    ai = li = ri = 0
    i = 1
    guard = 0
    limit = 4 * len(seq) * len(seq) + 64
    while i < len(seq):
        guard += 1
        if guard > limit:
            raise GeometryError("funnel walk failed to converge")
        nr, nl = seq[i]
        if G.orient(pts[apex], pts[right], pts[nr]) >= 0.0:
            if right == apex or G.orient(pts[apex], pts[left], pts[nr]) < 0.0:
                right, ri = nr, i
            else:
                # the right boundary crossed the left one: the left vertex
                # becomes the new apex and the scan restarts behind it
                if path[-1] != left:
                    path.append(left)
                apex, ai = left, li
                left = right = apex
                li = ri = ai
                i = ai + 1
                continue
        if G.orient(pts[apex], pts[left], pts[nl]) <= 0.0:
            if left == apex or G.orient(pts[apex], pts[right], pts[nl]) > 0.0:
                left, li = nl, i
            else:
                if path[-1] != right:
                    path.append(right)
                apex, ai = right, ri
                left = right = apex
                li = ri = ai
                i = ai + 1
                continue
        i += 1
    if path[-1] != end:
        path.append(end)
    return path


def _sleeve_portals(tri: Triangulation, chain: Sequence[int]
                    ) -> list[tuple[int, int]]:
    """Portals (right, left) crossed when walking the triangle chain."""
    portals: list[tuple[int, int]] = []
    for t, t2 in zip(chain, chain[1:]):
        shared = set(tri.triangles[t]) & set(tri.triangles[t2])
        if len(shared) != 2:
            raise GeometryError("sleeve triangles do not share an edge")
        a, b, c = tri.triangles[t]
        if a not in shared:
            x, y = b, c
        elif b not in shared:
            x, y = c, a
        else:
            x, y = a, b
        portals.append((x, y))
    return portals


# ---------------------------------------------------------------------------
# structure types
# ---------------------------------------------------------------------------

@dataclass
class Hourglass:
    """Geodesic pair inside one corridor."""

    open: bool
    # full geodesics, in the ring directions (side one runs a -> b, side
    # two runs e -> f); point indices into the triangulation
    path1: list[int]
    path2: list[int]
    # closed only: shared middle path from apex x (door-one end) to apex y
    corridor_path: list[int] = field(default_factory=list)
    apex1: int = -1
    apex2: int = -1
    # closed only: the four funnel sides (x..b, e..x, a..y, y..f)
    funnel_sides: list[list[int]] = field(default_factory=list)


@dataclass
class Bay:
    """Single-gate pocket hanging off the ocean.

    ``ring`` is counterclockwise; its closing edge (last -> first vertex)
    is the gate, so walking the gate in that direction keeps the ocean on
    the right and the bay on the left.
    """

    ring: list[Point]

    @property
    def gate(self) -> tuple[Point, Point]:
        return (self.ring[-1], self.ring[0])

    @property
    def area(self) -> float:
        return G.polygon_area(self.ring)


@dataclass
class Canal:
    """Two-gate pocket holding one corridor path.

    Each gate is stored apex-first, so ``gates[0][0]`` and ``gates[1][0]``
    are the two funnel apices (also exposed as ``apices``).
    """

    ring: list[Point]
    gates: tuple[tuple[Point, Point], tuple[Point, Point]]
    apices: tuple[Point, Point]
    path: list[Point]

    @property
    def area(self) -> float:
        return G.polygon_area(self.ring)

    @property
    def path_length(self) -> float:
        return sum(G.dist(a, b) for a, b in zip(self.path, self.path[1:]))


@dataclass
class CorridorPath:
    """Shortcut metadata: wavefronts may jump gate to gate along it."""

    x: Point
    y: Point
    points: list[Point]
    length: float


@dataclass
class Corridor:
    junctions: tuple[int, int]
    doors: tuple[tuple[int, int], tuple[int, int]]
    chain: list[int]
    region: set[int]
    ring: list[int]
    hourglass: Optional[Hourglass]

    @property
    def degenerate(self) -> bool:
        return self.hourglass is None


@dataclass
class CorridorStructure:
    tri: Triangulation
    junction_tris: list[int]
    corridors: list[Corridor]
    bays: list[Bay]
    canals: list[Canal]
    # polylines covering the ocean boundary, each directed with the ocean
    # on its RIGHT (the same handedness as obstacle rings); geodesic chains
    # are convex, wall chains around a self-touching corridor need not be
    boundary_chains: list[list[Point]]
    corridor_paths: list[CorridorPath]
    ocean_area: float

    @property
    def node_count(self) -> int:
        return len(self.junction_tris)

    @property
    def edge_count(self) -> int:
        return len(self.corridors)

    @property
    def decomposition_area(self) -> float:
        return (self.ocean_area
                + sum(b.area for b in self.bays)
                + sum(c.area for c in self.canals))

    @property
    def obstacle_count(self) -> int:
        return len({t for t in self.tri.point_ring if t >= 0})

    def locate(self, p: Point) -> tuple[str, int]:
        """Classify a free-space point as ocean / bay i / canal i."""
        for i, bay in enumerate(self.bays):
            if self._inside_piece(p, bay.ring, [bay.gate]):
                return ("bay", i)
        for i, canal in enumerate(self.canals):
            if self._inside_piece(p, canal.ring, list(canal.gates)):
                return ("canal", i)
        return ("ocean", -1)

    @staticmethod
    def _inside_piece(p: Point, ring: list[Point],
                      gates: list[tuple[Point, Point]]) -> bool:
        if G.point_on_ring(p, ring, 1e-9):
            # boundary points on the gate belong to the ocean map
            for a, b in gates:
                if G.seg_point_distance(a, b, p) <= 1e-9:
                    return False
            return True
        return G.point_in_ring(p, ring)

    def to_json_dict(self) -> dict:
        return {
            "junction_triangles": sorted(self.junction_tris),
            "corridor_count": len(self.corridors),
            "ocean_area": self.ocean_area,
            "bays": [{"ring": [list(q) for q in b.ring]} for b in self.bays],
            "canals": [
                {
                    "ring": [list(q) for q in c.ring],
                    "gates": [[list(c.gates[0][0]), list(c.gates[0][1])],
                              [list(c.gates[1][0]), list(c.gates[1][1])]],
                    "path": [list(q) for q in c.path],
                }
                for c in self.canals
            ],
            "boundary_chains": [[list(q) for q in ch]
                                for ch in self.boundary_chains],
        }


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _shared_edge(tri: Triangulation, t1: int, t2: int) -> tuple[int, int]:
    shared = sorted(set(tri.triangles[t1]) & set(tri.triangles[t2]))
    if len(shared) != 2:
        raise GeometryError("triangles do not share an edge")
    return (shared[0], shared[1])


def _region_ring(tri: Triangulation, region: set[int]) -> list[int]:
    """Boundary of a union of triangles as one counterclockwise walk.

    A corridor that wraps all the way around an obstacle touches itself
    where its two doors share an endpoint; that vertex then appears twice
    and the walk is only weakly simple.  Anything more tangled than a
    single doubled vertex is rejected.
    """
    count: dict[frozenset, int] = {}
    for t in region:
        a, b, c = tri.triangles[t]
        for u, v in ((a, b), (b, c), (c, a)):
            key = frozenset((u, v))
            count[key] = count.get(key, 0) + 1
    out: dict[int, list[int]] = {}
    total = 0
    for t in region:
        a, b, c = tri.triangles[t]
        for u, v in ((a, b), (b, c), (c, a)):
            if count[frozenset((u, v))] == 1:
                out.setdefault(u, []).append(v)
                total += 1
    doubled = [u for u, vs in out.items() if len(vs) > 1]
    if len(doubled) > 1 or any(len(out[u]) > 2 for u in doubled):
        raise GeometryError("corridor boundary pinches too much to walk")
    pts = tri.points
    start = next(u for u, vs in out.items() if len(vs) == 1)
    ring = [start]
    used: set[tuple[int, int]] = set()
    prev, cur = start, out[start][0]
    used.add((start, cur))
    while cur != start:
        ring.append(cur)
        cand = [v for v in out.get(cur, ()) if (cur, v) not in used]
        if not cand:
            raise GeometryError("corridor boundary walk stalled")
        if len(cand) == 1:
            nxt = cand[0]
        else:
            # at the doubled vertex the walk continues along the far wall
            # of the local free wedge: the first outgoing direction found
            # rotating clockwise from the reversed incoming one
            base = math.atan2(pts[prev][1] - pts[cur][1],
                              pts[prev][0] - pts[cur][0])

            def cw_turn(v: int) -> float:
                ang = math.atan2(pts[v][1] - pts[cur][1],
                                 pts[v][0] - pts[cur][0])
                return (base - ang) % (2.0 * math.pi)

            nxt = min(cand, key=cw_turn)
        used.add((cur, nxt))
        prev, cur = cur, nxt
    if len(ring) != total:
        raise GeometryError("corridor boundary is not a single cycle")
    return ring


def _cyclic_slice(ring: list[int], i: int, j: int) -> list[int]:
    """ring[i..j] inclusive, wrapping."""
    if i <= j:
        return ring[i:j + 1]
    return ring[i:] + ring[:j + 1]


def _split_ring_at_extremes(ring: list[Point]) -> list[list[Point]]:
    cuts = sorted(set(G.rectilinear_extreme_indices(ring)))
    if len(cuts) < 2:
        return [list(ring) + [ring[0]]]
    chains = []
    for k, c in enumerate(cuts):
        nxt = cuts[(k + 1) % len(cuts)]
        idx = _cyclic_slice(list(range(len(ring))), c, nxt)
        chains.append([ring[i] for i in idx])
    return chains


@dataclass
class _RingCtx:
    """Positional view of one corridor ring.

    Everything downstream works with ring positions rather than vertex
    ids, so a doubled vertex (the self-touching corridor case) stays
    unambiguous.  ``busy`` holds every position a pocket may not swallow:
    geodesic contacts and door endpoints.
    """

    pts: Sequence[Point]
    ring: list[int]
    m: int
    pos_of: dict[int, list[int]]
    busy: list[int]
    side1_pos: set[int]
    side2_pos: set[int]
    i1: int
    i2: int
    doubled: Optional[int]

    def _wedge_has(self, q: int, d: float) -> bool:
        """Whether direction d points into the free wedge at ring[q].

        The wedge opens from the outgoing ring edge counterclockwise to
        the reversed incoming one; a small slack admits geodesics running
        exactly along a door.
        """
        v = self.pts[self.ring[q]]
        nxt = self.pts[self.ring[(q + 1) % self.m]]
        prv = self.pts[self.ring[q - 1]]
        a = math.atan2(nxt[1] - v[1], nxt[0] - v[0])
        b = math.atan2(prv[1] - v[1], prv[0] - v[0])
        tau = 2.0 * math.pi
        span = (b - a) % tau
        off = (d - a) % tau
        eps = 1e-9
        return off <= span + eps or off >= tau - eps

    def line_positions(self, line: Sequence[int], first_pos: int,
                       last_pos: int) -> list[int]:
        out = []
        last = len(line) - 1
        for k, vid in enumerate(line):
            if k == 0:
                out.append(first_pos)
            elif k == last:
                out.append(last_pos)
            else:
                qs = self.pos_of[vid]
                if len(qs) == 1:
                    out.append(qs[0])
                    continue
                # a geodesic grazing the doubled vertex: pick the copy
                # whose free wedge contains both neighbouring directions
                v = self.pts[vid]
                pp = self.pts[line[k - 1]]
                np_ = self.pts[line[k + 1]]
                dp = math.atan2(pp[1] - v[1], pp[0] - v[0])
                dn = math.atan2(np_[1] - v[1], np_[0] - v[0])
                hits = [q for q in qs
                        if self._wedge_has(q, dp) and self._wedge_has(q, dn)]
                if len(hits) != 1:
                    raise GeometryError("geodesic contact at the doubled "
                                        "vertex fits no single wedge")
                out.append(hits[0])
        return out

    def busy_between(self, u: int, w: int) -> bool:
        """True when a busy position lies strictly between u and w."""
        sb, m = self.busy, self.m
        if (u + 1) % m == w:
            return False
        lo, hi = (u + 1) % m, (w - 1) % m
        if lo <= hi:
            return bisect_right(sb, hi) > bisect_left(sb, lo)
        return (bisect_right(sb, m - 1) > bisect_left(sb, lo)
                or bisect_right(sb, hi) > bisect_left(sb, 0))

    def pocket_span(self, pc: int, pd: int) -> Optional[tuple[int, int]]:
        """Which way around the ring the pocket behind (pc, pd) lies.

        None means both directions hit doors or other contacts, so the
        chord has no pocket behind it at all.
        """
        fwd = not self.busy_between(pc, pd)
        rev = not self.busy_between(pd, pc)
        if fwd and rev:
            raise GeometryError("pocket span is ambiguous")
        if fwd:
            return (pc, pd)
        if rev:
            return (pd, pc)
        return None


class _CorridorBuilder:
    def __init__(self, tri: Triangulation):
        self.tri = tri
        self.pts = tri.points
        self.bays: list[Bay] = []
        self.canals: list[Canal] = []
        self.chains: list[list[Point]] = []
        self.paths: list[CorridorPath] = []
        self.ocean_area = 0.0

    # -- generic helpers ---------------------------------------------------

    def add_chain(self, idx_chain: Sequence[int], reverse: bool) -> None:
        """Store a boundary polyline, flipped to keep the ocean on the right."""
        pts = [self.pts[i] for i in idx_chain]
        if reverse:
            pts.reverse()
        if len(pts) >= 2:
            self.chains.append(pts)

    def bay_from_walk(self, ring: list[int], pc: int, pd: int
                      ) -> Optional[Bay]:
        idx = _cyclic_slice(list(range(len(ring))), pc, pd)
        pts = [self.pts[ring[i]] for i in idx]
        # drop zero-width spikes at either end, left behind when the
        # geodesic grazes a straight run of wall before jumping the pocket
        while len(pts) > 2 and G.orient(pts[-1], pts[0], pts[1]) == 0.0:
            pts.pop(0)
        while len(pts) > 2 and G.orient(pts[0], pts[-1], pts[-2]) == 0.0:
            pts.pop()
        if len(pts) == 2:
            return None  # the pocket closed up into a sliver
        if G.polygon_area(pts) <= 0:
            raise GeometryError("bay ring is not counterclockwise")
        bay = Bay(pts)
        self.bays.append(bay)
        return bay

    def _wall_chains(self, ring: list[int], span_q: list[int],
                     spans: list[tuple[int, int]]) -> None:
        """Wall pieces of a ring span that face the ocean directly."""
        m = len(ring)
        exclude: set[int] = set()
        for u, w in spans:
            inner = _cyclic_slice(list(range(m)), u, w)[1:-1]
            exclude.update(inner)
        run: list[int] = []
        for q in span_q:
            if q in exclude:
                if len(run) >= 2:
                    self.add_chain([ring[i] for i in run], reverse=True)
                run = []
            else:
                run.append(q)
        if len(run) >= 2:
            self.add_chain([ring[i] for i in run], reverse=True)

    # -- per-corridor geometry ----------------------------------------------

    def process(self, corridor: Corridor) -> None:
        tri = self.tri
        ring = corridor.ring
        m = len(ring)
        pos_of: dict[int, list[int]] = {}
        for q, vid in enumerate(ring):
            pos_of.setdefault(vid, []).append(q)
        dbl = next((vid for vid, qs in pos_of.items() if len(qs) > 1), None)
        door1, door2 = corridor.doors

        def door_pos(door: tuple[int, int]) -> int:
            u, w = door
            for q in range(m):
                r = (q + 1) % m
                if (ring[q] == u and ring[r] == w) \
                        or (ring[q] == w and ring[r] == u):
                    return q
            raise GeometryError("door edge is not on the corridor ring")

        i1 = door_pos(door1)
        i2 = door_pos(door2)
        b, e = ring[i1], ring[(i1 + 1) % m]
        f, a = ring[i2], ring[(i2 + 1) % m]

        portals = _sleeve_portals(tri, corridor.chain)
        path1 = funnel_path(self.pts, b, a, portals)
        path1.reverse()  # a -> b, parallel to the ring direction
        path2 = funnel_path(self.pts, e, f, portals)

        all_q = list(range(m))
        busy = {q for vid in set(path1) | set(path2) for q in pos_of[vid]}
        busy |= {i1, (i1 + 1) % m, i2, (i2 + 1) % m}
        ctx = _RingCtx(self.pts, ring, m, pos_of, sorted(busy),
                       set(_cyclic_slice(all_q, (i2 + 1) % m, i1)),
                       set(_cyclic_slice(all_q, (i1 + 1) % m, i2)),
                       i1, i2, dbl)

        common = set(path1) & set(path2)
        if dbl is not None or not common:
            # a self-touching corridor is never treated as closed: its
            # doors meet at the doubled vertex, so the wavefront slips
            # past the waist through the junctions and floods the wrap;
            # geodesics may graze that vertex without pinching anything
            self.process_open(corridor, ctx, path1, path2)
        else:
            self.process_closed(corridor, ctx, path1, path2, common)

    def process_open(self, corridor: Corridor, ctx: _RingCtx,
                     path1: list[int], path2: list[int]) -> None:
        ring, m = ctx.ring, ctx.m
        pos1 = ctx.line_positions(path1, (ctx.i2 + 1) % m, ctx.i1)
        pos2 = ctx.line_positions(path2, (ctx.i1 + 1) % m, ctx.i2)
        corridor.hourglass = Hourglass(True, path1, path2)
        spans: list[tuple[int, int]] = []
        _, bay_area = self.collect_pockets(
            ctx, [(path1, pos1), (path2, pos2)], None, None, spans)
        if ctx.doubled is None:
            self.ocean_area += G.polygon_area(
                [self.pts[i] for i in path1] + [self.pts[i] for i in path2])
            self.add_chain(path1, reverse=True)
            self.add_chain(path2, reverse=True)
        else:
            # the corridor wraps all the way around an obstacle, so the
            # strip between the geodesics is no polygon; everything but
            # the pockets joins the ocean, and the ocean is bounded by
            # the walls themselves rather than by the geodesics
            self.ocean_area += G.polygon_area(
                [self.pts[v] for v in ring]) - bay_area
            all_q = list(range(m))
            for span_q in (_cyclic_slice(all_q, (ctx.i2 + 1) % m, ctx.i1),
                           _cyclic_slice(all_q, (ctx.i1 + 1) % m, ctx.i2)):
                self._wall_chains(ring, span_q, spans)

    def process_closed(self, corridor: Corridor, ctx: _RingCtx,
                       path1: list[int], path2: list[int], common: set
                       ) -> None:
        ring, m = ctx.ring, ctx.m
        in1 = [k for k, v in enumerate(path1) if v in common]
        in2 = [k for k, v in enumerate(path2) if v in common]
        if in1 != list(range(in1[0], in1[-1] + 1)) \
                or in2 != list(range(in2[0], in2[-1] + 1)):
            raise GeometryError("geodesics share a disconnected portion")
        mid1 = path1[in1[0]:in1[-1] + 1]          # y .. x along path1
        mid2 = path2[in2[0]:in2[-1] + 1]          # x .. y along path2
        if mid1 != mid2[::-1]:
            if mid1 == mid2:
                raise GeometryError("geodesics traverse the shared portion "
                                    "in the same direction")
            raise GeometryError("shared geodesic portions disagree")
        x = mid1[-1]
        y = mid1[0]
        # funnel sides: at door one (b, e) the apex is x; at door two, y
        side_xb = path1[in1[-1]:]                  # x .. b
        side_ay = path1[:in1[0] + 1]               # a .. y
        side_ex = path2[:in2[0] + 1]               # e .. x
        side_yf = path2[in2[-1]:]                  # y .. f

        hg = Hourglass(False, path1, path2,
                       corridor_path=mid2, apex1=x, apex2=y,
                       funnel_sides=[side_xb, side_ex, side_ay, side_yf])
        corridor.hourglass = hg

        # funnel polygons: door + the two side portions
        f1 = [self.pts[i] for i in side_xb] + [self.pts[i] for i in side_ex[:-1]]
        f2 = [self.pts[i] for i in side_ay] + [self.pts[i] for i in side_yf[1:]]
        self.ocean_area += G.polygon_area(f1) + G.polygon_area(f2)

        for side in (side_xb, side_ay, side_ex, side_yf):
            self.add_chain(side, reverse=True)

        # only simple rings reach here, so every position is unique
        x_q = ctx.pos_of[x][0]
        y_q = ctx.pos_of[y][0]
        sides = [(side_xb, ctx.line_positions(side_xb, x_q, ctx.i1)),
                 (side_ex, ctx.line_positions(side_ex, (ctx.i1 + 1) % m, x_q)),
                 (side_ay, ctx.line_positions(side_ay, (ctx.i2 + 1) % m, y_q)),
                 (side_yf, ctx.line_positions(side_yf, y_q, ctx.i2))]
        spans: list[tuple[int, int]] = []
        gates, _ = self.collect_pockets(ctx, sides, x, y, spans)
        if len(gates) != 2:
            raise GeometryError("closed corridor lacks a gate at an apex")
        if x == y:
            # both gates hang off the single shared apex; their order is
            # immaterial because the canal cut treats them alike
            gate_x, gate_y = gates
        else:
            gate_x = next((g for g in gates if ring[g[0]] == x), None)
            gate_y = next((g for g in gates if ring[g[0]] == y), None)
            if gate_x is None or gate_y is None:
                raise GeometryError("closed corridor lacks a gate at an apex")

        self.build_canal(ring, gate_x, gate_y, mid2)

    def collect_pockets(self, ctx: _RingCtx,
                        lines: list[tuple[list[int], list[int]]],
                        x: Optional[int], y: Optional[int],
                        spans_out: list[tuple[int, int]]
                        ) -> tuple[list[tuple[int, int]], float]:
        """Pockets behind geodesic chords; gate chords at the apices.

        Gates come back as (apex position, far position) pairs; the float
        is the total area of the bays carved out along the way.
        """
        ring, m = ctx.ring, ctx.m
        gates: list[tuple[int, int]] = []
        area = 0.0
        for line, lpos in lines:
            for k in range(len(line) - 1):
                c, d = line[k], line[k + 1]
                pc, pd = lpos[k], lpos[k + 1]
                same = ((pc in ctx.side1_pos and pd in ctx.side1_pos)
                        or (pc in ctx.side2_pos and pd in ctx.side2_pos))
                if not same and (c in (x, y) or d in (x, y)):
                    gate = (pc, pd) if c in (x, y) else (pd, pc)
                    if gate not in gates:
                        gates.append(gate)
                    continue
                if (pc + 1) % m == pd or (pd + 1) % m == pc:
                    continue  # the geodesic runs along the wall here
                span = ctx.pocket_span(pc, pd)
                if span is None:
                    if ctx.doubled is None:
                        raise GeometryError(
                            "geodesic chord with no pocket behind it")
                    continue  # a chord across the wrapped part of the ocean
                bay = self.bay_from_walk(ring, span[0], span[1])
                if bay is not None:
                    area += bay.area
                    spans_out.append(span)
        return gates, area

    def build_canal(self, ring: list[int], gate_x: tuple[int, int],
                    gate_y: tuple[int, int], mid: list[int]) -> None:
        m = len(ring)
        piece = list(range(m))
        for gate, other in ((gate_x, gate_y), (gate_y, gate_x)):
            try:
                iu = piece.index(gate[0])
                iv = piece.index(gate[1])
            except ValueError as exc:
                raise GeometryError("canal gate endpoint missing from the "
                                    "corridor piece") from exc
            lo, hi = min(iu, iv), max(iu, iv)
            piece_a = piece[lo:hi + 1]
            piece_b = piece[hi:] + piece[:lo + 1]
            # keep whichever half carries the other gate; when that gate
            # hangs off this very cut, its far endpoint settles the choice
            want = other[0]
            in_a, in_b = want in piece_a, want in piece_b
            if in_a and in_b:
                want = other[1]
                in_a, in_b = want in piece_a, want in piece_b
                if in_a and in_b:
                    raise GeometryError("canal degenerates to its gates")
            piece = piece_a if in_a else piece_b
        pts = [self.pts[ring[q]] for q in piece]
        if G.polygon_area(pts) <= 0:
            raise GeometryError("canal ring is not counterclockwise")
        # the two chord edges of the final piece are exactly the gates
        gx = (self.pts[ring[gate_x[0]]], self.pts[ring[gate_x[1]]])
        gy = (self.pts[ring[gate_y[0]]], self.pts[ring[gate_y[1]]])
        path_pts = [self.pts[i] for i in mid]
        canal = Canal(pts, (gx, gy), (gx[0], gy[0]), path_pts)
        self.canals.append(canal)
        self.paths.append(CorridorPath(path_pts[0], path_pts[-1],
                                       path_pts, canal.path_length))


def build_corridor_structure(tri: Triangulation) -> CorridorStructure:
    """Decompose the triangulated free space around its dual graph."""
    nbrs = tri.tri_neighbors()
    nt = len(tri.triangles)
    deg = [len(x) for x in nbrs]
    alive = [True] * nt
    stack = [t for t in range(nt) if deg[t] <= 1]
    while stack:
        t = stack.pop()
        if not alive[t] or deg[t] > 1:
            continue
        alive[t] = False
        for u in nbrs[t]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] <= 1:
                    stack.append(u)

    live = [t for t in range(nt) if alive[t]]
    junctions = [t for t in live if deg[t] >= 3]
    builder = _CorridorBuilder(tri)

    if not junctions:
        return _structure_without_junctions(tri, live, builder)

    seen: set[tuple[int, tuple[int, int]]] = set()
    corridors: list[Corridor] = []
    for j in junctions:
        for c in nbrs[j]:
            if not alive[c]:
                continue
            door1 = _shared_edge(tri, j, c)
            if (j, door1) in seen:
                continue
            if deg[c] >= 3:
                seen.add((j, door1))
                seen.add((c, door1))
                corridors.append(Corridor((j, c), (door1, door1),
                                          [], set(), [], None))
                continue
            chain = []
            prev, cur = j, c
            while deg[cur] == 2:
                chain.append(cur)
                step = [u for u in nbrs[cur] if alive[u] and u != prev]
                if len(step) != 1:
                    raise GeometryError("corridor walk lost its direction")
                prev, cur = cur, step[0]
            j2 = cur
            door2 = _shared_edge(tri, chain[-1], j2)
            seen.add((j, door1))
            seen.add((j2, door2))

            region = set(chain)
            flood = list(chain)
            while flood:
                t = flood.pop()
                for u in nbrs[t]:
                    # pockets are the peeled trees hanging off the chain;
                    # anything still alive belongs to another corridor or
                    # to a junction and stays out
                    if not alive[u] and u not in region:
                        region.add(u)
                        flood.append(u)
            ring = _region_ring(tri, region)
            corridors.append(Corridor((j, j2), (door1, door2),
                                      chain, region, ring, None))

    for cor in corridors:
        if cor.chain:
            builder.process(cor)

    for j in junctions:
        a, b, c = tri.triangles[j]
        builder.ocean_area += G.orient(tri.points[a], tri.points[b],
                                       tri.points[c]) * 0.5
        for u, v in ((a, b), (b, c), (c, a)):
            if frozenset((u, v)) in tri.constrained:
                builder.add_chain([u, v], reverse=True)

    return CorridorStructure(tri, junctions, corridors, builder.bays,
                             builder.canals, builder.chains, builder.paths,
                             builder.ocean_area)


def _structure_without_junctions(tri: Triangulation, live: list[int],
                                 builder: _CorridorBuilder
                                 ) -> CorridorStructure:
    """No junctions: at most one enclosed boundary feature.

    Either the dual graph was a tree (nothing enclosed: the whole free
    space is ocean) or one cycle survived around a single obstacle, whose
    convex hull then bounds the ocean and whose hull pockets become bays.
    """
    tags = sorted({t for t in tri.point_ring if t >= 0})
    box_pts = [p for p, t in zip(tri.points, tri.point_ring) if t == -1]
    if live and len(tags) > 1:
        raise GeometryError("junction-free dual with several obstacles")

    chains: list[list[Point]] = []
    # the box ring is stored counterclockwise (free space on its left);
    # flip it so every stored chain keeps the ocean on the right
    chains.extend(_split_ring_at_extremes(list(reversed(box_pts))))
    bays: list[Bay] = []
    if live and tags:
        hole = [p for p, t in zip(tri.points, tri.point_ring) if t == tags[0]]
        ccw_ring = list(reversed(hole))  # holes are stored clockwise
        hull = G.convex_hull(ccw_ring)
        idx = {p: i for i, p in enumerate(ccw_ring)}
        n = len(ccw_ring)
        for k in range(len(hull)):
            p, q = hull[k], hull[(k + 1) % len(hull)]
            ip, iq = idx[p], idx[q]
            if (ip + 1) % n == iq:
                continue
            walk = _cyclic_slice(ccw_ring, ip, iq)
            ring = list(reversed(walk))
            if G.polygon_area(ring) <= 0:
                raise GeometryError("hull pocket is not counterclockwise")
            bays.append(Bay(ring))
        chains.extend(_split_ring_at_extremes(hull))

    ocean = tri.area() - sum(b.area for b in bays)
    return CorridorStructure(tri, [], [], bays, [], chains, [], ocean)
