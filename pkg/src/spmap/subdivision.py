"""Quadtree subdivisions that steer wavefront propagation.

Two builds share one tree.  ``build_point_subdivision`` covers a square
around a point set with a compressed quadtree whose leaves separate the
points, then chops each boundary fragment between two adjacent leaves
into pieces graded toward the points; every piece becomes a *transparent
edge* that knows a small neighbourhood of cells (its well-covering
region) kept far away, relative to edge lengths, from everything outside
it.  ``insert_obstacles`` re-clips those edges against opaque chains,
splits each occupied cell vertically through its point so the point
touches transparent edges, and fills in the input/output edge sets that
the propagation loop schedules on.

The root square has a power-of-two side, so every grid line is a dyadic
float computed from one integer; shared boundaries compare equal bit for
bit, adjacency needs no epsilons, and the tiling audit is exact.
"""
from __future__ import annotations

import bisect
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import geometry as G
from .config import Config, DEFAULT_CONFIG
from .errors import GeometryError, InvalidInput
from .scene import Scene

Point = tuple[float, float]

# Integer resolution of grid coordinates.  Leaves never go deeper than the
# configured depth cap (well below this), so products stay exact in floats.
_FINE = 58

# Root placement offsets, as fractions of the root side.  Deliberately
# awkward decimals: no input coordinate of any sane scene lands exactly on
# a grid line, and when one does we retry with the next pair.
_OFFSETS = (
    (0.01378131, 0.00794623),
    (0.00613752, 0.01931742),
    (0.01742971, 0.00286413),
    (0.00431529, 0.01157864),
    (0.01921537, 0.01673258),
    (0.00957214, 0.00521376),
    (0.01163842, 0.01842179),
    (0.00284691, 0.00968427),
)


class _OnGrid(Exception):
    """A point fell exactly on a grid line; retry with a shifted root."""


class _NeedSplit(Exception):
    """Well-covering could not be satisfied; split these leaves and rebuild."""

    def __init__(self, keys: Iterable[tuple[int, int, int]]):
        super().__init__("refinement requested")
        self.keys = set(keys)


# ---------------------------------------------------------------------------
# quadtree
# ---------------------------------------------------------------------------


class _LeafTree:
    """Power-of-two quadtree over a square root box.

    Leaf keys are ``(level, ix, iy)``.  Integer coordinates live at
    resolution ``2**_FINE`` relative to the root corner.
    """

    __slots__ = ("rx", "ry", "rs", "unit", "max_depth", "leaves", "internal",
                 "points_in", "dead")

    def __init__(self, rx: float, ry: float, rs: float, max_depth: int):
        self.rx = rx
        self.ry = ry
        self.rs = rs
        self.unit = rs / float(1 << _FINE)
        self.max_depth = max_depth
        self.leaves: set[tuple[int, int, int]] = {(0, 0, 0)}
        self.internal: set[tuple[int, int, int]] = set()
        self.points_in: dict[tuple[int, int, int], list[Point]] = {}
        # Split bookkeeping lets callers cache work keyed by leaf: a cached
        # result stays valid while none of its leaves appear in ``dead``.
        self.dead: set[tuple[int, int, int]] = set()

    def copy(self) -> "_LeafTree":
        dup = _LeafTree(self.rx, self.ry, self.rs, self.max_depth)
        dup.leaves = set(self.leaves)
        dup.internal = set(self.internal)
        dup.points_in = {k: list(v) for k, v in self.points_in.items()}
        dup.dead = set(self.dead)
        return dup

    # coordinates ----------------------------------------------------------

    def fx(self, ci: int) -> float:
        return self.rx + ci * self.unit

    def fy(self, ci: int) -> float:
        return self.ry + ci * self.unit

    def ibox(self, key: tuple[int, int, int]) -> tuple[int, int, int, int]:
        lvl, ix, iy = key
        sh = _FINE - lvl
        return (ix << sh, iy << sh, (ix + 1) << sh, (iy + 1) << sh)

    def fbox(self, key: tuple[int, int, int]) -> tuple[float, float, float, float]:
        x0, y0, x1, y1 = self.ibox(key)
        return (self.fx(x0), self.fy(y0), self.fx(x1), self.fy(y1))

    def size(self, key: tuple[int, int, int]) -> float:
        return self.rs / float(1 << key[0])

    # structure ------------------------------------------------------------

    def split(self, key: tuple[int, int, int]) -> list[tuple[int, int, int]]:
        lvl, ix, iy = key
        if lvl + 1 > self.max_depth:
            raise GeometryError("quadtree depth exhausted; points nearly coincide")
        self.leaves.discard(key)
        self.internal.add(key)
        kids = [(lvl + 1, (ix << 1) + dx, (iy << 1) + dy)
                for dy in (0, 1) for dx in (0, 1)]
        self.leaves.update(kids)
        self.dead.add(key)
        pts = self.points_in.pop(key, None)
        if pts:
            sh = _FINE - lvl - 1
            mx = self.fx(((ix << 1) + 1) << sh)
            my = self.fy(((iy << 1) + 1) << sh)
            for p in pts:
                if p[0] == mx or p[1] == my:
                    raise _OnGrid()
                child = (lvl + 1,
                         (ix << 1) + (1 if p[0] > mx else 0),
                         (iy << 1) + (1 if p[1] > my else 0))
                self.points_in.setdefault(child, []).append(p)
        return kids

    def locate(self, p: Point, *, strict: bool = False) -> tuple[int, int, int]:
        if not (self.rx <= p[0] <= self.rx + self.rs
                and self.ry <= p[1] <= self.ry + self.rs):
            raise GeometryError("point outside the subdivision root square")
        key = (0, 0, 0)
        while key in self.internal:
            lvl, ix, iy = key
            sh = _FINE - lvl - 1
            mx = self.fx(((ix << 1) + 1) << sh)
            my = self.fy(((iy << 1) + 1) << sh)
            if strict and (p[0] == mx or p[1] == my):
                raise _OnGrid()
            key = (lvl + 1,
                   (ix << 1) + (1 if p[0] > mx else 0),
                   (iy << 1) + (1 if p[1] > my else 0))
        return key

    def insert_points(self, pts: Sequence[Point]) -> None:
        for p in pts:
            if not (self.rx < p[0] < self.rx + self.rs
                    and self.ry < p[1] < self.ry + self.rs):
                raise _OnGrid()
            key = self.locate(p, strict=True)
            self.points_in.setdefault(key, []).append(p)
        work = deque(k for k, v in self.points_in.items() if len(v) > 1)
        while work:
            key = work.popleft()
            if key not in self.leaves or len(self.points_in.get(key, ())) < 2:
                continue
            for child in self.split(key):
                if len(self.points_in.get(child, ())) > 1:
                    work.append(child)

    def window_leaves(self, wx0: int, wy0: int, wx1: int, wy1: int
                      ) -> list[tuple[int, int, int]]:
        """Leaves whose closed integer box meets the closed window."""
        out = []
        stack = [(0, 0, 0)]
        while stack:
            k = stack.pop()
            x0, y0, x1, y1 = self.ibox(k)
            if x0 > wx1 or x1 < wx0 or y0 > wy1 or y1 < wy0:
                continue
            if k in self.internal:
                lvl, ix, iy = k
                stack.extend((lvl + 1, (ix << 1) + dx, (iy << 1) + dy)
                             for dy in (0, 1) for dx in (0, 1))
            elif k in self.leaves:
                out.append(k)
        return out

def _isolate_points(tree: _LeafTree) -> None:
    """Shrink each point's leaf to well under its nearest-point distance.

    Separation regions reach about four edge lengths out, so a leaf at
    one sixteenth of the gap keeps every region around one point clear of
    the others.  Doing this up front saves whole rebuild rounds that
    would otherwise discover the same splits one failure at a time.
    """
    pts = [p for lst in tree.points_in.values() for p in lst]
    for p in pts:
        gap = min((max(abs(p[0] - q[0]), abs(p[1] - q[1]))
                   for q in pts if q is not p), default=None)
        if gap is None:
            return
        limit = gap / 16.0
        key = tree.locate(p)
        while tree.size(key) > limit:
            tree.split(key)
            key = tree.locate(p)


def _make_root(bbox: tuple[float, float, float, float], attempt: int
               ) -> tuple[float, float, float]:
    x0, y0, x1, y1 = bbox
    span = max(x1 - x0, y1 - y0, 1e-9)
    # Eight times the span: coarse cells near the input hull need room for
    # their separation neighbourhoods to stop growing before the boundary,
    # otherwise the whole tree refines uniformly to compensate.
    rs = 2.0 ** (math.ceil(math.log2(span * 1.30)) + 3)
    ox, oy = _OFFSETS[attempt % len(_OFFSETS)]
    rx = (x0 + x1) / 2.0 - rs / 2.0 + ox * rs
    ry = (y0 + y1) / 2.0 - rs / 2.0 + oy * rs
    return rx, ry, rs


# ---------------------------------------------------------------------------
# domain carrier
# ---------------------------------------------------------------------------


@dataclass
class Domain:
    """Opaque geometry that obstacle insertion clips against.

    ``chains`` are open polylines treated as walls (both sides opaque);
    ``inside`` classifies points of the carrier region; ``area`` is the
    free area when the caller knows it (used only by audits).
    ``corridor_paths`` lists ``(endpoint, path_length)`` pairs for the
    edge-splitting rule applied at funnel path endpoints.
    """

    chains: list[list[Point]]
    bbox: tuple[float, float, float, float]
    inside: Callable[[Point], bool]
    area: Optional[float] = None
    extra_points: list[Point] = field(default_factory=list)
    corridor_paths: list[tuple[Point, float]] = field(default_factory=list)

    @staticmethod
    def from_scene(scene: Scene) -> "Domain":
        chains: list[list[Point]] = []
        for ring in list(scene.obstacles) + [scene.box_ring()]:
            chains.extend(_monotone_pieces(ring))
        return Domain(
            chains=chains,
            bbox=scene.bbox,
            inside=lambda p: scene.in_free_space(p),
            area=scene.free_area,
            extra_points=[scene.source],
        )


def _monotone_pieces(ring: Sequence[Point]) -> list[list[Point]]:
    """Split a ring at its rectilinear extremes into open polylines."""
    idxs = G.rectilinear_extreme_indices(ring)
    n = len(ring)
    if len(idxs) == 1:
        i = idxs[0]
        return [[ring[(i + k) % n] for k in range(n + 1)]]
    out = []
    for a, b in zip(idxs, idxs[1:] + [idxs[0] + n]):
        piece = [ring[k % n] for k in range(a, b + 1)]
        out.append(piece)
    return out


def scene_vertex_set(scene: Scene,
                     extra: Sequence[Point] = ()) -> list[Point]:
    """Rectilinear extreme vertices of the obstacles, source, and extras.

    Deduplicated, order-stable.  This is the point set the plane stage is
    built on when the free-space stage will insert this scene's chains
    (build with ``cover=scene.bbox`` so the box walls fit inside the
    root).  Box corners are left out: no geodesic ever bends around one
    from inside, and their vertical lines are opaque on both sides.
    """
    out: list[Point] = []
    seen: set[Point] = set()

    def push(p: Point) -> None:
        if p not in seen:
            seen.add(p)
            out.append(p)

    for ring in scene.obstacles:
        for i in G.rectilinear_extreme_indices(ring):
            push(ring[i])
    push(scene.source)
    for p in extra:
        push(p)
    return out


# ---------------------------------------------------------------------------
# subdivision data model
# ---------------------------------------------------------------------------


@dataclass
class SubdivisionCell:
    id: int
    key: tuple[int, int, int]
    box: tuple[float, float, float, float]
    edge_ids: list[int] = field(default_factory=list)
    chain_fragments: list[tuple[int, list[Point]]] = field(default_factory=list)
    contained_vertex: Optional[Point] = None
    side: Optional[str] = None          # "L"/"R" for half-cells, None otherwise

    @property
    def boundary(self) -> list[tuple]:
        """Transparent edges then opaque chain fragments, as tagged entries."""
        items: list[tuple] = [("edge", eid) for eid in self.edge_ids]
        items.extend(("chain", ci, pts) for ci, pts in self.chain_fragments)
        return items


@dataclass
class TransparentEdge:
    id: int
    a: Point
    b: Point
    cells: tuple[int, int]
    well_covering: list[int] = field(default_factory=list)
    input_set: list[int] = field(default_factory=list)
    output_set: list[int] = field(default_factory=list)
    covertime: float = math.inf
    endpoint_distances: list[float] = field(default_factory=lambda: [math.inf, math.inf])
    anchor: Optional[Point] = None

    @property
    def length(self) -> float:
        return abs(self.b[0] - self.a[0]) + abs(self.b[1] - self.a[1])

    @property
    def vertical(self) -> bool:
        return self.a[0] == self.b[0]

    @property
    def midpoint(self) -> Point:
        return ((self.a[0] + self.b[0]) / 2.0, (self.a[1] + self.b[1]) / 2.0)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return (self.a[0], self.a[1], self.b[0], self.b[1])


@dataclass
class ConformingSubdivision:
    """A built subdivision: cells, transparent edges, and point location."""

    stage: str                          # "plane" or "free"
    root: tuple[float, float, float]
    cells: list[SubdivisionCell]
    edges: list[TransparentEdge]
    points: list[Point]
    chains: list[list[Point]]
    domain: Optional[Domain] = None
    _tree: _LeafTree = None
    _leaf_cell: dict = field(default_factory=dict)
    _split_x: dict = field(default_factory=dict)
    _vertical_status: dict = field(default_factory=dict)

    def locate(self, p: Point) -> int:
        """Cell id containing p (ties resolved toward larger coordinates)."""
        key = self._tree.locate(p)
        ids = self._leaf_cell[key]
        if len(ids) == 1:
            return ids[0]
        return ids[0] if p[0] < self._split_x[key] else ids[1]

    def cell_edges(self, cid: int) -> list[TransparentEdge]:
        return [self.edges[eid] for eid in self.cells[cid].edge_ids]

    def to_debug_json(self) -> dict:
        return {
            "stage": self.stage,
            "root": list(self.root),
            "cells": [
                {
                    "id": c.id,
                    "box": list(c.box),
                    "vertex": list(c.contained_vertex) if c.contained_vertex else None,
                    "edges": list(c.edge_ids),
                    "chains": [[ci, [list(p) for p in pts]]
                               for ci, pts in c.chain_fragments],
                }
                for c in self.cells
            ],
            "edges": [
                {
                    "id": e.id,
                    "a": list(e.a),
                    "b": list(e.b),
                    "cells": list(e.cells),
                    "covering": len(e.well_covering),
                    "input": len(e.input_set),
                    "output": len(e.output_set),
                }
                for e in self.edges
            ],
        }


# ---------------------------------------------------------------------------
# shared machinery: side fragments, well-covering, io sets
# ---------------------------------------------------------------------------


def _side_fragments(tree: _LeafTree
                    ) -> list[tuple[str, tuple, tuple, int, int, int]]:
    """Shared boundary pieces between adjacent leaves, in integer coords.

    Returns tuples ``(axis, key_low, key_high, lo, hi, fix)`` where axis
    "v" means a vertical piece at x=fix between a left and a right leaf.
    Each piece is emitted exactly once.
    """
    by_x0: dict[int, list[tuple[int, int, tuple]]] = {}
    by_y0: dict[int, list[tuple[int, int, tuple]]] = {}
    for k in tree.leaves:
        x0, y0, x1, y1 = tree.ibox(k)
        by_x0.setdefault(x0, []).append((y0, y1, k))
        by_y0.setdefault(y0, []).append((x0, x1, k))
    for lst in by_x0.values():
        lst.sort()
    for lst in by_y0.values():
        lst.sort()

    frags = []
    for k in sorted(tree.leaves):
        x0, y0, x1, y1 = tree.ibox(k)
        for lst, lo_k, hi_k, axis in ((by_x0.get(x1), y0, y1, "v"),
                                      (by_y0.get(y1), x0, x1, "h")):
            if not lst:
                continue
            starts = [t[0] for t in lst]
            i = bisect.bisect_right(starts, lo_k) - 1
            if i < 0:
                i = 0
            while i < len(lst) and lst[i][0] < hi_k:
                nlo, nhi, nk = lst[i]
                lo = max(lo_k, nlo)
                hi = min(hi_k, nhi)
                if hi > lo:
                    fix = x1 if axis == "v" else y1
                    frags.append((axis, k, nk, lo, hi, fix))
                i += 1
    frags.sort(key=lambda t: (t[0], t[5], t[3], t[1]))
    return frags


def _graded_cuts(tree: _LeafTree, axis: str, fix_i: int, lo_i: int,
                 hi_i: int, floor_i: int, anchors: Sequence[Point]
                 ) -> list[int]:
    """Interior cut positions grading one side fragment toward the input.

    A piece may be at most a quarter of its distance to the nearest
    input point, floored at half the finer incident leaf side, so pieces
    shrink geometrically toward fine structure and stay whole in open
    space.  Cells can then change size abruptly while every separation
    region still finds boundary pieces short enough, relative to their
    distance, to stop on.  Cuts are dyadic midpoints, so both incident
    cells derive the identical subdivision.
    """
    if axis == "v":
        fixf = tree.fx(fix_i)
        tof = tree.fy
        perp = 0
    else:
        fixf = tree.fy(fix_i)
        tof = tree.fx
        perp = 1
    lof, hif = tof(lo_i), tof(hi_i)
    reach = 4.0 * (hif - lof)
    near = []
    for p in anchors:
        dperp = abs(p[perp] - fixf)
        if dperp >= reach:
            continue
        o = p[1 - perp]
        d = math.hypot(dperp, max(lof - o, o - hif, 0.0))
        if d < reach:
            near.append((p[perp], o))
    if not near:
        return []
    floorf = floor_i * tree.unit
    cuts: list[int] = []
    stack = [(lo_i, hi_i)]
    while stack:
        u, w = stack.pop()
        if w - u < 2:
            continue
        uf, wf = tof(u), tof(w)
        plen = wf - uf
        best = math.inf
        for a, o in near:
            dperp = abs(a - fixf)
            d = math.hypot(dperp, max(uf - o, o - wf, 0.0))
            if d < best:
                best = d
        if plen > max(0.25 * best, floorf):
            m = (u + w) >> 1
            cuts.append(m)
            stack.append((u, m))
            stack.append((m, w))
    cuts.sort()
    return cuts


def _edge_distance(e: TransparentEdge, f: TransparentEdge) -> float:
    ax0, ay0, ax1, ay1 = e.bbox
    bx0, by0, bx1, by1 = f.bbox
    dx = max(0.0, bx0 - ax1, ax0 - bx1)
    dy = max(0.0, by0 - ay1, ay0 - by1)
    return math.hypot(dx, dy)


def _separated(e: TransparentEdge, f: TransparentEdge) -> bool:
    need = 2.0 * max(e.length, f.length)
    return _edge_distance(e, f) >= need * (1.0 - 1e-12)


def _grow_well_covering(cells: list[SubdivisionCell],
                        edges: list[TransparentEdge],
                        touch: Callable[[int], list[int]],
                        config: Config,
                        cache: Optional[dict] = None,
                        dead: Optional[set] = None) -> None:
    """Grow U(e) around every edge until its boundary edges are separated.

    The boundary of U(e) consists of the edges with exactly one incident
    cell inside; each must sit at distance at least twice the longer of
    the two lengths.  Growth that exhausts its budget, or that would pull
    a second input point into the region, asks for the offending leaves
    to be split instead; all requests from one sweep are batched.

    ``cache`` (keyed by edge endpoints, storing regions as leaf keys)
    carries finished regions across rebuild rounds: a region stays valid
    while none of its leaves has been split, because refinement elsewhere
    only subdivides boundary edges, which keeps them separated, and
    points never move.
    """
    aud = config.audits
    wanted: set = set()
    by_key = None
    if cache is not None:
        by_key = {(c.key, c.side): c.id for c in cells}
    for e in edges:
        ckey = (e.a, e.b)
        if cache is not None:
            hit = cache.get(ckey)
            if hit is not None:
                leaf_keys, cell_keys = hit
                if dead.isdisjoint(leaf_keys):
                    e.well_covering = sorted(by_key[k] for k in cell_keys)
                    continue
                del cache[ckey]
        covered = set(e.cells)
        rings = 0
        failed = False
        while True:
            bad = None
            seen = set()
            for cid in covered:
                for eid in cells[cid].edge_ids:
                    if eid in seen:
                        continue
                    seen.add(eid)
                    f = edges[eid]
                    inside = (f.cells[0] in covered) + (f.cells[1] in covered)
                    if inside == 1 and not _separated(e, f):
                        bad = f
                        break
                if bad is not None:
                    break
            if bad is None:
                marked = [cid for cid in covered
                          if cells[cid].contained_vertex is not None]
                if len({cells[cid].contained_vertex for cid in marked}) > 1:
                    wanted |= _leaf_keys(cells, e, None)
                    wanted |= {cells[cid].key for cid in marked}
                    failed = True
                break
            rings += 1
            grown: set[int] = set()
            for cid in covered:
                grown.update(touch(cid))
            grown -= covered
            if (not grown or rings > aud.max_well_cover_rings
                    or len(covered) + len(grown) > aud.max_well_cover_cells):
                wanted |= _leaf_keys(cells, e, bad)
                failed = True
                break
            covered |= grown
        e.well_covering = sorted(covered)
        if cache is not None and not failed:
            cache[ckey] = (frozenset(cells[c].key for c in covered),
                           tuple((cells[c].key, cells[c].side)
                                 for c in covered))
    if wanted:
        raise _NeedSplit(wanted)


def _leaf_keys(cells: list[SubdivisionCell], e: TransparentEdge,
               f: Optional[TransparentEdge]) -> set:
    keys = {cells[cid].key for cid in e.cells}
    if f is not None:
        keys |= {cells[cid].key for cid in f.cells}
    return keys


def _fill_io_sets(cells: list[SubdivisionCell],
                  edges: list[TransparentEdge],
                  config: Config) -> None:
    aud = config.audits
    reverse: dict[int, set[int]] = {e.id: set() for e in edges}
    for e in edges:
        covered = set(e.well_covering)
        found: set[int] = set()
        for cid in covered:
            for eid in cells[cid].edge_ids:
                f = edges[eid]
                inside = (f.cells[0] in covered) + (f.cells[1] in covered)
                if inside == 1:
                    found.add(eid)
        e.input_set = sorted(found)
        if len(e.input_set) > aud.max_io_set:
            raise GeometryError(
                f"input set of edge {e.id} has {len(e.input_set)} edges")
        for eid in found:
            reverse[eid].add(e.id)
    for e in edges:
        e.output_set = sorted(reverse[e.id] | set(e.input_set))
        if len(e.output_set) > aud.max_io_set:
            raise GeometryError(
                f"output set of edge {e.id} has {len(e.output_set)} edges")


def _touch_factory(tree: _LeafTree, cells: list[SubdivisionCell],
                   leaf_cell: dict) -> Callable[[int], list[int]]:
    cache: dict[int, list[int]] = {}

    def touch(cid: int) -> list[int]:
        got = cache.get(cid)
        if got is not None:
            return got
        cell = cells[cid]
        x0, y0, x1, y1 = tree.ibox(cell.key)
        out = []
        bx0, by0, bx1, by1 = cell.box
        for k in tree.window_leaves(x0, y0, x1, y1):
            for other in leaf_cell[k]:
                ob = cells[other].box
                if ob[0] <= bx1 and bx0 <= ob[2] and ob[1] <= by1 and by0 <= ob[3]:
                    out.append(other)
        cache[cid] = out
        return out

    return touch


# ---------------------------------------------------------------------------
# plane stage
# ---------------------------------------------------------------------------


def build_point_subdivision(points: Sequence[Point], *,
                            config: Config = DEFAULT_CONFIG,
                            cover: Optional[tuple[float, float, float, float]] = None
                            ) -> ConformingSubdivision:
    """Quadtree subdivision of the plane around a point set.

    Each point ends up strictly inside its own leaf; leaf boundaries are
    chopped into pieces graded toward the points, and every piece carries
    a well-covering region and input/output sets.  ``cover`` optionally
    widens the root square so later obstacle insertion fits inside it.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if len(set(pts)) != len(pts):
        raise InvalidInput("duplicate points in the subdivision vertex set")
    boxes = list(pts)
    if cover is not None:
        boxes.extend([(cover[0], cover[1]), (cover[2], cover[3])])
    if not boxes:
        boxes = [(0.0, 0.0), (1.0, 1.0)]
    bb = G.bbox_of(boxes)

    last: Optional[Exception] = None
    for attempt in range(len(_OFFSETS)):
        tree = _LeafTree(*_make_root(bb, attempt), config.audits.max_tree_depth)
        try:
            tree.insert_points(pts)
            _isolate_points(tree)
            cells, edges, leaf_cell = _plane_rounds(tree, config)
        except _OnGrid as exc:
            last = exc
            continue
        return ConformingSubdivision(
            stage="plane",
            root=(tree.rx, tree.ry, tree.rs),
            cells=cells,
            edges=edges,
            points=pts,
            chains=[],
            _tree=tree,
            _leaf_cell=leaf_cell,
        )
    raise GeometryError("could not place a quadtree grid off the input points") from last


def _plane_rounds(tree: _LeafTree, config: Config):
    aud = config.audits
    anchors = [p for lst in tree.points_in.values() for p in lst]
    cache: dict = {}
    for _ in range(aud.max_refine_rounds):
        cells, edges, leaf_cell = _plane_cells_edges(tree, anchors)
        touch = _touch_factory(tree, cells, leaf_cell)
        try:
            _grow_well_covering(cells, edges, touch, config,
                                cache=cache, dead=tree.dead)
        except _NeedSplit as ns:
            _apply_splits(tree, ns.keys)
            continue
        _fill_io_sets(cells, edges, config)
        return cells, edges, leaf_cell
    raise GeometryError("plane subdivision refinement did not converge")


def _apply_splits(tree: _LeafTree, keys: Iterable[tuple]) -> None:
    done = False
    for k in keys:
        if k in tree.leaves:
            tree.split(k)
            done = True
    if not done:
        raise GeometryError("refinement stalled: no splittable leaf")


def _plane_cells_edges(tree: _LeafTree, anchors: Sequence[Point]):
    cells: list[SubdivisionCell] = []
    leaf_cell: dict = {}
    for k in sorted(tree.leaves):
        pts = tree.points_in.get(k)
        box = tree.fbox(k)
        cells.append(SubdivisionCell(
            id=len(cells), key=k, box=box, side=box[2] - box[0],
            contained_vertex=pts[0] if pts else None))
        leaf_cell[k] = (cells[-1].id,)

    edges: list[TransparentEdge] = []
    for axis, ka, kb, lo, hi, fix in _side_fragments(tree):
        floor_i = 1 << (_FINE - max(ka[0], kb[0]) - 1)
        marks = [lo]
        marks.extend(_graded_cuts(tree, axis, fix, lo, hi, floor_i, anchors))
        marks.append(hi)
        for u, w in zip(marks, marks[1:]):
            if axis == "v":
                a = (tree.fx(fix), tree.fy(u))
                b = (tree.fx(fix), tree.fy(w))
            else:
                a = (tree.fx(u), tree.fy(fix))
                b = (tree.fx(w), tree.fy(fix))
            edges.append(TransparentEdge(
                id=len(edges), a=a, b=b,
                cells=(leaf_cell[ka][0], leaf_cell[kb][0])))
    for e in edges:
        cells[e.cells[0]].edge_ids.append(e.id)
        cells[e.cells[1]].edge_ids.append(e.id)
    return cells, edges, leaf_cell


def _separation_offenders(cells: list[SubdivisionCell],
                          edges: list[TransparentEdge],
                          pairs: Iterable[tuple[int, int]]
                          ) -> list[tuple[int, int]]:
    """Pairs among ``pairs`` that break the global separation property.

    An edge pair may be close only when one of them is interior to the
    other's well-covering region.  Regions certify this during growth:
    any segment leaving a region crosses a boundary edge that was kept
    two lengths away, so a full pair scan is redundant; this check is
    kept as an independent probe over a pair sample.
    """
    bad = []
    for i, j in pairs:
        e, f = edges[i], edges[j]
        if e.id == f.id:
            continue
        if _separated(e, f):
            continue
        if f.cells[0] in e.well_covering and f.cells[1] in e.well_covering:
            continue
        if e.cells[0] in f.well_covering and e.cells[1] in f.well_covering:
            continue
        bad.append((e.id, f.id))
    return bad


# ---------------------------------------------------------------------------
# free-space stage
# ---------------------------------------------------------------------------


def insert_obstacles(sub: ConformingSubdivision,
                     scene: Union[Scene, Domain], *,
                     config: Optional[Config] = None) -> ConformingSubdivision:
    """Clip a plane subdivision against opaque chains.

    Accepts either a scene (converted to its chain form) or a prepared
    ``Domain``.  The input subdivision is left untouched; the result is a
    free-space subdivision whose occupied cells are split vertically
    through their point so the point is incident to transparent edges.
    """
    if isinstance(scene, Scene):
        domain = Domain.from_scene(scene)
        cfg = config or scene.config
    else:
        domain = scene
        cfg = config or DEFAULT_CONFIG
    aud = cfg.audits

    known = set(sub.points)
    path_by_point: dict[Point, float] = {}
    for p, plen in domain.corridor_paths:
        if p not in known:
            raise InvalidInput("corridor path endpoint is not a subdivision vertex")
        path_by_point[p] = min(plen, path_by_point.get(p, math.inf))

    tree = sub._tree.copy()
    cache: dict = {}
    for _ in range(aud.max_refine_rounds):
        built = _free_build(tree, domain, path_by_point, cfg, cache)
        if isinstance(built, _NeedSplit):
            _apply_splits(tree, built.keys)
            continue
        cells, edges, leaf_cell, split_x, status = built
        return ConformingSubdivision(
            stage="free",
            root=(tree.rx, tree.ry, tree.rs),
            cells=cells,
            edges=edges,
            points=list(sub.points),
            chains=[list(c) for c in domain.chains],
            domain=domain,
            _tree=tree,
            _leaf_cell=leaf_cell,
            _split_x=split_x,
            _vertical_status=status,
        )
    raise GeometryError("free-space subdivision refinement did not converge")


def _param_point(a: Point, b: Point, t: float) -> Point:
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def _seg_box_clip(a: Point, b: Point,
                  box: tuple[float, float, float, float]
                  ) -> Optional[tuple[float, float]]:
    t0, t1 = 0.0, 1.0
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    for p, q in ((-dx, a[0] - box[0]), (dx, box[2] - a[0]),
                 (-dy, a[1] - box[1]), (dy, box[3] - a[1])):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            if r > t0:
                t0 = r
        else:
            if r < t0:
                return None
            if r < t1:
                t1 = r
    return (t0, t1)


def _chain_candidates(tree: _LeafTree, chains: list[list[Point]]
                      ) -> dict[tuple, list[tuple[int, int]]]:
    cand: dict[tuple, list[tuple[int, int]]] = {}
    for ci, chain in enumerate(chains):
        for si in range(len(chain) - 1):
            a, b = chain[si], chain[si + 1]
            stack = [(0, 0, 0)]
            while stack:
                k = stack.pop()
                if _seg_box_clip(a, b, tree.fbox(k)) is None:
                    continue
                if k in tree.internal:
                    lvl, ix, iy = k
                    stack.extend((lvl + 1, (ix << 1) + dx, (iy << 1) + dy)
                                 for dy in (0, 1) for dx in (0, 1))
                elif k in tree.leaves:
                    cand.setdefault(k, []).append((ci, si))
    return cand


def _line_cuts(fix: float, lo: float, hi: float, ax: int,
               segs: Iterable[tuple[Point, Point]]
               ) -> tuple[list[float], list[tuple[float, float]]]:
    """Crossing ordinates and blocked intervals of segments on a grid line.

    ``ax`` is the coordinate equal to ``fix`` (0 for a vertical line); the
    returned values live in the other coordinate, restricted to [lo, hi].
    """
    oy = 1 - ax
    cuts: list[float] = []
    blocks: list[tuple[float, float]] = []
    for p, q in segs:
        da = p[ax] - fix
        db = q[ax] - fix
        if da == 0.0 and db == 0.0:
            b0 = min(p[oy], q[oy])
            b1 = max(p[oy], q[oy])
            if b1 > lo and b0 < hi:
                blocks.append((max(b0, lo), min(b1, hi)))
        elif (da <= 0.0 <= db) or (db <= 0.0 <= da):
            y = p[oy] + (da / (da - db)) * (q[oy] - p[oy])
            if lo < y < hi:
                cuts.append(y)
    return cuts, blocks


def _free_intervals(lo: float, hi: float, cuts: list[float],
                    blocks: list[tuple[float, float]]
                    ) -> list[tuple[float, float]]:
    merged: list[tuple[float, float]] = []
    for b0, b1 in sorted(blocks):
        if merged and b0 <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b1))
        else:
            merged.append((b0, b1))
    marks = sorted({lo, hi, *cuts})
    out: list[tuple[float, float]] = []
    for u, w in zip(marks, marks[1:]):
        cur = u
        for b0, b1 in merged:
            if b1 <= cur or b0 >= w:
                continue
            if b0 > cur:
                out.append((cur, b0))
            cur = max(cur, b1)
            if cur >= w:
                break
        if cur < w:
            out.append((cur, w))
    return [(u, w) for u, w in out if w > u]


def _free_build(tree: _LeafTree, domain: Domain,
                path_by_point: dict[Point, float], config: Config,
                cache: Optional[dict] = None):
    rx, ry, rs = tree.rx, tree.ry, tree.rs
    if not (rx < domain.bbox[0] and domain.bbox[2] < rx + rs
            and ry < domain.bbox[1] and domain.bbox[3] < ry + rs):
        raise GeometryError("domain geometry is not strictly inside the root square")

    # Cells: leaves, with occupied leaves halved at their point's abscissa.
    cells: list[SubdivisionCell] = []
    leaf_cell: dict = {}
    split_x: dict = {}
    for k in sorted(tree.leaves):
        box = tree.fbox(k)
        pts = tree.points_in.get(k)
        if pts:
            v = pts[0]
            left = SubdivisionCell(id=len(cells), key=k,
                                   box=(box[0], box[1], v[0], box[3]),
                                   contained_vertex=v, side="L")
            cells.append(left)
            right = SubdivisionCell(id=len(cells), key=k,
                                    box=(v[0], box[1], box[2], box[3]),
                                    contained_vertex=v, side="R")
            cells.append(right)
            leaf_cell[k] = (left.id, right.id)
            split_x[k] = v[0]
        else:
            cells.append(SubdivisionCell(id=len(cells), key=k, box=box))
            leaf_cell[k] = (cells[-1].id,)

    cand = _chain_candidates(tree, domain.chains)

    def segs_of(*keys) -> list[tuple[Point, Point]]:
        got = []
        seen = set()
        for k in keys:
            for ci, si in cand.get(k, ()):
                if (ci, si) in seen:
                    continue
                seen.add((ci, si))
                ch = domain.chains[ci]
                got.append((ch[si], ch[si + 1]))
        return got

    def cell_at(k: tuple, x: float) -> int:
        ids = leaf_cell[k]
        if len(ids) == 1:
            return ids[0]
        return ids[0] if x < split_x[k] else ids[1]

    edges: list[TransparentEdge] = []

    def add_edge(a: Point, b: Point, ca: int, cb: int,
                 anchor: Optional[Point] = None) -> None:
        edges.append(TransparentEdge(id=len(edges), a=a, b=b, cells=(ca, cb),
                                     anchor=anchor))

    # Side fragments, graded toward the input points, then cut at
    # half-cell seams and at chain crossings.
    anchors = [p for lst in tree.points_in.values() for p in lst]
    for axis, ka, kb, lo_i, hi_i, fix_i in _side_fragments(tree):
        segs = segs_of(ka, kb)
        floor_i = 1 << (_FINE - max(ka[0], kb[0]) - 1)
        grade = _graded_cuts(tree, axis, fix_i, lo_i, hi_i, floor_i, anchors)
        if axis == "v":
            fixc = tree.fx(fix_i)
            lo, hi = tree.fy(lo_i), tree.fy(hi_i)
            cuts, blocks = _line_cuts(fixc, lo, hi, 0, segs)
            cuts.extend(tree.fy(c) for c in grade)
            ca = cell_at(ka, fixc)
            cb = cell_at(kb, fixc)
            for u, w in _free_intervals(lo, hi, cuts, blocks):
                if domain.inside((fixc, (u + w) / 2.0)):
                    add_edge((fixc, u), (fixc, w), ca, cb)
        else:
            fixc = tree.fy(fix_i)
            lo, hi = tree.fx(lo_i), tree.fx(hi_i)
            cuts, blocks = _line_cuts(fixc, lo, hi, 1, segs)
            cuts.extend(tree.fx(c) for c in grade)
            for k in (ka, kb):
                vx = split_x.get(k)
                if vx is not None and lo < vx < hi:
                    cuts.append(vx)
            for u, w in _free_intervals(lo, hi, cuts, blocks):
                mid = (u + w) / 2.0
                if domain.inside((mid, fixc)):
                    add_edge((u, fixc), (w, fixc),
                             cell_at(ka, mid), cell_at(kb, mid))

    # Shortest side piece per cell, for the split-line subdivision rule.
    min_side: dict[int, float] = {}
    for e in edges:
        for cid in e.cells:
            cur = min_side.get(cid)
            if cur is None or e.length < cur:
                min_side[cid] = e.length

    # Split-line pieces through each occupied leaf.
    status: dict[Point, str] = {}
    for k in sorted(split_x):
        v = tree.points_in[k][0]
        box = tree.fbox(k)
        ids = leaf_cell[k]
        segs = segs_of(k)
        cuts, blocks = _line_cuts(v[0], box[1], box[3], 0, segs)
        cuts.append(v[1])
        pieces = [(u, w) for u, w in _free_intervals(box[1], box[3], cuts, blocks)
                  if domain.inside((v[0], (u + w) / 2.0))]
        delta = min(min_side.get(ids[0], math.inf),
                    min_side.get(ids[1], math.inf))
        if not math.isfinite(delta):
            delta = tree.size(k)
        anchored = 0
        plen = path_by_point.get(v)
        for u, w in pieces:
            starts_at_v = (u == v[1])
            ends_at_v = (w == v[1])
            if not (starts_at_v or ends_at_v):
                add_edge((v[0], u), (v[0], w), ids[0], ids[1])
                continue
            anchored += 1
            total = w - u
            k_parts = max(1, math.ceil(total / delta - 1e-12))
            piece = total / k_parts
            if plen is not None and plen < 2.0 * piece:
                # The piece met first from v must be exactly half the
                # corridor path long; the rest is re-split to the cap.
                first = plen / 2.0
                rest = total - first
                k_rest = max(1, math.ceil(rest / delta - 1e-12))
                lens = [first] + [rest / k_rest] * k_rest
            else:
                lens = [piece] * k_parts
            # Walk from the v end outward.
            bounds = [v[1]]
            for ln in lens[:-1]:
                bounds.append(bounds[-1] + ln if starts_at_v else bounds[-1] - ln)
            bounds.append(w if starts_at_v else u)
            for i, (p0, p1) in enumerate(zip(bounds, bounds[1:])):
                seg = (min(p0, p1), max(p0, p1))
                add_edge((v[0], seg[0]), (v[0], seg[1]), ids[0], ids[1],
                         anchor=v if i == 0 else None)
        status[v] = "anchored" if anchored else "blocked"

    for e in edges:
        cells[e.cells[0]].edge_ids.append(e.id)
        if e.cells[1] != e.cells[0]:
            cells[e.cells[1]].edge_ids.append(e.id)

    # Opaque fragments clipped per cell, seamed at half-cell boundaries.
    for k in sorted(tree.leaves):
        if k not in cand:
            continue
        box = tree.fbox(k)
        vx = split_x.get(k)
        per_cell: dict[int, list[tuple[int, int, Point, Point]]] = {}
        for ci, si in cand[k]:
            ch = domain.chains[ci]
            a, b = ch[si], ch[si + 1]
            t = _seg_box_clip(a, b, box)
            if t is None or t[0] >= t[1]:
                continue
            p0 = _param_point(a, b, t[0])
            p1 = _param_point(a, b, t[1])
            parts = [(p0, p1)]
            if vx is not None and min(p0[0], p1[0]) < vx < max(p0[0], p1[0]):
                tm = (vx - a[0]) / (b[0] - a[0])
                pm = (vx, a[1] + tm * (b[1] - a[1]))
                parts = [(p0, pm), (pm, p1)]
            for q0, q1 in parts:
                if q0 == q1:
                    continue
                cid = cell_at(k, (q0[0] + q1[0]) / 2.0)
                per_cell.setdefault(cid, []).append((ci, si, q0, q1))
        for cid, items in per_cell.items():
            items.sort(key=lambda t: (t[0], t[1]))
            for ci, si, q0, q1 in items:
                frags = cells[cid].chain_fragments
                if frags and frags[-1][0] == ci and frags[-1][1][-1] == q0:
                    frags[-1][1].append(q1)
                else:
                    frags.append((ci, [q0, q1]))

    touch = _touch_factory(tree, cells, leaf_cell)
    try:
        _grow_well_covering(cells, edges, touch, config,
                            cache=cache, dead=tree.dead)
    except _NeedSplit as ns:
        return ns
    _fill_io_sets(cells, edges, config)
    return cells, edges, leaf_cell, split_x, status


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise GeometryError("subdivision audit: " + message)


def _audit_tiling(sub: ConformingSubdivision) -> None:
    tree = sub._tree
    total = math.fsum(tree.size(k) ** 2 for k in tree.leaves)
    _check(total == tree.rs * tree.rs, "leaves do not tile the root square")


def _audit_well_covering(sub: ConformingSubdivision, config: Config) -> None:
    aud = config.audits
    for e in sub.edges:
        covered = set(e.well_covering)
        _check(len(covered) <= aud.max_well_cover_cells,
               f"well-covering region of edge {e.id} too large")
        _check(all(cid in covered for cid in e.cells),
               f"edge {e.id} not interior to its region")
        marks = {sub.cells[cid].contained_vertex for cid in covered}
        marks.discard(None)
        _check(len(marks) <= 1,
               f"well-covering region of edge {e.id} holds {len(marks)} vertices")
        _check(len(e.input_set) <= aud.max_io_set, f"input set of {e.id} too large")
        _check(len(e.output_set) <= aud.max_io_set, f"output set of {e.id} too large")
        for eid in e.input_set:
            f = sub.edges[eid]
            inside = (f.cells[0] in covered) + (f.cells[1] in covered)
            _check(inside == 1, f"input edge {eid} of {e.id} not on the boundary")
            _check(_separated(e, f),
                   f"edges {e.id} and {eid} too close for their lengths")


def _audit_grading(sub: ConformingSubdivision) -> None:
    """Every piece is at most a quarter of its input-point distance.

    Seam pieces inside an occupied cell and pieces anchored to a point
    follow their own length rules and are skipped.
    """
    unit = sub.root[2] / float(1 << _FINE)
    for e in sub.edges:
        if e.anchor is not None:
            continue
        ca, cb = (sub.cells[cid] for cid in e.cells)
        if ca.key == cb.key:
            continue
        d = min((G.seg_point_distance(e.a, e.b, p) for p in sub.points),
                default=math.inf)
        floorf = 0.5 * min(ca.box[2] - ca.box[0], cb.box[2] - cb.box[0])
        cap = max(0.25 * d, floorf)
        _check(e.length <= cap * (1.0 + 1e-9) or e.length <= 2.0 * unit,
               f"edge {e.id} of length {e.length:.6g} exceeds its cap {cap:.6g}")


def _audit_separation_sample(sub: ConformingSubdivision,
                             samples: int = 20000) -> None:
    edges = sub.edges
    n = len(edges)
    if n < 2:
        return
    rng = random.Random(0xA5)
    if n * (n - 1) // 2 <= samples:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(samples)]
    bad = _separation_offenders(sub.cells, edges, pairs)
    _check(not bad, f"separation property violated by pairs {bad[:4]}")


def audit_point_subdivision(sub: ConformingSubdivision, *,
                            h: Optional[int] = None,
                            config: Config = DEFAULT_CONFIG) -> None:
    """Check every structural promise of the plane stage; raise on failure."""
    aud = config.audits
    _check(sub.stage == "plane", "plane audit on a free-space subdivision")
    _audit_tiling(sub)

    seen_cells: set[int] = set()
    for p in sub.points:
        cid = sub.locate(p)
        cell = sub.cells[cid]
        _check(cell.contained_vertex == p, "point not registered in its cell")
        _check(cid not in seen_cells, "two points share a cell")
        seen_cells.add(cid)
        x0, y0, x1, y1 = cell.box
        _check(x0 < p[0] < x1 and y0 < p[1] < y1, "point not strictly interior")

    _audit_grading(sub)
    _audit_well_covering(sub, config)
    _audit_separation_sample(sub)
    bound = aud.max_edges_per_h * max(1, h if h is not None else len(sub.points))
    _check(len(sub.edges) <= bound,
           f"{len(sub.edges)} transparent edges exceed the size bound {bound}")


def audit_free_subdivision(sub: ConformingSubdivision, *,
                           h: Optional[int] = None,
                           config: Config = DEFAULT_CONFIG) -> None:
    """Check every structural promise of the free-space stage."""
    aud = config.audits
    _check(sub.stage == "free", "free audit on a plane subdivision")
    _check(sub.domain is not None, "free subdivision lost its domain")
    domain = sub.domain
    _audit_tiling(sub)

    for e in sub.edges:
        _check(e.a[0] == e.b[0] or e.a[1] == e.b[1], f"edge {e.id} not axis-parallel")
        _check(e.a < e.b, f"edge {e.id} endpoints unordered")
        _check(domain.inside(e.midpoint), f"edge {e.id} midpoint not in free space")
        for cid in e.cells:
            x0, y0, x1, y1 = sub.cells[cid].box
            _check(x0 <= e.a[0] and e.b[0] <= x1 and y0 <= e.a[1] and e.b[1] <= y1,
                   f"edge {e.id} leaks outside cell {cid}")

    # Every input point is either anchored to a transparent edge or has
    # its vertical line opaque at the point.  Chain extremes always keep
    # one free vertical direction, so only auxiliary points (funnel
    # apices with narrow wedges, the source of an odd scene) may block.
    extras = set(domain.extra_points)
    anchored = {e.anchor for e in sub.edges if e.anchor is not None}
    for p in sub.points:
        state = sub._vertical_status.get(p)
        _check(state is not None, "input point missing from the vertical pass")
        if state == "blocked":
            _check(p in extras, "a chain extreme lost both vertical directions")
        else:
            _check(p in anchored, "anchored point has no anchored edge")

    # Split-line pieces incident to a point respect the local length cap
    # and the corridor-path halving rule.
    path_caps = {p: plen for p, plen in domain.corridor_paths}
    for e in sub.edges:
        if e.anchor is None:
            continue
        cap = path_caps.get(e.anchor)
        if cap is not None:
            _check(2.0 * e.length <= cap * (1.0 + 1e-9),
                   "corridor path shorter than twice its incident edge")

    # Opaque fragments tile each chain exactly.
    per_chain = [0.0] * len(sub.chains)
    for cell in sub.cells:
        for ci, pts in cell.chain_fragments:
            per_chain[ci] += sum(G.dist(a, b) for a, b in zip(pts, pts[1:]))
    for ci, chain in enumerate(sub.chains):
        want = sum(G.dist(a, b) for a, b in zip(chain, chain[1:]))
        _check(abs(per_chain[ci] - want) <= 1e-9 * max(1.0, want),
               f"chain {ci} fragments cover {per_chain[ci]:.12g} of {want:.12g}")

    _audit_well_covering(sub, config)
    if domain.area is not None:
        rs = sub.root[2]
        _check(domain.area <= rs * rs,
               "domain area exceeds the root square")
    bound = aud.max_edges_per_h * max(1, h if h is not None else 1)
    _check(len(sub.edges) <= bound,
           f"{len(sub.edges)} transparent edges exceed the size bound {bound}")


# ---------------------------------------------------------------------------
# axis-parallel ray shooting
# ---------------------------------------------------------------------------


class RayShooter:
    """Slab-based first-hit queries for axis-parallel rays.

    Obstacle edges are bucketed into vertical slabs between consecutive
    endpoint abscissas (and symmetrically into horizontal slabs); inside a
    slab the edges are totally ordered, so a query is two binary searches.
    Matches the linear scan in ``scene.ray_shoot``: edges parallel to the
    ray are ignored and hits closer than 1e-12 of the scene diameter are
    skipped.
    """

    def __init__(self, scene: Scene):
        self.tmin = 1e-12 * scene.diameter
        segs = []
        for ri, ring in enumerate(scene.obstacles):
            for ei in range(len(ring)):
                segs.append((ri, ei, ring[ei], ring[(ei + 1) % len(ring)]))
        self._xs, self._xslabs = self._build(segs, 0)
        self._ys, self._yslabs = self._build(segs, 1)

    @staticmethod
    def _build(segs, ax):
        kept = []
        for ri, ei, a, b in segs:
            if abs(b[ax] - a[ax]) < G._EPS * max(1.0, G.dist(a, b)):
                continue
            kept.append((ri, ei, a, b))
        events = sorted({p[ax] for _, _, a, b in kept for p in (a, b)})
        slabs: list[list] = [[] for _ in range(max(0, len(events) - 1))]
        for ri, ei, a, b in kept:
            lo, hi = sorted((a[ax], b[ax]))
            i0 = bisect.bisect_left(events, lo)
            i1 = bisect.bisect_left(events, hi)
            for i in range(i0, i1):
                slabs[i].append((ri, ei, a, b))
        for i, slab in enumerate(slabs):
            mid = (events[i] + events[i + 1]) / 2.0
            slab.sort(key=lambda s: RayShooter._at(s, mid, ax))
        return events, slabs

    @staticmethod
    def _at(seg, x, ax):
        _, _, a, b = seg
        oy = 1 - ax
        return a[oy] + (b[oy] - a[oy]) * (x - a[ax]) / (b[ax] - a[ax])

    def query(self, origin: Point, direction: Point
              ) -> Optional[tuple[int, int, float]]:
        dx, dy = direction
        if not (dx == 0.0) ^ (dy == 0.0):
            raise GeometryError("ray direction must be axis-parallel")
        if dy != 0.0:
            events, slabs, ax, d = self._xs, self._xslabs, 0, dy
        else:
            events, slabs, ax, d = self._ys, self._yslabs, 1, dx
        o_ax = origin[ax]
        o_oy = origin[1 - ax]
        if not events or o_ax < events[0] or o_ax > events[-1]:
            return None
        idx = bisect.bisect_right(events, o_ax) - 1
        cands = []
        if idx < len(slabs):
            cands.append(idx)
        if idx - 1 >= 0 and (idx >= len(slabs) or events[idx] == o_ax):
            cands.append(idx - 1)
        cut = o_oy + self.tmin * d
        best: Optional[tuple[float, int, int]] = None
        for si in cands:
            slab = slabs[si]
            if not slab:
                continue
            if d > 0.0:
                lo, hi = 0, len(slab)
                while lo < hi:
                    m = (lo + hi) // 2
                    if self._at(slab[m], o_ax, ax) > cut:
                        hi = m
                    else:
                        lo = m + 1
                take = range(lo, len(slab))
            else:
                lo, hi = 0, len(slab)
                while lo < hi:
                    m = (lo + hi) // 2
                    if self._at(slab[m], o_ax, ax) < cut:
                        lo = m + 1
                    else:
                        hi = m
                take = range(lo - 1, -1, -1)
            first_val = None
            for i in take:
                val = self._at(slab[i], o_ax, ax)
                if first_val is None:
                    first_val = val
                elif val != first_val:
                    break
                t = (val - o_oy) / d
                ri, ei = slab[i][0], slab[i][1]
                cand = (t, ri, ei)
                if best is None or cand < best:
                    best = cand
        if best is None:
            return None
        return (best[1], best[2], best[0])


def ray_shoot(scene: Scene, origin: Point, direction: Point
              ) -> Optional[tuple[int, int, float]]:
    """First obstacle edge hit by an axis-parallel ray, via a cached index.

    Same contract as the linear scan in ``scene.ray_shoot``: returns
    (ring index, edge index, t) or None, never reporting the box.
    """
    shooter = getattr(scene, "_ray_shooter", None)
    if shooter is None:
        shooter = RayShooter(scene)
        scene._ray_shooter = shooter
    return shooter.query(origin, direction)
