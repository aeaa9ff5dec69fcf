"""Independent shortest-path oracle: visibility graph plus Dijkstra.

This module deliberately shares no machinery with the wavefront pipeline;
it exists to cross-check it.  Visibility between two points means their
segment neither properly crosses an obstacle edge nor runs through an
obstacle interior (boundaries are free: the free space is closed).
"""
from __future__ import annotations

import heapq
import math
from typing import Optional, Sequence

import numpy as np

from .errors import Unreachable
from .geometry import Point
from .scene import Scene


class VisibilityOracle:
    """Visibility graph over the source and all obstacle vertices."""

    def __init__(self, scene: Scene):
        self.scene = scene
        verts: list[Point] = [scene.source]
        self._ring_of: list[int] = [-1]
        for ri, ring in enumerate(scene.obstacles):
            for p in ring:
                verts.append(p)
                self._ring_of.append(ri)
        self.vertices = verts
        self._V = np.array(verts, dtype=float)
        edges = scene.all_edges()
        if edges:
            self._EA = np.array([e[0] for e in edges], dtype=float)
            self._EB = np.array([e[1] for e in edges], dtype=float)
        else:
            self._EA = np.zeros((0, 2))
            self._EB = np.zeros((0, 2))
        self._rings = [np.array(r, dtype=float) for r in scene.obstacles]
        self._tol = 1e-12 * scene.diameter
        self.adjacency = self._build()
        self._dist_cache: Optional[list[float]] = None
        self._pred_cache: Optional[list[int]] = None

    # -- visibility ---------------------------------------------------------

    def _blocked(self, p: Point, qs: np.ndarray) -> np.ndarray:
        """Boolean mask over qs: True where segment p->q is blocked."""
        m = len(qs)
        if m == 0:
            return np.zeros(0, dtype=bool)
        blocked = np.zeros(m, dtype=bool)
        if len(self._EA):
            a, b = self._EA, self._EB
            px, py = p
            qx, qy = qs[:, 0:1], qs[:, 1:2]
            ax, ay = a[:, 0], a[:, 1]
            bx, by = b[:, 0], b[:, 1]
            # orientation of edge endpoints against segment p->q
            o1 = (qx - px) * (ay - py) - (qy - py) * (ax - px)
            o2 = (qx - px) * (by - py) - (qy - py) * (bx - px)
            # orientation of p and q against each edge
            o3 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            o4 = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
            proper = (o1 * o2 < 0.0) & (o3 * o4 < 0.0)
            blocked |= proper.any(axis=1)
        # interior containment: midpoints strictly inside a ring
        mids = (np.asarray(p)[None, :] + qs) * 0.5
        inside = self._strictly_inside(mids)
        blocked |= inside
        return blocked

    def _strictly_inside(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(pts), dtype=bool)
        for ring in self._rings:
            x, y = pts[:, 0], pts[:, 1]
            x0, y0 = ring[:, 0], ring[:, 1]
            x1 = np.roll(x0, -1)
            y1 = np.roll(y0, -1)
            crossing = (y0[None, :] > y[:, None]) != (y1[None, :] > y[:, None])
            with np.errstate(divide="ignore", invalid="ignore"):
                xs = x0[None, :] + (y[:, None] - y0[None, :]) * \
                    (x1 - x0)[None, :] / (y1 - y0)[None, :]
            hits = crossing & (x[:, None] < xs)
            inside = hits.sum(axis=1) % 2 == 1
            if inside.any():
                # exclude points that merely sit on the boundary
                ex = x1 - x0
                ey = y1 - y0
                denom = np.maximum(ex * ex + ey * ey, 1e-300)
                for i in np.nonzero(inside)[0]:
                    px, py = pts[i]
                    t = np.clip(((px - x0) * ex + (py - y0) * ey) / denom, 0.0, 1.0)
                    d2 = (x0 + t * ex - px) ** 2 + (y0 + t * ey - py) ** 2
                    if math.sqrt(float(d2.min())) <= self._tol:
                        inside[i] = False
            out |= inside
        return out

    def visible_from(self, p: Point, skip: int = -1) -> list[int]:
        """Indices of graph vertices visible from an arbitrary point."""
        mask = ~self._blocked(p, self._V)
        out = []
        for i in np.nonzero(mask)[0]:
            if i != skip:
                out.append(int(i))
        return out

    def _build(self) -> list[list[tuple[int, float]]]:
        nv = len(self.vertices)
        adj: list[list[tuple[int, float]]] = [[] for _ in range(nv)]
        for i in range(nv):
            p = self.vertices[i]
            mask = ~self._blocked(p, self._V[i + 1:])
            for off in np.nonzero(mask)[0]:
                j = i + 1 + int(off)
                d = math.dist(p, self.vertices[j])
                adj[i].append((j, d))
                adj[j].append((i, d))
        # ring boundary edges are always traversable
        base = 1
        for ring in self.scene.obstacles:
            nvr = len(ring)
            for k in range(nvr):
                i = base + k
                j = base + (k + 1) % nvr
                d = math.dist(self.vertices[i], self.vertices[j])
                if (j, d) not in adj[i]:
                    adj[i].append((j, d))
                    adj[j].append((i, d))
            base += nvr
        return adj

    # -- shortest paths -------------------------------------------------------

    def _dijkstra_from_source(self) -> None:
        nv = len(self.vertices)
        dist = [math.inf] * nv
        pred = [-1] * nv
        dist[0] = 0.0
        pq = [(0.0, 0)]
        while pq:
            d, u = heapq.heappop(pq)
            if d > dist[u] + 1e-15:
                continue
            for v, w in self.adjacency[u]:
                nd = d + w
                if nd < dist[v] - 1e-15:
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(pq, (nd, v))
        self._dist_cache = dist
        self._pred_cache = pred

    def query(self, t: Point) -> tuple[float, list[Point]]:
        """Distance and polyline path from the scene source to t."""
        if self._dist_cache is None:
            self._dijkstra_from_source()
        dist = self._dist_cache
        pred = self._pred_cache
        assert dist is not None and pred is not None
        mask = ~self._blocked(t, self._V)
        best = math.inf
        best_i = -1
        for i in np.nonzero(mask)[0]:
            cand = dist[int(i)] + math.dist(self.vertices[int(i)], t)
            if cand < best - 1e-15:
                best = cand
                best_i = int(i)
        if best_i < 0 or not math.isfinite(best):
            raise Unreachable(f"no path from source to {t}")
        path = [t]
        u = best_i
        while u != -1:
            path.append(self.vertices[u])
            u = pred[u]
        path.reverse()
        return best, path


def build_visibility_graph(scene: Scene) -> VisibilityOracle:
    """Construct the oracle graph for a scene."""
    return VisibilityOracle(scene)


def oracle_distance(scene: Scene, s: Point, t: Point) -> tuple[float, list[Point]]:
    """Shortest-path distance and path between two free points.

    ``s`` may differ from the scene's stored source; the graph is rebuilt
    around it in that case.
    """
    if math.dist(s, scene.source) > 1e-12 * scene.diameter:
        scene = Scene([list(r) for r in scene.obstacles], s,
                      explicit_bbox=scene.explicit_bbox, config=scene.config)
    return VisibilityOracle(scene).query(t)


def sample_free_points(scene: Scene, count: int, seed: int,
                       *, margin: float = 0.0) -> list[Point]:
    """Deterministic rejection-sampled points in the closed free space."""
    import random as _random

    rng = _random.Random(seed)
    x0, y0, x1, y1 = scene.geometry_bbox
    pad = 0.1 * scene.diameter
    out: list[Point] = []
    guard = 0
    while len(out) < count and guard < 100_000:
        guard += 1
        p = (rng.uniform(x0 - pad, x1 + pad), rng.uniform(y0 - pad, y1 + pad))
        if scene.in_free_space(p) and scene.clearance(p) > margin:
            out.append(p)
    return out
