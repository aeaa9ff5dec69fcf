"""Deterministic random scene generators for tests, validation and benchmarks.

Every family takes a seed and returns reproducible scenes.  Obstacles are
placed on a jittered grid so disjointness and a minimum clearance hold by
construction; feature sizes stay above ~1/30 of the scene diameter to keep
subdivision sizes tame.
"""
from __future__ import annotations

import math
import random
import zlib
from typing import Optional

from .errors import InvalidScene
from .geometry import Point
from .scene import Scene

FAMILIES = ("circles", "convex", "stars", "cshapes", "mixed", "dumbbell")


def _convex_ring(cx: float, cy: float, rx: float, ry: float, k: int,
                 rng: random.Random) -> list[Point]:
    rot = rng.uniform(0.0, math.pi)
    base = sorted(rng.uniform(0.0, 2 * math.pi) for _ in range(k))
    # spread angles away from near-duplicates to keep edges non-degenerate
    angles = []
    for i, a in enumerate(base):
        angles.append(a + 0.25 * (2 * math.pi * i / k - a))
    cr, sr = math.cos(rot), math.sin(rot)
    ring = []
    for a in angles:
        x, y = rx * math.cos(a), ry * math.sin(a)
        ring.append((cx + x * cr - y * sr, cy + x * sr + y * cr))
    return ring


def _star_ring(cx: float, cy: float, r_out: float, r_in: float, k: int,
               rng: random.Random) -> list[Point]:
    spikes = max(3, k // 2)
    rot = rng.uniform(0.0, math.pi)
    ring = []
    for i in range(spikes):
        for r in (r_out, r_in):
            a = rot + 2 * math.pi * (i + (0.0 if r == r_out else 0.5)) / spikes
            rr = r * rng.uniform(0.9, 1.0)
            ring.append((cx + rr * math.cos(a), cy + rr * math.sin(a)))
    return ring


def _cshape_ring(cx: float, cy: float, size: float, rng: random.Random) -> list[Point]:
    """Bracket with a rectangular pocket; opening direction randomized."""
    w, t = size, size * rng.uniform(0.28, 0.38)
    d = size * rng.uniform(0.55, 0.75)  # pocket depth
    half = w / 2
    mouth = w * rng.uniform(0.3, 0.45)
    ring = [(-half, -half), (half, -half), (half, half), (-half, half),
            (-half, half - (half - mouth / 2 - (half - mouth / 2)) )]
    # explicit bracket outline, pocket opening to the left
    ring = [(-half, -half), (half, -half), (half, half), (-half, half),
            (-half, mouth / 2), (-half + d, mouth / 2),
            (-half + d, -mouth / 2), (-half, -mouth / 2)]
    rot = rng.randrange(4) * math.pi / 2
    cr, sr = math.cos(rot), math.sin(rot)
    out = [(cx + x * cr - y * sr, cy + x * sr + y * cr) for x, y in ring]
    _ = t
    return out


def _pad_vertices(ring: list[Point], target: int, bump: float) -> list[Point]:
    """Subdivide edges with tiny outward bumps until the ring has target vertices."""
    ring = list(ring)
    while len(ring) < target:
        # split the longest edge
        n = len(ring)
        lengths = [math.dist(ring[i], ring[(i + 1) % n]) for i in range(n)]
        i = max(range(n), key=lambda j: lengths[j])
        a, b = ring[i], ring[(i + 1) % n]
        mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
        ex, ey = b[0] - a[0], b[1] - a[1]
        ln = math.hypot(ex, ey) or 1.0
        # outward = right of the CCW edge direction
        nx, ny = ey / ln, -ex / ln
        ring.insert(i + 1, (mx + nx * bump, my + ny * bump))
    return ring


def _grid_positions(h: int, world: float, rng: random.Random) -> list[tuple[float, float, float]]:
    """(cx, cy, cell_radius) for h obstacles on a shuffled jittered grid."""
    g = max(2, math.ceil(math.sqrt(h * 1.6)))
    cell = world / g
    slots = [(i, j) for i in range(g) for j in range(g)]
    rng.shuffle(slots)
    out = []
    for (i, j) in slots[:h]:
        jx = rng.uniform(0.3, 0.7)
        jy = rng.uniform(0.3, 0.7)
        out.append(((i + jx) * cell, (j + jy) * cell, cell * 0.34))
    return out


def _pick_source(scene_rings: list[list[Point]], world: float,
                 rng: random.Random) -> Point:
    probe = Scene(scene_rings, (world * 2, world * 2))
    for _ in range(4000):
        p = (rng.uniform(0.02, 0.98) * world, rng.uniform(0.02, 0.98) * world)
        if probe.clearance(p) > world * 0.015 and probe.in_free_space(p):
            return p
    raise InvalidScene("could not place a source point")


def make_scene(family: str, h: int, n_total: int, seed: int,
               config=None) -> Scene:
    """Build one deterministic scene of the given family.

    ``n_total`` is the approximate total vertex budget across obstacles.
    """
    rng = random.Random((zlib.crc32(family.encode()) ^ (seed * 0x9E3779B9))
                    & 0xFFFFFFFF)
    world = 100.0
    if family == "dumbbell":
        return _dumbbell_scene(seed, config)
    if family not in FAMILIES:
        raise InvalidScene(f"unknown family '{family}'")
    h = max(1, h)
    per = max(4, n_total // h)
    rings: list[list[Point]] = []
    spots = _grid_positions(h, world, rng)
    if len(spots) < h:
        raise InvalidScene("grid too small for requested obstacle count")
    for idx in range(h):
        cx, cy, r = spots[idx]
        kind = family
        if family == "mixed":
            kind = rng.choice(("convex", "convex", "stars", "cshapes"))
        if kind == "circles":
            ring = [(cx + r * math.cos(2 * math.pi * t / per),
                     cy + r * math.sin(2 * math.pi * t / per))
                    for t in range(per)]
        elif kind == "convex":
            ring = _convex_ring(cx, cy, r * rng.uniform(0.7, 1.0),
                                r * rng.uniform(0.5, 1.0), per, rng)
        elif kind == "stars":
            ring = _star_ring(cx, cy, r, r * rng.uniform(0.45, 0.6),
                              min(per, 16), rng)
            ring = _pad_vertices(ring, per, r * 0.004)
        elif kind == "cshapes":
            ring = _cshape_ring(cx, cy, r * 1.5, rng)
            ring = _pad_vertices(ring, per, r * 0.004)
        else:
            raise InvalidScene(f"unknown family '{family}'")
        rings.append(ring)
    src = _pick_source(rings, world, rng)
    return Scene(rings, src, config=config) if config else Scene(rings, src)


def _dumbbell_scene(seed: int, config=None) -> Scene:
    """Two rooms joined by a single narrow corridor."""
    rng = random.Random(seed)
    gap = 4.0 + rng.uniform(0.0, 1.0)
    # two brackets facing each other, mouths shifted so the passage is real
    left = [(-1.0, -20.0), (0.0, -20.0), (0.0, 20.0), (-1.0, 20.0)]
    right = [(10.0, -20.0), (11.0, -20.0), (11.0, 20.0), (10.0, 20.0)]
    # carve mouths by replacing each wall with two bars
    top_l = [(-1.0, gap / 2), (0.0, gap / 2), (0.0, 20.0), (-1.0, 20.0)]
    bot_l = [(-1.0, -20.0), (0.0, -20.0), (0.0, -gap / 2), (-1.0, -gap / 2)]
    top_r = [(10.0, gap / 2), (11.0, gap / 2), (11.0, 20.0), (10.0, 20.0)]
    bot_r = [(10.0, -20.0), (11.0, -20.0), (11.0, -gap / 2), (10.0, -gap / 2)]
    # a slab between the walls leaves an S-shaped passage
    slab = [(3.0, -14.0), (7.0, -14.0), (7.0, 14.0), (3.0, 14.0)]
    slab = [(x, y + gap) for x, y in slab]
    rings = [top_l, bot_l, top_r, bot_r, slab]
    _ = (left, right)
    src = (-5.0, 0.0)
    return Scene(rings, src, config=config) if config else Scene(rings, src)


def corpus(count: int, seed: int, *, h_range=(1, 20), n_range=(8, 400)):
    """Yield (name, Scene) pairs mixing all families, sizes favoring small."""
    rng = random.Random(seed)
    fams = ["convex", "circles", "stars", "cshapes", "mixed"]
    made = 0
    attempt = 0
    while made < count:
        attempt += 1
        fam = fams[attempt % len(fams)]
        # log-uniform-ish sizes favor small scenes but cover the full range
        h = min(h_range[1], max(h_range[0], int(round(h_range[0] * (h_range[1] / h_range[0]) ** rng.random()))))
        n = min(n_range[1], max(n_range[0], int(round(n_range[0] * (n_range[1] / n_range[0]) ** rng.random()))))
        if made == 0:
            h, n = h_range[1], n_range[1]  # guarantee coverage of the extremes
        if made == 1:
            h, n = h_range[0], n_range[0]
        try:
            sc = make_scene(fam, h, n, seed * 1000 + attempt)
        except InvalidScene:
            continue
        made += 1
        yield (f"{fam}-h{sc.h}-n{sc.n}-{made}", sc)
