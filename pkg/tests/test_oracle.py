"""Oracle tests: goldens, metric properties, scene plumbing."""
from __future__ import annotations

import math
import random

import pytest

from spmap.errors import InvalidScene, Unreachable
from spmap.families import corpus, make_scene
from spmap.oracle import VisibilityOracle, build_visibility_graph, oracle_distance, \
    sample_free_points
from spmap.scene import Scene, ray_shoot

UNIT_SQUARE = [(0.0, -0.5), (1.0, -0.5), (1.0, 0.5), (0.0, 0.5)]


def square_scene() -> Scene:
    return Scene([list(UNIT_SQUARE)], (-1.0, 0.0))


def test_empty_scene_distance_exact():
    sc = Scene([], (0.0, 0.0))
    d, path = oracle_distance(sc, (0.0, 0.0), (3.0, 4.0))
    assert d == pytest.approx(5.0, abs=1e-12)
    assert path == [(0.0, 0.0), (3.0, 4.0)]


def test_square_scene_golden():
    d, path = oracle_distance(square_scene(), (-1.0, 0.0), (2.0, 0.0))
    assert d == pytest.approx(1.0 + 2.0 * math.sqrt(1.25), abs=1e-9)
    assert len(path) == 4  # source, two corners, target


def test_unreachable_inside_obstacle():
    sc = square_scene()
    with pytest.raises(Unreachable):
        VisibilityOracle(sc).query((0.5, 0.0))


def test_oracle_symmetry():
    sc = make_scene("mixed", 5, 60, seed=11)
    pts = sample_free_points(sc, 12, seed=3)
    for i in range(0, 10, 2):
        a, b = pts[i], pts[i + 1]
        d1, _ = oracle_distance(sc, a, b)
        d2, _ = oracle_distance(sc, b, a)
        assert d1 == pytest.approx(d2, rel=1e-9)


def test_oracle_triangle_inequality():
    sc = make_scene("convex", 4, 40, seed=5)
    pts = sample_free_points(sc, 9, seed=7)
    for i in range(3):
        a, b, c = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        dab, _ = oracle_distance(sc, a, b)
        dbc, _ = oracle_distance(sc, b, c)
        dac, _ = oracle_distance(sc, a, c)
        assert dac <= dab + dbc + 1e-9


def test_path_length_matches_distance():
    sc = make_scene("stars", 6, 90, seed=2)
    oracle = build_visibility_graph(sc)
    for t in sample_free_points(sc, 15, seed=9):
        d, path = oracle.query(t)
        seg = sum(math.dist(path[i], path[i + 1]) for i in range(len(path) - 1))
        assert d == pytest.approx(seg, rel=1e-12)
        assert path[0] == sc.source and path[-1] == t


def test_path_vertices_are_free():
    sc = make_scene("cshapes", 3, 40, seed=4)
    oracle = build_visibility_graph(sc)
    for t in sample_free_points(sc, 10, seed=13):
        _, path = oracle.query(t)
        for p in path:
            assert sc.in_free_space(p, tol=1e-9)


# ---------------------------------------------------------------------------
# scene model
# ---------------------------------------------------------------------------

def test_scene_json_round_trip():
    sc = make_scene("mixed", 4, 50, seed=21)
    text = sc.dumps()
    sc2 = Scene.loads(text)
    assert sc2.dumps() == text
    assert sc2.n == sc.n and sc2.h == sc.h


def test_scene_rejects_overlapping_obstacles():
    with pytest.raises(InvalidScene):
        Scene([[(0, 0), (2, 0), (2, 2), (0, 2)],
               [(1, 1), (3, 1), (3, 3), (1, 3)]], (5.0, 5.0))


def test_scene_rejects_source_inside():
    with pytest.raises(InvalidScene):
        Scene([list(UNIT_SQUARE)], (0.5, 0.0))


def test_scene_rejects_bad_json():
    with pytest.raises(InvalidScene):
        Scene.loads("{not json")
    with pytest.raises(InvalidScene):
        Scene.loads("{}")


def test_families_produce_valid_scenes():
    for fam in ("circles", "convex", "stars", "cshapes", "mixed", "dumbbell"):
        sc = make_scene(fam, 4, 48, seed=3)
        assert sc.h >= 1
        assert sc.in_free_space(sc.source)


def test_corpus_covers_ranges():
    scenes = list(corpus(12, seed=1))
    hs = [sc.h for _, sc in scenes]
    ns = [sc.n for _, sc in scenes]
    assert max(hs) == 20 and max(ns) >= 380
    assert min(hs) == 1


def test_ray_shoot_matches_linear_scan():
    rng = random.Random(17)
    sc = make_scene("mixed", 8, 120, seed=6)
    hits = 0
    for _ in range(500):
        x0, y0, x1, y1 = sc.geometry_bbox
        origin = (rng.uniform(x0, x1), rng.uniform(y0, y1))
        if not sc.in_free_space(origin):
            continue
        direction = rng.choice([(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)])
        got = ray_shoot(sc, origin, direction)
        # linear scan oracle
        import spmap.geometry as G
        best = None
        for ri, ring in enumerate(sc.obstacles):
            for ei in range(len(ring)):
                t = G.ray_segment_intersection(origin, direction, ring[ei],
                                               ring[(ei + 1) % len(ring)])
                if t is not None and t > 1e-12 * sc.diameter:
                    if best is None or t < best[2]:
                        best = (ri, ei, t)
        if got is None:
            assert best is None
        else:
            assert best is not None
            assert got[2] == pytest.approx(best[2], rel=1e-9)
            hits += 1
    assert hits > 50
