"""Corridor decomposition: dual topology, hourglasses, exact area audit."""
from __future__ import annotations

import math

import pytest

import spmap.geometry as G
from spmap.corridor import build_corridor_structure, funnel_path
from spmap.errors import GeometryError
from spmap.families import corpus, make_scene
from spmap.scene import Scene
from spmap.triangulate import triangulate_free_space


def free_area(scene: Scene) -> float:
    x0, y0, x1, y1 = scene.bbox
    area = (x1 - x0) * (y1 - y0)
    for obs in scene.obstacles:
        area -= abs(G.polygon_area(obs))
    return area


def build(scene: Scene, insert_source: bool = True):
    tri = triangulate_free_space(scene, insert_source=insert_source)
    return build_corridor_structure(tri)


# -- funnel ------------------------------------------------------------------

def test_funnel_straight_shot():
    pts = [(0.0, 0.0), (2.0, 1.0), (2.0, -1.0), (4.0, 0.0)]
    assert funnel_path(pts, 0, 3, [(2, 1)]) == [0, 3]


def test_funnel_bends_around_spike():
    # a notch forces the path over the spike tip at index 2
    pts = [(0.0, 0.0), (2.0, 2.0), (2.0, 0.5), (4.0, 2.0), (4.0, 0.0),
           (6.0, 0.3)]
    portals = [(2, 1), (2, 3), (4, 3)]
    path = funnel_path(pts, 0, 5, portals)
    assert path == [0, 2, 5]
    length = sum(G.dist(pts[a], pts[b]) for a, b in zip(path, path[1:]))
    direct = G.dist(pts[0], pts[5])
    assert length > direct


def test_funnel_degenerate_endpoints():
    pts = [(0.0, 0.0)]
    assert funnel_path(pts, 0, 0, []) == [0]


# -- dual-graph topology ------------------------------------------------------

def test_two_obstacles_make_theta_graph():
    sc = make_scene("convex", 2, 16, seed=3)
    cs = build(sc, insert_source=False)
    assert cs.node_count == 2
    assert cs.edge_count == 3


def test_junction_free_single_obstacle():
    sc = Scene([[(2.0, 2.0), (4.0, 2.0), (4.0, 4.0), (2.0, 4.0)]],
               (1.0, 1.0), explicit_bbox=(0.0, 0.0, 6.0, 6.0))
    cs = build(sc, insert_source=False)
    assert cs.node_count == 0
    assert cs.edge_count == 0
    assert cs.decomposition_area == pytest.approx(free_area(sc), rel=1e-12)


def test_corridor_counts_scale_with_holes():
    for name, sc in corpus(6, seed=11):
        cs = build(sc)
        h = len(sc.obstacles)
        # a planar 3-regular multigraph on the junction nodes
        assert cs.edge_count <= max(3 * h, 3)
        for c in cs.corridors:
            # two junction triangles may share a door directly, leaving a
            # zero-area corridor with nothing to decompose
            assert c.hourglass is not None or c.degenerate


# -- decomposition audit -------------------------------------------------------

def test_corpus_decomposition_area_is_exact():
    for name, sc in corpus(25, seed=20240229):
        cs = build(sc)
        want = free_area(sc)
        got = cs.decomposition_area
        assert got == pytest.approx(want, rel=1e-9), name


def test_bays_are_ccw_and_gated():
    for name, sc in corpus(8, seed=5):
        cs = build(sc)
        for bay in cs.bays:
            assert G.polygon_area(bay.ring) > 0.0
            u, v = bay.gate
            assert u == bay.ring[-1] and v == bay.ring[0]


def test_canal_gates_lead_with_apices():
    sc = Scene([[(20.0, 20.0), (30.0, 20.0), (30.0, 30.0), (20.0, 30.0)]],
               (5.0, 5.0), explicit_bbox=(0.0, 0.0, 50.0, 50.0))
    cs = build(sc)
    assert cs.canals, "expected the square wrap corridor to pinch closed"
    for canal in cs.canals:
        assert canal.gates[0][0] == canal.apices[0]
        assert canal.gates[1][0] == canal.apices[1]
        assert canal.area > 0.0
        assert canal.path_length == pytest.approx(
            sum(G.dist(a, b) for a, b in zip(canal.path, canal.path[1:])))


def test_corridor_paths_match_canals():
    for name, sc in corpus(8, seed=77):
        cs = build(sc)
        assert len(cs.corridor_paths) == len(cs.canals)
        for cp, canal in zip(cs.corridor_paths, cs.canals):
            assert cp.length == pytest.approx(canal.path_length)
            assert cp.points[0] == cp.x and cp.points[-1] == cp.y


# -- self-touching corridors ---------------------------------------------------

def wrapped_scene() -> Scene:
    # a small box sitting inside a C-shaped cavity; the corridor between
    # them circles the box completely and its ring reuses one vertex
    return Scene([[(20.0, 20.0), (80.0, 20.0), (80.0, 90.0), (60.0, 90.0),
                   (60.0, 40.0), (40.0, 40.0), (40.0, 90.0), (20.0, 90.0)],
                  [(45.0, 60.0), (55.0, 60.0), (55.0, 75.0), (45.0, 75.0)]],
                 (5.0, 95.0), explicit_bbox=(0.0, 0.0, 110.0, 110.0))


def test_wrapped_corridor_ring_doubles_one_vertex():
    cs = build(wrapped_scene())
    doubled = []
    for c in cs.corridors:
        seen = set()
        for v in c.ring:
            if v in seen:
                doubled.append(v)
            seen.add(v)
    assert doubled, "the cavity corridor should touch itself"
    assert cs.decomposition_area == pytest.approx(free_area(wrapped_scene()),
                                                  rel=1e-12)


def test_geodesic_grazing_the_doubled_vertex():
    # the corridor wraps the star and both doors end at its right spike;
    # one geodesic also grazes that same spike from the far side, which
    # must resolve to the other ring copy instead of closing the corridor
    star = [(57.58, 85.18), (65.76, 77.72), (72.19, 68.52), (79.75, 76.79),
            (89.01, 83.31), (79.95, 90.31), (74.05, 99.79), (67.01, 91.14)]
    sc = Scene([star], (85.27, 58.1),
               explicit_bbox=(-20.73, -20.2, 167.31, 178.09))
    cs = build(sc)
    assert any(len(set(c.ring)) != len(c.ring) for c in cs.corridors)
    assert not cs.canals
    assert len(cs.bays) == 2
    assert cs.decomposition_area == pytest.approx(free_area(sc), rel=1e-12)


def test_wrapped_corpus_scenes_stay_exact():
    # seeds picked so the generator emits self-touching corridor rings
    hits = 0
    for name, sc in corpus(40, seed=20250817):
        cs = build(sc)
        for c in cs.corridors:
            if len(set(c.ring)) != len(c.ring):
                hits += 1
                break
        assert cs.decomposition_area == pytest.approx(free_area(sc),
                                                      rel=1e-9), name
    assert hits >= 1


# -- ocean boundary ------------------------------------------------------------

def test_boundary_chains_present_and_directed():
    sc = make_scene("convex", 2, 16, seed=3)
    cs = build(sc)
    assert cs.boundary_chains
    for chain in cs.boundary_chains:
        assert len(chain) >= 2
        for a, b in zip(chain, chain[1:]):
            assert a != b


def test_geodesic_chains_bend_around_obstacles():
    # a taut chain with the ocean on its right only bends left, wrapping
    # obstacle corners that poke into the free space
    sc = make_scene("convex", 3, 30, seed=21)
    cs = build(sc)
    assert not any(len(set(c.ring)) != len(c.ring) for c in cs.corridors)
    checked = 0
    for chain in cs.boundary_chains:
        for a, b, c in zip(chain, chain[1:], chain[2:]):
            assert G.orient(a, b, c) >= 0.0
            checked += 1
    assert checked > 0
