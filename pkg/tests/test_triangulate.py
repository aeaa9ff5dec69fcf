"""Free-space triangulation audits."""
from __future__ import annotations

import pytest

from spmap.families import corpus, make_scene
from spmap.scene import Scene
from spmap.triangulate import audit_triangulation, triangulate_free_space

UNIT_SQUARE = [(0.0, -0.5), (1.0, -0.5), (1.0, 0.5), (0.0, 0.5)]


def test_empty_box_is_source_fan():
    sc = Scene([], (0.0, 0.0))
    tri = triangulate_free_space(sc)
    assert len(tri.triangles) == 4
    assert all(tri.source_index in t for t in tri.triangles)
    audit_triangulation(sc, tri)


def test_single_square_partition():
    sc = Scene([list(UNIT_SQUARE)], (-1.0, 0.0))
    tri = triangulate_free_space(sc)
    audit_triangulation(sc, tri)
    assert tri.source_index >= 0
    assert tri.points[tri.source_index] == (-1.0, 0.0)


def test_corpus_triangulations_pass_audit():
    for name, sc in corpus(10, seed=42):
        tri = triangulate_free_space(sc)
        audit_triangulation(sc, tri)


def test_dumbbell_triangulation():
    sc = make_scene("dumbbell", 2, 20, seed=0)
    tri = triangulate_free_space(sc)
    audit_triangulation(sc, tri)


def test_neighbors_symmetric():
    sc = make_scene("convex", 3, 24, seed=8)
    tri = triangulate_free_space(sc)
    nbrs = tri.tri_neighbors()
    for ti, lst in enumerate(nbrs):
        for tj in lst:
            assert ti in nbrs[tj]
