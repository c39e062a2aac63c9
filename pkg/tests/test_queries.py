"""Navigation queries against the adjacency oracle.

Query answers use tour labels (vertices numbered by first visit during the
construction walk), so every comparison maps input ids through the label
table first.
"""

import numpy as np
import pytest

from pemb import (Navigator, build_compact, dfs_parent_edges,
                  parse_embedding, sequential_build,
                  tree_structures_from_edges)

from conftest import K3_TEXT, grid_with_tree
from oracles import AdjacencyOracle, cyclic_equal, preorder_labels, tour


class Mapped:
    """Bundle of navigator, oracle and the label translation tables."""

    def __init__(self, emb, tree, threads=0):
        if threads:
            compact = build_compact(emb, tree, threads=threads)
        else:
            compact = sequential_build(emb, tree)
        self.emb = emb
        self.nav = Navigator(compact)
        self.oracle = AdjacencyOracle(emb)
        _, _, _, self.tick_edge = tour(emb, tree.parent_ref)
        self.label = preorder_labels(emb, self.tick_edge)
        self.unlabel = {l: u for u, l in self.label.items()}
        self.tick_of = np.empty(2 * emb.m, np.int64)
        for t, e in enumerate(self.tick_edge, start=1):
            self.tick_of[e] = t

    def expected_listing(self, vlab):
        u = self.unlabel[vlab]
        return [self.label[w] for w in self.oracle.neighbours(u)]

    def expected_face(self, t):
        edges = self.oracle.face_edges(int(self.tick_edge[t - 1]))
        return [self.label[int(self.emb.esrc[e]) + 1] for e in edges]


def test_single_edge_graph():
    emb = parse_embedding("pg 2 1\n1 2 2\n2 1 1\n")
    tree = tree_structures_from_edges(emb, dfs_parent_edges(emb), 1)
    nav = Navigator(sequential_build(emb, tree))
    assert nav.first(1) == 1
    assert nav.mate(1) == 2
    assert nav.counting(1) == 1
    assert nav.listing(1) == [2]
    assert nav.listing(2) == [1]
    assert nav.face(1) == [1, 2]
    assert nav.next(2) is None


def test_k3_all_queries():
    emb = parse_embedding(K3_TEXT)
    tree = tree_structures_from_edges(emb, dfs_parent_edges(emb), 1)
    mp = Mapped(emb, tree)
    for v in (1, 2, 3):
        assert mp.nav.counting(v) == mp.oracle.degree(mp.unlabel[v])
        assert cyclic_equal(mp.nav.listing(v), mp.expected_listing(v))
    for t in range(1, 7):
        e = mp.tick_edge[t - 1]
        assert mp.nav.vertex(t) == mp.label[int(emb.esrc[e]) + 1]
        assert mp.nav.mate(t) == int(mp.tick_of[int(emb.ecmp[e])])


def test_rotation_wraps_to_first():
    emb, tree = grid_with_tree(3, 0)
    nav = Navigator(sequential_build(emb, tree))
    for v in (1, 5, 9):
        ticks = nav.rotation_ticks(v)
        assert nav.rot_next(ticks[-1]) == ticks[0]
        assert len(ticks) == nav.counting(v)


def test_counting_matches_degree_small_grid():
    emb, tree = grid_with_tree(3, 0)
    mp = Mapped(emb, tree)
    for v in range(1, 10):
        assert mp.nav.counting(v) == mp.oracle.degree(mp.unlabel[v])


def test_listing_matches_rotation_cyclically():
    emb, tree = grid_with_tree(4, 1)
    mp = Mapped(emb, tree)
    for v in range(1, 17):
        assert cyclic_equal(mp.nav.listing(v), mp.expected_listing(v))


def test_faces_cover_all_ticks():
    emb, tree = grid_with_tree(4, 2)
    mp = Mapped(emb, tree)
    seen = np.zeros(2 * emb.m + 1, bool)
    orbits = 0
    for t in range(1, 2 * emb.m + 1):
        if seen[t]:
            continue
        orbits += 1
        assert mp.nav.face(t) == mp.expected_face(t)
        for e in mp.oracle.face_edges(int(mp.tick_edge[t - 1])):
            seen[int(mp.tick_of[e])] = True
    assert orbits == 2 - emb.n + emb.m


def test_queries_reject_out_of_range():
    emb, tree = grid_with_tree(2, 0)
    nav = Navigator(sequential_build(emb, tree))
    with pytest.raises(IndexError):
        nav.first(0)
    with pytest.raises(IndexError):
        nav.first(emb.n + 1)
    with pytest.raises(IndexError):
        nav.mate(0)
    with pytest.raises(IndexError):
        nav.face(2 * emb.m + 1)


def test_vertex_identifies_every_tick():
    emb, tree = grid_with_tree(5, 0)
    mp = Mapped(emb, tree)
    for t in range(1, 2 * emb.m + 1):
        e = mp.tick_edge[t - 1]
        assert mp.nav.vertex(t) == mp.label[int(emb.esrc[e]) + 1]


def test_parallel_and_sequential_navigate_identically():
    emb, tree = grid_with_tree(6, 1)
    nav_seq = Navigator(sequential_build(emb, tree))
    nav_par = Navigator(build_compact(emb, tree, threads=4))
    for v in range(1, emb.n + 1):
        assert nav_seq.listing(v) == nav_par.listing(v)