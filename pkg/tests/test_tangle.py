import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from digraph_spectra.degrees import regular, validate
from digraph_spectra.paths import Path, enumerate_paths
from digraph_spectra.sampler import (Environment, HalfEdge, build_digraph, derive_seed,
                                     sample_digraph)
from digraph_spectra.tangle import (OrientedMultigraph, count_independent_cycles, default_t,
                                    forward_ball, is_d_tangle_free, is_tangle_free,
                                    path_graph, path_is_tangle_free, tangled_centers)


def test_cycle_counts():
    tri = OrientedMultigraph.from_edges([(0, 1), (1, 2), (2, 0)])
    assert count_independent_cycles(tri) == 1 and is_tangle_free(tri)
    # orientation is ignored: 0->1, 0->2, 1->2 still closes a cycle
    assert count_independent_cycles(OrientedMultigraph.from_edges([(0, 1), (0, 2), (1, 2)])) == 1
    two_loops = OrientedMultigraph.from_edges([(0, 0), (0, 0)])
    assert count_independent_cycles(two_loops) == 2 and not is_tangle_free(two_loops)
    assert count_independent_cycles(OrientedMultigraph.from_edges([(0, 1), (0, 1)])) == 1
    assert count_independent_cycles(OrientedMultigraph.from_edges([], vertices=[1, 2])) == 0
    forest = OrientedMultigraph.from_edges([(0, 1), (2, 3)])
    assert count_independent_cycles(forest) == 0


def test_single_vertex_is_tangled():
    g = build_digraph(validate([2], [2]), Environment(np.array([0, 1])))
    assert is_d_tangle_free(g, 0) == (False, 0)
    assert tangled_centers(g, 1) == [0]


def test_ball_radius_zero():
    g = sample_digraph(regular(50, 3), 0)
    ball = forward_ball(g, 7, 0)
    assert ball.vertices == (7,)
    loops = int(g.counts[7, 7])
    assert len(ball.graph.edges) == loops


def test_ball_contents():
    g = sample_digraph(regular(60, 3), 11)
    ball = forward_ball(g, 3, 2)
    assert ball.vertices[0] == 3 and ball.distance[3] == 0
    assert all(d <= 2 for d in ball.distance.values())
    inside = set(ball.vertices)
    expected = sum(int(g.counts[u, v]) for u in inside for v in inside)
    assert len(ball.graph.edges) == expected
    with pytest.raises(ValueError):
        forward_ball(g, 0, -1)


@given(st.integers(0, 2**32), st.integers(0, 3))
def test_first_centre_is_lowest(seed, d):
    g = sample_digraph(regular(30, 3), seed)
    ok, x = is_d_tangle_free(g, d)
    centres = tangled_centers(g, d)
    assert ok == (not centres)
    assert x == (centres[0] if centres else None)
    for c in centres:
        assert not forward_ball(g, c, d).tangle_free


@given(st.integers(0, 2**32))
def test_radius_monotone(seed):
    g = sample_digraph(regular(40, 2), seed)
    sets = [set(tangled_centers(g, d)) for d in range(4)]
    for a, b in zip(sets, sets[1:]):
        assert a <= b


def test_default_t():
    assert default_t(2000, 3) == math.ceil(0.24 * math.log(2000, 3)) == 2
    assert default_t(81, 3, alpha=0.25) == 1
    assert default_t(1, 5) == 1
    assert default_t(10_000, 3) == 3


def _brute_cycle_rank(vertices, edges):
    # edges outside a largest spanning forest, found by exhaustive search
    for r in range(len(edges), -1, -1):
        for subset in itertools.combinations(range(len(edges)), r):
            parent = {v: v for v in vertices}

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            acyclic = True
            for k in subset:
                a, b = find(edges[k][0]), find(edges[k][1])
                if a == b:
                    acyclic = False
                    break
                parent[a] = b
            if acyclic:
                return len(edges) - r


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=8))
def test_cycle_rank_matches_brute_force(edges):
    g = OrientedMultigraph.from_edges(edges, vertices=range(5))
    assert count_independent_cycles(g) == _brute_cycle_rank(list(range(5)), edges)


def test_path_graph_examples():
    e, f = HalfEdge(0, 0, "+"), HalfEdge(0, 0, "-")
    loop3 = Path((e, f, e, f, e, f))
    assert path_graph(loop3).edges == ((0, 0),)
    assert path_is_tangle_free(loop3)
    q = Path((e, f, e, HalfEdge(0, 1, "-")))
    assert len(path_graph(q).edges) == 2 and not path_is_tangle_free(q)
    single = path_graph(Path((HalfEdge(0, 0, "+"), HalfEdge(1, 0, "-"))))
    assert single.vertices == (0, 1) and single.edges == ((0, 1),)


def test_tangle_free_graph_has_tangle_free_paths():
    # a known 2-tangle-free sample, found by scanning seeds in order
    seq = regular(40, 2)
    g = sample_digraph(seq, derive_seed(2, 55))
    assert is_d_tangle_free(g, 2) == (True, None)
    for t in (1, 2):
        for i in range(seq.n):
            for j in range(seq.n):
                for p in enumerate_paths(g, i, j, t, realized_only=True):
                    assert p.is_tangle_free()
