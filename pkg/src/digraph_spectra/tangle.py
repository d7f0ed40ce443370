"""Cycles, forward balls and tangle detection.

An oriented multigraph is *tangled* when it contains at least two cycles.
Cycles ignore orientation and loops and multi-edges count, so the number of
independent cycles is the dimension of the cycle space of the underlying
unoriented multigraph::

    #edges - #vertices + #connected components

A single loop gives 1, two loops at the same vertex give 2, a tree gives 0.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .sampler import Digraph

__all__ = [
    "OrientedMultigraph",
    "ForwardBall",
    "count_independent_cycles",
    "is_tangle_free",
    "forward_ball",
    "is_d_tangle_free",
    "tangled_centers",
    "path_graph",
    "default_t",
]

DEFAULT_ALPHA = 0.24


@dataclass(frozen=True)
class OrientedMultigraph:
    vertices: tuple
    edges: tuple  # (u, v) pairs, repeated for multi-edges

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable = ()) -> "OrientedMultigraph":
        edges = tuple((u, v) for u, v in edges)
        vs = dict.fromkeys(vertices)
        for u, v in edges:
            vs.setdefault(u)
            vs.setdefault(v)
        return cls(tuple(vs), edges)


def count_independent_cycles(g: OrientedMultigraph) -> int:
    """Cycle-space dimension ``E - V + C`` of the unoriented skeleton."""
    parent = {v: v for v in g.vertices}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    components = len(parent)
    for u, v in g.edges:
        for w in (u, v):
            if w not in parent:
                parent[w] = w
                components += 1
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            components -= 1
    return len(g.edges) - len(parent) + components


def is_tangle_free(g: OrientedMultigraph) -> bool:
    return count_independent_cycles(g) <= 1


@dataclass(frozen=True)
class ForwardBall:
    center: int
    radius: int
    vertices: tuple   # in BFS order, center first
    distance: dict
    graph: OrientedMultigraph

    @property
    def tangle_free(self) -> bool:
        return is_tangle_free(self.graph)


def _ball_vertices(adj: list, x: int, r: int) -> dict:
    dist = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du == r:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def forward_ball(g: Digraph, x: int, r: int) -> ForwardBall:
    """Sub-multigraph induced on ``{y : d(x, y) <= r}``, keeping every multi-edge."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    adj = g.adjacency
    dist = _ball_vertices(adj, x, r)
    edges = [(u, v) for u in dist for v in adj[u] if v in dist]
    return ForwardBall(x, r, tuple(dist), dist, OrientedMultigraph(tuple(dist), tuple(edges)))


def _ball_cycles(adj, x, d):
    dist = _ball_vertices(adj, x, d)
    # balls are connected, so cycles = E - V + 1
    n_edges = sum(1 for u in dist for v in adj[u] if v in dist)
    return n_edges - len(dist) + 1


def tangled_centers(g: Digraph, d: int) -> list[int]:
    """Every vertex whose radius-``d`` forward ball is tangled."""
    if d < 0:
        raise ValueError("radius must be non-negative")
    adj = g.adjacency
    return [x for x in range(g.n) if _ball_cycles(adj, x, d) >= 2]


def is_d_tangle_free(g: Digraph, d: int) -> tuple[bool, Optional[int]]:
    """Whether every forward ball of radius ``d`` is tangle-free.

    Returns ``(True, None)`` or ``(False, x)`` with ``x`` the lowest-indexed
    centre whose ball is tangled.
    """
    if d < 0:
        raise ValueError("radius must be non-negative")
    adj = g.adjacency
    for x in range(g.n):
        if _ball_cycles(adj, x, d) >= 2:
            return False, x
    return True, None


def path_graph(p) -> OrientedMultigraph:
    """Multigraph ``G(p)`` of a path: one edge per distinct (head, tail) couple."""
    p.check()
    couples = dict.fromkeys(p.couples())
    vertices = dict.fromkeys(h.vertex for h in p.half_edges())
    edges = tuple((e.vertex, f.vertex) for e, f in couples)
    return OrientedMultigraph(tuple(vertices), edges)


def path_is_tangle_free(p) -> bool:
    return is_tangle_free(path_graph(p))


def default_t(n: int, Delta: int, alpha: float = DEFAULT_ALPHA) -> int:
    """``ceil(alpha * log_Delta(n))``, at least 1."""
    if n <= 1:
        return 1
    return max(1, math.ceil(alpha * math.log(n) / math.log(Delta) - 1e-12))
