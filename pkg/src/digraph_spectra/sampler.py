"""Uniform head-to-tail matchings and the directed multigraphs they induce.

Half-edges are numbered globally, vertex-major and slot-minor: the heads of
vertex 0 come first, then those of vertex 1, and so on (tails likewise).
An :class:`Environment` stores ``sigma`` with ``sigma[e] = f`` meaning that
head ``e`` is glued to tail ``f``.

Randomness comes from numpy's ``PCG64`` bit generator.  Trial ``k`` of an
experiment with root seed ``r`` uses :func:`derive_seed` ``(r, k)``, which
goes through :class:`numpy.random.SeedSequence` spawn keys, so a trial's
stream does not depend on which worker runs it or in what order.

Serialized environments look like::

    # environment M=6 seed=12345
    3 0 5 1 4 2
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Literal, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .degrees import DegreeSequence
from .errors import SizeMismatch, TooLarge

__all__ = [
    "HalfEdge",
    "Environment",
    "Digraph",
    "derive_seed",
    "sample_environment",
    "build_digraph",
    "sample_digraph",
    "enumerate_environments",
    "format_environment",
    "parse_environment",
]

DEFAULT_ENUMERATION_CAP = 8


@dataclass(frozen=True, order=True)
class HalfEdge:
    """A half-edge ``(vertex, slot, kind)``; kind is ``'+'`` (head) or ``'-'`` (tail)."""

    vertex: int
    slot: int
    kind: Literal["+", "-"]

    @property
    def is_head(self) -> bool:
        return self.kind == "+"

    def index(self, seq: DegreeSequence) -> int:
        """Global index among heads (or tails) of ``seq``."""
        if self.kind == "+":
            return seq.head(self.vertex, self.slot)
        return seq.tail(self.vertex, self.slot)

    def __str__(self):
        return f"({self.vertex},{self.slot},{self.kind})"


def head_at(seq: DegreeSequence, index: int) -> HalfEdge:
    v, s = seq.head_slot(index)
    return HalfEdge(v, s, "+")


def tail_at(seq: DegreeSequence, index: int) -> HalfEdge:
    v, s = seq.tail_slot(index)
    return HalfEdge(v, s, "-")


@dataclass(frozen=True, eq=False)
class Environment:
    sigma: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=np.int64)
        if sigma.ndim != 1 or not np.array_equal(np.sort(sigma), np.arange(sigma.size)):
            raise ValueError("sigma must be a permutation of 0..M-1")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    @property
    def M(self) -> int:
        return int(self.sigma.size)

    def __eq__(self, other):
        if not isinstance(other, Environment):
            return NotImplemented
        return np.array_equal(self.sigma, other.sigma) and self.seed == other.seed

    def __hash__(self):
        return hash((self.sigma.tobytes(), self.seed))


def derive_seed(root: int, index: int) -> int:
    """Per-trial 64-bit seed obtained by splitting ``root`` with ``index``."""
    ss = np.random.SeedSequence(int(root), spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def sample_environment(seq: DegreeSequence, seed: int) -> Environment:
    """Uniform random matching of the ``M`` heads onto the ``M`` tails."""
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    tails = np.arange(seq.M, dtype=np.int64)
    rng.shuffle(tails)  # Fisher-Yates
    return Environment(tails, int(seed))


class Digraph:
    """Directed configuration multigraph: a degree sequence plus a matching.

    Attributes
    ----------
    seq, env
        The inputs.
    head_target : ndarray of shape (M,)
        Vertex receiving head ``e``, i.e. the vertex of tail ``sigma[e]``.
    tail_source : ndarray of shape (M,)
        Vertex whose head is glued to tail ``f``.
    counts : ndarray of shape (n, n)
        ``counts[u, v]`` is the number of edges from ``u`` to ``v`` (loops on
        the diagonal).
    """

    def __init__(self, seq: DegreeSequence, env: Environment):
        if env.M != seq.M:
            raise SizeMismatch(f"environment permutes {env.M} items but M = {seq.M}")
        self.seq = seq
        self.env = env
        self.sigma = env.sigma
        sigma_inv = np.empty_like(env.sigma)
        sigma_inv[env.sigma] = np.arange(seq.M)
        sigma_inv.setflags(write=False)
        self.sigma_inv = sigma_inv
        self.head_target = seq.tail_vertex[env.sigma]
        self.tail_source = seq.head_vertex[sigma_inv]
        counts = np.zeros((seq.n, seq.n), dtype=np.int64)
        np.add.at(counts, (seq.head_vertex, self.head_target), 1)
        counts.setflags(write=False)
        self.counts = counts
        for a in (self.head_target, self.tail_source):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.seq.n

    @property
    def M(self) -> int:
        return self.seq.M

    def __repr__(self):
        return f"Digraph(n={self.n}, M={self.M}, seed={self.env.seed})"

    def out_neighbors(self, u: int) -> np.ndarray:
        """Targets of the heads of ``u``, one entry per edge (with repeats)."""
        s = self.seq
        return self.head_target[s.head_offset[u]:s.head_offset[u + 1]]

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Out-neighbour lists with multiplicity, as plain Python ints."""
        s = self.seq
        tgt = self.head_target.tolist()
        off = s.head_offset.tolist()
        return [tgt[off[u]:off[u + 1]] for u in range(s.n)]

    def edges(self) -> list[tuple[int, int]]:
        """All ``(u, v)`` edges with multiplicity, ordered by head index."""
        return list(zip(self.seq.head_vertex.tolist(), self.head_target.tolist()))

    def out_degrees(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def is_strongly_connected(self) -> bool:
        ncomp, _ = connected_components(csr_matrix(self.counts), directed=True,
                                        connection="strong")
        return ncomp == 1


def build_digraph(seq: DegreeSequence, env: Environment) -> Digraph:
    return Digraph(seq, env)


def sample_digraph(seq: DegreeSequence, seed: int) -> Digraph:
    return Digraph(seq, sample_environment(seq, seed))


def enumerate_environments(seq: DegreeSequence, cap: int = DEFAULT_ENUMERATION_CAP
                           ) -> Iterator[Environment]:
    """Yield all ``M!`` matchings in lexicographic order of ``sigma``."""
    if seq.M > cap:
        raise TooLarge(f"M = {seq.M} exceeds the enumeration cap {cap} "
                       f"({math.factorial(seq.M)} environments)")
    for perm in itertools.permutations(range(seq.M)):
        yield Environment(np.array(perm, dtype=np.int64))


def format_environment(env: Environment) -> str:
    seed = "none" if env.seed is None else str(env.seed)
    return (f"# environment M={env.M} seed={seed}\n"
            + " ".join(str(int(x)) for x in env.sigma) + "\n")


def parse_environment(text: str) -> Environment:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("# environment"):
        raise ValueError("expected a '# environment M=.. seed=..' header and one data line")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
    M = int(fields["M"])
    seed = None if fields.get("seed", "none") == "none" else int(fields["seed"])
    sigma = np.array([int(x) for x in lines[1].split()], dtype=np.int64)
    if sigma.size != M:
        raise SizeMismatch(f"header says M={M} but {sigma.size} entries follow")
    return Environment(sigma, seed)
