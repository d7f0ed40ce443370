"""Random-walk transition matrix of a configuration digraph."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .degrees import DegreeSequence
from .errors import KindMismatch
from .sampler import Digraph, HalfEdge

__all__ = ["TransitionMatrix", "build_P", "pi_minus", "edge_weight",
           "format_matrix_csv", "parse_matrix_csv"]


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    matrix: np.ndarray
    graph: Optional[Digraph] = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def build_P(g: Digraph) -> TransitionMatrix:
    """``P[u, v] = #{heads of u glued into tails of v} / d_u^+``."""
    P = g.counts / g.seq.d_plus[:, None]
    P.setflags(write=False)
    return TransitionMatrix(P, g)


def as_matrix(P) -> np.ndarray:
    if isinstance(P, TransitionMatrix):
        return P.matrix
    return np.asarray(P, dtype=float)


def pi_minus(seq: DegreeSequence) -> np.ndarray:
    """In-degree distribution ``d_j^- / M``."""
    return seq.d_minus / seq.M


def edge_weight(g: Digraph, e: HalfEdge, f: HalfEdge, centered: bool = False) -> float:
    """``1[sigma(e) = f] / d_e^+``, minus ``1 / (M d_e^+)`` when ``centered``."""
    if e.kind != "+" or f.kind != "-":
        raise KindMismatch(f"expected (head, tail), got ({e}, {f})")
    seq = g.seq
    hit = float(g.sigma[e.index(seq)] == f.index(seq))
    if centered:
        hit -= 1.0 / seq.M
    return hit / int(seq.d_plus[e.vertex])


def format_matrix_csv(A: np.ndarray, header: Optional[str] = None) -> str:
    """Row-major CSV with shortest round-trip float formatting."""
    A = np.asarray(A, dtype=float)
    lines = [] if header is None else [f"# {header}"]
    lines += [",".join(repr(float(x)) for x in row) for row in A]
    return "\n".join(lines) + "\n"


def parse_matrix_csv(text: str) -> np.ndarray:
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return np.array([[float(x) for x in ln.split(",")] for ln in rows])
