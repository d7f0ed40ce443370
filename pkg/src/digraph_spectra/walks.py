"""Random-walk convergence: stationary law, distance to equilibrium, collisions.

``d(k) = max_x || P^k(x, .) - pi ||_TV`` is computed from powers of the
deflated matrix ``D = P - 1 pi^T``.  Since ``P 1 = 1`` and ``pi^T P = pi^T``,
``D^k = P^k - 1 pi^T`` for ``k >= 1``, and forming ``D^k`` directly avoids
the cancellation that would otherwise floor ``d(k)`` near ``1e-16`` and hide
the geometric rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import Periodic, Reducible
from .transition import as_matrix

__all__ = [
    "MixingTrace",
    "RateEstimate",
    "is_irreducible",
    "period",
    "stationary",
    "distance_to_equilibrium",
    "mixing_trace",
    "rate_estimate",
    "collision_probability",
    "format_trace_csv",
]

RESIDUAL_TARGET = 1e-12


def _support(P: np.ndarray) -> csr_matrix:
    return csr_matrix((P > 0).astype(np.int8))


def is_irreducible(P) -> bool:
    P = as_matrix(P)
    ncomp, _ = connected_components(_support(P), directed=True, connection="strong")
    return ncomp == 1


def period(P) -> int:
    """Period of an irreducible chain: gcd of ``level(u) + 1 - level(v)`` over
    support edges, with BFS levels from state 0."""
    P = as_matrix(P)
    if not is_irreducible(P):
        raise Reducible("period is only defined here for irreducible chains")
    S = _support(P)
    order, pred = breadth_first_order(S, 0, directed=True, return_predecessors=True)
    level = np.zeros(P.shape[0], dtype=np.int64)
    for v in order[1:]:
        level[v] = level[pred[v]] + 1
    u, v = S.nonzero()
    g = 0
    for diff in np.unique(np.abs(level[u] + 1 - level[v])):
        g = math.gcd(g, int(diff))
    return g


def stationary(P) -> np.ndarray:
    """Stationary distribution of an irreducible chain.

    Direct solve of ``pi^T (P - I) = 0`` with ``sum(pi) = 1``, then iterative
    refinement until ``||pi^T P - pi^T||_inf <= 1e-12``.
    """
    P = as_matrix(P)
    n = P.shape[0]
    if not is_irreducible(P):
        raise Reducible("chain is not irreducible; the stationary law is not unique")
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = np.linalg.solve(A, rhs)
    for _ in range(10):
        r = rhs - A @ pi
        if np.max(np.abs(pi @ P - pi)) <= RESIDUAL_TARGET * 0.1:
            break
        pi = pi + np.linalg.solve(A, r)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _tv_rows(D: np.ndarray) -> float:
    return float(0.5 * np.max(np.sum(np.abs(D), axis=1)))


def distance_to_equilibrium(P, k: int) -> float:
    P = as_matrix(P)
    if k < 0:
        raise ValueError("k must be >= 0")
    pi = stationary(P)
    if k == 0:
        return _tv_rows(np.eye(P.shape[0]) - pi[None, :])
    D = P - pi[None, :]
    return min(1.0, _tv_rows(np.linalg.matrix_power(D, k)))


@dataclass(frozen=True, eq=False)
class MixingTrace:
    d: np.ndarray          # d[k-1] = d(k)
    roots: np.ndarray      # d(k)^(1/k)
    pi: np.ndarray
    irreducible: bool
    aperiodic: bool

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.d.size + 1)

    @property
    def degenerate(self) -> bool:
        return bool(self.d.size and self.d[-1] == 0.0)


def mixing_trace(P, k_max: int) -> MixingTrace:
    P = as_matrix(P)
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    pi = stationary(P)
    aperiodic = period(P) == 1
    D = P - pi[None, :]
    Dk = D.copy()
    d = np.empty(k_max)
    for k in range(1, k_max + 1):
        if k > 1:
            Dk = Dk @ D
        d[k - 1] = min(1.0, _tv_rows(Dk))
    with np.errstate(divide="ignore"):
        roots = np.where(d > 0, d ** (1.0 / np.arange(1, k_max + 1)), 0.0)
    return MixingTrace(d, roots, pi, True, aperiodic)


@dataclass(frozen=True, eq=False)
class RateEstimate:
    rate: float
    k_max: int
    trailing: np.ndarray   # last few roots d(k)^(1/k)
    degenerate: bool       # d(k_max) == 0, rate reported as 0

    def __float__(self):
        return self.rate


def rate_estimate(P, k_max: int, tail: int = 10) -> RateEstimate:
    """``d(k_max)^(1/k_max)`` for an irreducible aperiodic chain."""
    P = as_matrix(P)
    if not is_irreducible(P):
        raise Reducible("rate estimate needs an irreducible chain")
    if period(P) != 1:
        raise Periodic(f"chain has period {period(P)}")
    tr = mixing_trace(P, k_max)
    return RateEstimate(float(tr.roots[-1]), k_max, tr.roots[-tail:].copy(), tr.degenerate)


def collision_probability(P, t: int) -> float:
    """``sum_i (pi0^T P^t)_i^2`` for uniform ``pi0``: the chance that two
    independent walks started uniformly meet at time ``t``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    P = as_matrix(P)
    n = P.shape[0]
    q = np.full(n, 1.0 / n)
    for _ in range(t):
        q = q @ P
    return float(q @ q)


def format_trace_csv(trace: MixingTrace) -> str:
    lines = ["k,d,root"]
    for k, (d, r) in enumerate(zip(trace.d, trace.roots), start=1):
        lines.append(f"{k},{float(d)!r},{float(r)!r}")
    return "\n".join(lines) + "\n"
