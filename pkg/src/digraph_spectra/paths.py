"""Half-edge paths and the path-sum variants of powers of ``P``.

A path of length ``t`` is a half-edge sequence ``(e1, f1, ..., et, ft)``
where each ``e`` is a head, each ``f`` a tail, and ``f_s``, ``e_{s+1}`` sit on
the same vertex.  It does not have to exist in the graph; it is *realized*
when ``sigma(e_s) = f_s`` for every step.  With

    A(e, f)    = 1[sigma(e) = f] / d_e^+
    Abar(e, f) = (1[sigma(e) = f] - 1/M) / d_e^+

the matrices handled here are sums over paths from ``i`` to ``j``:

=========================  ==============================================
tag                         summand
=========================  ==============================================
``plain_t``                 prod A over all paths             (= P^t)
``centered_t``              prod Abar over all paths
``tanglefree_t``            prod A over tangle-free paths
``centered_tanglefree_t``   prod Abar over tangle-free paths
``tangled_rest``            prod_{s<l} A * 1/d_{e_l}^+ * prod_{s>l} Abar over
                            tangled paths whose steps ``1..l-1`` and
                            ``l+1..t`` are each tangle-free
=========================  ==============================================

Two independent routes compute them.

*Enumeration* walks every half-edge path and tests tangle-freeness on the
path multigraph ``G(p)``.  Exact but exponential, so it is capped.

*Fast route.*  ``centered_t`` is a product of half-edge transfer matrices.
Tangle-filtered variants are "all paths minus tangled paths".  ``G(p)`` is
connected, so ``p`` is tangled iff ``a >= V + 1`` with ``a`` the number of
distinct (head, tail) couples and ``V`` the number of distinct vertices;
since ``a <= t``, tangled paths visit at most ``t - 1`` vertices.  For each
vertex pattern (which positions share a vertex) and each set partition of
the steps (which steps reuse the same couple), the sum over half-edges with
*exactly* that coincidence structure follows from Moebius inversion on the
partition lattice of per-block sums; those depend only on the edge
multiplicities ``counts[x, y]``.  All vertex labellings of a pattern are
handled at once with ``einsum``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .degrees import DegreeSequence
from .errors import BadEll, ConvergenceFailure, InconsistentPath, NotTangleFree, TooLarge
from .sampler import Digraph, HalfEdge, head_at, tail_at
from .tangle import count_independent_cycles, is_d_tangle_free, path_graph
from .transition import as_matrix, build_P, pi_minus

__all__ = [
    "Path",
    "VariantMatrix",
    "TAGS",
    "count_paths",
    "enumerate_paths",
    "variant_matrix",
    "variant_matrix_by_enumeration",
    "centered_power_transfer",
    "tangled_path_sum",
    "decomposition_terms",
    "decomposition_residual",
    "operator_norm",
    "norm_vs_bound_report",
    "telescoping_sum",
]

TAGS = ("plain_t", "centered_t", "tanglefree_t", "centered_tanglefree_t", "tangled_rest")
DEFAULT_CAP = 10_000_000


# --------------------------------------------------------------------------
# Path objects
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Path:
    """Alternating half-edge sequence.

    A forward path starts with a head: ``(e1, f1, ..., et, ft)``.  Its
    reversal ``(ft, et, ..., f1, e1)`` starts with a tail and is also a
    :class:`Path`; :meth:`reversed` is an involution.
    """

    half: tuple

    @classmethod
    def from_steps(cls, steps: Sequence[tuple[HalfEdge, HalfEdge]]) -> "Path":
        return cls(tuple(h for step in steps for h in step))

    @classmethod
    def from_indices(cls, seq: DegreeSequence, flat: Sequence[int]) -> "Path":
        """Forward path from global indices ``(e1, f1, e2, f2, ...)``."""
        half = []
        for k, idx in enumerate(flat):
            half.append(head_at(seq, idx) if k % 2 == 0 else tail_at(seq, idx))
        return cls(tuple(half))

    @property
    def length(self) -> int:
        return len(self.half) // 2

    @property
    def is_forward(self) -> bool:
        return bool(self.half) and self.half[0].kind == "+"

    @property
    def start(self) -> int:
        return self.half[0].vertex

    @property
    def end(self) -> int:
        return self.half[-1].vertex

    def half_edges(self) -> tuple:
        return self.half

    def check(self) -> None:
        h = self.half
        if len(h) == 0 or len(h) % 2:
            raise InconsistentPath("a path needs a positive, even number of half-edges")
        first = h[0].kind
        for k, x in enumerate(h):
            want = first if k % 2 == 0 else ("-" if first == "+" else "+")
            if x.kind != want:
                raise InconsistentPath(f"half-edge {k} ({x}) has the wrong kind")
        for k in range(1, len(h) - 1, 2):
            if h[k].vertex != h[k + 1].vertex:
                raise InconsistentPath(
                    f"half-edges {h[k]} and {h[k + 1]} are not on the same vertex")

    def couples(self) -> list[tuple[HalfEdge, HalfEdge]]:
        """(head, tail) couple of every step, in traversal order."""
        h = self.half
        out = []
        for k in range(0, len(h), 2):
            a, b = h[k], h[k + 1]
            out.append((a, b) if a.kind == "+" else (b, a))
        return out

    def reversed(self) -> "Path":
        return Path(self.half[::-1])

    def concat(self, other: "Path") -> "Path":
        if self.is_forward != other.is_forward:
            raise InconsistentPath("cannot glue a forward path to a reversed one")
        if self.end != other.start:
            raise InconsistentPath(f"path ends at {self.end} but next starts at {other.start}")
        return Path(self.half + other.half)

    def is_realized(self, g: Digraph) -> bool:
        seq = g.seq
        return all(g.sigma[e.index(seq)] == f.index(seq) for e, f in self.couples())

    def is_tangle_free(self) -> bool:
        return count_independent_cycles(path_graph(self)) <= 1


# --------------------------------------------------------------------------
# Enumeration route
# --------------------------------------------------------------------------

def count_paths(seq: DegreeSequence, i: int, j: int, t: int) -> int:
    """Size of the set of length-``t`` paths from ``i`` to ``j``."""
    inner = int(np.dot(seq.d_minus, seq.d_plus))
    return int(seq.d_plus[i]) * inner ** (t - 1) * int(seq.d_minus[j])


def _heads(seq, v):
    return range(int(seq.head_offset[v]), int(seq.head_offset[v + 1]))


def _tails(seq, v):
    return range(int(seq.tail_offset[v]), int(seq.tail_offset[v + 1]))


def _flat_paths(seq: DegreeSequence, i: int, j: Optional[int], t: int) -> Iterator[tuple]:
    """Global-index tuples ``(e1, f1, ..., et, ft)`` of all paths from ``i``."""
    tails_all = range(seq.M)
    tv = seq.tail_vertex

    def rec(prefix, v, steps_left):
        if steps_left == 1:
            last = tails_all if j is None else _tails(seq, j)
            for e in _heads(seq, v):
                for f in last:
                    yield prefix + (e, f)
            return
        for e in _heads(seq, v):
            for f in tails_all:
                yield from rec(prefix + (e, f), int(tv[f]), steps_left - 1)

    yield from rec((), i, t)


def enumerate_paths(g: Digraph, i: int, j: int, t: int, realized_only: bool = False,
                    cap: int = DEFAULT_CAP) -> Iterator[Path]:
    """All length-``t`` paths from ``i`` to ``j`` (or only realized ones)."""
    if t < 1:
        raise ValueError("path length must be >= 1")
    seq = g.seq
    if realized_only:
        for flat in _realized_flat(g, i, t):
            if seq.tail_vertex[flat[-1]] == j:
                yield Path.from_indices(seq, flat)
        return
    total = count_paths(seq, i, j, t)
    if total > cap:
        raise TooLarge(f"{total} paths from {i} to {j} exceed the cap {cap}")
    for flat in _flat_paths(seq, i, j, t):
        yield Path.from_indices(seq, flat)


def _realized_flat(g: Digraph, i: int, t: int) -> Iterator[tuple]:
    seq = g.seq
    sigma = g.sigma.tolist()
    tv = seq.tail_vertex

    def rec(prefix, v, steps_left):
        for e in _heads(seq, v):
            f = sigma[e]
            if steps_left == 1:
                yield prefix + (e, f)
            else:
                yield from rec(prefix + (e, f), int(tv[f]), steps_left - 1)

    yield from rec((), i, t)


def _flat_is_tangled(seq: DegreeSequence, flat: tuple) -> bool:
    couples = {(flat[k], flat[k + 1]) for k in range(0, len(flat), 2)}
    if not couples:
        return False
    path = Path.from_indices(seq, flat)
    return count_independent_cycles(path_graph(path)) >= 2


def variant_matrix_by_enumeration(g: Digraph, tag: str, t: int, ell: Optional[int] = None,
                                  cap: int = DEFAULT_CAP) -> np.ndarray:
    """Brute-force path sum for ``tag``; the independent reference route."""
    _check_tag(tag, t, ell)
    seq = g.seq
    n, M = seq.n, seq.M
    total = M * M * int(np.dot(seq.d_minus, seq.d_plus)) ** (t - 1)
    if total > cap:
        raise TooLarge(f"{total} paths exceed the enumeration cap {cap}")
    sigma = g.sigma
    inv_d = 1.0 / seq.d_plus
    hv, tv = seq.head_vertex, seq.tail_vertex
    kinds = _kinds(tag, t, ell)
    out = np.zeros((n, n))
    for i in range(n):
        for flat in _flat_paths(seq, i, None, t):
            w = 1.0
            for s in range(t):
                e, f = flat[2 * s], flat[2 * s + 1]
                hit = 1.0 if sigma[e] == f else 0.0
                k = kinds[s]
                if k == "A":
                    w *= hit * inv_d[hv[e]]
                elif k == "C":
                    w *= (hit - 1.0 / M) * inv_d[hv[e]]
                else:
                    w *= inv_d[hv[e]]
                if w == 0.0:
                    break
            if w == 0.0:
                continue
            if tag in ("tanglefree_t", "centered_tanglefree_t"):
                if _flat_is_tangled(seq, flat):
                    continue
            elif tag == "tangled_rest":
                if not _flat_is_tangled(seq, flat):
                    continue
                if ell > 1 and _flat_is_tangled(seq, flat[:2 * (ell - 1)]):
                    continue
                if ell < t and _flat_is_tangled(seq, flat[2 * ell:]):
                    continue
            out[i, tv[flat[-1]]] += w
    return out


# --------------------------------------------------------------------------
# Fast route
# --------------------------------------------------------------------------

def centered_power_transfer(g: Digraph, t: int) -> np.ndarray:
    """Centered path sum via half-edge transfer matrices ``U B (T B)^(t-1) V``.

    ``U`` maps vertices to their heads, ``B[e, f] = Abar(e, f)``, ``T`` maps a
    tail to the heads on the same vertex and ``V`` maps tails to vertices.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    seq = g.seq
    n, M = seq.n, seq.M
    if t == 0:
        return np.eye(n)
    U = np.zeros((n, M))
    U[seq.head_vertex, np.arange(M)] = 1.0
    V = np.zeros((M, n))
    V[np.arange(M), seq.tail_vertex] = 1.0
    T = (seq.tail_vertex[:, None] == seq.head_vertex[None, :]).astype(float)
    B = np.full((M, M), -1.0 / M)
    B[np.arange(M), g.sigma] += 1.0
    B /= seq.d_plus[seq.head_vertex][:, None]
    TB = T @ B
    acc = U @ B
    for _ in range(t - 1):
        acc = acc @ TB
    return acc @ V


@lru_cache(maxsize=None)
def _set_partitions(t: int) -> tuple:
    """All set partitions of ``range(t)`` as tuples of frozensets."""
    def rec(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in rec(rest):
            for k in range(len(part)):
                yield part[:k] + [part[k] | {first}] + part[k + 1:]
            yield [frozenset({first})] + part

    out = []
    for part in rec(list(range(t))):
        out.append(tuple(sorted((frozenset(b) for b in part), key=min)))
    return tuple(out)


def _refines(fine, coarse) -> bool:
    return all(any(b <= c for c in coarse) for b in fine)


def _moebius(fine, coarse) -> int:
    mu = 1
    for c in coarse:
        k = sum(1 for b in fine if b <= c)
        mu *= (-1) ** (k - 1) * math.factorial(k - 1)
    return mu


@lru_cache(maxsize=None)
def _patterns(length: int, max_labels: int) -> tuple:
    """Restricted growth strings of ``length`` with at most ``max_labels`` labels."""
    out = []

    def rec(prefix, used):
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for lab in range(min(used + 1, max_labels)):
            rec(prefix + [lab], max(used, lab + 1))

    if max_labels >= 1:
        rec([], 0)
    return tuple(out)


def _kinds(tag: str, t: int, ell: Optional[int]) -> str:
    if tag in ("plain_t", "tanglefree_t"):
        return "A" * t
    if tag in ("centered_t", "centered_tanglefree_t"):
        return "C" * t
    return "A" * (ell - 1) + "D" + "C" * (t - ell)


_PHI = {"A": (0.0, 1.0), "D": (1.0, 1.0)}  # (value on unmatched, value on matched)


def _sub_tangled(pattern, part, steps) -> bool:
    if not steps:
        return False
    positions = {s for s in steps} | {s + 1 for s in steps}
    n_couples = sum(1 for b in part if b & steps)
    n_vertices = len({pattern[p] for p in positions})
    return n_couples >= n_vertices + 1


def tangled_path_sum(g: Digraph, kinds: str,
                     keep: Optional[Callable[[tuple, tuple], bool]] = None,
                     cap: int = DEFAULT_CAP) -> np.ndarray:
    """Sum over *tangled* paths of the per-step weights named by ``kinds``.

    ``kinds[s]`` is ``'A'`` (uncentered), ``'C'`` (centered) or ``'D'``
    (constant ``1/d^+``).  ``keep(pattern, partition)`` further restricts the
    coincidence structures that are summed.
    """
    seq = g.seq
    n, M = seq.n, seq.M
    t = len(kinds)
    out = np.zeros((n, n))
    if t < 2:
        return out
    patterns = _patterns(t + 1, t - 1)
    work = sum(math.perm(n, max(p) + 1) for p in patterns)
    if work > cap:
        raise TooLarge(f"{work} vertex sequences exceed the cap {cap}")

    counts = g.counts.astype(float)
    slots = np.outer(seq.d_plus, seq.d_minus).astype(float)
    unmatched = slots - counts
    inv_d = 1.0 / seq.d_plus
    off_diag = 1.0 - np.eye(n)
    phi = dict(_PHI, C=(-1.0 / M, 1.0 - 1.0 / M))
    partitions = _set_partitions(t)
    letters = "abcdefghijklmnopqrstuvwxyz"

    for pattern in patterns:
        k = max(pattern) + 1
        pairs = [(pattern[s], pattern[s + 1]) for s in range(t)]
        compatible = [pt for pt in partitions
                      if all(len({pairs[s] for s in b}) == 1 for b in pt)]
        selected = [pt for pt in compatible
                    if len(pt) >= k + 1 and (keep is None or keep(pattern, pt))]
        if not selected:
            continue
        coef = {}
        for coarse in compatible:
            c = sum(_moebius(fine, coarse) for fine in selected if _refines(fine, coarse))
            if c:
                coef[coarse] = c
        if not coef:
            continue

        # inverse out-degrees of every step's tail vertex, common to all terms
        operands, subs = [], []
        for s in range(t):
            operands.append(inv_d)
            subs.append(letters[pattern[s]])
        for a in range(k):
            for b in range(a + 1, k):
                operands.append(off_diag)
                subs.append(letters[a] + letters[b])
        start, end = letters[pattern[0]], letters[pattern[t]]
        out_sub = start if start == end else start + end

        total = None
        for coarse, c in coef.items():
            ops, sb = [], []
            for block in coarse:
                x, y = pairs[min(block)]
                c0 = np.prod([phi[kinds[s]][0] for s in block])
                c1 = np.prod([phi[kinds[s]][1] for s in block])
                G = counts * c1 + unmatched * c0
                if x == y:
                    ops.append(np.diagonal(G))
                    sb.append(letters[x])
                else:
                    ops.append(G)
                    sb.append(letters[x] + letters[y])
            term = np.einsum(",".join(sb + subs) + "->" + out_sub, *ops, *operands,
                             optimize=True)
            total = c * term if total is None else total + c * term
        if start == end:
            out[np.diag_indices(n)] += total
        else:
            out += total
    return out


@dataclass(frozen=True, eq=False)
class VariantMatrix:
    matrix: np.ndarray
    tag: str
    t: int
    ell: Optional[int] = None

    def header(self) -> str:
        return f"tag={self.tag} t={self.t} ell={'' if self.ell is None else self.ell}"


def _check_tag(tag, t, ell):
    if tag not in TAGS:
        raise ValueError(f"unknown variant tag {tag!r}; expected one of {TAGS}")
    if t < 1:
        raise ValueError("t must be >= 1")
    if tag == "tangled_rest":
        if ell is None or not 1 <= ell <= t:
            raise BadEll(f"tangled_rest needs 1 <= ell <= t, got ell={ell}, t={t}")


def _tangled_rest_keep(ell: int, t: int):
    first = frozenset(range(ell - 1))
    last = frozenset(range(ell, t))

    def keep(pattern, part):
        return not _sub_tangled(pattern, part, first) and not _sub_tangled(pattern, part, last)

    return keep


def variant_matrix(g: Digraph, tag: str, t: int, ell: Optional[int] = None,
                   cap: int = DEFAULT_CAP) -> VariantMatrix:
    _check_tag(tag, t, ell)
    P = build_P(g).matrix
    if tag == "plain_t":
        A = np.linalg.matrix_power(P, t)
    elif tag == "centered_t":
        A = centered_power_transfer(g, t)
    elif tag == "tanglefree_t":
        A = np.linalg.matrix_power(P, t) - tangled_path_sum(g, "A" * t, cap=cap)
    elif tag == "centered_tanglefree_t":
        A = centered_power_transfer(g, t) - tangled_path_sum(g, "C" * t, cap=cap)
    else:
        A = tangled_path_sum(g, _kinds(tag, t, ell), _tangled_rest_keep(ell, t), cap=cap)
    return VariantMatrix(A, tag, t, ell)


# --------------------------------------------------------------------------
# Decomposition identity
# --------------------------------------------------------------------------

def _tanglefree_power(g, s, centered, cap):
    if s == 0:
        return np.eye(g.n)
    tag = "centered_tanglefree_t" if centered else "tanglefree_t"
    return variant_matrix(g, tag, s, cap=cap).matrix


def decomposition_terms(g: Digraph, t: int, cap: int = DEFAULT_CAP) -> dict:
    """Every matrix entering the gluing identity at length ``t``.

    Keys: ``P_t``, ``P_tf`` (tangle-free), ``Pbar_tf`` (centered tangle-free),
    ``glued`` (sum over l of ``P^(l-1) 1 pi^T Pbar^(t-l)``, tangle-free factors),
    ``rest`` (sum over l of ``R^{t,l}``) and ``M``.
    """
    P = build_P(g).matrix
    X = np.outer(np.ones(g.n), pi_minus(g.seq))
    glued = np.zeros((g.n, g.n))
    rest = np.zeros((g.n, g.n))
    for ell in range(1, t + 1):
        left = _tanglefree_power(g, ell - 1, False, cap)
        right = _tanglefree_power(g, t - ell, True, cap)
        glued += left @ X @ right
        rest += variant_matrix(g, "tangled_rest", t, ell, cap=cap).matrix
    return {
        "P_t": np.linalg.matrix_power(P, t),
        "P_tf": _tanglefree_power(g, t, False, cap),
        "Pbar_tf": _tanglefree_power(g, t, True, cap),
        "glued": glued,
        "rest": rest,
        "M": g.M,
    }


def decomposition_residual(g: Digraph, t: int, require_tangle_free: bool = True,
                           cap: int = DEFAULT_CAP) -> float:
    """Max-abs residual of the gluing identity

        P^t = Pbar^(t) + sum_l P^(l-1) 1 pi^T Pbar^(t-l) - (1/M) sum_l R^{t,l}

    where ``Pbar^(s)`` is the centered tangle-free matrix.  With
    ``require_tangle_free`` the graph must be ``t``-tangle-free and the left side
    is the plain power ``P^t``.  Otherwise the tangle-free ``P^(t)`` is used
    on the left and the identity holds for every environment.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if require_tangle_free:
        ok, witness = is_d_tangle_free(g, t)
        if not ok:
            raise NotTangleFree(f"graph is {t}-tangled (forward ball at vertex {witness})")
    terms = decomposition_terms(g, t, cap)
    lhs = terms["P_t"] if require_tangle_free else terms["P_tf"]
    rhs = terms["Pbar_tf"] + terms["glued"] - terms["rest"] / terms["M"]
    return float(np.max(np.abs(lhs - rhs)))


def telescoping_sum(x: Sequence, y: Sequence):
    """``prod x - sum_l prod_{s<l} y_s (x_l - y_l) prod_{s>l} x_s``; equals ``prod y``."""
    x, y = list(x), list(y)
    total = math.prod(x)
    for ell in range(len(x)):
        total -= math.prod(y[:ell]) * (x[ell] - y[ell]) * math.prod(x[ell + 1:])
    return total


# --------------------------------------------------------------------------
# Norms
# --------------------------------------------------------------------------

def operator_norm(X) -> float:
    """Largest singular value."""
    if isinstance(X, VariantMatrix):
        X = X.matrix
    A = as_matrix(X)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    try:
        return float(np.linalg.svd(A, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"SVD did not converge: {exc}") from exc


def norm_vs_bound_report(g: Digraph, t: int, c: float = 1.1,
                         D_values: Sequence[float] = (1, 2, 3),
                         cap: int = DEFAULT_CAP) -> dict:
    """Measured norms of the centered tangle-free matrix and tangled rests next
    to the bound shapes ``ln(n)^D (c rt)^t`` and ``n ln(n)^D (c rt)^(t+l)``.

    Informational only: ``D`` is an unspecified constant.
    """
    from .spectrum import eigenvalues

    seq = g.seq
    n, rt = seq.n, seq.rho_tilde
    ln = math.log(n) if n > 1 else 1.0
    pbar = operator_norm(variant_matrix(g, "centered_tanglefree_t", t, cap=cap))
    rests = [operator_norm(variant_matrix(g, "tangled_rest", t, ell, cap=cap))
             for ell in range(1, t + 1)]
    K_t = pbar + sum(rests) / seq.M
    lam2 = eigenvalues(build_P(g)).lambda2_mod
    return {
        "n": n, "t": t, "c": c, "rho_tilde": rt,
        "norm_Pbar_tf": pbar,
        "norm_Pbar_tf_root": pbar ** (1.0 / t) if pbar > 0 else 0.0,
        "norm_P": operator_norm(build_P(g)),
        "norm_R": rests,
        "K_t": K_t,
        "lambda2_pow_t": lam2 ** t,
        "local_eig_rhs": 2 * ln ** 3 * K_t,
        "bound_Pbar": {D: ln ** D * (c * rt) ** t for D in D_values},
        "bound_R": {D: [n * ln ** D * (c * rt) ** (t + ell) for ell in range(1, t + 1)]
                    for D in D_values},
    }
