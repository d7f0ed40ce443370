"""Exact expectations by exhaustive enumeration of all ``M!`` matchings.

A proto-path is a free sequence of (head, tail) couples with a split index
``p``: the first ``p`` couples are weighted by the centered entry
``Abar(e, f) = (1[sigma(e) = f] - 1/M) / d_e^+`` and the rest by
``A(e, f) = 1[sigma(e) = f] / d_e^+``.  Its correlation value ``F`` is the
uniform average of that product over all matchings.

Literal format, one proto-path per line::

    p=1; (0,0,+)/(1,1,-) (1,0,+)/(0,0,-)

Each ``(vertex,slot,+)/(vertex,slot,-)`` token is one couple.

Oracle input files hold a degree block (``count d_plus d_minus`` lines), a line
``---``, then proto-path literals.  ``#`` starts a comment anywhere.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .degrees import DegreeSequence, parse_degree_text, validate
from .errors import TooLarge
from .sampler import Environment, HalfEdge, head_at, tail_at

__all__ = [
    "ProtoPath",
    "ProtoPathStats",
    "BoundCheck",
    "parse_proto_path",
    "format_proto_path",
    "parse_oracle_file",
    "proto_stats",
    "exact_expectation",
    "entry_functional",
    "F_value",
    "F_value_by_expansion",
    "tech_bound_check",
    "all_proto_paths",
    "small_sequences",
    "family_sweep",
    "FamilySweep",
    "format_checks_csv",
]

DEFAULT_M_CAP = 8
BOUND_CONSTANT = 24


@dataclass(frozen=True)
class ProtoPath:
    couples: tuple  # ((head index, tail index), ...)
    p: int

    def __post_init__(self):
        if not 0 <= self.p <= len(self.couples):
            raise ValueError(f"split p={self.p} outside 0..{len(self.couples)}")

    @property
    def N(self) -> int:
        return len(self.couples)

    def check(self, seq: DegreeSequence) -> None:
        for e, f in self.couples:
            if not (0 <= e < seq.M and 0 <= f < seq.M):
                raise ValueError(f"couple ({e}, {f}) outside 0..{seq.M - 1}")

    def half_edges(self, seq: DegreeSequence) -> list[HalfEdge]:
        out = []
        for e, f in self.couples:
            out += [head_at(seq, e), tail_at(seq, f)]
        return out


@dataclass(frozen=True)
class ProtoPathStats:
    a: int
    w: tuple
    w_after: tuple
    a1: int
    b: int
    omega: Fraction
    edges: tuple
    consistent: tuple  # one flag per edge


_TOKEN = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*,\s*([+-])\s*\)\s*/\s*"
                    r"\(\s*(\d+)\s*,\s*(\d+)\s*,\s*([+-])\s*\)")
_HEAD = re.compile(r"^\s*p\s*=\s*(\d+)\s*;(.*)$")


def parse_proto_path(text: str, seq: DegreeSequence) -> ProtoPath:
    m = _HEAD.match(text)
    if not m:
        raise ValueError(f"proto-path literal must start with 'p=<split>;': {text!r}")
    p = int(m.group(1))
    body = m.group(2)
    couples = []
    pos = 0
    for tok in _TOKEN.finditer(body):
        if body[pos:tok.start()].strip():
            raise ValueError(f"unexpected text {body[pos:tok.start()].strip()!r}")
        pos = tok.end()
        u, i, k1, v, j, k2 = tok.groups()
        if (k1, k2) != ("+", "-"):
            raise ValueError(f"couple {tok.group(0)!r} must be (head)/(tail)")
        couples.append((HalfEdge(int(u), int(i), "+").index(seq),
                        HalfEdge(int(v), int(j), "-").index(seq)))
    if body[pos:].strip():
        raise ValueError(f"unexpected text {body[pos:].strip()!r}")
    return ProtoPath(tuple(couples), p)


def format_proto_path(pp: ProtoPath, seq: DegreeSequence) -> str:
    toks = []
    for e, f in pp.couples:
        h, t = head_at(seq, e), tail_at(seq, f)
        toks.append(f"({h.vertex},{h.slot},+)/({t.vertex},{t.slot},-)")
    return f"p={pp.p}; " + " ".join(toks)


def parse_oracle_file(text: str) -> tuple[DegreeSequence, list[ProtoPath]]:
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    try:
        cut = next(k for k, ln in enumerate(lines) if ln.strip() == "---")
    except StopIteration:
        raise ValueError("oracle file needs a '---' line between degrees and proto-paths")
    seq = parse_degree_text("\n".join(lines[:cut]))
    paths = [parse_proto_path(ln, seq) for ln in lines[cut + 1:] if ln.strip()]
    return seq, paths


def proto_stats(pp: ProtoPath, seq: DegreeSequence) -> ProtoPathStats:
    """Edge counts and weights of a proto-path.

    An edge is consistent when neither of its half-edges belongs to another,
    distinct edge of the proto-path.
    """
    edges = list(dict.fromkeys(pp.couples))
    w = [sum(1 for s in range(pp.p) if pp.couples[s] == y) for y in edges]
    w_after = [sum(1 for s in range(pp.p, pp.N) if pp.couples[s] == y) for y in edges]
    head_use: dict = {}
    tail_use: dict = {}
    for e, f in edges:
        head_use[e] = head_use.get(e, 0) + 1
        tail_use[f] = tail_use.get(f, 0) + 1
    consistent = [head_use[e] == 1 and tail_use[f] == 1 for e, f in edges]
    a1 = sum(1 for k in range(len(edges)) if consistent[k] and w[k] == 1 and w_after[k] == 0)
    omega = Fraction(1)
    for e, _ in pp.couples:
        omega /= int(seq.d_plus[seq.head_vertex[e]])
    return ProtoPathStats(len(edges), tuple(w), tuple(w_after), a1,
                          sum(1 for c in consistent if not c), omega, tuple(edges),
                          tuple(consistent))


@lru_cache(maxsize=16)
def _perm_table(M: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(M))), dtype=np.int8).reshape(-1, M)
    table.setflags(write=False)
    return table


def _check_cap(seq, cap):
    if seq.M > cap:
        raise TooLarge(f"M = {seq.M} exceeds the enumeration cap {cap} "
                       f"({math.factorial(seq.M)} matchings)")


def exact_expectation(seq: DegreeSequence, f: Callable[[Environment], object],
                      cap: int = DEFAULT_M_CAP):
    """Uniform average of ``f`` over all matchings.

    Integer and :class:`~fractions.Fraction` values are averaged exactly;
    any float makes the result a float.
    """
    _check_cap(seq, cap)
    table = _perm_table(seq.M)
    total = 0
    for row in table:
        total += f(Environment(row))
    if isinstance(total, float):
        return total / len(table)
    return Fraction(total, len(table))


def entry_functional(seq: DegreeSequence, i: int, j: int,
                     centered: bool = False) -> Callable[[Environment], Fraction]:
    """``env -> P(i, j)`` (or its centered version) as an exact rational."""
    heads = range(int(seq.head_offset[i]), int(seq.head_offset[i + 1]))
    lo, hi = int(seq.tail_offset[j]), int(seq.tail_offset[j + 1])
    d = int(seq.d_plus[i])
    shift = Fraction(int(seq.d_minus[j]) * d, seq.M) if centered else 0

    def f(env):
        hits = sum(1 for e in heads if lo <= env.sigma[e] < hi)
        return (hits - shift) / Fraction(d)

    return f


def _F_numerators(M: int, couples: np.ndarray, p: int) -> np.ndarray:
    """Integer sums ``sum_sigma prod_{s<=p} (M 1[..] - 1) prod_{s>p} 1[..]``.

    ``couples`` has shape (k, N, 2); one sum per proto-path.
    """
    table = _perm_table(M).astype(np.int64)
    k, N, _ = couples.shape
    out = np.zeros(k, dtype=object)
    chunk = max(1, 2_000_000 // max(1, table.shape[0]))
    for lo in range(0, k, chunk):
        c = couples[lo:lo + chunk]
        prod = np.ones((table.shape[0], c.shape[0]), dtype=np.int64)
        for s in range(N):
            hit = table[:, c[:, s, 0]] == c[None, :, s, 1]
            prod *= (M * hit - 1) if s < p else hit
        out[lo:lo + chunk] = [int(x) for x in prod.sum(axis=0)]
    return out


def F_value(seq: DegreeSequence, pp: ProtoPath, cap: int = DEFAULT_M_CAP) -> Fraction:
    """Exact ``F`` by brute force over every matching."""
    _check_cap(seq, cap)
    pp.check(seq)
    if pp.N == 0:
        return Fraction(1)
    num = _F_numerators(seq.M, np.array([pp.couples], dtype=np.int64), pp.p)[0]
    omega = proto_stats(pp, seq).omega
    return Fraction(num, math.factorial(seq.M) * seq.M ** pp.p) * omega


def F_value_by_expansion(seq: DegreeSequence, pp: ProtoPath) -> Fraction:
    """Exact ``F`` without enumerating matchings.

    Each distinct edge contributes ``B^w B'^w'``, which is affine in its
    indicator; expanding the product over edges leaves expectations of
    products of indicators, equal to ``(M - k)! / M!`` for ``k`` edges with
    distinct heads and distinct tails and ``0`` otherwise.
    """
    st = proto_stats(pp, seq)
    M = seq.M
    inv = Fraction(1, M)
    coeffs = []  # (coefficient when matched, constant part)
    for k in range(st.a):
        w, wa = st.w[k], st.w_after[k]
        if wa > 0:
            coeffs.append((Fraction(1) * (1 - inv) ** w, Fraction(0)))
        else:
            const = (-inv) ** w
            coeffs.append(((1 - inv) ** w - const, const))
    total = Fraction(0)
    for chosen in itertools.product((False, True), repeat=st.a):
        term = Fraction(1)
        heads, tails = set(), set()
        ok = True
        for k, c in enumerate(chosen):
            if c:
                e, f = st.edges[k]
                if e in heads or f in tails:
                    ok = False
                    break
                heads.add(e)
                tails.add(f)
                term *= coeffs[k][0]
            else:
                term *= coeffs[k][1]
            if term == 0:
                break
        if not ok or term == 0:
            continue
        total += term * Fraction(math.factorial(M - len(heads)), math.factorial(M))
    return total * st.omega


@dataclass(frozen=True)
class BoundCheck:
    F: Fraction
    rhs: float
    c: float
    in_regime: bool
    holds: bool
    stats: ProtoPathStats

    @property
    def ratio(self) -> float:
        return abs(float(self.F)) / self.rhs if self.rhs > 0 else math.inf


def _rhs(st: ProtoPathStats, N: int, M: int, c: float) -> float:
    return (BOUND_CONSTANT * float(st.omega) * 3.0 ** st.b * (c / M) ** st.a
            * (N / math.sqrt(M)) ** st.a1)


def tech_bound_check(seq: DegreeSequence, pp: ProtoPath, c: float,
                     F: Optional[Fraction] = None, cap: int = DEFAULT_M_CAP) -> BoundCheck:
    """Compare ``|F|`` with ``24 omega 3^b (c/M)^a (N/sqrt(M))^a1``.

    ``in_regime`` flags ``N <= sqrt(M)``; the comparison runs either way.
    """
    if not c > 1:
        raise ValueError("c must exceed 1")
    st = proto_stats(pp, seq)
    if F is None:
        F = F_value(seq, pp, cap)
    rhs = _rhs(st, pp.N, seq.M, c)
    return BoundCheck(F, rhs, c, pp.N * pp.N <= seq.M, abs(float(F)) <= rhs, st)


def all_proto_paths(seq: DegreeSequence, N: int) -> Iterator[ProtoPath]:
    """Every proto-path of length ``N`` with every split ``0..N``."""
    M = seq.M
    for flat in itertools.product(range(M), repeat=2 * N):
        couples = tuple(zip(flat[::2], flat[1::2]))
        for p in range(N + 1):
            yield ProtoPath(couples, p)


def small_sequences(max_M: int) -> list[DegreeSequence]:
    """All degree sequences with entries >= 2 and ``M <= max_M``, up to
    reordering of vertices (``d_plus`` and ``d_minus`` paired per vertex)."""
    out = []
    for n in range(1, max_M // 2 + 1):
        for M in range(2 * n, max_M + 1):
            comps = [c for c in itertools.product(range(2, M + 1), repeat=n) if sum(c) == M]
            seen = set()
            for dp in comps:
                for dm in comps:
                    key = tuple(sorted(zip(dp, dm)))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(validate([a for a, _ in key], [b for _, b in key]))
    return out


@dataclass(frozen=True, eq=False)
class FamilySweep:
    """Bound checks for a whole family of proto-paths, stored column-wise."""

    M: int
    couples: list          # one (N, 2) array per proto-path
    N: np.ndarray
    p: np.ndarray
    a: np.ndarray
    a1: np.ndarray
    b: np.ndarray
    F: np.ndarray          # float values of the exact F
    omega: np.ndarray
    c_values: tuple
    rhs: dict              # c -> array

    @property
    def in_regime(self) -> np.ndarray:
        return self.N * self.N <= self.M

    def holds(self, c: float) -> np.ndarray:
        return np.abs(self.F) <= self.rhs[c]

    def violations(self, c: float, regime_only: bool = False) -> np.ndarray:
        bad = ~self.holds(c)
        if regime_only:
            bad &= self.in_regime
        return np.flatnonzero(bad)

    def __len__(self):
        return self.N.size


def _batch_stats(seq, flats, p):
    """Vectorized :func:`proto_stats` for ``flats`` of shape (k, N, 2)."""
    k, N, _ = flats.shape
    e, f = flats[:, :, 0], flats[:, :, 1]
    same = (e[:, :, None] == e[:, None, :]) & (f[:, :, None] == f[:, None, :])
    earlier = np.tril(np.ones((N, N), dtype=bool), -1)
    first = ~np.any(same & earlier[None], axis=2)
    before = np.arange(N) < p
    w = np.sum(same & before[None, None, :], axis=2)
    w_after = np.sum(same & ~before[None, None, :], axis=2)
    head_use = np.sum((e[:, :, None] == e[:, None, :]) & first[:, None, :], axis=2)
    tail_use = np.sum((f[:, :, None] == f[:, None, :]) & first[:, None, :], axis=2)
    consistent = (head_use == 1) & (tail_use == 1)
    a = first.sum(axis=1)
    a1 = np.sum(first & consistent & (w == 1) & (w_after == 0), axis=1)
    b = np.sum(first & ~consistent, axis=1)
    d = seq.d_plus[seq.head_vertex[e]].astype(float)
    omega = 1.0 / np.prod(d, axis=1)
    return a, a1, b, omega


def family_sweep(seq: DegreeSequence, N_max: int, c_values: Sequence[float],
                 cap: int = DEFAULT_M_CAP) -> FamilySweep:
    """Bound checks for every proto-path with ``1 <= N <= N_max`` and every split."""
    _check_cap(seq, cap)
    M = seq.M
    cols = {k: [] for k in ("N", "p", "a", "a1", "b", "F", "omega")}
    couples = []
    for N in range(1, N_max + 1):
        flats = np.array(list(itertools.product(range(M), repeat=2 * N)),
                         dtype=np.int64).reshape(-1, N, 2)
        for p in range(N + 1):
            nums = _F_numerators(M, flats, p).astype(float)
            a, a1, b, omega = _batch_stats(seq, flats, p)
            cols["N"].append(np.full(len(flats), N))
            cols["p"].append(np.full(len(flats), p))
            cols["a"].append(a)
            cols["a1"].append(a1)
            cols["b"].append(b)
            cols["omega"].append(omega)
            cols["F"].append(nums / (math.factorial(M) * float(M) ** p) * omega)
            couples.extend(flats)
    arr = {k: np.concatenate(v) for k, v in cols.items()}
    rhs = {c: (BOUND_CONSTANT * arr["omega"] * 3.0 ** arr["b"] * (c / M) ** arr["a"]
               * (arr["N"] / math.sqrt(M)) ** arr["a1"]) for c in c_values}
    return FamilySweep(M, couples, arr["N"], arr["p"], arr["a"], arr["a1"], arr["b"],
                       arr["F"], arr["omega"], tuple(c_values), rhs)


def format_checks_csv(rows: Iterable[tuple[str, BoundCheck]]) -> str:
    lines = ["proto_path,N,p,a,a1,b,omega,F,c,rhs,in_regime,holds"]
    for literal, chk in rows:
        st = chk.stats
        N = sum(st.w) + sum(st.w_after)
        lines.append(",".join([
            f'"{literal}"', str(N), str(sum(st.w)), str(st.a), str(st.a1), str(st.b),
            str(st.omega), str(chk.F), repr(chk.c), repr(chk.rhs),
            str(int(chk.in_regime)), str(int(chk.holds)),
        ]))
    return "\n".join(lines) + "\n"
