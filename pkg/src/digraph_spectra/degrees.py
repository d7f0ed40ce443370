"""Degree sequences of the directed configuration model.

A degree sequence pairs, for every vertex ``u``, the number of heads
(out-half-edges) ``d_plus[u]`` and tails (in-half-edges) ``d_minus[u]``.
Both totals must agree; their common value is ``M``.

Text format
-----------
One vertex *type* per line::

    # count d_plus d_minus
    700 2 2
    800 9 9

``count`` vertices receive the same ``(d_plus, d_minus)`` pair, in file
order. Blank lines are ignored and ``#`` starts a comment anywhere on a line.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeTooSmall, EmptySequence, UnbalancedSums

__all__ = [
    "DegreeSequence",
    "validate",
    "from_types",
    "regular",
    "rho",
    "rho_tilde",
    "parse_degree_text",
    "format_degree_text",
]

MIN_DEGREE = 2


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class DegreeSequence:
    """Validated, immutable pair of out/in degree vectors.

    Use :func:`validate`, :func:`from_types` or :func:`regular` to build one;
    the constructor performs the same checks.
    """

    __slots__ = ("d_plus", "d_minus", "n", "M", "delta", "Delta",
                 "head_offset", "tail_offset", "head_vertex", "tail_vertex")

    def __init__(self, d_plus: Sequence[int], d_minus: Sequence[int]):
        d_plus = _frozen(d_plus)
        d_minus = _frozen(d_minus)
        if d_plus.ndim != 1 or d_minus.ndim != 1 or d_plus.size == 0 or d_minus.size == 0:
            raise EmptySequence("degree sequences must be non-empty 1-d sequences")
        if d_plus.size != d_minus.size:
            raise ValueError(
                f"d_plus has {d_plus.size} entries but d_minus has {d_minus.size}")
        low = int(min(d_plus.min(), d_minus.min()))
        if low < MIN_DEGREE:
            bad = int(np.flatnonzero((d_plus < MIN_DEGREE) | (d_minus < MIN_DEGREE))[0])
            raise DegreeTooSmall(
                f"vertex {bad} has degrees ({d_plus[bad]}, {d_minus[bad]}); "
                f"every degree must be >= {MIN_DEGREE}")
        sp, sm = int(d_plus.sum()), int(d_minus.sum())
        if sp != sm:
            raise UnbalancedSums(f"sum of out-degrees {sp} != sum of in-degrees {sm}")

        s = object.__setattr__
        s(self, "d_plus", d_plus)
        s(self, "d_minus", d_minus)
        s(self, "n", int(d_plus.size))
        s(self, "M", sp)
        s(self, "delta", low)
        s(self, "Delta", int(max(d_plus.max(), d_minus.max())))
        # global half-edge numbering is vertex-major, slot-minor
        s(self, "head_offset", _frozen(np.concatenate(([0], np.cumsum(d_plus)))))
        s(self, "tail_offset", _frozen(np.concatenate(([0], np.cumsum(d_minus)))))
        s(self, "head_vertex", _frozen(np.repeat(np.arange(self.n), d_plus)))
        s(self, "tail_vertex", _frozen(np.repeat(np.arange(self.n), d_minus)))

    def __setattr__(self, name, value):
        raise AttributeError("DegreeSequence is immutable")

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return (np.array_equal(self.d_plus, other.d_plus)
                and np.array_equal(self.d_minus, other.d_minus))

    def __hash__(self):
        return hash((self.d_plus.tobytes(), self.d_minus.tobytes()))

    def __repr__(self):
        types = self.types()
        if len(types) <= 4:
            body = ", ".join(f"{c}x({p},{m})" for c, p, m in types)
        else:
            body = f"{len(types)} runs"
        return f"DegreeSequence(n={self.n}, M={self.M}, {body})"

    def __reduce__(self):
        return (DegreeSequence, (self.d_plus.tolist(), self.d_minus.tolist()))

    @property
    def rho(self) -> float:
        return rho(self)

    @property
    def rho_tilde(self) -> float:
        return rho_tilde(self)

    def head(self, vertex: int, slot: int) -> int:
        """Global index of head ``slot`` of ``vertex``."""
        if not 0 <= slot < self.d_plus[vertex]:
            raise IndexError(f"vertex {vertex} has no head slot {slot}")
        return int(self.head_offset[vertex] + slot)

    def tail(self, vertex: int, slot: int) -> int:
        """Global index of tail ``slot`` of ``vertex``."""
        if not 0 <= slot < self.d_minus[vertex]:
            raise IndexError(f"vertex {vertex} has no tail slot {slot}")
        return int(self.tail_offset[vertex] + slot)

    def head_slot(self, index: int) -> tuple[int, int]:
        v = int(self.head_vertex[index])
        return v, int(index - self.head_offset[v])

    def tail_slot(self, index: int) -> tuple[int, int]:
        v = int(self.tail_vertex[index])
        return v, int(index - self.tail_offset[v])

    def types(self) -> list[tuple[int, int, int]]:
        """Run-length encoding ``[(count, d_plus, d_minus), ...]`` in vertex order."""
        runs: list[list[int]] = []
        for p, m in zip(self.d_plus.tolist(), self.d_minus.tolist()):
            if runs and runs[-1][1] == p and runs[-1][2] == m:
                runs[-1][0] += 1
            else:
                runs.append([1, p, m])
        return [tuple(r) for r in runs]


def validate(d_plus: Sequence[int], d_minus: Sequence[int]) -> DegreeSequence:
    """Validate raw head counts ``d_plus`` and tail counts ``d_minus``."""
    d_plus, d_minus = list(d_plus), list(d_minus)
    if not d_plus and not d_minus:
        raise EmptySequence("degree sequence has no vertices")
    return DegreeSequence(d_plus, d_minus)


def from_types(types: Iterable[Sequence[int]]) -> DegreeSequence:
    """Build a sequence from ``(count, d_plus, d_minus)`` triples."""
    d_plus: list[int] = []
    d_minus: list[int] = []
    for triple in types:
        count, dp, dm = (int(x) for x in triple)
        if count < 0:
            raise ValueError(f"negative type count {count}")
        d_plus += [dp] * count
        d_minus += [dm] * count
    return validate(d_plus, d_minus)


def regular(n: int, d: int) -> DegreeSequence:
    if n < 1:
        raise EmptySequence("regular sequence needs n >= 1")
    if d < MIN_DEGREE:
        raise DegreeTooSmall(f"degree {d} < {MIN_DEGREE}")
    return validate([d] * n, [d] * n)


def rho(seq: DegreeSequence) -> float:
    """sqrt( (1/M) * sum_i d_i^- / d_i^+ )."""
    return math.sqrt(float(np.sum(seq.d_minus / seq.d_plus)) / seq.M)


def rho_tilde(seq: DegreeSequence) -> float:
    return max(rho(seq), 1.0 / seq.delta)


def parse_degree_text(text: str) -> DegreeSequence:
    types = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'count d_plus d_minus', got {raw!r}")
        try:
            types.append(tuple(int(x) for x in parts))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {raw!r}") from None
    if not types:
        raise EmptySequence("degree file contains no vertex types")
    return from_types(types)


def format_degree_text(seq: DegreeSequence) -> str:
    lines = ["# count d_plus d_minus"]
    lines += [f"{c} {p} {m}" for c, p, m in seq.types()]
    return "\n".join(lines) + "\n"
