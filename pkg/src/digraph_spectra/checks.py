"""Quick built-in invariant suite behind ``digraph-spectra check``."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .degrees import from_types, regular
from .oracle import (F_value, F_value_by_expansion, ProtoPath, entry_functional,
                     exact_expectation, small_sequences)
from .paths import (TAGS, decomposition_residual, telescoping_sum, variant_matrix,
                    variant_matrix_by_enumeration)
from .perturbation import bauer_fike_radius, localize_rank1_perturbation
from .sampler import derive_seed, sample_digraph
from .transition import build_P
from .walks import stationary

__all__ = ["CHECKS", "run_checks"]


def _rho_pinched():
    for types in ([(3, 2, 3), (3, 3, 2)], [(2, 2, 2), (2, 7, 7)], [(5, 5, 6), (5, 3, 7), (5, 9, 4)]):
        seq = from_types(types)
        lo, hi = 1 / math.sqrt(seq.Delta), 1 / math.sqrt(seq.delta)
        if not lo - 1e-12 <= seq.rho <= hi + 1e-12:
            return False, f"rho={seq.rho} outside [{lo}, {hi}]"
    return True, "1/sqrt(Delta) <= rho <= 1/sqrt(delta)"


def _expectation():
    for seq in small_sequences(5):
        for i in range(seq.n):
            for j in range(seq.n):
                if exact_expectation(seq, entry_functional(seq, i, j)) != Fraction(
                        int(seq.d_minus[j]), seq.M):
                    return False, f"E[P({i},{j})] wrong for {seq!r}"
    return True, "E[P(i,j)] = d_j^-/M exactly for all sequences with M <= 5"


def _F_two_routes():
    rng = np.random.default_rng(0)
    for seq in small_sequences(5):
        for _ in range(20):
            N = int(rng.integers(1, 4))
            c = tuple((int(rng.integers(seq.M)), int(rng.integers(seq.M))) for _ in range(N))
            pp = ProtoPath(c, int(rng.integers(0, N + 1)))
            if F_value(seq, pp) != F_value_by_expansion(seq, pp):
                return False, f"F mismatch on {pp}"
    return True, "brute-force F equals the expansion formula"


def _variants():
    worst = 0.0
    for seq in (regular(3, 2), from_types([(1, 2, 3), (1, 3, 2), (1, 2, 2)])):
        for s in range(2):
            g = sample_digraph(seq, derive_seed(0, s))
            for t in (1, 2, 3):
                for tag in TAGS:
                    for ell in (range(1, t + 1) if tag == "tangled_rest" else [None]):
                        a = variant_matrix(g, tag, t, ell).matrix
                        b = variant_matrix_by_enumeration(g, tag, t, ell)
                        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst <= 1e-12, f"fast route vs enumeration: max diff {worst:.2e}"


def _decomposition():
    worst = 0.0
    for s in range(6):
        g = sample_digraph(from_types([(2, 2, 3), (2, 3, 2), (2, 3, 3)]), derive_seed(1, s))
        for t in (1, 2, 3):
            worst = max(worst, decomposition_residual(g, t, require_tangle_free=False))
    return worst <= 1e-9, f"gluing identity residual {worst:.2e}"


def _telescoping():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        t = int(rng.integers(1, 7))
        x, y = rng.normal(size=t), rng.normal(size=t)
        worst = max(worst, abs(telescoping_sum(x, y) - float(np.prod(y))))
    return worst <= 1e-12, f"telescoping identity max error {worst:.2e}"


def _bauer_fike():
    rng = np.random.default_rng(2)
    for _ in range(100):
        n = int(rng.integers(2, 8))
        V = rng.normal(size=(n, n)) + 3 * np.eye(n)
        D = np.diag(rng.normal(size=n))
        H = 0.05 * rng.normal(size=(n, n))
        eps = bauer_fike_radius(V, H)
        ev = np.linalg.eigvals(V @ D @ np.linalg.inv(V) + H)
        if np.max(np.min(np.abs(ev[:, None] - np.diag(D)[None, :]), axis=1)) > eps + 1e-8:
            return False, "eigenvalue outside Bauer-Fike radius"
        x, y = rng.normal(size=n), rng.normal(size=n)
        if abs(x @ y) < 0.1:
            continue
        rep = localize_rank1_perturbation(x, y, 1e-3 * rng.normal(size=(n, n)))
        if not (rep.contained and rep.split_holds):
            return False, "rank-one localization failed"
    return True, "containment and two-ball split on 100 random trials"


def _stationary():
    g = sample_digraph(regular(30, 3), derive_seed(3, 0))
    P = build_P(g).matrix
    if not g.is_strongly_connected():
        return True, "sample not strongly connected; skipped"
    pi = stationary(P)
    res = float(np.max(np.abs(pi @ P - pi)))
    return res <= 1e-12, f"stationary residual {res:.2e}"


CHECKS: list[tuple[str, Callable]] = [
    ("rho bounds", _rho_pinched),
    ("exact expectation", _expectation),
    ("correlation two routes", _F_two_routes),
    ("variant matrices", _variants),
    ("gluing identity", _decomposition),
    ("telescoping", _telescoping),
    ("perturbation", _bauer_fike),
    ("stationary law", _stationary),
]


def run_checks() -> Iterator[tuple[str, bool, str]]:
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail
