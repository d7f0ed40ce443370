from fractions import Fraction
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from digraph_spectra.degrees import regular, validate
from digraph_spectra.errors import TooLarge
from digraph_spectra.oracle import (F_value, F_value_by_expansion, ProtoPath, all_proto_paths,
                                    entry_functional, exact_expectation, family_sweep,
                                    format_checks_csv, format_proto_path, parse_oracle_file,
                                    parse_proto_path, proto_stats, small_sequences,
                                    tech_bound_check)
from digraph_spectra.sampler import enumerate_environments
from digraph_spectra.transition import build_P


def test_small_sequence_fixture_set():
    seqs = small_sequences(6)
    assert len(seqs) == 14
    assert all(s.M <= 6 for s in seqs)
    assert len({tuple(sorted(zip(s.d_plus.tolist(), s.d_minus.tolist()))) for s in seqs}) == 14


@pytest.mark.parametrize("seq", small_sequences(6), ids=lambda s: repr(s.types()))
def test_expectation_exact(seq):
    for i in range(seq.n):
        for j in range(seq.n):
            val = exact_expectation(seq, entry_functional(seq, i, j))
            assert isinstance(val, Fraction)
            assert val == Fraction(int(seq.d_minus[j]), seq.M)


def test_expectation_cap():
    with pytest.raises(TooLarge):
        exact_expectation(validate([9], [9]), lambda env: 0)


def test_frozen_F_values():
    # squared centered indicator: (1/M)(1 - 1/M) / d^2
    seq = regular(2, 2)
    assert F_value(seq, ProtoPath(((0, 0), (0, 0)), 2)) == Fraction(3, 64)
    assert F_value(validate([3], [3]), ProtoPath(((0, 0), (0, 0)), 2)) == Fraction(2, 81)
    # a single centered couple averages to zero, an uncentered one to 1/(M d)
    assert F_value(seq, ProtoPath(((1, 3),), 1)) == 0
    assert F_value(seq, ProtoPath(((1, 3),), 0)) == Fraction(1, 8)
    # two disjoint centered couples: 1/(M(M-1)) - 1/M^2, times 1/4
    assert F_value(seq, ProtoPath(((0, 0), (2, 1)), 2)) == Fraction(1, 4 * 16 * 3)
    # conflicting couples on one head never co-occur
    assert F_value(seq, ProtoPath(((0, 0), (0, 1)), 0)) == 0


@given(st.data())
@settings(max_examples=80)
def test_two_routes_agree(data):
    seq = data.draw(st.sampled_from(small_sequences(5)))
    N = data.draw(st.integers(1, 4))
    couples = tuple((data.draw(st.integers(0, seq.M - 1)), data.draw(st.integers(0, seq.M - 1)))
                    for _ in range(N))
    pp = ProtoPath(couples, data.draw(st.integers(0, N)))
    assert F_value(seq, pp) == F_value_by_expansion(seq, pp)


@given(st.data())
@settings(max_examples=40)
def test_F_matches_environment_average(data):
    seq = data.draw(st.sampled_from(small_sequences(4)))
    N = data.draw(st.integers(1, 3))
    couples = tuple((data.draw(st.integers(0, seq.M - 1)), data.draw(st.integers(0, seq.M - 1)))
                    for _ in range(N))
    p = data.draw(st.integers(0, N))
    M = seq.M
    total = Fraction(0)
    count = 0
    for env in enumerate_environments(seq):
        v = Fraction(1)
        for s, (e, f) in enumerate(couples):
            hit = int(env.sigma[e] == f)
            v *= (hit - Fraction(1, M)) if s < p else hit
            v /= int(seq.d_plus[seq.head_vertex[e]])
        total += v
        count += 1
    assert F_value(seq, ProtoPath(couples, p)) == total / count


def test_stats():
    seq = regular(2, 2)
    pp = ProtoPath(((0, 0), (0, 0), (1, 1), (0, 2)), 2)
    st_ = proto_stats(pp, seq)
    assert st_.edges == ((0, 0), (1, 1), (0, 2))
    assert st_.a == 3 and st_.w == (2, 0, 0) and st_.w_after == (0, 1, 1)
    assert st_.consistent == (False, True, False) and st_.b == 2
    assert st_.a1 == 0 and st_.omega == Fraction(1, 16)
    pp = ProtoPath(((0, 0), (1, 1), (2, 2)), 2)
    assert proto_stats(pp, seq).a1 == 2


def test_literals():
    seq = regular(2, 2)
    pp = parse_proto_path("p=1; (0,0,+)/(1,1,-) (1,0,+)/(0,0,-)", seq)
    assert pp == ProtoPath(((0, 3), (2, 0)), 1)
    assert format_proto_path(pp, seq) == "p=1; (0,0,+)/(1,1,-) (1,0,+)/(0,0,-)"
    with pytest.raises(ValueError):
        parse_proto_path("(0,0,+)/(1,1,-)", seq)
    with pytest.raises(ValueError):
        parse_proto_path("p=1; (0,0,-)/(1,1,+)", seq)
    with pytest.raises(ValueError):
        parse_proto_path("p=3; (0,0,+)/(1,1,-)", seq)
    with pytest.raises(ValueError):
        parse_proto_path("p=0; (0,0,+)/(1,1,-) junk", seq)


def test_oracle_file():
    seq, paths = parse_oracle_file("# count d+ d-\n2 2 2\n---\np=2; (0,0,+)/(0,0,-) (0,0,+)/(0,0,-)\n")
    assert seq == regular(2, 2) and len(paths) == 1
    with pytest.raises(ValueError):
        parse_oracle_file("2 2 2\n")


def test_bound_check():
    seq = regular(2, 2)
    chk = tech_bound_check(seq, ProtoPath(((0, 0), (0, 0)), 2), 2.0)
    assert chk.F == Fraction(3, 64) and chk.in_regime and chk.holds
    # a = 1, b = 0, a1 = 0: 24 * 1/4 * (2/4)
    assert chk.rhs == pytest.approx(3.0)
    assert chk.ratio == pytest.approx(3 / 64 / 3)
    with pytest.raises(ValueError):
        tech_bound_check(seq, ProtoPath(((0, 0),), 0), 1.0)
    csv = format_checks_csv([("x", chk)])
    assert csv.splitlines()[0].startswith("proto_path,N,p,")
    assert csv.splitlines()[1].endswith(",1,1")


def test_sweep_matches_scalar_route():
    seq = validate([2, 2], [2, 2])
    sw = family_sweep(seq, 2, [2.0])
    assert len(sw) == sum(16 ** N * (N + 1) for N in (1, 2))
    for k in range(0, len(sw), 97):
        pp = ProtoPath(tuple(map(tuple, sw.couples[k].tolist())), int(sw.p[k]))
        chk = tech_bound_check(seq, pp, 2.0)
        assert sw.F[k] == pytest.approx(float(chk.F), abs=1e-15)
        assert sw.rhs[2.0][k] == pytest.approx(chk.rhs)
        assert sw.in_regime[k] == chk.in_regime


def test_all_proto_paths_count():
    seq = validate([2], [2])
    assert sum(1 for _ in all_proto_paths(seq, 2)) == 16 * 3
