import numpy as np
import pytest
from hypothesis import given, strategies as st

from digraph_spectra.degrees import regular
from digraph_spectra.errors import Periodic, Reducible
from digraph_spectra.sampler import derive_seed, sample_digraph
from digraph_spectra.spectrum import eigenvalues
from digraph_spectra.transition import build_P, pi_minus
from digraph_spectra.walks import (collision_probability, distance_to_equilibrium,
                                   format_trace_csv, is_irreducible, mixing_trace, period,
                                   rate_estimate, stationary)

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
TWO_STATE = np.array([[0.9, 0.1], [0.3, 0.7]])


def test_two_state_chain():
    # pi = (3/4, 1/4), lambda_2 = 0.6, d(k) = 0.75 * 0.6^k from state 1
    assert np.allclose(stationary(TWO_STATE), [0.75, 0.25], atol=1e-15)
    for k in (1, 5, 20):
        assert distance_to_equilibrium(TWO_STATE, k) == pytest.approx(0.75 * 0.6 ** k)
    assert distance_to_equilibrium(TWO_STATE, 0) == pytest.approx(0.75)
    est = rate_estimate(TWO_STATE, 60)
    assert est.rate == pytest.approx(0.6 * 0.75 ** (1 / 60))
    assert float(est) == est.rate


def test_period():
    assert period(SWAP) == 2
    assert period(np.roll(np.eye(5), 1, axis=1)) == 5
    assert period(TWO_STATE) == 1
    with pytest.raises(Periodic):
        rate_estimate(SWAP, 10)


def test_reducible():
    P = np.array([[1.0, 0.0], [0.5, 0.5]])
    assert not is_irreducible(P)
    with pytest.raises(Reducible):
        stationary(P)
    with pytest.raises(Reducible):
        rate_estimate(P, 5)
    with pytest.raises(Reducible):
        period(P)


def test_degenerate_exact_mixing():
    P = np.full((4, 4), 0.25)
    tr = mixing_trace(P, 3)
    assert tr.degenerate and tr.d.tolist() == [0.0, 0.0, 0.0]
    assert rate_estimate(P, 3).degenerate


@given(st.integers(0, 2**32))
def test_stationary_residual(seed):
    g = sample_digraph(regular(30, 3), seed)
    P = build_P(g).matrix
    if not g.is_strongly_connected():
        with pytest.raises(Reducible):
            stationary(P)
        return
    pi = stationary(P)
    assert np.max(np.abs(pi @ P - pi)) <= 1e-12
    assert pi.sum() == pytest.approx(1.0) and pi.min() >= 0
    # regular digraphs are doubly stochastic
    assert np.allclose(pi, 1 / 30)


def test_trace_monotone_and_rate():
    g = sample_digraph(regular(60, 3), derive_seed(7, 1))
    P = build_P(g).matrix
    tr = mixing_trace(P, 120)
    assert tr.irreducible and tr.aperiodic
    assert np.all(np.diff(tr.d) <= 1e-15)
    lam2 = eigenvalues(P).lambda2_mod
    assert abs(tr.roots[-1] - lam2) < 0.08
    csv = format_trace_csv(tr)
    assert csv.splitlines()[0] == "k,d,root" and len(csv.splitlines()) == 121


def test_collision():
    P = np.full((5, 5), 0.2)
    assert collision_probability(P, 1) == pytest.approx(0.2)
    # uniform law is invariant for doubly stochastic P
    g = sample_digraph(regular(20, 2), 1)
    assert collision_probability(build_P(g), 4) == pytest.approx(1 / 20)
    with pytest.raises(ValueError):
        collision_probability(P, 0)


def test_bad_arguments():
    with pytest.raises(ValueError):
        distance_to_equilibrium(TWO_STATE, -1)
    with pytest.raises(ValueError):
        mixing_trace(TWO_STATE, 0)


def test_spec_stationary_and_distance_examples():
    J = np.full((5, 5), 0.2)
    assert np.allclose(stationary(J), 0.2)
    assert distance_to_equilibrium(J, 1) == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(stationary(SWAP), [0.5, 0.5])
    for k in (1, 2, 7):
        assert distance_to_equilibrium(SWAP, k) == pytest.approx(0.5)
