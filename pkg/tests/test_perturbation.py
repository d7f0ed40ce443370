import numpy as np
import pytest
from hypothesis import given, strategies as st

from digraph_spectra.degrees import regular
from digraph_spectra.errors import DegenerateInnerProduct, Singular
from digraph_spectra.perturbation import (bauer_fike_radius, certify_lambda2,
                                          localize_rank1_perturbation, rank1_condition_bound)
from digraph_spectra.sampler import derive_seed, sample_digraph


def test_radius_zero_for_zero_perturbation():
    assert bauer_fike_radius(np.eye(3), np.zeros((3, 3))) == 0.0


def test_radius_normal_matrix():
    # orthogonal eigenvectors: condition number 1
    assert bauer_fike_radius(np.eye(4), np.diag([0.1, -0.3, 0, 0])) == pytest.approx(0.3)


def test_singular():
    with pytest.raises(Singular):
        bauer_fike_radius(np.array([[1.0, 1.0], [1.0, 1.0]]), np.eye(2))


def test_condition_bound():
    assert rank1_condition_bound([1, 0], [1, 0]) == pytest.approx(2.0)
    assert rank1_condition_bound(np.ones(4), np.ones(4) / 4) == pytest.approx(2 * 4 * 0.25)
    with pytest.raises(DegenerateInnerProduct):
        rank1_condition_bound([1, 0], [0, 1])
    with pytest.raises(DegenerateInnerProduct):
        rank1_condition_bound([0, 0], [1, 1])


@given(st.integers(2, 9), st.integers(0, 2**32))
def test_containment(n, seed):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(n, n)) + 3 * np.eye(n)
    D = np.diag(rng.normal(size=n) + 1j * rng.normal(size=n))
    H = 0.05 * rng.normal(size=(n, n))
    eps = bauer_fike_radius(V, H)
    ev = np.linalg.eigvals(V @ D @ np.linalg.inv(V) + H)
    dist = np.min(np.abs(ev[:, None] - np.diag(D)[None, :]), axis=1)
    assert np.all(dist <= eps + 1e-8)


@given(st.integers(2, 9), st.integers(0, 2**32))
def test_rank1_localization(n, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=n), rng.normal(size=n)
    if abs(x @ y) < 0.2:
        y = y + np.sign(x @ y or 1) * x / (x @ x)
    H = 1e-3 * rng.normal(size=(n, n))
    rep = localize_rank1_perturbation(x, y, H)
    assert rep.contained and rep.split_holds
    assert rep.centers == (0.0, rep.mu)
    assert rep.eigenvalues.size == n


def test_sylvester():
    rng = np.random.default_rng(3)
    for n in (2, 5, 11):
        x, y = rng.normal(size=n), rng.normal(size=n)
        ev = np.linalg.eigvals(np.outer(x, y))
        assert abs(np.prod(1 + ev) - np.linalg.det(np.eye(n) + np.outer(x, y))) < 1e-9
        assert np.linalg.det(np.eye(n) + np.outer(x, y)) == pytest.approx(1 + x @ y)


def test_overlapping_balls_are_vacuous():
    rep = localize_rank1_perturbation([1.0, 0.0], [1.0, 0.0], np.eye(2))
    assert not rep.separated and rep.split_holds and rep.contained


def test_certificate():
    g = sample_digraph(regular(200, 3), derive_seed(2, 0))
    cert = certify_lambda2(g, 6)
    assert cert.mu == pytest.approx(1.0)
    assert cert.contained
    assert cert.lambda2_pow_t == pytest.approx(cert.lambda2_mod ** 6)
    with pytest.raises(ValueError):
        certify_lambda2(g, 0)


def test_diagonal_example():
    n = 5
    e1, e2 = np.eye(n)[0], np.eye(n)[1]
    rep = localize_rank1_perturbation(e1, e1, 0.01 * np.outer(e2, e2))
    assert rep.epsilon == pytest.approx(0.02)
    assert np.allclose(np.sort(rep.eigenvalues.real), [0, 0, 0, 0.01, 1])
    assert rep.separated and rep.split_holds and rep.count_mu_ball == 1


def test_zero_perturbation_is_exact():
    rep = localize_rank1_perturbation([1.0, 2.0, 0.5], [0.3, 0.1, 1.0], np.zeros((3, 3)))
    assert rep.epsilon == 0.0 and rep.contained and rep.split_holds
    assert rep.eigenvalues[0] == pytest.approx(1.0)


def test_certificate_uniform_matrix():
    cert = certify_lambda2(np.full((6, 6), 1 / 6), 3)
    assert cert.norm_Q == pytest.approx(0.0, abs=1e-15) and cert.lambda2_mod < 1e-12
    assert cert.certified and cert.contained


@given(st.integers(1, 8), st.integers(0, 2**32))
def test_condition_bound_at_least_one(n, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=n), rng.normal(size=n)
    if abs(x @ y) < 1e-6:
        return
    assert rank1_condition_bound(x, y) >= 1.0
