"""Eigenvalue localization for perturbed matrices.

For ``A = P D P^{-1}`` and any ``H``, every eigenvalue of ``A + H`` is within
``cond(P) ||H||`` of an eigenvalue of ``A``.  A rank-one ``x y^T`` with
``mu = <x, y> != 0`` is diagonalizable with eigenvalues ``0`` (n-1 times) and
``mu``, and an eigenbasis whose condition number is at most
``2 ||x||^2 ||y||^2 / mu^2``.  Hence the spectrum of ``x y^T + H`` lies in
``B(0, eps) U B(mu, eps)`` with ``eps = 2 ||x||^2 ||y||^2 mu^-2 ||H||``, and
when the balls are disjoint exactly one eigenvalue sits in ``B(mu, eps)``.

Norms are spectral norms throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInnerProduct, Singular
from .paths import operator_norm
from .sampler import Digraph
from .spectrum import schur_eigenvalues, sort_spectrum
from .transition import build_P

__all__ = [
    "LocalizationReport",
    "Lambda2Certificate",
    "bauer_fike_radius",
    "rank1_condition_bound",
    "localize_rank1_perturbation",
    "certify_lambda2",
]

_DEGENERACY = 1e-12


def bauer_fike_radius(P_diag, H) -> float:
    """``||P|| ||P^-1|| ||H||`` for an eigenvector matrix ``P``."""
    P_diag = np.asarray(P_diag)
    H = np.asarray(H)
    h = float(np.linalg.norm(H, 2)) if np.iscomplexobj(H) else operator_norm(H)
    if h == 0.0:
        return 0.0
    s = np.linalg.svd(P_diag, compute_uv=False)
    # numerically rank-deficient: the usual matrix_rank tolerance
    if s[-1] <= s[0] * max(P_diag.shape) * np.finfo(float).eps:
        raise Singular("eigenvector matrix is singular")
    return float(s[0] / s[-1] * h)


def rank1_condition_bound(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mu = float(x @ y)
    nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
    if abs(mu) < _DEGENERACY * nx * ny or nx == 0.0 or ny == 0.0:
        raise DegenerateInnerProduct(f"<x, y> = {mu:.3e} is too close to 0")
    return 2.0 * nx ** 2 * ny ** 2 / mu ** 2


@dataclass(frozen=True, eq=False)
class LocalizationReport:
    mu: float
    epsilon: float
    norm_H: float
    eigenvalues: np.ndarray
    contained: bool          # every eigenvalue in B(0, eps) U B(mu, eps)
    separated: bool          # the two balls are disjoint
    count_zero_ball: int
    count_mu_ball: int

    @property
    def centers(self) -> tuple:
        return (0.0, self.mu)

    @property
    def split_holds(self) -> bool:
        """``(n - 1, 1)`` split; vacuous when the balls overlap."""
        n = self.eigenvalues.size
        return (not self.separated) or (self.count_zero_ball, self.count_mu_ball) == (n - 1, 1)


def localize_rank1_perturbation(x, y, H, slack: float = 1e-8) -> LocalizationReport:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    H = np.asarray(H, dtype=float)
    cond = rank1_condition_bound(x, y)
    mu = float(x @ y)
    h = operator_norm(H)
    eps = cond * h
    vals = sort_spectrum(schur_eigenvalues(np.outer(x, y) + H))
    d0 = np.abs(vals)
    d1 = np.abs(vals - mu)
    contained = bool(np.all(np.minimum(d0, d1) <= eps + slack))
    separated = 2 * eps < abs(mu)
    return LocalizationReport(mu, eps, h, vals, contained, separated,
                              int(np.sum(d0 <= eps + slack)), int(np.sum(d1 <= eps + slack)))


@dataclass(frozen=True)
class Lambda2Certificate:
    t: int
    mu: float
    norm_Q: float
    epsilon: float
    lambda2_mod: float
    lambda2_pow_t: float
    certified: bool          # |lambda_2|^t <= eps
    contained: bool          # spectrum of P^t in B(0, eps) U B(1, eps)


def certify_lambda2(g_or_P, t: int) -> Lambda2Certificate:
    """A-posteriori certificate ``|lambda_2|^t <= eps`` for a stochastic ``P``.

    Uses ``x = 1``, ``y = (P^t)^T 1 / n`` (so ``<x, y> = 1``), ``Q = P^t - x y^T``
    and ``eps = 2 ||x||^2 ||y||^2 ||Q||``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    P = build_P(g_or_P).matrix if isinstance(g_or_P, Digraph) else np.asarray(g_or_P, float)
    n = P.shape[0]
    Pt = np.linalg.matrix_power(P, t)
    x = np.ones(n)
    y = Pt.T @ x / n
    mu = float(x @ y)
    Q = Pt - np.outer(x, y)
    nq = operator_norm(Q)
    eps = 2.0 * float(x @ x) * float(y @ y) * nq
    vals_t = schur_eigenvalues(Pt)
    contained = bool(np.all(np.minimum(np.abs(vals_t), np.abs(vals_t - 1.0)) <= eps + 1e-8))
    vals = sort_spectrum(schur_eigenvalues(P))
    lam2 = float(abs(vals[1])) if n > 1 else 0.0
    return Lambda2Certificate(t, mu, nq, eps, lam2, lam2 ** t, lam2 ** t <= eps + 1e-12,
                              contained)
