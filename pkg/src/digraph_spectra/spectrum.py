"""Full complex spectra of transition matrices and the second-eigenvalue bound.

Eigenvalues come from the real Schur form ``A = Z T Z^T`` (LAPACK's
Hessenberg QR iteration, via :func:`scipy.linalg.schur`): 1x1 diagonal blocks
of ``T`` are real eigenvalues, 2x2 blocks carry complex-conjugate pairs.

The Ramanujan predicate is evaluated on ``P = A / d`` for a ``d``-regular
digraph with adjacency matrix ``A``; dividing by ``d`` maps the threshold
``sqrt(d)`` on adjacency eigenvalues to ``1/sqrt(d)`` on ``P``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .degrees import DegreeSequence, rho as _rho, rho_tilde as _rho_tilde
from .errors import ConvergenceFailure
from .transition import TransitionMatrix, as_matrix

__all__ = [
    "SpectrumReport",
    "BoundVerdict",
    "schur_eigenvalues",
    "sort_spectrum",
    "eigenvalues",
    "check_main_bound",
    "is_ramanujan_digraph",
    "format_spectrum_csv",
    "spectrum_svg",
]

_SORT_DECIMALS = 10


def schur_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real square matrix read off its real Schur form."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    try:
        T, _ = scipy.linalg.schur(A, output="real")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"real Schur decomposition failed: {exc}") from exc
    out = np.empty(n, dtype=complex)
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            a, b, c, d = T[i, i], T[i, i + 1], T[i + 1, i], T[i + 1, i + 1]
            mean = 0.5 * (a + d)
            disc = 0.25 * (a - d) ** 2 + b * c
            # standardized 2x2 blocks have disc < 0; guard anyway
            root = np.sqrt(complex(disc))
            out[i], out[i + 1] = mean + root, mean - root
            i += 2
        else:
            out[i] = T[i, i]
            i += 1
    return out


def sort_spectrum(values) -> np.ndarray:
    """Decreasing modulus, then decreasing real part, then decreasing imaginary part.

    Keys are rounded to 10 decimals so that floating-point noise does not break
    exact ties such as ``{1, -1}`` or conjugate pairs.
    """
    values = np.asarray(values, dtype=complex)
    key_mod = np.round(np.abs(values), _SORT_DECIMALS)
    key_re = np.round(values.real, _SORT_DECIMALS)
    key_im = np.round(values.imag, _SORT_DECIMALS)
    order = np.lexsort((-key_im, -key_re, -key_mod))
    return values[order]


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    rho: Optional[float] = None
    rho_tilde: Optional[float] = None
    delta: Optional[int] = None
    notes: tuple = field(default=())

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    @property
    def lambda2_mod(self) -> float:
        if self.eigenvalues.size < 2:
            return 0.0
        return float(abs(self.eigenvalues[1]))

    @property
    def gap(self) -> float:
        return 1.0 - self.lambda2_mod

    def bound_satisfied(self, epsilon: float) -> bool:
        if self.rho_tilde is None:
            raise ValueError("report has no rho_tilde; build it from a sampled graph")
        return self.lambda2_mod <= self.rho_tilde + epsilon

    def outliers(self, radius: Optional[float] = None) -> int:
        """Non-Perron eigenvalues with modulus above ``radius`` (default rho)."""
        radius = self.rho if radius is None else radius
        if radius is None:
            raise ValueError("no radius given and report has no rho")
        return int(np.sum(self.moduli[1:] > radius))


def eigenvalues(P, seq: Optional[DegreeSequence] = None) -> SpectrumReport:
    """Sorted spectrum of ``P``; degree parameters are attached when known."""
    A = as_matrix(P)
    if seq is None and isinstance(P, TransitionMatrix) and P.graph is not None:
        seq = P.graph.seq
    vals = sort_spectrum(schur_eigenvalues(A))
    vals.setflags(write=False)
    if seq is None:
        return SpectrumReport(vals)
    return SpectrumReport(vals, _rho(seq), _rho_tilde(seq), seq.delta)


@dataclass(frozen=True)
class BoundVerdict:
    lambda2_mod: float
    threshold: float
    satisfied: bool
    margin: float


def check_main_bound(report: SpectrumReport, epsilon: float,
                     rho_tilde: Optional[float] = None) -> BoundVerdict:
    """Compare ``|lambda_2|`` with ``rho_tilde + epsilon``.

    ``margin`` is positive when the bound holds.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    rt = report.rho_tilde if rho_tilde is None else rho_tilde
    if rt is None:
        raise ValueError("rho_tilde unknown: pass it explicitly or attach a degree sequence")
    thr = rt + epsilon
    l2 = report.lambda2_mod
    return BoundVerdict(l2, thr, bool(l2 <= thr), thr - l2)


def is_ramanujan_digraph(report: SpectrumReport, d: int, tol: float = 1e-8) -> bool:
    mods = report.moduli
    return bool(np.all((mods >= 1.0 - tol) | (mods <= 1.0 / math.sqrt(d) + tol)))


def format_spectrum_csv(report: SpectrumReport) -> str:
    lines = ["re,im,modulus"]
    for z in report.eigenvalues:
        lines.append(f"{float(z.real)!r},{float(z.imag)!r},{float(abs(z))!r}")
    return "\n".join(lines) + "\n"


def spectrum_svg(report: SpectrumReport, title: str = "", size: int = 480) -> str:
    """Self-contained SVG scatter of the spectrum.

    Draws the unit circle (grey), the circle of radius rho (red) and the
    circle of radius 1/delta (green) on the square [-1.1, 1.1]^2.
    """
    half = 1.1
    scale = size / (2 * half)

    def X(x):
        return (x + half) * scale

    def Y(y):
        return (half - y) * scale

    def circle(r, colour, width=1.0):
        return (f'<circle cx="{X(0):.2f}" cy="{Y(0):.2f}" r="{r * scale:.2f}" '
                f'style="fill:none;stroke:{colour};stroke-width:{width}"/>')

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" style="fill:white"/>',
        f'<line x1="0" y1="{Y(0):.2f}" x2="{size}" y2="{Y(0):.2f}" '
        f'style="stroke:#cccccc;stroke-width:0.5"/>',
        f'<line x1="{X(0):.2f}" y1="0" x2="{X(0):.2f}" y2="{size}" '
        f'style="stroke:#cccccc;stroke-width:0.5"/>',
        circle(1.0, "#888888"),
    ]
    if report.rho is not None:
        parts.append(circle(report.rho, "red", 1.5))
    if report.delta is not None:
        parts.append(circle(1.0 / report.delta, "green", 1.5))
    for z in report.eigenvalues:
        parts.append(f'<circle cx="{X(z.real):.2f}" cy="{Y(z.imag):.2f}" r="1.6" '
                     f'style="fill:#1f3a93;stroke:none"/>')
    if title:
        parts.append(f'<text x="8" y="16" style="font-family:sans-serif;font-size:12px">'
                     f'{_escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
