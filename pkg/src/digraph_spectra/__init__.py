"""Spectra of random walks on random directed configuration multigraphs."""
from .degrees import DegreeSequence, from_types, regular, rho, rho_tilde, validate
from .errors import *  # noqa: F401,F403
from .sampler import Digraph, Environment, HalfEdge, derive_seed, sample_digraph, sample_environment
from .spectrum import SpectrumReport, check_main_bound, eigenvalues
from .transition import build_P, pi_minus

__version__ = "0.1.0"

__all__ = [
    "DegreeSequence", "from_types", "regular", "rho", "rho_tilde", "validate",
    "Digraph", "Environment", "HalfEdge", "derive_seed", "sample_digraph",
    "sample_environment", "SpectrumReport", "check_main_bound", "eigenvalues",
    "build_P", "pi_minus",
]
