"""Spectral solver for the linearized Thomas-Fermi model problem.

gamma w = eps^2 L+ L- w on the line, with L- = -d^2 + p_eps and
L+ = -d^2 + q_eps. Eigenvalues tend to 2n(n+1) as eps -> 0.
"""
__version__ = "0.1.0"

from .special_fn import airy_eval, gamma_n, gegenbauer
from .matching import find_eigenvalue, assemble_eigenfunction
from .operators import generalized_gamma_spectrum

__all__ = [
    "__version__",
    "airy_eval",
    "gamma_n",
    "gegenbauer",
    "find_eigenvalue",
    "assemble_eigenfunction",
    "generalized_gamma_spectrum",
]
