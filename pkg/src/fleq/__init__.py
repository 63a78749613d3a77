"""Direct scattering and Darboux-transformation toolkit for the
Fokas-Lenells equation on the line.

Submodules
----------
grid        uniform grids, finite differences, quadrature, Sobolev norms
spectral    Jost solutions of the spatial spectral problem
scattering  scattering coefficients, eigenvalues, norming constants
darboux     two-fold Darboux transformation (add/remove solitons)
evolution   time evolution, N-soliton generation, PDE residuals
verify      the acceptance-criteria engine behind ``fleq verify``
cli         command-line front end
"""

from . import darboux, errors, evolution, grid, scattering, spectral

__version__ = "0.1.0"

__all__ = [
    "darboux",
    "errors",
    "evolution",
    "grid",
    "scattering",
    "spectral",
    "__version__",
]
