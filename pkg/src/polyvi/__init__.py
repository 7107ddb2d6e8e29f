"""Polynomial variational inequalities over polyhedral sets."""

from ._backend import BACKEND
from .kkt import (
    LICQError,
    SolutionSet,
    SolveConfig,
    VIProblem,
    solve,
    solve_cone_cp,
    verify_solution,
)
from .polyhedra import PolyhedralCone, PolyhedralSet
from .polymap import MonomialBasis, PolynomialMap

__all__ = [
    "BACKEND",
    "LICQError",
    "MonomialBasis",
    "PolyhedralCone",
    "PolyhedralSet",
    "PolynomialMap",
    "SolutionSet",
    "SolveConfig",
    "VIProblem",
    "solve",
    "solve_cone_cp",
    "verify_solution",
]

__version__ = "0.1.0"
