"""LSAP solvers. Each returns an optimal assignment, matching dual potentials
and operation counts."""

from .arith import ClearArith, OpStats
from .auction import solve_auction
from .dispatch import solve
from .common import BRUTE_FORCE_MAX_SIDE, NonTermination, SolverError, SolverResult, brute_force, tighten_duals
from .hungarian import Munkres, solve_hungarian
from .sap_acm import solve_sap_acm
from .sap_jv import solve_sap_jv
from .simplex import solve_simplex, solve_simplex_matrix

SOLVERS = {
    "hungarian": solve_hungarian,
    "sap_acm": solve_sap_acm,
    "sap_jv": solve_sap_jv,
    "auction": solve_auction,
    "simplex": solve_simplex_matrix,
}

__all__ = [
    "SOLVERS",
    "BRUTE_FORCE_MAX_SIDE",
    "ClearArith",
    "Munkres",
    "NonTermination",
    "OpStats",
    "SolverError",
    "SolverResult",
    "brute_force",
    "solve",
    "solve_auction",
    "solve_hungarian",
    "solve_sap_acm",
    "solve_sap_jv",
    "solve_simplex",
    "solve_simplex_matrix",
    "tighten_duals",
]
