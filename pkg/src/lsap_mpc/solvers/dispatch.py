"""One entry point for any orientation and sense."""

from __future__ import annotations

from ..model import Assignment, DualSolution, Sense, WeightMatrix, balance
from .common import SolverResult


def solve(W: WeightMatrix, algorithm: str = "hungarian") -> SolverResult:
    """Solve a rectangular or maximization instance with any square solver.

    Maximization is handled by negating the weights (and the duals back);
    rectangular input is oriented so rows <= cols, zero-padded, and the
    duals shifted so that unmatched columns end up at potential 0.
    """
    from . import SOLVERS

    if algorithm not in SOLVERS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(SOLVERS)}")
    if W.sense is Sense.MAXIMIZE:
        neg = WeightMatrix([[-x for x in row] for row in W.w], Sense.MINIMIZE, W.bits)
        r = solve(neg, algorithm)
        dual = DualSolution([-x for x in r.dual.u], [-x for x in r.dual.v])
        return SolverResult(Assignment.from_pairs(W, r.assignment.pairs), dual, r.stats)
    if W.rows > W.cols:
        r = solve(W.transpose(), algorithm)
        pairs = [(i, j) for j, i in r.assignment.pairs]
        return SolverResult(Assignment.from_pairs(W, pairs), DualSolution(r.dual.v, r.dual.u), r.stats)
    if W.is_square or algorithm == "sap_jv":
        return SOLVERS[algorithm](W)
    B = balance(W)
    r = SOLVERS[algorithm](B.matrix)
    u, v = list(r.dual.u), list(r.dual.v)
    row_to_col = dict(r.assignment.pairs)
    # a padding row is tight at a column of maximal v
    shift = v[row_to_col[W.rows]]
    u = [x + shift for x in u[: W.rows]]
    v = [x - shift for x in v]
    pairs = B.strip(r.assignment.pairs)
    return SolverResult(Assignment.from_pairs(W, pairs), DualSolution(u, v), r.stats)

