"""Shortest augmenting path solver in the style of the classic ICPC
``MinCostMatching`` routine: row/column reduction, a greedy matching on
tight edges, then one Dijkstra search per unmatched row.
"""

from __future__ import annotations

from typing import Any, Sequence

from ..model import Assignment, DualSolution, WeightMatrix
from .arith import ClearArith
from .common import DEFAULT_BIT_BUDGET, SolverResult, check_bit_budget, require_square


def min_cost_matching(C: Sequence[Sequence[Any]], arith) -> tuple[list[int], list[Any], list[Any]]:
    """Return ``(row_to_col, u, v)`` with ``C[i][j] - u[i] - v[j] >= 0`` everywhere
    and equality on matched cells."""
    n = len(C)
    u = arith.min_many([list(row) for row in C])
    v = arith.min_many([[C[i][j] - u[i] for i in range(n)] for j in range(n)])
    arith.step()

    lmate = [-1] * n
    rmate = [-1] * n
    tight = arith.is_zero_many([C[i][j] - u[i] - v[j] for i in range(n) for j in range(n)])
    for i in range(n):
        for j in range(n):
            if rmate[j] == -1 and tight[i * n + j]:
                lmate[i] = j
                rmate[j] = i
                break
    arith.step()

    for s in range(n):
        if lmate[s] != -1:
            continue
        arith.iteration()
        dist = [C[s][k] - u[s] - v[k] for k in range(n)]
        dad = [-1] * n
        seen = [False] * n
        while True:
            arith.step()
            unseen = [k for k in range(n) if not seen[k]]
            pos, _ = arith.argmin([dist[k] for k in unseen])
            j = unseen[pos]
            seen[j] = True
            if rmate[j] == -1:
                break
            i = rmate[j]
            rest = [k for k in range(n) if not seen[k]]
            cand = [dist[j] + C[i][k] - u[i] - v[k] for k in rest]
            better = arith.lt_many([(cand[t], dist[k]) for t, k in enumerate(rest)])
            for t, k in enumerate(rest):
                if better[t]:
                    dist[k] = cand[t]
                    dad[k] = j

        for k in range(n):
            if k != j and seen[k]:
                i = rmate[k]
                delta = dist[k] - dist[j]
                v[k] = v[k] + delta
                u[i] = u[i] - delta
        u[s] = u[s] + dist[j]

        while dad[j] >= 0:
            d = dad[j]
            rmate[j] = rmate[d]
            lmate[rmate[j]] = j
            j = d
        rmate[j] = s
        lmate[s] = j
    return lmate, u, v


def solve_sap_acm(W: WeightMatrix, bit_budget: int = DEFAULT_BIT_BUDGET) -> SolverResult:
    require_square(W, "solve_sap_acm")
    check_bit_budget(W, 2 * W.rows + 2, bit_budget)
    arith = ClearArith()
    row_to_col, u, v = min_cost_matching(W.w, arith)
    return SolverResult(Assignment.from_row_to_col(W, row_to_col), DualSolution(u, v), arith.stats)
