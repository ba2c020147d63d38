"""Jonker-Volgenant shortest augmenting path solver.

Preprocessing follows LAPJV: column reduction (scanning columns in reverse),
reduction transfer from singly-assigned rows, and two passes of augmenting
row reduction. Rows still free afterwards are augmented with a Dijkstra-like
search that settles all columns at the current minimum distance at once.
"""

from __future__ import annotations

from typing import Any, Sequence

from ..model import Assignment, DualSolution, WeightMatrix, balance
from .arith import ClearArith
from .common import DEFAULT_BIT_BUDGET, NonTermination, SolverResult, check_bit_budget

ROW_REDUCTION_PASSES = 2


def lapjv(C: Sequence[Sequence[Any]], arith) -> tuple[list[int], list[Any], list[Any]]:
    """Square LAPJV. Returns ``(row_to_col, u, v)``."""
    n = len(C)
    if n == 1:
        arith.step()
        return [0], [C[0][0]], [0]

    rowsol = [-1] * n
    colsol = [-1] * n
    v: list[Any] = [0] * n
    matches = [0] * n

    for j in reversed(range(n)):
        imin, vmin = arith.argmin([C[i][j] for i in range(n)])
        v[j] = vmin
        matches[imin] += 1
        if matches[imin] == 1:
            rowsol[imin] = j
            colsol[j] = imin
        elif arith.lt(v[j], v[rowsol[imin]]):
            j1 = rowsol[imin]
            rowsol[imin] = j
            colsol[j] = imin
            colsol[j1] = -1
        else:
            colsol[j] = -1
    arith.step()

    free = []
    for i in range(n):
        if matches[i] == 0:
            free.append(i)
        elif matches[i] == 1:
            j1 = rowsol[i]
            m = arith.min([C[i][j] - v[j] for j in range(n) if j != j1])
            v[j1] = v[j1] - m
    arith.step()

    guard = 4 * n * n * (n + 1) + 64
    for _ in range(ROW_REDUCTION_PASSES):
        todo = list(free)
        free = []
        k = 0
        while k < len(todo):
            guard -= 1
            if guard < 0:
                raise NonTermination("augmenting row reduction did not settle")
            arith.step()
            i = todo[k]
            k += 1
            j1, umin, j2, usubmin = arith.argmin2([C[i][j] - v[j] for j in range(n)])
            i0 = colsol[j1]
            strict = arith.lt(umin, usubmin)
            if strict:
                v[j1] = v[j1] - (usubmin - umin)
            elif i0 > -1:
                j1 = j2
                i0 = colsol[j2]
            rowsol[i] = j1
            colsol[j1] = i
            if i0 > -1:
                rowsol[i0] = -1
                if strict:
                    k -= 1
                    todo[k] = i0
                else:
                    free.append(i0)

    for freerow in free:
        arith.iteration()
        _augment(C, arith, freerow, rowsol, colsol, v)

    u = [C[i][rowsol[i]] - v[rowsol[i]] for i in range(n)]
    return rowsol, u, v


def _augment(C, arith, freerow: int, rowsol: list[int], colsol: list[int], v: list[Any]) -> None:
    n = len(C)
    d = [C[freerow][j] - v[j] for j in range(n)]
    pred = [freerow] * n
    collist = list(range(n))
    low = up = 0
    last = -1
    endofpath = -1
    mn: Any = 0
    while endofpath < 0:
        arith.step()
        if up == low:
            last = low - 1
            rest = collist[up:]
            mn = arith.min([d[j] for j in rest])
            at_min = arith.is_zero_many([d[j] - mn for j in rest])
            front = [j for j, z in zip(rest, at_min) if z]
            back = [j for j, z in zip(rest, at_min) if not z]
            collist[up:] = front + back
            up += len(front)
            for j in front:
                if colsol[j] < 0:
                    endofpath = j
                    break
            if endofpath >= 0:
                break
        j1 = collist[low]
        low += 1
        i = colsol[j1]
        h = C[i][j1] - v[j1] - mn
        scan = collist[up:]
        v2s = [C[i][j] - v[j] - h for j in scan]
        better = arith.lt_many([(v2, d[j]) for v2, j in zip(v2s, scan)])
        idx = [t for t, b in enumerate(better) if b]
        ties = arith.is_zero_many([v2s[t] - mn for t in idx]) if idx else []
        tie_at = dict(zip(idx, ties))
        for t, j in enumerate(scan):
            if not better[t]:
                continue
            pred[j] = i
            if tie_at[t]:
                if colsol[j] < 0:
                    endofpath = j
                    break
                pos = collist.index(j)
                collist[pos], collist[up] = collist[up], collist[pos]
                up += 1
            d[j] = v2s[t]

    for k in range(last + 1):
        j1 = collist[k]
        v[j1] = v[j1] + d[j1] - mn

    while True:
        i = pred[endofpath]
        colsol[endofpath] = i
        j1 = endofpath
        endofpath = rowsol[i]
        rowsol[i] = j1
        if i == freerow:
            break


def solve_sap_jv(W: WeightMatrix, bit_budget: int = DEFAULT_BIT_BUDGET) -> SolverResult:
    """Optimal matching of every row (or every column, if there are fewer columns).

    For rectangular input the duals are shifted so that every unmatched
    column (or row) has potential 0 and all potentials on the larger side
    are non-positive.
    """
    if W.sense.value != "minimize":
        raise ValueError("solve_sap_jv minimizes; convert maximization instances first")
    if W.rows > W.cols:
        t = solve_sap_jv(W.transpose(), bit_budget)
        pairs = [(i, j) for j, i in t.assignment.pairs]
        return SolverResult(Assignment.from_pairs(W, pairs), DualSolution(t.dual.v, t.dual.u), t.stats)
    check_bit_budget(W, 2 * W.cols + 2, bit_budget)
    B = balance(W)
    arith = ClearArith()
    rowsol, u, v = lapjv(B.matrix.w, arith)
    if B.padded:
        shift = max(v)
        u = [x + shift for x in u[: W.rows]]
        v = [x - shift for x in v]
    pairs = B.strip(enumerate(rowsol))
    return SolverResult(Assignment.from_pairs(W, pairs), DualSolution(u, v), arith.stats)
