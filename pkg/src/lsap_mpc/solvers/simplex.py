"""Tableau simplex with Bland's rule and fraction-free integer pivoting.

The tableau is stored as integers ``T`` together with a common denominator
``d`` (the previous pivot), so every update is
``T[i][j] <- (p*T[i][j] - T[i][c]*T[r][j]) / d`` with an exact division.
The basis and the pivot positions are public; tableau entries are backend
values, which lets the same routine run on secret-shared data.
"""

from __future__ import annotations

from typing import Any

from ..model import Assignment, DualSolution, LpInstance, Sense, WeightMatrix, to_lp, to_max_form
from .arith import ClearArith
from .common import SolverError, SolverResult


class Tableau:
    def __init__(self, lp: LpInstance, arith):
        self.arith = arith
        self.nvars = lp.n
        self.m = lp.m
        width = lp.n + lp.m + 1
        rows = []
        for k in range(lp.m):
            row: list[Any] = list(lp.A[k]) + [0] * lp.m + [lp.b[k]]
            row[lp.n + k] = 1
            rows.append(row)
        rows.append([-x for x in lp.c] + [0] * (lp.m + 1))
        assert all(len(r) == width for r in rows)
        self.T = rows
        self.d: Any = 1
        self.basis = [lp.n + k for k in range(lp.m)]

    @property
    def rhs(self) -> int:
        return self.nvars + self.m

    def entering(self) -> int | None:
        neg = self.arith.lt_zero_many(self.T[self.m][:self.rhs])
        return next((j for j, b in enumerate(neg) if b), None)

    def leaving(self, c: int) -> int:
        T, arith = self.T, self.arith
        pos = arith.lt_many([(0, T[i][c]) for i in range(self.m)])
        cand = [i for i in range(self.m) if pos[i]]
        if not cand:
            raise SolverError(f"LP unbounded in column {c}; not an assignment LP")
        best = cand[0]
        for i in cand[1:]:
            a, b = arith.mul_many([T[i][self.rhs], T[best][self.rhs]], [T[best][c], T[i][c]])
            diff = a - b
            if arith.lt(diff, 0):
                best = i
            elif arith.is_zero(diff) and self.basis[i] < self.basis[best]:
                best = i
        return best

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        others = [i for i in range(self.m + 1) if i != r]
        new = self.arith.pivot_update([T[i] for i in others], [T[i][c] for i in others], T[r], T[r][c], self.d)
        for i, row in zip(others, new):
            T[i] = row
        self.d = T[r][c]
        self.basis[r] = c

    def solve(self, max_iter: int = 100_000) -> None:
        for _ in range(max_iter):
            self.arith.step()
            c = self.entering()
            if c is None:
                return
            r = self.leaving(c)
            self.pivot(r, c)
            self.arith.iteration()
        raise SolverError("simplex iteration limit reached")


def simplex_tableau(lp: LpInstance, arith=None) -> Tableau:
    tab = Tableau(lp, arith if arith is not None else ClearArith())
    tab.solve()
    return tab


def _exact(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if r:
        raise SolverError(f"non-integral tableau value {num}/{den}")
    return q


def extract(lp: LpInstance, tab: Tableau) -> tuple[list[int], list[int]]:
    """Row-to-column assignment (completed where the LP left zero-profit gaps) and LP duals."""
    s = lp.side
    basic = [(i, var) for i, var in enumerate(tab.basis) if var < lp.n]
    opened = tab.arith.reveal_many(
        [tab.d]
        + [tab.T[i][tab.rhs] for i, _ in basic]
        + [tab.T[tab.m][lp.n + k] for k in range(lp.m)]
    )
    d = opened[0]
    x = [0] * lp.n
    for (_, var), num in zip(basic, opened[1:]):
        x[var] = _exact(num, d)
    y = [_exact(num, d) for num in opened[1 + len(basic):]]
    row_to_col = [-1] * s
    used = [False] * s
    for k, val in enumerate(x):
        if val == 1:
            row_to_col[k // s] = k % s
            used[k % s] = True
        elif val != 0:
            raise SolverError(f"fractional LP vertex: x[{k}] = {val}")
    free_cols = iter(j for j in range(s) if not used[j])
    for i in range(s):
        if row_to_col[i] < 0:
            row_to_col[i] = next(free_cols)
    return row_to_col, y


def solve_simplex(lp: LpInstance, arith=None) -> SolverResult:
    """Solve the relaxed LP of a maximization instance.

    The result is expressed for ``lp.matrix`` (maximize sense): the
    assignment's cost is the LP objective and the dual satisfies
    ``u_i + v_j >= w_ij`` with ``sum(u) + sum(v)`` equal to it.
    """
    tab = simplex_tableau(lp, arith)
    row_to_col, y = extract(lp, tab)
    s = lp.side
    W = lp.matrix
    return SolverResult(
        Assignment.from_row_to_col(W, row_to_col),
        DualSolution(y[:s], y[s:]),
        tab.arith.stats,
    )


def solve_simplex_matrix(W: WeightMatrix, arith=None) -> SolverResult:
    """Minimization front end: max-form conversion, LP solve, duals mapped back."""
    if W.sense is not Sense.MINIMIZE or not W.is_square:
        raise ValueError("solve_simplex_matrix expects a square minimization instance")
    offset = max(max(row) for row in W.w)
    lp = to_lp(to_max_form(W, offset))
    res = solve_simplex(lp, arith)
    u = [offset - y for y in res.dual.u]
    v = [-y for y in res.dual.v]
    return SolverResult(Assignment.from_pairs(W, res.assignment.pairs), DualSolution(u, v), res.stats)
