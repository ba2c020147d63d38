"""Six-step Munkres algorithm that also maintains the dual potentials.

Row and column coverings, stars and primes are kept in the clear; the
reduced cost matrix and the duals are backend values. Zero tests are cached
and re-run only for entries a dual adjustment actually changed.
"""

from __future__ import annotations

from typing import Any, Sequence

from ..model import Assignment, DualSolution, WeightMatrix
from .arith import ClearArith
from .common import DEFAULT_BIT_BUDGET, SolverResult, check_bit_budget, require_square


class Munkres:
    """One run of the Hungarian method on an ``n x n`` matrix of backend values.

    Invariant between steps: ``C[i][j] == w[i][j] - u[i] - v[j]`` and every
    entry of ``C`` is non-negative.
    """

    def __init__(self, values: Sequence[Sequence[Any]], arith=None):
        self.arith = arith if arith is not None else ClearArith()
        self.n = len(values)
        n = self.n
        self.C = [list(row) for row in values]
        self.u: list[Any] = [0] * n
        self.v: list[Any] = [0] * n
        self.zero = [[False] * n for _ in range(n)]
        self.starred = [[False] * n for _ in range(n)]
        self.primed = [[False] * n for _ in range(n)]
        self.row_covered = [False] * n
        self.col_covered = [False] * n

    # step 1 in the usual numbering; the row minimum becomes u_i
    def reduce_rows(self) -> None:
        n, C = self.n, self.C
        mins = self.arith.min_many(C)
        for i in range(n):
            minval = mins[i]
            for j in range(n):
                C[i][j] = C[i][j] - minval
            self.u[i] = minval
        flags = self.arith.is_zero_many([C[i][j] for i in range(n) for j in range(n)])
        for k, z in enumerate(flags):
            self.zero[k // n][k % n] = z
        self.arith.step()

    def star_zeros(self) -> None:
        n = self.n
        row_has = [False] * n
        col_has = [False] * n
        for i in range(n):
            for j in range(n):
                if self.zero[i][j] and not row_has[i] and not col_has[j]:
                    self.starred[i][j] = True
                    row_has[i] = col_has[j] = True
        self.arith.step()

    def cover_starred_columns(self) -> bool:
        """Cover columns holding a starred zero; True when all are covered."""
        n = self.n
        for j in range(n):
            self.col_covered[j] = any(self.starred[i][j] for i in range(n))
        self.arith.step()
        return all(self.col_covered)

    def _uncovered_zero(self) -> tuple[int, int] | None:
        for i in range(self.n):
            if self.row_covered[i]:
                continue
            for j in range(self.n):
                if not self.col_covered[j] and self.zero[i][j]:
                    return i, j
        return None

    def prime_zeros(self) -> tuple[int, int] | None:
        """Prime uncovered zeros until one has no star in its row.

        Returns that zero, or None when no uncovered zero is left.
        """
        while True:
            self.arith.step()
            hit = self._uncovered_zero()
            if hit is None:
                return None
            i, j = hit
            self.primed[i][j] = True
            star_col = next((c for c in range(self.n) if self.starred[i][c]), None)
            if star_col is None:
                return hit
            self.row_covered[i] = True
            self.col_covered[star_col] = False

    def augment(self, start: tuple[int, int]) -> None:
        n = self.n
        path = [start]
        while True:
            col = path[-1][1]
            r = next((i for i in range(n) if self.starred[i][col]), None)
            if r is None:
                break
            path.append((r, col))
            c = next(j for j in range(n) if self.primed[r][j])
            path.append((r, c))
        for i, j in path:
            self.starred[i][j] = not self.starred[i][j]
        self.primed = [[False] * n for _ in range(n)]
        self.row_covered = [False] * n
        self.col_covered = [False] * n
        self.arith.iteration()
        self.arith.step()

    def adjust(self) -> None:
        """Shift the smallest uncovered value between rows and columns.

        Covered rows gain ``minval`` (their ``u`` drops by it), uncovered
        columns lose it (their ``v`` grows by it).
        """
        n, C = self.n, self.C
        rc, cc = self.row_covered, self.col_covered
        self.arith.covering(rc, cc)
        minval = self.arith.min([C[i][j] for i in range(n) if not rc[i] for j in range(n) if not cc[j]])
        for i in range(n):
            if rc[i]:
                self.u[i] = self.u[i] - minval
            for j in range(n):
                if rc[i]:
                    C[i][j] = C[i][j] + minval
                if not cc[j]:
                    C[i][j] = C[i][j] - minval
        for j in range(n):
            if not cc[j]:
                self.v[j] = self.v[j] + minval
        # minval > 0, so covered/covered cells become non-zero; only
        # uncovered/uncovered cells can have turned into zeros.
        cells = [(i, j) for i in range(n) if not rc[i] for j in range(n) if not cc[j]]
        flags = self.arith.is_zero_many([C[i][j] for i, j in cells])
        for (i, j), z in zip(cells, flags):
            self.zero[i][j] = z
        for i in range(n):
            if rc[i]:
                for j in range(n):
                    if cc[j]:
                        self.zero[i][j] = False
        self.arith.step()

    def run(self) -> list[int]:
        """Solve and return the column assigned to each row."""
        self.reduce_rows()
        self.star_zeros()
        while not self.cover_starred_columns():
            while True:
                hit = self.prime_zeros()
                if hit is not None:
                    break
                self.adjust()
            self.augment(hit)
        return [next(j for j in range(self.n) if self.starred[i][j]) for i in range(self.n)]


def solve_hungarian(W: WeightMatrix, bit_budget: int = DEFAULT_BIT_BUDGET) -> SolverResult:
    require_square(W, "solve_hungarian")
    check_bit_budget(W, 2 * W.rows + 2, bit_budget)
    m = Munkres(W.w)
    row_to_col = m.run()
    return SolverResult(
        Assignment.from_row_to_col(W, row_to_col),
        DualSolution(m.u, m.v),
        m.arith.stats,
    )
