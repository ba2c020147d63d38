"""Run the cleartext solvers on secret-shared weights.

:class:`SecureArith` implements the solver backend interface on top of an
:class:`Engine`: values are shared, zero tests and branch comparisons are
opened (and logged), minima stay shared and argmin positions are opened.
:func:`run_oblivious` wires input sharing, the optional shuffle
countermeasure, the solve itself and output opening together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..model import Assignment, DualSolution, Sense, WeightMatrix, balance
from ..solvers.arith import OpStats, pivot_rows_numeric
from ..solvers.auction import DEFAULT_ALPHA, eps_schedule, run_auction
from ..solvers.common import SolverError, SolverResult
from ..solvers.hungarian import Munkres
from ..solvers.sap_acm import min_cost_matching
from ..solvers.sap_jv import lapjv
from ..solvers.simplex import Tableau
from .engine import KAPPA, CostModel, Engine, EventKind, LeakageLog, SharedRow, SharedValue
from .field import field_for
from .shuffle import matmul_many, shuffle2d, transpose, unshuffle_cols, unshuffle_rows

ALGORITHMS = ("hungarian", "sap_acm", "sap_jv", "auction", "simplex")


def _public(x) -> bool:
    return not isinstance(x, SharedValue)


def _all_public(row) -> bool:
    if isinstance(row, SharedRow):
        return False
    return isinstance(row, np.ndarray) or not any(isinstance(x, SharedValue) for x in row)


def _plain(x):
    """Numpy integers become Python ints; shared values pass through."""
    return int(x) if isinstance(x, np.integer) else x


class SecureArith:
    """Solver backend over shared values; every decision goes through the engine."""

    def __init__(self, engine: Engine):
        self.engine = engine
        self.stats = OpStats()

    def step(self) -> None:
        self.stats.steps += 1

    def iteration(self) -> None:
        self.stats.iterations += 1
        self.engine.log.append(EventKind.ITERATION, "iteration", ())

    def covering(self, rows: Sequence[bool], cols: Sequence[bool]) -> None:
        self.engine.log.append(EventKind.COVER, "covering", [bool(x) for x in list(rows) + list(cols)])

    def is_zero(self, x) -> bool:
        return self.is_zero_many([x])[0]

    def is_zero_many(self, xs: Sequence[Any]) -> list[bool]:
        self.stats.zero_tests += len(xs)
        secret = [x for x in xs if not _public(x)]
        flags = iter(self.engine.zero_test_many(secret))
        return [x == 0 if _public(x) else next(flags) for x in xs]

    def lt(self, a, b) -> bool:
        return self.lt_many([(a, b)])[0]

    def lt_many(self, pairs: Sequence[tuple[Any, Any]]) -> list[bool]:
        self.stats.comparisons += len(pairs)
        secret = [(a, b) for a, b in pairs if not (_public(a) and _public(b))]
        bits = iter(self.engine.lt_open_many(secret))
        return [a < b if _public(a) and _public(b) else next(bits) for a, b in pairs]

    def lt_zero_many(self, xs) -> list[bool]:
        if isinstance(xs, SharedRow):
            self.stats.comparisons += len(xs)
            return self.engine.lt_zero_open(xs)
        return self.lt_many([(x, 0) for x in xs])

    def min(self, xs):
        return self.min_many([xs])[0]

    def min_many(self, vectors):
        self.stats.min_finds += len(vectors)
        self.stats.comparisons += sum(len(v) - 1 for v in vectors)
        return self.engine.min_many(vectors)

    def argmin(self, xs):
        return self.argmin_many([xs])[0]

    def argmin_many(self, vectors):
        self.stats.min_finds += len(vectors)
        self.stats.comparisons += sum(len(v) - 1 for v in vectors)
        return self.engine.argmin_many(vectors)

    def argmin2(self, xs):
        j1, m1 = self.argmin(xs)
        rest = [k for k in range(len(xs)) if k != j1]
        k2, m2 = self.argmin([xs[k] for k in rest])
        return j1, m1, rest[k2], m2

    def mul_many(self, xs, ys):
        self.stats.multiplications += len(xs)
        return self.engine.mul_many(xs, ys)

    def exact_div_many(self, xs, d):
        self.stats.multiplications += len(xs)
        return self._div([_plain(x) for x in xs], _plain(d))

    def pivot_update(self, rows, factors, prow, p, d):
        """Tableau row update. Rows made only of public entries (with a public
        pivot row, pivot and divisor) are local computation; the rest runs as
        batched products and an exact division."""
        self.stats.multiplications += 3 * len(rows) * len(prow)
        out: list = [None] * len(rows)
        pub_pivot = _public(p) and _public(d) and _all_public(prow)
        fast = [k for k, (row, f) in enumerate(zip(rows, factors)) if pub_pivot and _public(f) and _all_public(row)]
        if fast:
            res = pivot_rows_numeric([rows[k] for k in fast], [factors[k] for k in fast], prow, p, d)
            if res is None:
                raise ArithmeticError(f"row update is not divisible by {d}")
            for k, row in zip(fast, res):
                out[k] = row
        if pub_pivot:
            prow_l = [int(x) for x in prow]
            for k in range(len(rows)):
                if out[k] is None:
                    out[k] = self.engine.row_update(rows[k], _plain(p), _plain(factors[k]), prow_l, _plain(d))
        slow = [k for k in range(len(rows)) if out[k] is None]
        if slow:
            prow_l = [_plain(x) for x in prow]
            width = len(prow_l)
            flat = [_plain(x) for k in slow for x in rows[k]]
            left = self.engine.mul_many([_plain(p)] * len(flat), flat)
            right = self.engine.mul_many([_plain(factors[k]) for k in slow for _ in range(width)], prow_l * len(slow))
            vals = self._div([a - b for a, b in zip(left, right)], _plain(d))
            for n, k in enumerate(slow):
                out[k] = vals[n * width:(n + 1) * width]
        return out

    def _div(self, xs, d):
        p = self.engine.p
        if _public(d):
            inv = pow(int(d), -1, p)
            return [x * inv if not _public(x) else _exact_int(x, d) for x in xs]
        (inv,) = self.engine.inverse_many([d])
        return self.engine.mul_many(list(xs), [inv] * len(xs))

    def reveal(self, x) -> int:
        return self.reveal_many([x])[0]

    def reveal_many(self, xs):
        return self.engine.reveal_many(xs)


def _exact_int(x: int, d: int) -> int:
    q, r = divmod(x, d)
    if r:
        raise ArithmeticError(f"{x} is not divisible by {d}")
    return q


def comparison_bits(algorithm: str, side: int, bits: int) -> int:
    """Public bound on comparison operand differences for one algorithm."""
    if algorithm == "auction":
        return (((side * side + 2) * (side + 1)) << bits).bit_length() + 2
    if algorithm == "simplex":
        return bits + 2 * side.bit_length() + 3
    return bits + side.bit_length() + 3


@dataclass
class ObliviousRun:
    algorithm: str
    result: SolverResult
    log: LeakageLog
    cost: CostModel
    countermeasure: bool
    backend: str
    views: list[list[int]] | None = None
    prime: int = 0

    @property
    def simulated_time(self) -> float:
        """Seconds under the run's cost model."""
        return self.cost.simulated_time()

    def simulated_time_at(self, latency_ms: float) -> float:
        return self.cost.simulated_time(latency_ms)


# -- per-algorithm cores on a shared square matrix --------------------------


def _secure_tighten(engine: Engine, w, row_to_col: Sequence[int]) -> tuple[list, list]:
    """Optimal duals for an optimal assignment, label-correcting on shares.

    Starts from ``v = 0`` and runs ``n - 1`` synchronous relaxation passes of
    ``v_k <- min(v_k, v_s(i) - w_i,s(i) + w_ik)``, which settles every path.
    """
    n = len(w)
    v: list[Any] = [0] * n
    for _ in range(n - 1):
        base = [v[row_to_col[i]] - w[i][row_to_col[i]] for i in range(n)]
        v = engine.min_many([[v[k]] + [base[i] + w[i][k] for i in range(n)] for k in range(n)])
    u = [w[i][row_to_col[i]] - v[row_to_col[i]] for i in range(n)]
    return u, v


def _simplex_core(arith: SecureArith, w, bits: int) -> tuple[list[int], list, list]:
    n = len(w)
    top = (1 << bits) - 1

    class _Lp:
        pass

    lp = _Lp()
    lp.n, lp.m = n * n, 2 * n
    lp.c = [top - w[i][j] for i in range(n) for j in range(n)]
    lp.A = [[1 if k // n == i else 0 for k in range(n * n)] for i in range(n)]
    lp.A += [[1 if k % n == j else 0 for k in range(n * n)] for j in range(n)]
    lp.b = [1] * (2 * n)
    tab = Tableau(lp, arith)
    tab.solve()
    basic = [(i, var) for i, var in enumerate(tab.basis) if var < lp.n]
    xs = arith.exact_div_many([tab.T[i][tab.rhs] for i, _ in basic], tab.d)
    x = [0] * lp.n
    for (_, var), val in zip(basic, arith.engine.reveal_many(xs)):
        x[var] = val
    y = arith.exact_div_many([tab.T[tab.m][lp.n + k] for k in range(lp.m)], tab.d)
    row_to_col = [-1] * n
    used = [False] * n
    for k, val in enumerate(x):
        if val == 1:
            row_to_col[k // n] = k % n
            used[k % n] = True
        elif val != 0:
            raise SolverError(f"fractional LP vertex: x[{k}] = {val}")
    free = iter(j for j in range(n) if not used[j])
    for i in range(n):
        if row_to_col[i] < 0:
            row_to_col[i] = next(free)
    u = [top - yk for yk in y[:n]]
    v = [-yk for yk in y[n:]]
    return row_to_col, u, v


def _solve_core(algorithm: str, arith: SecureArith, M, bits: int, alpha) -> tuple[list[int], list, list]:
    n = len(M)
    if algorithm == "hungarian":
        m = Munkres(M, arith)
        return m.run(), m.u, m.v
    if algorithm == "sap_acm":
        return min_cost_matching(M, arith)
    if algorithm == "sap_jv":
        return lapjv(M, arith)
    if algorithm == "auction":
        scale = n + 1
        c = [[x * scale for x in row] for row in M]
        # public start: opening max|w| would reveal a weight
        schedule = eps_schedule(scale * ((1 << bits) - 1), alpha)
        row_to_col, _ = run_auction(c, schedule, arith)
        u, v = _secure_tighten(arith.engine, M, row_to_col)
        return row_to_col, u, v
    if algorithm == "simplex":
        return _simplex_core(arith, M, bits)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


def run_oblivious(
    algorithm: str,
    W: WeightMatrix,
    model: CostModel | None = None,
    countermeasure: bool = False,
    seed: int = 0,
    backend: str = "shamir",
    kappa: int = KAPPA,
    check_bounds: bool = True,
    alpha=DEFAULT_ALPHA,
    perms=None,
    record_views: bool = False,
) -> ObliviousRun:
    """Solve ``W`` with all weights and duals secret-shared among three parties.

    Opened during the run: zero-test outcomes, branch comparison bits,
    argmin positions, covering patterns and iteration boundaries (all
    logged). Opened at the end: the assignment and the dual potentials.
    With ``countermeasure`` the matrix is shuffled first and everything is
    mapped back through the secret permutations before opening.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    if W.sense is not Sense.MINIMIZE:
        raise ValueError("run_oblivious minimizes; convert maximization instances first")
    flipped = W.rows > W.cols
    Wo = W.transpose() if flipped else W
    B = balance(Wo)
    s = B.matrix.rows
    k = comparison_bits(algorithm, s, W.bits)
    engine = Engine(
        seed=seed,
        backend=backend,
        prime=field_for(k, kappa),
        kappa=kappa,
        cmp_bits=k,
        cost=model,
        check_bounds=check_bounds,
        record_views=record_views,
    )
    arith = SecureArith(engine)
    M = engine.input_matrix(B.matrix.tolist(), owner=0)
    h = None
    if countermeasure:
        M, h = shuffle2d(engine, M, perms)

    row_to_col, u, v = _solve_core(algorithm, arith, M, W.bits, alpha)

    if h is not None:
        X = [[1 if row_to_col[i] == j else 0 for j in range(s)] for i in range(s)]
        (A,) = matmul_many(engine, [(transpose(h.P), X)])
        (X0,) = matmul_many(engine, [(A, transpose(h.Q))])
        bitsX = engine.reveal_many([x for row in X0 for x in row])
        row_to_col = [next(j for j in range(s) if bitsX[i * s + j] == 1) for i in range(s)]
        u = unshuffle_rows(engine, u, h)
        v = unshuffle_cols(engine, v, h)

    r, c = B.orig_rows, B.orig_cols
    if B.padded:
        # every unmatched column carries the largest v; move it to 0
        shift = v[row_to_col[r]]
        u = [x + shift for x in u[:r]]
        v = [x - shift for x in v]
    opened = engine.reveal_many(list(u) + list(v))
    u_out, v_out = opened[:r], opened[r:]
    pairs = B.strip(enumerate(row_to_col))
    if flipped:
        pairs = [(j, i) for i, j in pairs]
        u_out, v_out = v_out, u_out
    result = SolverResult(Assignment.from_pairs(W, pairs), DualSolution(u_out, v_out), arith.stats)
    views = [p.view for p in engine.parties] if record_views else None
    return ObliviousRun(algorithm, result, engine.log, engine.cost, countermeasure, backend, views, engine.p)
