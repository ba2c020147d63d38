"""Forward auction with epsilon scaling, entirely in integers.

Costs are multiplied by ``n + 1`` so that a final phase with ``eps = 1``
is below ``1/n`` of the original cost unit, which makes the last phase's
assignment exactly optimal. Prices survive across phases; assignments are
reset at the start of each phase.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

from ..model import Assignment, InstanceTooLarge, WeightMatrix
from .arith import ClearArith
from .common import DEFAULT_BIT_BUDGET, NonTermination, SolverResult, require_square, tighten_duals

DEFAULT_ALPHA = 4


def eps_schedule(start: int, alpha) -> list[int]:
    """Decreasing integer increments from ``start`` down to 1."""
    alpha = Fraction(alpha)
    if alpha <= 1:
        raise ValueError("alpha must be greater than 1")
    out = [max(1, start)]
    while out[-1] > 1:
        nxt = int(Fraction(out[-1]) / alpha)
        out.append(max(1, min(nxt, out[-1] - 1)))
    return out


def initial_eps(W: WeightMatrix) -> int:
    """Highest absolute cost of the unscaled instance."""
    return W.max_abs()


def run_auction(
    c: Sequence[Sequence[Any]],
    schedule: Sequence[int],
    arith,
    max_bids: int | None = None,
) -> tuple[list[int], list[Any]]:
    """Run all phases on the scaled cost matrix ``c``; returns ``(row_to_col, prices)``."""
    n = len(c)
    prices: list[Any] = [0] * n
    owner = [-1] * n
    obj = [-1] * n
    cap = max_bids if max_bids is not None else 64 * n * n * (n + 1) + 256
    for eps in schedule:
        arith.iteration()
        owner = [-1] * n
        obj = [-1] * n
        queue = list(range(n))
        bids = 0
        while queue:
            bids += 1
            if bids > cap:
                raise NonTermination(f"auction stalled at eps={eps} after {cap} bids")
            arith.step()
            i = queue.pop(0)
            if n == 1:
                j1, incr = 0, eps
            else:
                j1, m1, _, m2 = arith.argmin2([c[i][j] + prices[j] for j in range(n)])
                incr = m2 - m1 + eps
            prices[j1] = prices[j1] + incr
            prev = owner[j1]
            if prev >= 0:
                obj[prev] = -1
                queue.append(prev)
                queue.sort()
            owner[j1] = i
            obj[i] = j1
    return obj, prices


def solve_auction(
    W: WeightMatrix,
    alpha=DEFAULT_ALPHA,
    bit_budget: int = DEFAULT_BIT_BUDGET,
    max_bids: int | None = None,
) -> SolverResult:
    require_square(W, "solve_auction")
    n = W.rows
    scale = n + 1
    top = initial_eps(W)
    if ((n * n + 1) * scale * max(top, 1)).bit_length() + 1 > bit_budget:
        raise InstanceTooLarge(f"scaled auction prices may exceed {bit_budget} bits")
    c = [[scale * x for x in row] for row in W.w]
    arith = ClearArith()
    row_to_col, prices = run_auction(c, eps_schedule(scale * top, alpha), arith, max_bids)
    # prices are column charges on the scaled costs; -p/(n+1) estimates v
    v0 = [-(p // scale) for p in prices]
    dual = tighten_duals(W, row_to_col, v0)
    return SolverResult(Assignment.from_row_to_col(W, row_to_col), dual, arith.stats)
