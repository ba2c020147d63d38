"""Arithmetic backends the solvers are written against.

Solvers never compare or test values directly. They call the backend for
every data-dependent decision (zero tests, comparisons, minimum searches)
so that the same code runs in the clear, here, or on secret-shared values
through :class:`lsap_mpc.mpc.oblivious.SecureArith`. Additions and
subtractions use the ordinary operators on whatever value type the backend
hands out.

Vector methods (``*_many``) are semantically a loop over the scalar method
but are executed as one batch by the secure backend, which is what keeps
their round count constant.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, Sequence

import numpy as np

# int64 fast path for row updates when |entries| stay below this
_FAST_BOUND = 1 << 30


@dataclass
class OpStats:
    steps: int = 0
    zero_tests: int = 0
    min_finds: int = 0
    comparisons: int = 0
    iterations: int = 0
    multiplications: int = 0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class ClearArith:
    """Plain integer backend that only counts operations."""

    def __init__(self) -> None:
        self.stats = OpStats()

    # bookkeeping ------------------------------------------------------------

    def step(self) -> None:
        self.stats.steps += 1

    def iteration(self) -> None:
        self.stats.iterations += 1

    def covering(self, rows: Sequence[bool], cols: Sequence[bool]) -> None:
        """Called when a covering pattern drives the next operation."""

    # data-dependent primitives ----------------------------------------------

    def is_zero(self, x: Any) -> bool:
        self.stats.zero_tests += 1
        return x == 0

    def is_zero_many(self, xs: Sequence[Any]) -> list[bool]:
        self.stats.zero_tests += len(xs)
        return [x == 0 for x in xs]

    def lt(self, a: Any, b: Any) -> bool:
        self.stats.comparisons += 1
        return a < b

    def lt_many(self, pairs: Sequence[tuple[Any, Any]]) -> list[bool]:
        self.stats.comparisons += len(pairs)
        return [a < b for a, b in pairs]

    def lt_zero_many(self, xs: Sequence[Any]) -> list[bool]:
        """``[x < 0 for x in xs]``; used for whole tableau rows."""
        self.stats.comparisons += len(xs)
        return [bool(x < 0) for x in xs]

    def min(self, xs: Sequence[Any]) -> Any:
        self.stats.min_finds += 1
        self.stats.comparisons += len(xs) - 1
        return min(xs)

    def min_many(self, vectors: Sequence[Sequence[Any]]) -> list[Any]:
        return [self.min(xs) for xs in vectors]

    def argmin(self, xs: Sequence[Any]) -> tuple[int, Any]:
        """Lowest index holding the minimum, and the minimum itself."""
        self.stats.min_finds += 1
        self.stats.comparisons += len(xs) - 1
        best = 0
        for k in range(1, len(xs)):
            if xs[k] < xs[best]:
                best = k
        return best, xs[best]

    def argmin_many(self, vectors: Sequence[Sequence[Any]]) -> list[tuple[int, Any]]:
        return [self.argmin(xs) for xs in vectors]

    def argmin2(self, xs: Sequence[Any]) -> tuple[int, Any, int, Any]:
        """Minimum and runner-up: ``(j1, m1, j2, m2)`` with ``j1 != j2``."""
        j1, m1 = self.argmin(xs)
        rest = [k for k in range(len(xs)) if k != j1]
        k2, m2 = self.argmin([xs[k] for k in rest])
        return j1, m1, rest[k2], m2

    def mul_many(self, xs: Sequence[Any], ys: Sequence[Any]) -> list[Any]:
        self.stats.multiplications += len(xs)
        return [x * y for x, y in zip(xs, ys)]

    def exact_div_many(self, xs: Sequence[Any], d: Any) -> list[Any]:
        """Divide by a (possibly secret) divisor known to divide every entry."""
        self.stats.multiplications += len(xs)
        if d == 1:
            return list(xs)
        out = [x // d for x in xs]
        if any(q * d != x for q, x in zip(out, xs)):
            raise ArithmeticError(f"entries are not divisible by {d}")
        return out

    def pivot_update(self, rows, factors, prow, p, d) -> list:
        """``(p * row - f * prow) / d`` for every ``row`` and its factor ``f``.

        Semantically ``mul_many`` twice plus ``exact_div_many``; counted that way.
        """
        self.stats.multiplications += 3 * len(rows) * len(prow)
        out = pivot_rows_numeric(rows, factors, prow, p, d)
        if out is None:
            raise ArithmeticError(f"row update is not divisible by {d}")
        return out

    def reveal(self, x: Any) -> int:
        return int(x)

    def reveal_many(self, xs: Sequence[Any]) -> list[int]:
        return [int(x) for x in xs]


def pivot_rows_numeric(rows, factors, prow, p, d):
    """Row update on public integers; ``None`` if the division is not exact."""
    p, d = int(p), int(d)
    R = np.array(rows)
    f = np.array(factors)
    r = np.array(prow)
    small = (
        R.dtype == np.int64 and f.dtype == np.int64 and r.dtype == np.int64
        and max(abs(p), abs(d)) < _FAST_BOUND
        and (R.size == 0 or int(np.abs(R).max()) < _FAST_BOUND)
        and (f.size == 0 or int(np.abs(f).max()) < _FAST_BOUND)
        and (r.size == 0 or int(np.abs(r).max()) < _FAST_BOUND)
    )
    if not small:
        R, f, r = (np.array(x, dtype=object) for x in (rows, factors, prow))
    num = p * R - f[:, None] * r[None, :]
    if d == 1:
        return list(num)
    if d == -1:
        return list(-num)
    q = num // d
    if (q * d != num).any():
        return None
    return list(q)
