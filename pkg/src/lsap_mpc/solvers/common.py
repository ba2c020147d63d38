from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Sequence

import numpy as np

from ..model import Assignment, DualSolution, InstanceTooLarge, Sense, WeightMatrix
from .arith import OpStats

BRUTE_FORCE_MAX_SIDE = 10
DEFAULT_BIT_BUDGET = 60


class SolverError(RuntimeError):
    """Internal failure of a solver (should not happen on valid instances)."""


class NonTermination(SolverError):
    pass


@dataclass
class SolverResult:
    assignment: Assignment
    dual: DualSolution
    stats: OpStats = field(default_factory=OpStats)

    @property
    def cost(self) -> int:
        return self.assignment.cost


def require_square(W: WeightMatrix, name: str) -> None:
    if not W.is_square:
        raise ValueError(f"{name} needs a square matrix, got {W.rows}x{W.cols}; use balance()")
    if W.sense is not Sense.MINIMIZE:
        raise ValueError(f"{name} minimizes; convert maximization instances first")


def check_bit_budget(W: WeightMatrix, factor: int, budget: int) -> None:
    """Reject instances whose intermediate values may exceed ``budget`` bits."""
    need = (W.max_abs() * factor).bit_length() + 1
    if need > budget:
        raise InstanceTooLarge(
            f"intermediate values need {need} bits, budget is {budget}"
        )


def tighten_duals(W: WeightMatrix, row_to_col: Sequence[int], v0: Sequence[int]) -> DualSolution:
    """Exact optimal duals for an optimal assignment, starting from estimates ``v0``.

    Label-correcting pass over the difference constraints
    ``v_k <= v_sigma(i) + w_ik - w_i,sigma(i)``; it returns the largest
    feasible column potentials below ``v0`` and sets each ``u_i`` so the
    assigned edge is tight. Fails if the assignment is not optimal (a
    negative cycle keeps the labels decreasing).
    """
    n = W.rows
    w = W.w
    v = list(v0)
    for _ in range(n + 1):
        changed = False
        for i in range(n):
            s = row_to_col[i]
            base = v[s] - w[i][s]
            for k in range(n):
                cand = base + w[i][k]
                if cand < v[k]:
                    v[k] = cand
                    changed = True
        if not changed:
            break
    else:
        raise SolverError("assignment is not optimal: dual labels do not converge")
    u = [w[i][row_to_col[i]] - v[row_to_col[i]] for i in range(n)]
    return DualSolution(u, v)


@lru_cache(maxsize=16)
def _injections(rows: int, cols: int) -> np.ndarray:
    return np.array(list(permutations(range(cols), rows)), dtype=np.int64).reshape(-1, rows)


def brute_force(W: WeightMatrix) -> Assignment:
    """Exact optimum by enumeration; ties go to the lexicographically first permutation."""
    if max(W.rows, W.cols) > BRUTE_FORCE_MAX_SIDE:
        raise ValueError(f"brute force is limited to side {BRUTE_FORCE_MAX_SIDE}")
    if W.rows > W.cols:
        t = brute_force(W.transpose())
        return Assignment.from_pairs(W, ((i, j) for j, i in t.pairs))
    perms = _injections(W.rows, W.cols)
    a = W.array
    totals = a[np.arange(W.rows), perms].sum(axis=1)
    k = int(np.argmax(totals) if W.sense is Sense.MAXIMIZE else np.argmin(totals))
    return Assignment.from_pairs(W, enumerate(perms[k].tolist()))
