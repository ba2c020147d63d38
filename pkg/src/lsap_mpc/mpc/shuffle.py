"""Oblivious row/column shuffling of a shared square matrix.

Every party draws its own row and column permutation (Fisher-Yates) and
inputs them as shared permutation matrices. The joint permutations are the
products of the three contributions, so they stay secret unless all parties
collude. Applying them is plain matrix multiplication on shares.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .engine import NPARTIES, Engine, SharedValue, Value

Matrix = list[list[Value]]


def perm_matrix(perm: Sequence[int]) -> list[list[int]]:
    """``P[i][perm[i]] = 1``, so ``(P @ M)[i] = M[perm[i]]``."""
    n = len(perm)
    return [[1 if perm[i] == j else 0 for j in range(n)] for i in range(n)]


def transpose(M: Matrix) -> Matrix:
    return [list(col) for col in zip(*M)]


def matmul_many(engine: Engine, jobs: Sequence[tuple[Matrix, Matrix]]) -> list[Matrix]:
    """Several shared matrix products in one round (one degree reduction per entry)."""
    pairs = []
    shapes = []
    for A, B in jobs:
        Bt = transpose(B)
        shapes.append((len(A), len(Bt)))
        pairs += [(row, col) for row in A for col in Bt]
    flat = engine.dot_many(pairs)
    out, k = [], 0
    for r, c in shapes:
        out.append([flat[k + i * c:k + (i + 1) * c] for i in range(r)])
        k += r * c
    return out


def matvec(engine: Engine, A: Matrix, x: Sequence[Value]) -> list[SharedValue]:
    return engine.dot_many([(row, list(x)) for row in A])


@dataclass
class ShuffleHandle:
    """Shared joint permutation matrices ``P`` (rows) and ``Q`` (columns).

    The shuffled matrix is ``P @ M @ Q``; entry ``(i, j)`` holds
    ``M[pi(i)][sigma(j)]``.
    """

    P: Matrix
    Q: Matrix

    @property
    def n(self) -> int:
        return len(self.P)


def _fisher_yates(rng, n: int) -> list[int]:
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def draw_permutations(engine: Engine, n: int, perms=None) -> ShuffleHandle:
    """Jointly random secret permutations.

    ``perms`` optionally fixes each party's ``(row_perm, col_perm)``
    contribution (tests use identities).
    """
    if perms is None:
        perms = [(_fisher_yates(p.rng, n), _fisher_yates(p.rng, n)) for p in engine.parties]
    if len(perms) != NPARTIES:
        raise ValueError(f"need one permutation pair per party, got {len(perms)}")
    rows, cols = [], []
    for k, (rp, cp) in enumerate(perms):
        if sorted(rp) != list(range(n)) or sorted(cp) != list(range(n)):
            raise ValueError(f"party {k} contributed a non-permutation")
        rows.append(engine.input_matrix(perm_matrix(rp), owner=k))
        cols.append(engine.input_matrix(perm_matrix(cp), owner=k))
    P01, Q01 = matmul_many(engine, [(rows[0], rows[1]), (cols[0], cols[1])])
    P, Q = matmul_many(engine, [(P01, rows[2]), (Q01, cols[2])])
    return ShuffleHandle(P, Q)


def shuffle2d(engine: Engine, M: Matrix, perms=None) -> tuple[Matrix, ShuffleHandle]:
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("shuffle2d needs a square matrix")
    h = draw_permutations(engine, n, perms)
    (PM,) = matmul_many(engine, [(h.P, M)])
    (out,) = matmul_many(engine, [(PM, h.Q)])
    return out, h


def unshuffle2d(engine: Engine, M: Matrix, h: ShuffleHandle) -> Matrix:
    """Inverse of :func:`shuffle2d`: ``P^T @ M @ Q^T``."""
    (A,) = matmul_many(engine, [(transpose(h.P), M)])
    (out,) = matmul_many(engine, [(A, transpose(h.Q))])
    return out


def unshuffle_rows(engine: Engine, x: Sequence[Value], h: ShuffleHandle) -> list[SharedValue]:
    """Row-indexed vector back to original positions (``P^T x``)."""
    return matvec(engine, transpose(h.P), x)


def unshuffle_cols(engine: Engine, x: Sequence[Value], h: ShuffleHandle) -> list[SharedValue]:
    """Column-indexed vector back to original positions (``Q x``)."""
    return matvec(engine, h.Q, x)
