"""Problem representation for the linear sum assignment problem.

A :class:`WeightMatrix` is the instance, an :class:`Assignment` a (partial
or complete) matching, and a :class:`DualSolution` the row/column
potentials that certify optimality. The helpers here balance rectangular
instances, switch between minimization and maximization, and build the
relaxed LP form consumed by the simplex solver.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BITS = 16


class Sense(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class InstanceTooLarge(ValueError):
    """An instance does not fit the configured bit budget."""


class MatrixFormatError(ValueError):
    pass


def _as_rows(w: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in w)
    return rows


@dataclass(frozen=True)
class WeightMatrix:
    """Integer cost (or utility) matrix.

    Entries must satisfy ``|w| < 2**bits``. ``sense`` records whether the
    matrix is meant to be minimized or maximized.
    """

    w: tuple[tuple[int, ...], ...]
    sense: Sense = Sense.MINIMIZE
    bits: int = DEFAULT_BITS

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", _as_rows(self.w))
        object.__setattr__(self, "sense", Sense(self.sense))
        if not self.w or not self.w[0]:
            raise ValueError("weight matrix needs at least one row and one column")
        width = len(self.w[0])
        if any(len(row) != width for row in self.w):
            raise ValueError("weight matrix rows have different lengths")
        bound = 1 << self.bits
        for i, row in enumerate(self.w):
            for j, x in enumerate(row):
                if not -bound < x < bound:
                    raise InstanceTooLarge(
                        f"entry ({i},{j})={x} does not fit in {self.bits} bits"
                    )

    @classmethod
    def from_array(cls, a, sense: Sense | str = Sense.MINIMIZE, bits: int = DEFAULT_BITS) -> "WeightMatrix":
        return cls(np.asarray(a).tolist(), Sense(sense), bits)

    @property
    def rows(self) -> int:
        return len(self.w)

    @property
    def cols(self) -> int:
        return len(self.w[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def array(self) -> np.ndarray:
        return np.array(self.w, dtype=np.int64)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.w]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.w[i][j]

    def max_abs(self) -> int:
        return max(abs(x) for row in self.w for x in row)

    def cost(self, pairs: Iterable[tuple[int, int]]) -> int:
        return sum(self.w[i][j] for i, j in pairs)

    def transpose(self) -> "WeightMatrix":
        return WeightMatrix(tuple(zip(*self.w)), self.sense, self.bits)

    def with_entry(self, i: int, j: int, value: int) -> "WeightMatrix":
        rows = self.tolist()
        rows[i][j] = value
        return WeightMatrix(rows, self.sense, self.bits)


@dataclass(frozen=True)
class Assignment:
    """Row/column pairs of a matching together with their total weight."""

    pairs: tuple[tuple[int, int], ...]
    cost: int

    def __post_init__(self) -> None:
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        rows = [i for i, _ in pairs]
        cols = [j for _, j in pairs]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError(f"pairs are not row/column disjoint: {pairs}")

    @classmethod
    def from_pairs(cls, W: WeightMatrix, pairs: Iterable[tuple[int, int]]) -> "Assignment":
        pairs = tuple(pairs)
        return cls(pairs, W.cost(pairs))

    @classmethod
    def from_row_to_col(cls, W: WeightMatrix, row_to_col: Sequence[int]) -> "Assignment":
        return cls.from_pairs(W, ((i, j) for i, j in enumerate(row_to_col) if j >= 0))

    def is_complete(self, W: WeightMatrix) -> bool:
        return len(self.pairs) == min(W.rows, W.cols)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


@dataclass(frozen=True)
class DualSolution:
    """Row potentials ``u`` and column potentials ``v``."""

    u: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", tuple(int(x) for x in self.u))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))

    @property
    def total(self) -> int:
        return sum(self.u) + sum(self.v)

    def slack(self, W: WeightMatrix) -> list[list[int]]:
        """``w_ij - u_i - v_j`` for every cell (non-negative when feasible for minimization)."""
        return [[W.w[i][j] - self.u[i] - self.v[j] for j in range(W.cols)] for i in range(W.rows)]

    def is_feasible(self, W: WeightMatrix) -> bool:
        """Dual feasibility, including the sign constraint on the larger side
        of a rectangular instance (whose vertices need not all be matched)."""
        if len(self.u) != W.rows or len(self.v) != W.cols:
            return False
        sign = 1 if W.sense is Sense.MINIMIZE else -1
        if not all(sign * s >= 0 for row in self.slack(W) for s in row):
            return False
        return all(sign * x <= 0 for x in self.free_side(W))

    def free_side(self, W: WeightMatrix) -> tuple[int, ...]:
        """Potentials of the side with more vertices (empty when square)."""
        if W.rows < W.cols:
            return self.v
        if W.rows > W.cols:
            return self.u
        return ()


@dataclass(frozen=True)
class BalancedMatrix:
    """A square matrix produced by :func:`balance` plus what is needed to undo it."""

    matrix: WeightMatrix
    orig_rows: int
    orig_cols: int

    @property
    def padded(self) -> bool:
        return self.matrix.rows != self.orig_rows or self.matrix.cols != self.orig_cols

    def strip(self, pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
        """Drop pairs that touch a padding row or column."""
        return [(i, j) for i, j in pairs if i < self.orig_rows and j < self.orig_cols]


def balance(W: WeightMatrix) -> BalancedMatrix:
    """Zero-pad ``W`` to a square matrix of side ``max(rows, cols)``."""
    s = max(W.rows, W.cols)
    rows = [list(row) + [0] * (s - W.cols) for row in W.w]
    rows += [[0] * s for _ in range(s - W.rows)]
    return BalancedMatrix(WeightMatrix(rows, W.sense, W.bits), W.rows, W.cols)


def to_max_form(W: WeightMatrix, offset: int | None = None) -> WeightMatrix:
    """Turn a minimization instance into the equivalent maximization one.

    Each entry becomes ``offset - w`` where ``offset`` defaults to the largest
    entry, so all utilities are non-negative. For every complete assignment P
    on a square matrix, ``cost(P, result) = side * offset - cost(P, W)``.
    """
    if W.sense is not Sense.MINIMIZE:
        raise ValueError("to_max_form expects a minimization instance")
    top = max(max(row) for row in W.w)
    if offset is None:
        offset = top
    if offset < top:
        raise ValueError(f"offset {offset} is below the largest entry {top}")
    rows = [[offset - x for x in row] for row in W.w]
    bits = max(W.bits, (offset - min(min(r) for r in W.w)).bit_length())
    return WeightMatrix(rows, Sense.MAXIMIZE, bits)


@dataclass(frozen=True)
class LpInstance:
    """``maximize c.x  s.t.  A x <= b, x >= 0`` for a square assignment instance.

    Variable ``k`` is the cell ``(k // side, k % side)``; constraint rows
    ``0..side-1`` bound the row sums, ``side..2*side-1`` the column sums.
    """

    c: tuple[int, ...]
    A: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    matrix: WeightMatrix = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def side(self) -> int:
        return self.matrix.rows


def to_lp(W: WeightMatrix) -> LpInstance:
    if not W.is_square:
        raise ValueError("to_lp needs a square matrix; balance() it first")
    if W.sense is not Sense.MAXIMIZE:
        raise ValueError("to_lp needs a maximization instance; apply to_max_form() first")
    s = W.rows
    c = tuple(W.w[i][j] for i in range(s) for j in range(s))
    A = []
    for i in range(s):
        A.append(tuple(1 if k // s == i else 0 for k in range(s * s)))
    for j in range(s):
        A.append(tuple(1 if k % s == j else 0 for k in range(s * s)))
    return LpInstance(c, tuple(A), (1,) * (2 * s), W)


# -- file format --------------------------------------------------------------


def dumps_matrix(W: WeightMatrix) -> str:
    lines = [f"{W.rows} {W.cols} {W.sense.value}"]
    lines += [" ".join(str(x) for x in row) for row in W.w]
    return "\n".join(lines) + "\n"


def loads_matrix(text: str, bits: int = DEFAULT_BITS) -> WeightMatrix:
    """Parse either the whitespace format or comma-separated values.

    Whitespace format: a header ``rows cols sense`` followed by row-major
    integers. CSV format: a header row (``rows,cols,sense`` or column
    labels) followed by one matrix row per line.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    if "," in lines[0]:
        return _loads_csv(text, bits)
    head = lines[0].split()
    if len(head) not in (2, 3):
        raise MatrixFormatError(f"bad header line: {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
        sense = Sense(head[2]) if len(head) == 3 else Sense.MINIMIZE
        values = [int(tok) for ln in lines[1:] for tok in ln.split()]
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from exc
    if len(values) != rows * cols:
        raise MatrixFormatError(f"expected {rows * cols} entries, found {len(values)}")
    return WeightMatrix([values[i * cols:(i + 1) * cols] for i in range(rows)], sense, bits)


def _loads_csv(text: str, bits: int) -> WeightMatrix:
    reader = [r for r in csv.reader(io.StringIO(text)) if r]
    head, body = reader[0], reader[1:]
    sense = Sense.MINIMIZE
    try:
        if len(head) == 3 and head[2].strip() in {s.value for s in Sense}:
            rows, cols, sense = int(head[0]), int(head[1]), Sense(head[2].strip())
        else:
            rows, cols = len(body), len(head)
        data = [[int(x) for x in r] for r in body]
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from exc
    if len(data) != rows or any(len(r) != cols for r in data):
        raise MatrixFormatError("CSV body does not match the header dimensions")
    return WeightMatrix(data, sense, bits)


def read_matrix(path: str | Path, bits: int = DEFAULT_BITS) -> WeightMatrix:
    return loads_matrix(Path(path).read_text(encoding="utf-8"), bits)


def write_matrix(W: WeightMatrix, path: str | Path) -> None:
    Path(path).write_text(dumps_matrix(W), encoding="utf-8")
