"""Simulated three-party Shamir secret-sharing runtime (semi-honest, t = 1).

All parties live in one process. Each party owns a share slot, a private
random generator and an inbox; communication goes through
:class:`Network`, whose ``deliver`` call is the round barrier. Every
protocol step updates the :class:`CostModel` counters, and everything that
is opened for control flow is appended to the :class:`LeakageLog`.

Two backends run the same protocol code:

``shamir``
    real degree-1 Shamir shares over GF(p) with degree reduction by
    re-sharing after each multiplication;
``ideal``
    one slot holding the value itself. Counters and rounds are identical
    (the protocol code is shared); only the share arithmetic is skipped.
``count``
    like ``ideal``, but comparisons return their result directly and are
    charged with the closed-form cost of the comparison protocol instead of
    running it bit by bit. Meant for large benchmark sweeps; its counters
    are tested against ``ideal``.

Correlated randomness (random field elements, random bits, non-zero masks)
comes from an offline dealer and is counted in ``random_values``, not in
online rounds.
"""

from __future__ import annotations

import enum
import hashlib
import json
import numbers
import random
from collections import deque
from dataclasses import dataclass, field, fields
from itertools import permutations
from typing import Iterable, Sequence, Union

from .field import P61, centered, inverse

NPARTIES = 3
# Lagrange weights at 0 for evaluation points 1, 2, 3
_DEG2_WEIGHTS = (3, -3, 1)
KAPPA = 40
BACKENDS = ("shamir", "ideal", "count")
DEFAULT_CMP_BITS = 16


class MPCError(RuntimeError):
    pass


class BitBoundError(MPCError):
    """A comparison operand exceeds the configured bit bound."""


class ConsistencyError(MPCError):
    """Opened shares do not lie on a degree-1 polynomial."""


# -- accounting ---------------------------------------------------------------


@dataclass
class CostModel:
    """Counters of one execution plus the latency/local-cost model.

    ``simulated_time = local_time + rounds * latency``. Times are kept in
    integer microseconds so the latency law holds exactly.
    """

    latency_ms: float = 0.0
    mul_cost_us: int = 8
    open_cost_us: int = 4
    random_cost_us: int = 2
    rounds: int = 0
    opened_values: int = 0
    multiplications: int = 0
    zero_tests: int = 0
    comparisons: int = 0
    min_finds: int = 0
    random_values: int = 0
    messages: int = 0

    COUNTERS = (
        "rounds", "opened_values", "multiplications", "zero_tests",
        "comparisons", "min_finds", "random_values", "messages",
    )

    def counters(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in self.COUNTERS}

    def local_time_us(self) -> int:
        return (
            self.multiplications * self.mul_cost_us
            + self.opened_values * self.open_cost_us
            + self.random_values * self.random_cost_us
        )

    def simulated_time_us(self, latency_ms: float | None = None) -> int:
        lat = self.latency_ms if latency_ms is None else latency_ms
        return self.local_time_us() + self.rounds * round(lat * 1000)

    def simulated_time(self, latency_ms: float | None = None) -> float:
        """Seconds."""
        return self.simulated_time_us(latency_ms) / 1e6

    def fresh(self) -> "CostModel":
        """Same model parameters, zeroed counters."""
        keep = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in self.COUNTERS}
        return CostModel(**keep)


class EventKind(str, enum.Enum):
    BRANCH = "branch-taken"
    COVER = "covering-bit-opened"
    ZERO = "zero-test-result"
    ITERATION = "iteration-count"
    ARGMIN = "argmin-opened"


@dataclass(frozen=True)
class LeakageEvent:
    seq: int
    kind: EventKind
    source: str
    payload: tuple


class LeakageLog:
    """Ordered record of everything revealed for control flow.

    Payloads may only hold booleans and non-negative integers (indices,
    counts); they are produced exclusively from opened comparison bits,
    zero-test outcomes and opened indices, never from a reconstructed weight
    or dual value.
    """

    def __init__(self) -> None:
        self.events: list[LeakageEvent] = []

    def append(self, kind: EventKind, source: str, payload: Iterable) -> None:
        payload = tuple(payload)
        if all(type(x) is bool for x in payload):
            self.events.append(LeakageEvent(len(self.events), EventKind(kind), source, payload))
            return
        for x in payload:
            if not isinstance(x, (bool, int)) or (not isinstance(x, bool) and x < 0):
                raise TypeError(f"leakage payload may only carry bits and indices, got {x!r}")
        self.events.append(LeakageEvent(len(self.events), EventKind(kind), source, payload))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def of_kind(self, kind: EventKind) -> list[LeakageEvent]:
        return [e for e in self.events if e.kind is kind]

    def lines(self) -> list[str]:
        return [
            f"{e.seq}\t{e.kind.value}\t{e.source}\t{json.dumps([int(x) for x in e.payload], separators=(',', ':'))}"
            for e in self.events
        ]

    def export(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.lines():
                fh.write(line + "\n")

    def digest(self) -> str:
        h = hashlib.sha256()
        for line in self.lines():
            h.update(line.encode("ascii") + b"\n")
        return h.hexdigest()


# -- parties and network ------------------------------------------------------


@dataclass
class Party:
    pid: int
    rng: random.Random
    view: list[int] = field(default_factory=list)
    record_view: bool = False

    def receive(self, payload: Sequence[int]) -> None:
        if self.record_view:
            self.view.extend(payload)


class Network:
    """FIFO channels between every ordered pair of parties."""

    def __init__(self, parties: Sequence[Party]):
        self.parties = parties
        self.channels = {(s, d): deque() for s, d in permutations(range(len(parties)), 2)}
        self.rounds = 0
        self.messages = 0

    def send(self, src: int, dst: int, payload: list[int]) -> None:
        self.channels[(src, dst)].append(payload)
        self.messages += len(payload)

    def deliver(self) -> dict[int, dict[int, list[int]]]:
        """Round barrier: hand every queued message to its recipient."""
        self.rounds += 1
        inbox: dict[int, dict[int, list[int]]] = {d: {} for d in range(len(self.parties))}
        for (s, d), q in self.channels.items():
            while q:
                payload = q.popleft()
                inbox[d].setdefault(s, []).extend(payload)
                self.parties[d].receive(payload)
        return inbox


# -- shared values ------------------------------------------------------------

ShareVec = tuple  # one list of field elements per slot


class SharedValue:
    """A secret-shared field element (one share per party slot).

    Supports ``+``/``-`` with other shared values or public integers, and
    ``*`` by public integers, all without interaction. Secret-by-secret
    products, comparisons and equality tests go through the engine; using
    Python comparison operators on a shared value is an error.
    """

    __slots__ = ("engine", "data")
    # make numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, engine: "Engine", data: tuple[int, ...]):
        self.engine = engine
        self.data = data

    def _lift(self, other) -> tuple[int, ...] | None:
        if isinstance(other, SharedValue):
            return other.data
        if type(other) is int or isinstance(other, numbers.Integral):
            return (int(other),) * len(self.data)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        p = self.engine.p
        return SharedValue(self.engine, tuple((a + b) % p for a, b in zip(self.data, o)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        p = self.engine.p
        return SharedValue(self.engine, tuple((a - b) % p for a, b in zip(self.data, o)))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        p = self.engine.p
        return SharedValue(self.engine, tuple((b - a) % p for a, b in zip(self.data, o)))

    def __neg__(self):
        p = self.engine.p
        return SharedValue(self.engine, tuple((-a) % p for a in self.data))

    def __mul__(self, other):
        if type(other) is int or isinstance(other, numbers.Integral):
            p, other = self.engine.p, int(other)
            return SharedValue(self.engine, tuple((a * other) % p for a in self.data))
        if isinstance(other, SharedValue):
            return self.engine.mul_many([self], [other])[0]
        return NotImplemented

    __rmul__ = __mul__

    def _refuse(self, *_):
        raise TypeError("shared values cannot be compared in the clear; use the engine")

    __lt__ = __le__ = __gt__ = __ge__ = __eq__ = __ne__ = __bool__ = _refuse
    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"<SharedValue slots={len(self.data)}>"


class SharedRow:
    """A whole vector of shared values kept in share-vector form.

    Indexing yields :class:`SharedValue` (or a sub-row for slices); engine
    methods accept it wherever a list of values is expected and then skip
    the per-element packing.
    """

    __slots__ = ("engine", "X")
    __array_ufunc__ = None

    def __init__(self, engine: "Engine", X: tuple):
        self.engine = engine
        self.X = X

    def __len__(self) -> int:
        return len(self.X[0])

    def __getitem__(self, k):
        if isinstance(k, slice):
            return SharedRow(self.engine, tuple(x[k] for x in self.X))
        return SharedValue(self.engine, tuple(x[k] for x in self.X))

    def __iter__(self):
        return iter(self.engine._scatter(self.X))

    def __repr__(self) -> str:
        return f"<SharedRow len={len(self)}>"


Value = Union[SharedValue, int]


class Engine:
    """Three-party runtime with cost accounting and a leakage log."""

    def __init__(
        self,
        seed: int = 0,
        backend: str = "shamir",
        prime: int = P61,
        kappa: int = KAPPA,
        cmp_bits: int = DEFAULT_CMP_BITS,
        cost: CostModel | None = None,
        check_bounds: bool = True,
        record_views: bool = False,
    ):
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")
        if cmp_bits + kappa + 3 > prime.bit_length():
            raise BitBoundError(
                f"{cmp_bits}-bit comparisons with kappa={kappa} need a prime above 2^{cmp_bits + kappa + 3}"
            )
        self.backend = backend
        self.slots = NPARTIES if backend == "shamir" else 1
        self.analytic = backend == "count"
        self.p = prime
        # reducing 64 extra random bits mod p leaves a bias below 2^-64
        self._wide = prime.bit_length() + 64
        self.kappa = kappa
        self.cmp_bits = cmp_bits
        self.check_bounds = check_bounds
        self.cost = cost.fresh() if cost is not None else CostModel()
        self.log = LeakageLog()
        self.parties = [
            Party(k, random.Random(f"lsap-mpc:{seed}:party{k}"), record_view=record_views)
            for k in range(NPARTIES)
        ]
        self.dealer = random.Random(f"lsap-mpc:{seed}:dealer")
        self.network = Network(self.parties)
        self.opened: dict[str, int] = {}
        self.trace: list[tuple[str, list[int]]] | None = [] if record_views else None

    # -- share-vector layer -------------------------------------------------

    def _share_values(self, values: Sequence[int], rng: random.Random) -> ShareVec:
        p = self.p
        if self.slots == 1:
            return ([v % p for v in values],)
        wide = self._wide
        coeffs = [rng.getrandbits(wide) % p for _ in values]
        # shares at x = 1, 2, 3 by repeated addition of the slope
        s1 = [(v + a) % p for v, a in zip(values, coeffs)]
        s2 = [(s + a) % p for s, a in zip(s1, coeffs)]
        return s1, s2, [(s + a) % p for s, a in zip(s2, coeffs)]

    def _vconst(self, values: Sequence[int]) -> ShareVec:
        p = self.p
        col = [v % p for v in values]
        return tuple(list(col) for _ in range(self.slots))

    def _vadd(self, X: ShareVec, Y: ShareVec) -> ShareVec:
        p = self.p
        return tuple([(a + b) % p for a, b in zip(x, y)] for x, y in zip(X, Y))

    def _vsub(self, X: ShareVec, Y: ShareVec) -> ShareVec:
        p = self.p
        return tuple([(a - b) % p for a, b in zip(x, y)] for x, y in zip(X, Y))

    def _vscale(self, X: ShareVec, c: int) -> ShareVec:
        p = self.p
        return tuple([(a * c) % p for a in x] for x in X)

    def _vaffine(self, X: ShareVec, scale: Sequence[int], offset: Sequence[int]) -> ShareVec:
        """Elementwise ``scale * X + offset`` with public coefficients."""
        p = self.p
        return tuple([(s * a + o) % p for a, s, o in zip(x, scale, offset)] for x in X)

    @staticmethod
    def _vconcat(parts: Sequence[ShareVec]) -> ShareVec:
        slots = len(parts[0])
        return tuple([e for part in parts for e in part[k]] for k in range(slots))

    @staticmethod
    def _vsplit(X: ShareVec, size: int) -> list[ShareVec]:
        total = len(X[0])
        return [tuple(x[o:o + size] for x in X) for o in range(0, total, size)]

    # -- accounting -----------------------------------------------------------

    def _charge_round(self, messages: int) -> None:
        """A communication round the network object did not carry itself."""
        self.network.rounds += 1
        self.network.messages += messages

    def _charge_mul(self, m: int) -> None:
        self.cost.rounds += 1
        self.cost.multiplications += m
        self.cost.messages += (NPARTIES - 1) * NPARTIES * m

    def _charge_open(self, m: int, purpose: str) -> None:
        self.cost.rounds += 1
        self.cost.opened_values += m
        self.cost.messages += (NPARTIES - 1) * NPARTIES * m
        self.opened[purpose] = self.opened.get(purpose, 0) + m

    def _charge_lt(self, m: int, k: int) -> None:
        """Everything one batch of ``m`` comparisons on ``k``-bit operands costs."""
        self.cost.comparisons += m
        self.cost.random_values += m * k + m
        self._charge_open(m, "mask")
        self._charge_round((NPARTIES - 1) * NPARTIES * m)
        d = 1
        while d < k:
            self._charge_mul(m * (k - d))
            self._charge_round((NPARTIES - 1) * NPARTIES * m * (k - d))
            d *= 2
        self._charge_mul(m * k)
        self._charge_round((NPARTIES - 1) * NPARTIES * m * k)

    def _reshare(self, D: ShareVec) -> ShareVec:
        """Degree reduction of degree-2 shares; one round."""
        m = len(D[0])
        self._charge_mul(m)
        p = self.p
        if self.slots == 1:
            self._charge_round((NPARTIES - 1) * NPARTIES * m)
            return ([d % p for d in D[0]],)
        own = {}
        for k, party in enumerate(self.parties):
            sub = self._share_values(D[k], party.rng)
            for dst in range(NPARTIES):
                if dst != k:
                    self.network.send(k, dst, sub[dst])
            own[k] = sub[k]
        inbox = self.network.deliver()
        w0, w1, w2 = _DEG2_WEIGHTS
        out = []
        for dst in range(NPARTIES):
            a, b, c = (own[src] if src == dst else inbox[dst][src] for src in range(NPARTIES))
            out.append([(w0 * x + w1 * y + w2 * z) % p for x, y, z in zip(a, b, c)])
        return tuple(out)

    def _vmul(self, X: ShareVec, Y: ShareVec) -> ShareVec:
        p = self.p
        D = tuple([(a * b) % p for a, b in zip(x, y)] for x, y in zip(X, Y))
        return self._reshare(D)

    def _vdot(self, pairs: Sequence[tuple[ShareVec, ShareVec]]) -> ShareVec:
        """Inner products with a single degree reduction each (one round for all)."""
        p = self.p
        D = tuple(
            [sum(a * b for a, b in zip(X[k], Y[k])) % p for X, Y in pairs]
            for k in range(self.slots)
        )
        return self._reshare(D)

    def _vopen(self, X: ShareVec, purpose: str) -> list[int]:
        m = len(X[0])
        self._charge_open(m, purpose)
        p = self.p
        if self.slots == 1:
            self._charge_round((NPARTIES - 1) * NPARTIES * m)
            if self.trace is not None:
                self.trace.append((purpose, list(X[0])))
            return list(X[0])
        for k in range(NPARTIES):
            for dst in range(NPARTIES):
                if dst != k:
                    self.network.send(k, dst, X[k])
        inbox = self.network.deliver()
        s1, s2 = inbox[2][0], inbox[2][1]
        s3 = inbox[0][2]
        vals = [(2 * a - b) % p for a, b in zip(s1, s2)]
        if any((2 * b - a - c) % p for a, b, c in zip(s1, s2, s3)):
            raise ConsistencyError("opened shares are inconsistent")
        if self.trace is not None:
            self.trace.append((purpose, vals))
        return vals

    def _peek(self, X: ShareVec) -> list[int]:
        """Reconstruct without accounting; simulator-only, used for bound checks."""
        p = self.p
        if self.slots == 1:
            return [centered(x, p) for x in X[0]]
        return [centered(2 * a - b, p) for a, b in zip(X[0], X[1])]

    def _vrandom(self, m: int, kind: str = "field", bound: int | None = None) -> ShareVec:
        rng, p = self.dealer, self.p
        wide = self._wide
        if kind == "bit":
            word = rng.getrandbits(m) if m else 0
            vals = [(word >> t) & 1 for t in range(m)]
        elif kind == "nonzero":
            vals = [1 + rng.getrandbits(wide) % (p - 1) for _ in range(m)]
        elif bound is not None:
            vals = [rng.randrange(bound) for _ in range(m)]
        else:
            vals = [rng.getrandbits(wide) % p for _ in range(m)]
        self.cost.random_values += m
        return self._share_values(vals, rng)

    # -- element layer --------------------------------------------------------

    def _gather(self, values: Sequence[Value]) -> ShareVec:
        if isinstance(values, SharedRow):
            return values.X
        p = self.p
        cols: list[list[int]] = [[] for _ in range(self.slots)]
        for v in values:
            if isinstance(v, SharedValue):
                if v.engine is not self:
                    raise MPCError("shared value belongs to another engine")
                for k in range(self.slots):
                    cols[k].append(v.data[k])
            else:
                c = int(v) % p
                for k in range(self.slots):
                    cols[k].append(c)
        return tuple(cols)

    def _scatter(self, X: ShareVec) -> list[SharedValue]:
        return [SharedValue(self, d) for d in zip(*X)]

    def const(self, x: int) -> SharedValue:
        return SharedValue(self, (x % self.p,) * self.slots)

    def input_values(self, values: Sequence[int], owner: int = 0) -> list[SharedValue]:
        """``owner`` secret-shares private inputs; one round."""
        bound = 1 << self.cmp_bits
        for x in values:
            if not -bound < x < bound:
                raise BitBoundError(f"input {x} does not fit in {self.cmp_bits} bits")
        X = self._share_values(values, self.parties[owner].rng)
        self.cost.rounds += 1
        self.cost.messages += (NPARTIES - 1) * len(values)
        if self.slots == NPARTIES:
            for dst in range(NPARTIES):
                if dst != owner:
                    self.network.send(owner, dst, X[dst])
            self.network.deliver()
        else:
            self._charge_round((NPARTIES - 1) * len(values))
        return self._scatter(X)

    def input_matrix(self, rows: Sequence[Sequence[int]], owner: int = 0) -> list[list[SharedValue]]:
        n = len(rows[0])
        flat = self.input_values([x for row in rows for x in row], owner)
        return [flat[i * n:(i + 1) * n] for i in range(len(rows))]

    def share(self, x: int) -> SharedValue:
        """Dealer-share one value without counting a round (test helper).

        Accepts ``|x| < 2**(cmp_bits + kappa)``, the headroom every shared
        quantity must respect.
        """
        if abs(x) >= 1 << (self.cmp_bits + self.kappa):
            raise BitBoundError(f"{x} exceeds the {self.cmp_bits + self.kappa}-bit headroom")
        return self._scatter(self._share_values([x], self.dealer))[0]

    def shares_of(self, x: SharedValue) -> tuple[int, ...]:
        return x.data

    def reconstruct(self, x: Value) -> int:
        """Signed value of a shared element, from any two shares (no accounting)."""
        if isinstance(x, int):
            return x
        return self._peek(self._gather([x]))[0]

    def reconstruct_from(self, x: SharedValue, parties: tuple[int, int]) -> int:
        """Interpolate from a chosen pair of share holders."""
        if self.slots == 1:
            return centered(x.data[0], self.p)
        (i, a), (j, b) = [(k + 1, x.data[k]) for k in parties]
        # value at 0 of the line through (i, a) and (j, b)
        num = (a * j - b * i) % self.p
        return centered(num * inverse(j - i, self.p), self.p)

    def reveal_many(self, values: Sequence[Value]) -> list[int]:
        """Open final outputs (not control-flow leakage)."""
        secret = [v for v in values if isinstance(v, SharedValue)]
        opened = iter(self._vopen(self._gather(secret), "output") if secret else [])
        p = self.p
        return [centered(next(opened), p) if isinstance(v, SharedValue) else int(v) for v in values]

    # -- arithmetic protocols -------------------------------------------------

    def mul_many(self, xs: Sequence[Value], ys: Sequence[Value]) -> list[Value]:
        """Products; secret-by-secret ones share a single round."""
        out: list[Value] = [None] * len(xs)  # type: ignore[list-item]
        idx = []
        for k, (x, y) in enumerate(zip(xs, ys)):
            if isinstance(x, SharedValue) and isinstance(y, SharedValue):
                idx.append(k)
            else:
                out[k] = x * y
        if idx:
            prod = self._scatter(self._vmul(self._gather([xs[k] for k in idx]), self._gather([ys[k] for k in idx])))
            for k, z in zip(idx, prod):
                out[k] = z
        return out

    def row_update(self, row: Sequence[Value], alpha: int, f: Value, y: Sequence[int], d: int) -> SharedRow:
        """``(alpha * row - f * y) / d`` for public ``alpha``, ``y`` and ``d``.

        Local computation only: every product has a public factor. ``d`` must
        divide every entry exactly over the integers.
        """
        p = self.p
        X = self._gather(row)
        F = self._gather([f])
        dinv = pow(int(d), -1, p)
        a = int(alpha) * dinv % p
        ys = [int(v) * dinv % p for v in y]
        out = tuple([(a * x - fs[0] * yv) % p for x, yv in zip(xs, ys)] for xs, fs in zip(X, F))
        return SharedRow(self, out)

    def dot_many(self, pairs: Sequence[tuple[Sequence[Value], Sequence[Value]]]) -> list[SharedValue]:
        """Several inner products, one degree reduction each, one round in total."""
        return self._scatter(self._vdot([(self._gather(x), self._gather(y)) for x, y in pairs]))

    def zero_test_many(self, xs: Sequence[Value], source: str = "zero_test") -> list[bool]:
        """Public ``x == 0`` by opening ``r * x`` for fresh non-zero ``r``."""
        if not xs:
            return []
        X = self._gather(xs)
        R = self._vrandom(len(xs), "nonzero")
        masked = self._vopen(self._vmul(X, R), "mask")
        self.cost.zero_tests += len(xs)
        out = [c == 0 for c in masked]
        self.log.append(EventKind.ZERO, source, out)
        return out

    def _check_bound(self, D: ShareVec, k: int) -> None:
        if not self.check_bounds:
            return
        for d in self._peek(D):
            if not -(1 << k) < d < (1 << k):
                raise BitBoundError(f"comparison operand difference {d.bit_length()} bits exceeds {k}")

    def _vlt(self, A: ShareVec, B: ShareVec, k: int | None = None) -> ShareVec:
        """Shared bits ``[a < b]`` for ``|a - b| < 2**k``.

        Opens ``z + r`` with ``z = a - b + 2**k`` and a statistical mask
        ``r = 2**k * r_hi + sum 2**t * r_t``, then recovers ``z mod 2**k``
        with a bitwise comparison of the public low bits against the shared
        mask bits (log-depth prefix OR). ``a < b`` iff bit ``k`` of ``z`` is 0.
        """
        k = self.cmp_bits if k is None else k
        m = len(A[0])
        if k + self.kappa + 3 > self.p.bit_length():
            raise BitBoundError(f"field too small for {k}-bit comparisons")
        D = self._vsub(A, B)
        if self.analytic:
            p, half = self.p, self.p // 2
            signed = [d - p if d > half else d for d in D[0]]
            if self.check_bounds:
                lim = 1 << k
                if any(not -lim < d < lim for d in signed):
                    raise BitBoundError(f"comparison operand difference exceeds {k} bits")
            self._charge_lt(m, k)
            return ([1 if d < 0 else 0 for d in signed],)
        self._check_bound(D, k)
        self.cost.comparisons += m
        p = self.p
        two_k = 1 << k
        Z = self._vaffine(D, [1] * m, [two_k] * m)
        rbits = self._vrandom(m * k, "bit")
        r_hi = self._vrandom(m, bound=1 << self.kappa)
        # rbits holds bit t of comparison i at position t*m + i
        R_t = self._vsplit(rbits, m)
        r_low = tuple(
            [sum(R_t[t][s][i] << t for t in range(k)) % p for i in range(m)] for s in range(self.slots)
        )
        R = self._vadd(self._vscale(r_hi, two_k), r_low)
        c = self._vopen(self._vadd(Z, R), "mask")
        c_low = [x % two_k for x in c]
        # e_t = c_t XOR r_t, listed from the most significant bit down
        E = []
        for t in reversed(range(k)):
            ct = [(x >> t) & 1 for x in c_low]
            E.append(self._vaffine(R_t[t], [1 - 2 * b for b in ct], ct))
        P = list(E)
        d = 1
        while d < k:
            idx = list(range(d, k))
            prod = self._vsplit(self._vmul(self._vconcat([P[t] for t in idx]), self._vconcat([P[t - d] for t in idx])), m)
            P = P[:d] + [self._vsub(self._vadd(P[t], P[t - d]), prod[n]) for n, t in enumerate(idx)]
            d *= 2
        G = [P[0]] + [self._vsub(P[t], P[t - 1]) for t in range(1, k)]
        bits_msb = [R_t[t] for t in reversed(range(k))]
        GR = self._vsplit(self._vmul(self._vconcat(G), self._vconcat(bits_msb)), m)
        U = GR[0]
        for part in GR[1:]:
            U = self._vadd(U, part)
        # z mod 2^k = c_low - r_low + 2^k * u
        Zmod = self._vaffine(self._vsub(self._vscale(U, two_k), r_low), [1] * m, c_low)
        top = self._vscale(self._vsub(Z, Zmod), inverse(two_k, p))
        return self._vaffine(top, [-1] * m, [1] * m)

    def less_than_many(self, pairs: Sequence[tuple[Value, Value]], bits: int | None = None) -> list[SharedValue]:
        if not pairs:
            return []
        A = self._gather([a for a, _ in pairs])
        B = self._gather([b for _, b in pairs])
        return self._scatter(self._vlt(A, B, bits))

    def less_than(self, a: Value, b: Value, bits: int | None = None) -> SharedValue:
        return self.less_than_many([(a, b)], bits)[0]

    def lt_open_many(self, pairs: Sequence[tuple[Value, Value]], source: str = "branch") -> list[bool]:
        """Comparison outcomes opened to steer a branch."""
        if not pairs:
            return []
        A = self._gather([a for a, _ in pairs])
        B = self._gather([b for _, b in pairs])
        bits = [b == 1 for b in self._vopen(self._vlt(A, B), "bit")]
        self.log.append(EventKind.BRANCH, source, bits)
        return bits

    def lt_zero_open(self, row: Sequence[Value], source: str = "branch") -> list[bool]:
        """Opened ``x < 0`` for every entry of a vector."""
        if not len(row):
            return []
        X = self._gather(row)
        bits = [b == 1 for b in self._vopen(self._vlt(X, self._vconst([0] * len(X[0]))), "bit")]
        self.log.append(EventKind.BRANCH, source, bits)
        return bits

    def _tournament(self, vectors: Sequence[Sequence[Value]], track_index: bool):
        """Pairwise knockout for the minimum of each vector, all vectors in lockstep.

        On ties the left (lower-index) entry wins. Each level is one batched
        comparison plus one batched multiplexer round.
        """
        cur = [[(v, i) for i, v in enumerate(vec)] for vec in vectors]
        for vec in vectors:
            if not vec:
                raise ValueError("minimum of an empty vector")
            self.cost.min_finds += 1
        while any(len(c) > 1 for c in cur):
            lefts, rights, where = [], [], []
            nxt: list[list] = []
            for a, c in enumerate(cur):
                row = []
                for b in range(0, len(c) - 1, 2):
                    where.append((a, len(row)))
                    lefts.append(c[b])
                    rights.append(c[b + 1])
                    row.append(None)
                if len(c) % 2:
                    row.append(c[-1])
                nxt.append(row)
            A = self._gather([r[0] for r in rights])
            B = self._gather([l[0] for l in lefts])
            take = self._vlt(A, B)
            m = len(lefts)
            diffs = [self._vsub(A, B)]
            sel = [take]
            if track_index:
                diffs.append(self._vsub(self._gather([r[1] for r in rights]), self._gather([l[1] for l in lefts])))
                sel.append(take)
            muxed = self._vsplit(self._vmul(self._vconcat(sel), self._vconcat(diffs)), m)
            vals = self._scatter(self._vadd(B, muxed[0]))
            if track_index:
                idxs = self._scatter(self._vadd(self._gather([l[1] for l in lefts]), muxed[1]))
            else:
                idxs = [None] * m
            for (a, pos), v, ix in zip(where, vals, idxs):
                nxt[a][pos] = (v, ix)
            cur = nxt
        return [c[0] for c in cur]

    def min_many(self, vectors: Sequence[Sequence[Value]]) -> list[Value]:
        return [v for v, _ in self._tournament(vectors, track_index=False)]

    def argmin_secret_many(self, vectors: Sequence[Sequence[Value]]) -> list[tuple[Value, Value]]:
        """Minimum and its index, both left shared."""
        return [(ix, v) for v, ix in self._tournament(vectors, track_index=True)]

    def argmin_many(self, vectors: Sequence[Sequence[Value]], source: str = "argmin") -> list[tuple[int, Value]]:
        """Minimum of each vector with its (opened) lowest index."""
        res = self._tournament(vectors, track_index=True)
        secret = [ix for _, ix in res if isinstance(ix, SharedValue)]
        opened = iter(self._vopen(self._gather(secret), "index") if secret else [])
        out = []
        for v, ix in res:
            j = next(opened) if isinstance(ix, SharedValue) else int(ix)
            out.append((j, v))
        self.log.append(EventKind.ARGMIN, source, [j for j, _ in out])
        return out

    def inverse_many(self, xs: Sequence[Value]) -> list[Value]:
        """Field inverses of non-zero shared values (mask, open, invert)."""
        X = self._gather(xs)
        R = self._vrandom(len(xs), "nonzero")
        opened = self._vopen(self._vmul(X, R), "mask")
        p = self.p
        inv = tuple([(r * inverse(c, p)) % p for r, c in zip(R[k], opened)] for k in range(self.slots))
        return self._scatter(inv)
