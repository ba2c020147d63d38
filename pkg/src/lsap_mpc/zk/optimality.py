"""Publicly verifiable optimality proofs over committed weights and duals.

The prover publishes Pedersen commitments to every weight and dual value
(``n**2 + 2n`` of them, row-major weights, then ``u``, then ``v``) and a
:class:`FeasibilityProof` showing, without opening them, that

* ``sum(u) + sum(v)`` equals the public optimum (the aggregate blinding is
  opened),
* every slack ``w_ij - u_i - v_j`` lies in ``[0, 2**width)`` (one
  aggregated range proof over slack commitments the verifier derives
  homomorphically), and
* every assigned cell has zero slack (its derived commitment's blinding is
  opened).

Together with the cleartext check that the assignment is a permutation this
yields all four optimality conditions. Batches are padded to a power of two
with identity commitments, which the verifier reproduces without help.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..certificate import OptimalityCertificate, verify_certificate_clear
from ..model import Sense, WeightMatrix, DualSolution
from .group import (
    L,
    POINT_BYTES,
    SCALAR_BYTES,
    GroupContext,
    InvalidEncoding,
    Point,
    random_scalar,
    scalar_bytes,
    scalar_from_bytes,
)
from .rangeproof import MalformedProof, RangeProof, WidthOverflow, is_power_of_two, prove_range, verify_range
from .transcript import Transcript

DEFAULT_WIDTH = 16
DOMAIN = "lsap-zk/optimality/v1"
MAGIC = b"LSAPZKP1"


class ProofError(ValueError):
    pass


def next_pow2(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


def proof_size(n: int, width: int = DEFAULT_WIDTH) -> tuple[int, int]:
    """Group elements and scalars of the range-proof transcript for side ``n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not is_power_of_two(width):
        raise ValueError("width must be a power of two")
    u = next_pow2(n * n)
    return 2 * ((u.bit_length() - 1) + (width.bit_length() - 1)) + 4, RangeProof.SCALARS


@dataclass(frozen=True)
class CommitmentSet:
    n: int
    weights: tuple[Point, ...]
    u: tuple[Point, ...]
    v: tuple[Point, ...]

    def __post_init__(self) -> None:
        n = self.n
        if len(self.weights) != n * n or len(self.u) != n or len(self.v) != n:
            raise ProofError("commitment set has the wrong shape")

    def __len__(self) -> int:
        return len(self.weights) + len(self.u) + len(self.v)

    def all(self) -> list[Point]:
        return [*self.weights, *self.u, *self.v]

    def w(self, i: int, j: int) -> Point:
        return self.weights[i * self.n + j]

    def replace(self, index: int, P: Point) -> "CommitmentSet":
        pts = self.all()
        pts[index] = P
        return _from_flat(self.n, pts)


def _from_flat(n: int, pts) -> CommitmentSet:
    nn = n * n
    return CommitmentSet(n, tuple(pts[:nn]), tuple(pts[nn:nn + n]), tuple(pts[nn + n:]))


@dataclass(frozen=True)
class Blindings:
    weights: tuple[int, ...]
    u: tuple[int, ...]
    v: tuple[int, ...]

    @classmethod
    def fresh(cls, n: int) -> "Blindings":
        return cls(
            tuple(random_scalar() for _ in range(n * n)),
            tuple(random_scalar() for _ in range(n)),
            tuple(random_scalar() for _ in range(n)),
        )


def witness_values(W: WeightMatrix, dual: DualSolution) -> list[int]:
    """Committed values in canonical order."""
    return [x for row in W.w for x in row] + list(dual.u) + list(dual.v)


def commit_instance(ctx: GroupContext, W: WeightMatrix, dual: DualSolution, blinds: Blindings | None = None,
                    width: int = DEFAULT_WIDTH) -> tuple[CommitmentSet, Blindings]:
    if not W.is_square:
        raise ProofError("commitments are defined for square instances")
    n = W.rows
    if len(dual.u) != n or len(dual.v) != n:
        raise ProofError("dual does not match the matrix")
    bound = 1 << width
    for row in W.w:
        for x in row:
            if not -bound < x < bound:
                raise WidthOverflow(f"weight {x} exceeds the {width}-bit width")
    blinds = blinds or Blindings.fresh(n)
    G, H = ctx.G, ctx.H
    vals = witness_values(W, dual)
    rs = [*blinds.weights, *blinds.u, *blinds.v]
    return _from_flat(n, [G * x + H * r for x, r in zip(vals, rs)]), blinds


def slack_commitments(cs: CommitmentSet, sense: Sense) -> list[Point]:
    n = cs.n
    out = []
    for i in range(n):
        for j in range(n):
            d = cs.w(i, j) - cs.u[i] - cs.v[j]
            out.append(d if sense is Sense.MINIMIZE else -d)
    return out


@dataclass(frozen=True)
class FeasibilityProof:
    n: int
    width: int
    sense: Sense
    optimum: int
    assignment: tuple[tuple[int, int], ...]
    range_proof: RangeProof
    sum_blinding: int
    tight_blindings: tuple[int, ...]

    @property
    def group_elements(self) -> int:
        return self.range_proof.group_elements

    @property
    def scalars(self) -> int:
        return RangeProof.SCALARS

    @property
    def opening_scalars(self) -> int:
        return 1 + len(self.tight_blindings)

    def size(self) -> tuple[int, int]:
        return self.group_elements, self.scalars


def _transcript(ctx: GroupContext, cs: CommitmentSet, n: int, width: int, sense: Sense, optimum: int, pairs) -> Transcript:
    t = Transcript(DOMAIN)
    t.append_bytes("label", ctx.label.encode())
    t.append_int("n", n)
    t.append_int("width", width)
    t.append_bytes("sense", sense.value.encode())
    t.append_int("optimum", optimum)
    t.append_bytes("assignment", ",".join(f"{i}:{j}" for i, j in pairs).encode())
    t.append_points("commitments", cs.all())
    return t


def prove_optimality(
    ctx: GroupContext,
    cert: OptimalityCertificate,
    blinds: Blindings,
    width: int = DEFAULT_WIDTH,
    commitments: CommitmentSet | None = None,
    check: bool = True,
) -> FeasibilityProof:
    """Prove that ``cert`` is optimal relative to its commitments.

    ``check=False`` skips the cleartext pre-check and truncates slacks that do
    not fit the width, so tests can play a dishonest prover.
    """
    W, dual = cert.weights, cert.dual
    if not W.is_square:
        raise ProofError("proofs are defined for square instances")
    if check:
        verdict = verify_certificate_clear(cert)
        if not verdict:
            raise ProofError(f"certificate is not valid: {verdict}")
    n = W.rows
    if commitments is None:
        commitments, _ = commit_instance(ctx, W, dual, blinds, width)
    pairs = tuple(cert.assignment.pairs)
    sign = 1 if W.sense is Sense.MINIMIZE else -1
    rw, ru, rv = blinds.weights, blinds.u, blinds.v
    slack = [sign * (W.w[i][j] - dual.u[i] - dual.v[j]) for i in range(n) for j in range(n)]
    gam = [sign * (rw[i * n + j] - ru[i] - rv[j]) % L for i in range(n) for j in range(n)]
    m = next_pow2(n * n)
    slack += [0] * (m - n * n)
    gam += [0] * (m - n * n)

    t = _transcript(ctx, commitments, n, width, W.sense, cert.optimum, pairs)
    rp = prove_range(ctx, slack, gam, width, t, strict=check)
    sum_blinding = (sum(ru) + sum(rv)) % L
    tight = tuple(gam[i * n + j] for i, j in pairs)
    return FeasibilityProof(n, width, W.sense, cert.optimum, pairs, rp, sum_blinding, tight)


@dataclass(frozen=True)
class ZkVerdict:
    accepted: bool
    condition: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        return "accept" if self.accepted else f"reject: condition {self.condition}: {self.reason}"


def verify_optimality(
    ctx: GroupContext,
    commitments: CommitmentSet,
    assignment,
    optimum: int,
    proof: FeasibilityProof,
) -> ZkVerdict:
    """Accept iff the committed instance has ``assignment`` as an optimal
    solution of value ``optimum``.

    Raises :class:`MalformedProof` when the proof does not even have the
    right shape; a well-formed proof of a false statement yields a rejecting
    verdict.
    """
    n = commitments.n
    if proof.n != n:
        raise MalformedProof(f"proof is for n={proof.n}, commitments for n={n}")
    if not is_power_of_two(proof.width) or proof.width > 64:
        raise MalformedProof(f"invalid width {proof.width}")
    pairs = tuple(sorted((int(i), int(j)) for i, j in getattr(assignment, "pairs", assignment)))
    if len(proof.tight_blindings) != len(proof.assignment):
        raise MalformedProof("one tight-edge opening per assigned cell is required")
    if not 0 <= proof.sum_blinding < L or any(not 0 <= x < L for x in proof.tight_blindings):
        raise MalformedProof("opening scalar out of range")

    if pairs != tuple(proof.assignment) or optimum != proof.optimum:
        return ZkVerdict(False, None, "proof was made for different public inputs")
    rows = [i for i, _ in pairs]
    cols = [j for _, j in pairs]
    if (
        len(pairs) != n
        or sorted(rows) != list(range(n))
        or sorted(cols) != list(range(n))
    ):
        return ZkVerdict(False, 2, "assignment is not a permutation")

    G, H = ctx.G, ctx.H
    total = Point.identity()
    for P in (*commitments.u, *commitments.v):
        total = total + P
    if total - G * optimum != H * proof.sum_blinding:
        return ZkVerdict(False, 3, "sum of dual commitments does not open to the optimum")

    V = slack_commitments(commitments, proof.sense)
    for (i, j), r in zip(pairs, proof.tight_blindings):
        if V[i * n + j] != H * r:
            return ZkVerdict(False, 1, f"assigned cell ({i},{j}) does not have zero slack")

    m = next_pow2(n * n)
    V += [Point.identity()] * (m - n * n)
    t = _transcript(ctx, commitments, n, proof.width, proof.sense, optimum, pairs)
    if not verify_range(ctx, V, proof.width, proof.range_proof, t):
        return ZkVerdict(False, 4, "slack range proof does not verify")
    return ZkVerdict(True)


# -- serialization ------------------------------------------------------------


def _section(body: bytes) -> bytes:
    return struct.pack(">I", len(body)) + body


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise MalformedProof("truncated proof")
        out = self.data[self.pos:self.pos + k]
        self.pos += k
        return out

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def point(self) -> Point:
        return Point.from_bytes(self.take(POINT_BYTES))

    def scalar(self) -> int:
        return scalar_from_bytes(self.take(SCALAR_BYTES))

    def section(self) -> "_Reader":
        return _Reader(self.take(self.u32()))

    def done(self) -> None:
        if self.pos != len(self.data):
            raise MalformedProof("trailing bytes")


def dumps_proof(proof: FeasibilityProof, commitments: CommitmentSet) -> bytes:
    """Binary encoding: magic, then commitments | public inputs | transcript."""
    com = struct.pack(">I", len(commitments)) + b"".join(P.to_bytes() for P in commitments.all())
    pub = struct.pack(">IIBq", proof.n, proof.width, proof.sense is Sense.MAXIMIZE, proof.optimum)
    pub += struct.pack(">I", len(proof.assignment))
    pub += b"".join(struct.pack(">II", i, j) for i, j in proof.assignment)
    rp = proof.range_proof
    tr = b"".join(P.to_bytes() for P in (rp.A, rp.S, rp.T1, rp.T2))
    tr += struct.pack(">I", len(rp.L))
    tr += b"".join(P.to_bytes() for P in (*rp.L, *rp.R))
    tr += b"".join(scalar_bytes(k) for k in rp.scalars())
    tr += scalar_bytes(proof.sum_blinding)
    tr += struct.pack(">I", len(proof.tight_blindings))
    tr += b"".join(scalar_bytes(k) for k in proof.tight_blindings)
    return MAGIC + _section(com) + _section(pub) + _section(tr)


def loads_proof(data: bytes) -> tuple[FeasibilityProof, CommitmentSet]:
    try:
        r = _Reader(bytes(data))
        if r.take(len(MAGIC)) != MAGIC:
            raise MalformedProof("not a serialized optimality proof")
        com, pub, tr = r.section(), r.section(), r.section()
        r.done()
        count = com.u32()
        pts = [com.point() for _ in range(count)]
        com.done()
        n, width, is_max, optimum = struct.unpack(">IIBq", pub.take(17))
        if count != n * n + 2 * n:
            raise MalformedProof(f"{count} commitments for n={n}")
        k = pub.u32()
        pairs = tuple(struct.unpack(">II", pub.take(8)) for _ in range(k))
        pub.done()
        A, S, T1, T2 = (tr.point() for _ in range(4))
        rounds = tr.u32()
        if rounds > 64:
            raise MalformedProof("too many inner-product rounds")
        Ls = tuple(tr.point() for _ in range(rounds))
        Rs = tuple(tr.point() for _ in range(rounds))
        sc = [tr.scalar() for _ in range(RangeProof.SCALARS)]
        sum_blinding = tr.scalar()
        nt = tr.u32()
        if nt > n:
            raise MalformedProof("too many tight-edge openings")
        tight = tuple(tr.scalar() for _ in range(nt))
        tr.done()
    except (InvalidEncoding, struct.error) as exc:
        raise MalformedProof(str(exc)) from exc
    rp = RangeProof(A, S, T1, T2, Ls, Rs, *sc)
    sense = Sense.MAXIMIZE if is_max else Sense.MINIMIZE
    proof = FeasibilityProof(n, width, sense, optimum, pairs, rp, sum_blinding, tight)
    return proof, _from_flat(n, pts)


def manifest(proof: FeasibilityProof, commitments: CommitmentSet) -> str:
    g, s = proof_size(proof.n, proof.width)
    u = next_pow2(proof.n * proof.n)
    ok = (proof.group_elements, proof.scalars) == (g, s)
    lines = [
        f"n: {proof.n}",
        f"width: {proof.width}",
        f"commitments: {len(commitments)} (n^2 + 2n = {proof.n ** 2 + 2 * proof.n})",
        f"batched ranges: {u}",
        f"group elements: {proof.group_elements}",
        f"scalars: {proof.scalars}",
        f"opening scalars: {proof.opening_scalars}",
        f"size formula: 2*(log2 {u} + log2 {proof.width}) + 4 = {g}",
        f"size check: {'ok' if ok else 'MISMATCH'}",
    ]
    return "\n".join(lines) + "\n"
