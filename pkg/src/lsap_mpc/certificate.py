"""LP-duality optimality certificates and their cleartext verification.

A certificate bundles the public part (assignment and optimum) with the
private witness (weights and dual potentials). It is accepted iff

1. the optimum equals the weight of the assigned cells,
2. the assignment is row/column disjoint and complete,
3. ``sum(u) + sum(v)`` equals the optimum, and
4. every cell satisfies ``u_i + v_j <= w_ij`` (``>=`` when maximizing).

Verification is a single O(n^2) pass; no solver is re-run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .model import Assignment, DualSolution, Sense, WeightMatrix
from .solvers.common import SolverResult

PUBLIC_FORMAT = "lsap-certificate/public/v1"
WITNESS_FORMAT = "lsap-certificate/witness/v1"

# reporting order of violated conditions
CHECK_ORDER = (2, 3, 4, 1)


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class OptimalityCertificate:
    assignment: Assignment
    optimum: int
    dual: DualSolution
    weights: WeightMatrix

    @property
    def n(self) -> int:
        return self.weights.rows


@dataclass(frozen=True)
class Violation:
    condition: int
    index: tuple | None
    detail: str


@dataclass
class Verdict:
    violations: list[Violation] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accept"
        v = self.first
        return f"reject: condition {v.condition} at {v.index}: {v.detail}"


def _check_dims(cert: OptimalityCertificate) -> None:
    W = cert.weights
    if len(cert.dual.u) != W.rows or len(cert.dual.v) != W.cols:
        raise CertificateError(
            f"dual has {len(cert.dual.u)}x{len(cert.dual.v)} potentials for a {W.rows}x{W.cols} matrix"
        )
    for i, j in cert.assignment.pairs:
        if not (0 <= i < W.rows and 0 <= j < W.cols):
            raise CertificateError(f"assigned cell ({i},{j}) is outside the matrix")


def verify_certificate_clear(cert: OptimalityCertificate) -> Verdict:
    """Check all four conditions; violations are listed in ``CHECK_ORDER``."""
    _check_dims(cert)
    W, dual, pairs = cert.weights, cert.dual, cert.assignment.pairs
    found: dict[int, Violation] = {}

    rows = [i for i, _ in pairs]
    cols = [j for _, j in pairs]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        found[2] = Violation(2, None, "assignment reuses a row or column")
    elif len(pairs) != min(W.rows, W.cols):
        found[2] = Violation(2, None, f"{len(pairs)} pairs, expected {min(W.rows, W.cols)}")

    if dual.total != cert.optimum:
        found[3] = Violation(3, None, f"sum(u)+sum(v) = {dual.total} != optimum {cert.optimum}")

    sign = 1 if W.sense is Sense.MINIMIZE else -1
    for i in range(W.rows):
        if 4 in found:
            break
        for j in range(W.cols):
            if sign * (W.w[i][j] - dual.u[i] - dual.v[j]) < 0:
                found[4] = Violation(4, (i, j), f"u+v = {dual.u[i] + dual.v[j]} vs w = {W.w[i][j]}")
                break
    if 4 not in found:
        side = "v" if W.rows < W.cols else "u"
        for k, x in enumerate(dual.free_side(W)):
            if sign * x > 0:
                found[4] = Violation(4, (side, k), f"{side}[{k}] = {x} has the wrong sign")
                break

    total = W.cost(pairs)
    if total != cert.optimum:
        found[1] = Violation(1, None, f"assigned weight {total} != optimum {cert.optimum}")

    return Verdict([found[c] for c in CHECK_ORDER if c in found])


def extract_certificate(W: WeightMatrix, result: SolverResult) -> OptimalityCertificate:
    """Bundle a solver result; refuses results whose dual does not certify them."""
    cert = OptimalityCertificate(result.assignment, result.assignment.cost, result.dual, W)
    verdict = verify_certificate_clear(cert)
    if not verdict:
        raise CertificateError(f"solver result does not certify optimality ({verdict})")
    return cert


def tight_edge_set(cert: OptimalityCertificate) -> list[tuple[int, int]]:
    """Assigned cells; each must have zero slack."""
    _check_dims(cert)
    W, u, v = cert.weights, cert.dual.u, cert.dual.v
    for i, j in cert.assignment.pairs:
        if W.w[i][j] - u[i] - v[j] != 0:
            raise CertificateError(f"assigned cell ({i},{j}) has slack {W.w[i][j] - u[i] - v[j]}")
    return list(cert.assignment.pairs)


# -- serialization ------------------------------------------------------------


def public_dict(cert: OptimalityCertificate) -> dict:
    W = cert.weights
    return {
        "format": PUBLIC_FORMAT,
        "rows": W.rows,
        "cols": W.cols,
        "sense": W.sense.value,
        "assignment": [list(p) for p in cert.assignment.pairs],
        "optimum": cert.optimum,
    }


def witness_dict(cert: OptimalityCertificate) -> dict:
    d = public_dict(cert)
    d["format"] = WITNESS_FORMAT
    d["bits"] = cert.weights.bits
    d["weights"] = cert.weights.tolist()
    d["dual"] = {"u": list(cert.dual.u), "v": list(cert.dual.v)}
    return d


def _canonical(d: dict) -> str:
    return json.dumps(d, separators=(",", ":"), ensure_ascii=True) + "\n"


def dumps_public(cert: OptimalityCertificate) -> str:
    return _canonical(public_dict(cert))


def dumps_witness(cert: OptimalityCertificate) -> str:
    return _canonical(witness_dict(cert))


def certificate_id(cert: OptimalityCertificate) -> str:
    """SHA-256 of the canonical public encoding."""
    return hashlib.sha256(dumps_public(cert).encode("ascii")).hexdigest()


def load_public(text: str) -> dict:
    d = json.loads(text)
    if d.get("format") != PUBLIC_FORMAT:
        raise CertificateError(f"not a public certificate: {d.get('format')!r}")
    return d


def loads_witness(text: str) -> OptimalityCertificate:
    d = json.loads(text)
    if d.get("format") != WITNESS_FORMAT:
        raise CertificateError(f"not a witness certificate: {d.get('format')!r}")
    try:
        W = WeightMatrix(d["weights"], Sense(d["sense"]), d["bits"])
        if (W.rows, W.cols) != (d["rows"], d["cols"]):
            raise CertificateError("weights do not match the declared shape")
        pairs = tuple(tuple(p) for p in d["assignment"])
        assignment = Assignment(pairs, W.cost(pairs))
        return OptimalityCertificate(assignment, d["optimum"], DualSolution(d["dual"]["u"], d["dual"]["v"]), W)
    except (KeyError, TypeError) as exc:
        raise CertificateError(f"malformed witness certificate: {exc}") from exc
