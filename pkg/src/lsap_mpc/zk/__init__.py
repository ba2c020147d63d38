"""Commitments and zero-knowledge optimality proofs over ristretto255."""

from .group import DEFAULT_LABEL, L, GroupContext, Point, setup
from .optimality import (
    DEFAULT_WIDTH,
    Blindings,
    CommitmentSet,
    FeasibilityProof,
    ProofError,
    ZkVerdict,
    commit_instance,
    dumps_proof,
    loads_proof,
    manifest,
    proof_size,
    prove_optimality,
    slack_commitments,
    verify_optimality,
)
from .rangeproof import MalformedProof, RangeProof, WidthOverflow, prove_range, verify_range

__all__ = [
    "DEFAULT_LABEL",
    "DEFAULT_WIDTH",
    "Blindings",
    "CommitmentSet",
    "FeasibilityProof",
    "GroupContext",
    "L",
    "MalformedProof",
    "Point",
    "ProofError",
    "RangeProof",
    "WidthOverflow",
    "ZkVerdict",
    "commit_instance",
    "dumps_proof",
    "loads_proof",
    "manifest",
    "proof_size",
    "prove_optimality",
    "prove_range",
    "setup",
    "slack_commitments",
    "verify_optimality",
    "verify_range",
]
