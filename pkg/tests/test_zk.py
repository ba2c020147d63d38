import numpy as np
import pytest
from scipy.stats import chi2, chisquare

from lsap_mpc.certificate import OptimalityCertificate, extract_certificate
from lsap_mpc.model import Assignment, DualSolution, Sense, WeightMatrix
from lsap_mpc.solvers import solve, solve_hungarian
from lsap_mpc.zk import (
    L,
    Blindings,
    MalformedProof,
    Point,
    ProofError,
    WidthOverflow,
    commit_instance,
    dumps_proof,
    loads_proof,
    manifest,
    proof_size,
    prove_optimality,
    prove_range,
    setup,
    slack_commitments,
    verify_optimality,
    verify_range,
)
from lsap_mpc.zk.group import MAX_GENERATORS, InvalidEncoding, multiexp, random_scalar, scalar_from_bytes
from lsap_mpc.zk.optimality import next_pow2
from lsap_mpc.zk.transcript import Transcript

from conftest import rand_matrix

EX = WeightMatrix([[1, 2], [2, 4]])
EX_DUAL = DualSolution((0, 1), (1, 2))


def ex_cert():
    return OptimalityCertificate(Assignment.from_pairs(EX, [(0, 1), (1, 0)]), 4, EX_DUAL, EX)


def prove(ctx, cert, width=16, check=True, commitments=None, blinds=None):
    blinds = blinds or Blindings.fresh(cert.n)
    if commitments is None:
        commitments, _ = commit_instance(ctx, cert.weights, cert.dual, blinds, width)
    return commitments, prove_optimality(ctx, cert, blinds, width, commitments=commitments, check=check)


# -- group ----------------------------------------------------------------------


def test_identity_arithmetic(zk_ctx):
    G, O = zk_ctx.G, Point.identity()
    assert (G + O) == G and (G - G).is_identity and (G * 0).is_identity and (O * 5).is_identity
    assert G * L == O and G * (L + 3) == G * 3 and -G + G == O
    assert multiexp([2, 3], [G, G]) == G * 5


def test_encoding(zk_ctx):
    G = zk_ctx.G
    assert Point.from_bytes(G.to_bytes()) == G and Point.from_bytes(bytes(32)).is_identity
    with pytest.raises(InvalidEncoding):
        Point.from_bytes(b"\xff" * 32)
    with pytest.raises(InvalidEncoding):
        Point.from_bytes(b"\x00" * 31)
    with pytest.raises(InvalidEncoding):
        scalar_from_bytes(L.to_bytes(32, "little"))


def test_setup_is_deterministic():
    a, b = setup("label-a"), setup("label-a")
    c = setup("label-b")
    assert a.G == b.G and a.gvec(8) == b.gvec(8)
    assert a.gvec(8) != c.gvec(8) and a.H != c.H
    gens = [a.G, a.H, a.U, *a.gvec(16), *a.hvec(16)]
    assert len(set(gens)) == len(gens)


def test_generator_capacity(zk_ctx):
    assert MAX_GENERATORS >= next_pow2(128 * 128) * 16
    with pytest.raises(ValueError):
        zk_ctx.gvec(MAX_GENERATORS + 1)


def test_transcript_is_order_sensitive():
    a, b = Transcript("d"), Transcript("d")
    a.append_int("x", 1)
    a.append_int("y", 2)
    b.append_int("y", 2)
    b.append_int("x", 1)
    assert a.challenge("c") != b.challenge("c")
    c, d = Transcript("d"), Transcript("e")
    assert c.challenge("c") != d.challenge("c")


# -- range proofs ---------------------------------------------------------------


def test_range_proof_accepts_and_rejects(zk_ctx):
    vals = [0, 1, 2**16 - 1, 12345]
    bl = [random_scalar() for _ in vals]
    V = [zk_ctx.G * v + zk_ctx.H * r for v, r in zip(vals, bl)]
    rp = prove_range(zk_ctx, vals, bl, 16, Transcript("t"))
    assert rp.group_elements == 2 * 6 + 4 and len(rp.scalars()) == 5
    assert verify_range(zk_ctx, V, 16, rp, Transcript("t"))
    assert not verify_range(zk_ctx, V, 16, rp, Transcript("other"))
    assert not verify_range(zk_ctx, V[::-1], 16, rp, Transcript("t"))


def test_range_proof_out_of_range(zk_ctx):
    vals, bl = [2**16, 3], [random_scalar(), random_scalar()]
    with pytest.raises(WidthOverflow):
        prove_range(zk_ctx, vals, bl, 16, Transcript("t"))
    V = [zk_ctx.G * v + zk_ctx.H * r for v, r in zip(vals, bl)]
    rp = prove_range(zk_ctx, vals, bl, 16, Transcript("t"), strict=False)
    assert not verify_range(zk_ctx, V, 16, rp, Transcript("t"))
    neg = [(-1) % L, 0]
    rp = prove_range(zk_ctx, [-1, 0], bl, 16, Transcript("t"), strict=False)
    assert not verify_range(zk_ctx, [zk_ctx.G * neg[0] + zk_ctx.H * bl[0], zk_ctx.H * bl[1]], 16, rp, Transcript("t"))


def test_range_proof_shapes(zk_ctx):
    with pytest.raises(ValueError):
        prove_range(zk_ctx, [1, 2, 3], [1, 2, 3], 16, Transcript("t"))
    rp = prove_range(zk_ctx, [1, 2], [5, 6], 16, Transcript("t"))
    V = [zk_ctx.G * 1 + zk_ctx.H * 5, zk_ctx.G * 2 + zk_ctx.H * 6]
    with pytest.raises(MalformedProof):
        verify_range(zk_ctx, V + V, 16, rp, Transcript("t"))
    with pytest.raises(MalformedProof):
        verify_range(zk_ctx, V, 12, rp, Transcript("t"))


# -- commitments ------------------------------------------------------------------


def test_commitment_counts(zk_ctx):
    for n in (2, 10):
        W = rand_matrix(n, n)
        cs, _ = commit_instance(zk_ctx, W, DualSolution([0] * n, [0] * n))
        assert len(cs) == len(cs.all()) == n * n + 2 * n


def test_homomorphic_sum(zk_ctx):
    W = rand_matrix(4, 3)
    res = solve_hungarian(W)
    cs, bl = commit_instance(zk_ctx, W, res.dual)
    total = Point.identity()
    r = 0
    for i, j in res.assignment.pairs:
        total = total + cs.w(i, j)
        r += bl.weights[i * 4 + j]
    assert total == zk_ctx.G * res.cost + zk_ctx.H * (r % L)


def test_commit_errors(zk_ctx):
    with pytest.raises(ProofError):
        commit_instance(zk_ctx, WeightMatrix([[1, 2, 3]]), DualSolution([0], [0, 0, 0]))
    with pytest.raises(WidthOverflow):
        commit_instance(zk_ctx, WeightMatrix([[300]]), DualSolution([0], [0]), width=8)


# -- optimality proofs ------------------------------------------------------------


def test_example_proof(zk_ctx):
    cert = ex_cert()
    cs, proof = prove(zk_ctx, cert)
    slack = [[EX.w[i][j] - EX_DUAL.u[i] - EX_DUAL.v[j] for j in range(2)] for i in range(2)]
    assert slack == [[0, 0], [0, 1]]
    assert verify_optimality(zk_ctx, cs, cert.assignment, 4, proof)


@pytest.mark.parametrize("seed", range(6))
def test_completeness(zk_ctx, seed):
    n = 2 + seed
    W = rand_matrix(n, seed, hi=2**15)
    cert = extract_certificate(W, solve(W, "sap_acm"))
    cs, proof = prove(zk_ctx, cert)
    assert verify_optimality(zk_ctx, cs, cert.assignment, cert.optimum, proof)


def test_maximization_proof(zk_ctx):
    W = rand_matrix(3, 1, sense=Sense.MAXIMIZE)
    cert = extract_certificate(W, solve(W))
    cs, proof = prove(zk_ctx, cert)
    assert verify_optimality(zk_ctx, cs, cert.assignment, cert.optimum, proof)


def test_claimed_optimum_plus_one(zk_ctx):
    cert = ex_cert()
    cs, proof = prove(zk_ctx, cert)
    v = verify_optimality(zk_ctx, cs, cert.assignment, 5, proof)
    assert not v and v.condition is None
    lie = OptimalityCertificate(cert.assignment, 5, cert.dual, EX)
    cs2, bad = prove(zk_ctx, lie, check=False)
    v = verify_optimality(zk_ctx, cs2, cert.assignment, 5, bad)
    assert not v and v.condition == 3


def test_dual_bumped_after_commit(zk_ctx):
    cert = ex_cert()
    bl = Blindings.fresh(2)
    cs, _ = commit_instance(zk_ctx, EX, cert.dual, bl)
    bumped = OptimalityCertificate(cert.assignment, 4, DualSolution((1, 1), (1, 2)), EX)
    _, proof = prove(zk_ctx, bumped, check=False, commitments=cs, blinds=bl)
    assert not verify_optimality(zk_ctx, cs, cert.assignment, 4, proof)


def test_non_permutation_is_condition_2(zk_ctx):
    cert = ex_cert()
    cs, proof = prove(zk_ctx, cert)
    object.__setattr__(proof, "assignment", ((0, 1), (1, 1)))
    v = verify_optimality(zk_ctx, cs, [(0, 1), (1, 1)], 4, proof)
    assert v.condition == 2


def test_suboptimal_assignment_cannot_be_proved(zk_ctx):
    W = EX
    cert = OptimalityCertificate(Assignment.from_pairs(W, [(0, 0), (1, 1)]), 5, DualSolution((1, 2), (0, 2)), W)
    with pytest.raises(ProofError):
        prove(zk_ctx, cert)
    cs, proof = prove(zk_ctx, cert, check=False)
    assert not verify_optimality(zk_ctx, cs, cert.assignment, 5, proof)


def test_slack_width_overflow(zk_ctx):
    W = WeightMatrix([[0, 2**15 - 1], [2**15 - 1, 0]])
    cert = extract_certificate(W, solve_hungarian(W))
    with pytest.raises(WidthOverflow):
        prove(zk_ctx, cert, width=8)


def test_wrong_label_rejects(zk_ctx):
    cert = ex_cert()
    cs, proof = prove(zk_ctx, cert)
    assert not verify_optimality(setup("somewhere else"), cs, cert.assignment, 4, proof)


@pytest.mark.parametrize("n,expect", [(1, (12, 5)), (4, (20, 5)), (5, (22, 5)), (11, (26, 5)), (128, (40, 5))])
def test_proof_size_formula(n, expect):
    assert proof_size(n, 16) == expect


def test_emitted_size_matches_formula(zk_ctx):
    for n in (2, 3, 4):
        W = rand_matrix(n, n)
        cert = extract_certificate(W, solve_hungarian(W))
        _, proof = prove(zk_ctx, cert)
        assert proof.size() == proof_size(n, 16)
        assert proof.opening_scalars == n + 1


def test_serialization_round_trip(zk_ctx):
    cert = extract_certificate(rand_matrix(3, 4), solve_hungarian(rand_matrix(3, 4)))
    cs, proof = prove(zk_ctx, cert)
    blob = dumps_proof(proof, cs)
    p2, cs2 = loads_proof(blob)
    assert dumps_proof(p2, cs2) == blob
    assert cs2.all() == cs.all()
    assert verify_optimality(zk_ctx, cs2, p2.assignment, p2.optimum, p2)
    text = manifest(p2, cs2)
    assert "commitments: 15" in text and "size check: ok" in text


def test_malformed_blobs(zk_ctx):
    cs, proof = prove(zk_ctx, ex_cert())
    blob = dumps_proof(proof, cs)
    for bad in (b"", blob[:-1], blob + b"\x00", b"XXXXXXXX" + blob[8:]):
        with pytest.raises(MalformedProof):
            loads_proof(bad)


def test_bit_flips_never_accept(zk_ctx):
    cs, proof = prove(zk_ctx, ex_cert())
    blob = dumps_proof(proof, cs)
    for pos in range(8, len(blob), 37):
        tampered = bytearray(blob)
        tampered[pos] ^= 0x10
        try:
            p2, cs2 = loads_proof(bytes(tampered))
            ok = verify_optimality(zk_ctx, cs2, p2.assignment, p2.optimum, p2).accepted
        except (MalformedProof, InvalidEncoding):
            ok = False
        assert not ok, pos


def test_blinding_dependent_bytes_look_uniform(zk_ctx):
    def stream(W):
        cert = extract_certificate(W, solve_hungarian(W))
        out = bytearray()
        for _ in range(12):
            _, proof = prove(zk_ctx, cert)
            rp = proof.range_proof
            for P in (rp.A, rp.S, rp.T1, rp.T2):
                out += P.to_bytes()[1:31]
            for k in (rp.tau_x, rp.mu):
                out += k.to_bytes(32, "little")[:31]
        return np.frombuffer(bytes(out), dtype=np.uint8)

    a = stream(WeightMatrix([[1, 2], [2, 4]]))
    b = stream(WeightMatrix([[0, 3], [1, 5]]))
    for s in (a, b):
        assert chisquare(np.bincount(s >> 4, minlength=16)).pvalue > 0.01
    ha, hb = np.bincount(a >> 4, minlength=16), np.bincount(b >> 4, minlength=16)
    table = np.vstack([ha, hb])
    expected = table.sum(0) * table.sum(1)[:, None] / table.sum()
    stat = ((table - expected) ** 2 / expected).sum()
    assert chi2.sf(stat, 15) > 0.01
