"""Aggregated Bulletproofs range proof (original inner-product version).

Proves that each of ``m`` Pedersen commitments ``V_j = v_j*G + gamma_j*H``
opens to a value in ``[0, 2**width)``. The transcript holds
``A, S, T1, T2`` plus ``log2(m*width)`` pairs ``(L_k, R_k)`` and five
scalars ``tau_x, mu, t_hat, a, b``. Verification folds both checks into a
single multi-exponentiation with a random weight.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

from .group import L, GroupContext, Point, inv, multiexp, random_scalar
from .transcript import Transcript


class WidthOverflow(ValueError):
    """A value does not fit the range width."""


class MalformedProof(ValueError):
    """The transcript does not have the expected shape."""


def is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def _ip(a, b) -> int:
    return sum(x * y for x, y in zip(a, b)) % L


def _powers(x: int, n: int) -> list[int]:
    out, acc = [], 1
    for _ in range(n):
        out.append(acc)
        acc = acc * x % L
    return out


@dataclass(frozen=True)
class RangeProof:
    A: Point
    S: Point
    T1: Point
    T2: Point
    L: tuple[Point, ...]
    R: tuple[Point, ...]
    tau_x: int
    mu: int
    t_hat: int
    a: int
    b: int

    SCALARS = 5

    @property
    def group_elements(self) -> int:
        return 4 + len(self.L) + len(self.R)

    def points(self) -> list[Point]:
        return [self.A, self.S, self.T1, self.T2, *self.L, *self.R]

    def scalars(self) -> list[int]:
        return [self.tau_x, self.mu, self.t_hat, self.a, self.b]


def _check_shape(m: int, width: int) -> None:
    if not is_power_of_two(m):
        raise ValueError(f"batch size {m} is not a power of two")
    if not is_power_of_two(width) or width > 64:
        raise ValueError(f"width {width} must be a power of two up to 64")


def prove_range(
    ctx: GroupContext,
    values,
    blindings,
    width: int,
    transcript: Transcript,
    strict: bool = True,
) -> RangeProof:
    """``strict=False`` truncates out-of-range values instead of raising
    (used to exercise the verifier against dishonest provers)."""
    m = len(values)
    _check_shape(m, width)
    N = m * width
    for v in values:
        if not 0 <= v < (1 << width):
            if strict:
                raise WidthOverflow(f"value {v} is outside [0, 2^{width})")
    Gs, Hs = ctx.gvec(N), ctx.hvec(N)
    G, H = ctx.G, ctx.H
    V = [G * v + H * g for v, g in zip(values, blindings)]
    transcript.append_int("m", m)
    transcript.append_int("width", width)
    transcript.append_points("V", V)

    aL = [((v % (1 << width)) >> i) & 1 for v in values for i in range(width)]
    aR = [(x - 1) % L for x in aL]
    alpha = random_scalar()
    A = H * alpha
    for i, bit in enumerate(aL):
        A = A + Gs[i] if bit else A - Hs[i]
    sL = [random_scalar() for _ in range(N)]
    sR = [random_scalar() for _ in range(N)]
    rho = random_scalar()
    S = H * rho + multiexp(sL, Gs) + multiexp(sR, Hs)
    transcript.append_point("A", A)
    transcript.append_point("S", S)
    y = transcript.challenge("y")
    z = transcript.challenge("z")

    yN = _powers(y, N)
    two = _powers(2, width)
    zj = [pow(z, 2 + j, L) for j in range(m)]
    wv = [zj[i // width] * two[i % width] % L for i in range(N)]
    l0 = [(x - z) % L for x in aL]
    l1 = sL
    r0 = [(yN[i] * (aR[i] + z) + wv[i]) % L for i in range(N)]
    r1 = [yN[i] * sR[i] % L for i in range(N)]
    t1 = (_ip(l0, r1) + _ip(l1, r0)) % L
    t2 = _ip(l1, r1)
    tau1, tau2 = random_scalar(), random_scalar()
    T1 = G * t1 + H * tau1
    T2 = G * t2 + H * tau2
    transcript.append_point("T1", T1)
    transcript.append_point("T2", T2)
    x = transcript.challenge("x")

    tau_x = (tau2 * x * x + tau1 * x + sum(z_ * g for z_, g in zip(zj, blindings))) % L
    mu = (alpha + rho * x) % L
    lv = [(a + b * x) % L for a, b in zip(l0, l1)]
    rv = [(a + b * x) % L for a, b in zip(r0, r1)]
    t_hat = _ip(lv, rv)
    transcript.append_scalar("tau_x", tau_x)
    transcript.append_scalar("mu", mu)
    transcript.append_scalar("t_hat", t_hat)
    Q = ctx.U * transcript.challenge("w")

    yinv = inv(y)
    Hp = [h * yi for h, yi in zip(Hs, _powers(yinv, N))]
    Gv = list(Gs)
    a, b = lv, rv
    Ls, Rs = [], []
    while len(a) > 1:
        h = len(a) // 2
        a_lo, a_hi, b_lo, b_hi = a[:h], a[h:], b[:h], b[h:]
        G_lo, G_hi, H_lo, H_hi = Gv[:h], Gv[h:], Hp[:h], Hp[h:]
        Lk = multiexp(a_lo, G_hi) + multiexp(b_hi, H_lo) + Q * _ip(a_lo, b_hi)
        Rk = multiexp(a_hi, G_lo) + multiexp(b_lo, H_hi) + Q * _ip(a_hi, b_lo)
        transcript.append_point("L", Lk)
        transcript.append_point("R", Rk)
        xk = transcript.challenge("u")
        xki = inv(xk)
        Ls.append(Lk)
        Rs.append(Rk)
        a = [(p * xk + q * xki) % L for p, q in zip(a_lo, a_hi)]
        b = [(p * xki + q * xk) % L for p, q in zip(b_lo, b_hi)]
        if h > 1:
            Gv = [p * xki + q * xk for p, q in zip(G_lo, G_hi)]
            Hp = [p * xk + q * xki for p, q in zip(H_lo, H_hi)]
    return RangeProof(A, S, T1, T2, tuple(Ls), tuple(Rs), tau_x, mu, t_hat, a[0], b[0])


def verify_range(ctx: GroupContext, V, width: int, proof: RangeProof, transcript: Transcript) -> bool:
    """Check ``proof`` for commitments ``V``; raises :class:`MalformedProof` on shape errors."""
    m = len(V)
    try:
        _check_shape(m, width)
    except ValueError as exc:
        raise MalformedProof(str(exc)) from exc
    N = m * width
    rounds = N.bit_length() - 1
    if len(proof.L) != rounds or len(proof.R) != rounds:
        raise MalformedProof(f"expected {rounds} inner-product rounds, got {len(proof.L)}/{len(proof.R)}")
    for k in proof.scalars():
        if not 0 <= k < L:
            raise MalformedProof("scalar out of range")

    transcript.append_int("m", m)
    transcript.append_int("width", width)
    transcript.append_points("V", V)
    transcript.append_point("A", proof.A)
    transcript.append_point("S", proof.S)
    y = transcript.challenge("y")
    z = transcript.challenge("z")
    transcript.append_point("T1", proof.T1)
    transcript.append_point("T2", proof.T2)
    x = transcript.challenge("x")
    transcript.append_scalar("tau_x", proof.tau_x)
    transcript.append_scalar("mu", proof.mu)
    transcript.append_scalar("t_hat", proof.t_hat)
    w = transcript.challenge("w")
    xs = []
    for Lk, Rk in zip(proof.L, proof.R):
        transcript.append_point("L", Lk)
        transcript.append_point("R", Rk)
        xs.append(transcript.challenge("u"))

    s = [1]
    for xk in reversed(xs):
        xki = inv(xk)
        s = [v * xki % L for v in s] + [v * xk % L for v in s]
    yN = _powers(y, N)
    yinvN = _powers(inv(y), N)
    two = _powers(2, width)
    zj = [pow(z, 2 + j, L) for j in range(m)]
    delta = ((z - z * z) * sum(yN) - sum(zz * z for zz in zj) * ((1 << width) - 1)) % L
    a, b, t_hat = proof.a, proof.b, proof.t_hat
    c = secrets.randbelow(L - 1) + 1

    scalars = [
        c * (t_hat - delta),
        c * proof.tau_x - proof.mu,
        w * (t_hat - a * b),
        1,
        x,
        -c * x,
        -c * x * x,
    ]
    points = [ctx.G, ctx.H, ctx.U, proof.A, proof.S, proof.T1, proof.T2]
    scalars += [-c * zz for zz in zj]
    points += list(V)
    sinv = [inv(v) for v in s]
    scalars += [-z - a * s[i] for i in range(N)]
    points += ctx.gvec(N)
    scalars += [
        z + yinvN[i] * (zj[i // width] * two[i % width] - b * sinv[i]) for i in range(N)
    ]
    points += ctx.hvec(N)
    for xk, Lk, Rk in zip(xs, proof.L, proof.R):
        scalars += [xk * xk, inv(xk * xk)]
        points += [Lk, Rk]
    return multiexp(scalars, points).is_identity
