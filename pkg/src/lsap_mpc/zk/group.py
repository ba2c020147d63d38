"""Prime-order group (ristretto255) with nothing-up-my-sleeve generators."""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field

import pysodium

# order of the ristretto255 group
L = 2**252 + 27742317777372353535851937790883648493
POINT_BYTES = 32
SCALAR_BYTES = 32
_IDENTITY = bytes(32)


class InvalidEncoding(ValueError):
    pass


class Point:
    """Immutable group element; the identity is handled explicitly because
    libsodium refuses it as a scalar-multiplication input or output."""

    __slots__ = ("enc",)

    def __init__(self, enc: bytes):
        self.enc = enc

    @classmethod
    def identity(cls) -> "Point":
        return cls(_IDENTITY)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Point":
        data = bytes(data)
        if len(data) != POINT_BYTES:
            raise InvalidEncoding(f"point encoding must be {POINT_BYTES} bytes")
        if data != _IDENTITY and not pysodium.crypto_core_ristretto255_is_valid_point(data):
            raise InvalidEncoding("not a canonical ristretto255 encoding")
        return cls(data)

    @classmethod
    def hash_to_group(cls, data: bytes) -> "Point":
        return cls(pysodium.crypto_core_ristretto255_from_hash(hashlib.sha512(data).digest()))

    def to_bytes(self) -> bytes:
        return self.enc

    @property
    def is_identity(self) -> bool:
        return self.enc == _IDENTITY

    def __add__(self, other: "Point") -> "Point":
        if self.is_identity:
            return other
        if other.is_identity:
            return self
        return Point(pysodium.crypto_core_ristretto255_add(self.enc, other.enc))

    def __sub__(self, other: "Point") -> "Point":
        if other.is_identity:
            return self
        if self.is_identity:
            return -other
        return Point(pysodium.crypto_core_ristretto255_sub(self.enc, other.enc))

    def __neg__(self) -> "Point":
        if self.is_identity:
            return self
        return Point(pysodium.crypto_core_ristretto255_sub(_IDENTITY, self.enc))

    def __mul__(self, k: int) -> "Point":
        k %= L
        if k == 0 or self.is_identity:
            return Point.identity()
        if k == 1:
            return self
        if k == L - 1:
            return -self
        return Point(pysodium.crypto_scalarmult_ristretto255(k.to_bytes(32, "little"), self.enc))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Point) and self.enc == other.enc

    def __hash__(self) -> int:
        return hash(self.enc)

    def __repr__(self) -> str:
        return f"Point({self.enc[:6].hex()}..)"


def multiexp(scalars, points) -> Point:
    acc = Point.identity()
    for k, P in zip(scalars, points):
        acc = acc + P * k
    return acc


def random_scalar() -> int:
    return secrets.randbelow(L - 1) + 1


def scalar_bytes(k: int) -> bytes:
    return (k % L).to_bytes(SCALAR_BYTES, "little")


def scalar_from_bytes(data: bytes) -> int:
    if len(data) != SCALAR_BYTES:
        raise InvalidEncoding(f"scalar encoding must be {SCALAR_BYTES} bytes")
    k = int.from_bytes(data, "little")
    if k >= L:
        raise InvalidEncoding("scalar is not reduced")
    return k


def inv(k: int) -> int:
    return pow(k, -1, L)


# largest supported side n = 128 at width 16: 16384 ranges of 16 bits
MAX_GENERATORS = 128 * 128 * 16


@dataclass
class GroupContext:
    """Generators derived from a public label by hashing to the group.

    ``G`` carries committed values, ``H`` blindings, ``U`` the inner-product
    term; ``gvec(i)`` / ``hvec(i)`` are the vector generators of the range
    proof, derived on first use and cached.
    """

    label: str
    G: Point = field(init=False)
    H: Point = field(init=False)
    U: Point = field(init=False)
    capacity: int = MAX_GENERATORS
    _g: list = field(default_factory=list, repr=False)
    _h: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        self.G = self._derive(b"G", 0)
        self.H = self._derive(b"H", 0)
        self.U = self._derive(b"U", 0)

    def _derive(self, kind: bytes, index: int) -> Point:
        return Point.hash_to_group(
            b"lsap-zk/generator\0" + self.label.encode() + b"\0" + kind + index.to_bytes(8, "big")
        )

    def _extend(self, n: int) -> None:
        if n > self.capacity:
            raise ValueError(f"{n} generators requested, capacity is {self.capacity}")
        while len(self._g) < n:
            k = len(self._g)
            self._g.append(self._derive(b"Gi", k))
            self._h.append(self._derive(b"Hi", k))

    def gvec(self, n: int) -> list[Point]:
        self._extend(n)
        return self._g[:n]

    def hvec(self, n: int) -> list[Point]:
        self._extend(n)
        return self._h[:n]


_CONTEXTS: dict[str, GroupContext] = {}

DEFAULT_LABEL = "lsap-mpc/zk/v1"


def setup(label: str = DEFAULT_LABEL) -> GroupContext:
    """Deterministic context for ``label`` (shared per process)."""
    ctx = _CONTEXTS.get(label)
    if ctx is None:
        ctx = _CONTEXTS[label] = GroupContext(label)
    return ctx
