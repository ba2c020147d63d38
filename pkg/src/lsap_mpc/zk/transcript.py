"""Fiat-Shamir transcript over SHA-512 with labelled, length-prefixed messages."""

from __future__ import annotations

import hashlib

from .group import L, Point, scalar_bytes


class Transcript:
    def __init__(self, domain: str):
        self._h = hashlib.sha512()
        self._absorb(b"domain", domain.encode())

    def _absorb(self, label: bytes, data: bytes) -> None:
        self._h.update(len(label).to_bytes(4, "big") + label)
        self._h.update(len(data).to_bytes(8, "big") + data)

    def append_bytes(self, label: str, data: bytes) -> None:
        self._absorb(label.encode(), data)

    def append_point(self, label: str, P: Point) -> None:
        self._absorb(label.encode(), P.to_bytes())

    def append_points(self, label: str, points) -> None:
        self._absorb(label.encode(), b"".join(P.to_bytes() for P in points))

    def append_scalar(self, label: str, k: int) -> None:
        self._absorb(label.encode(), scalar_bytes(k))

    def append_int(self, label: str, x: int) -> None:
        self._absorb(label.encode(), str(int(x)).encode())

    def challenge(self, label: str) -> int:
        """Non-zero scalar; the challenge itself is absorbed before returning."""
        self._absorb(b"challenge", label.encode())
        c = int.from_bytes(self._h.copy().digest(), "little") % L
        if c == 0:
            c = 1
        self._absorb(b"challenge-value", scalar_bytes(c))
        return c
