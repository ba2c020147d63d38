"""Prime field helpers for the secret-sharing engine."""

from __future__ import annotations

import gmpy2

# smallest prime above 2**61
P61 = 2305843009213693967


def field_for(bits: int, kappa: int) -> int:
    """Prime with room for ``bits``-bit comparison operands and ``kappa`` bits of masking.

    The statistical comparison opens ``z + r`` with ``z < 2**(bits+1)`` and
    ``r < 2**(bits+kappa+1)``; both must stay below the modulus.
    """
    need = bits + kappa + 3
    if need <= 61:
        return P61
    return int(gmpy2.next_prime(1 << need))


def centered(x: int, p: int) -> int:
    """Signed representative of ``x mod p`` in ``(-p/2, p/2]``."""
    x %= p
    return x - p if x > p // 2 else x


def inverse(x: int, p: int) -> int:
    if x % p == 0:
        raise ZeroDivisionError("zero has no inverse")
    return pow(x, -1, p)
