"""Independent reference paths used to cross-check the package.

Deliberately avoids the package's integer-shift kernels: the map here runs
on exact rationals via fractions.Fraction and the cipher recurrence is a
straight-line transcription.  Tests compare the two routes; neither is
derived from the other.
"""

import math
from fractions import Fraction


def logistic_step_frac(x_raw: int, lam_raw: int, m: int, k: int) -> int:
    """floor(4 * lambda * x * (1 - x) * 2**m) with clamping, via rationals."""
    x = Fraction(x_raw, 1 << m)
    lam = Fraction(lam_raw, 1 << k)
    nxt = 4 * lam * x * (1 - x)
    raw = math.floor(nxt * (1 << m))
    return min(raw, (1 << m) - 1)


def repair_constant(m: int) -> int:
    """Top m bits of repeating 0x5A bytes, written out independently."""
    bits = ""
    while len(bits) < m:
        bits += "01011010"
    return int(bits[:m], 2)


def encrypt_words_reference(x1: int, xp1: int, lam_raw: int, m: int, k: int,
                            words: list[int]) -> list[int]:
    """Single-round encryption, one line per recurrence step."""
    x = x1
    xp = xp1
    out = []
    for y in words:
        x_next = logistic_step_frac(x, lam_raw, m, k)
        xp_next = logistic_step_frac(xp, lam_raw, m, k)
        p = x ^ xp
        c = p ^ y
        x = x_next ^ c
        xp = xp_next if xp_next != 0 else repair_constant(m)
        out.append(c)
    return out


def decrypt_words_reference(x1: int, xp1: int, lam_raw: int, m: int, k: int,
                            words: list[int]) -> list[int]:
    x = x1
    xp = xp1
    out = []
    for c in words:
        x_next = logistic_step_frac(x, lam_raw, m, k)
        xp_next = logistic_step_frac(xp, lam_raw, m, k)
        p = x ^ xp
        y = p ^ c
        x = x_next ^ c
        xp = xp_next if xp_next != 0 else repair_constant(m)
        out.append(y)
    return out


def pack_bits_reference(data: bytes, m: int) -> list[int]:
    """Whole-buffer bignum packing; an independent route for pack_words."""
    if not data:
        return []
    nwords = (8 * len(data) + m - 1) // m
    big = int.from_bytes(data, "big") << (nwords * m - 8 * len(data))
    return [(big >> (m * (nwords - 1 - i))) & ((1 << m) - 1) for i in range(nwords)]
