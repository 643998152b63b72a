"""Exact fixed-point arithmetic for the logistic map x -> 4*lambda*x*(1-x).

State words are unsigned m-bit fractions raw/2**m in [0, 1).  The control
parameter lambda uses k+1 bits (raw/2**k in [0, 1]) so that 1.0 is exactly
representable; the map is strongly chaotic only near lambda = 1, and keys
are restricted to that band elsewhere in the package.

Everything here is plain integer math with a single final floor, so results
are bit-identical on every platform.  All functions are pure and safe to
call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

MIN_WIDTH = 4
MAX_WIDTH = 32


def _check_width(width: int, name: str) -> None:
    if not isinstance(width, int) or not MIN_WIDTH <= width <= MAX_WIDTH:
        raise ValueError(f"{name} must be an integer in [{MIN_WIDTH}, {MAX_WIDTH}], got {width!r}")


@dataclass(frozen=True)
class FxWord:
    """Unsigned m-bit fraction: value = raw / 2**m, in [0, 1)."""

    raw: int
    m: int

    def __post_init__(self) -> None:
        _check_width(self.m, "m")
        if not 0 <= self.raw < (1 << self.m):
            raise ValueError(f"raw {self.raw:#x} out of range for m={self.m}")

    @property
    def value(self) -> float:
        return self.raw / (1 << self.m)


@dataclass(frozen=True)
class Lambda:
    """Map control parameter: value = raw / 2**k, in [0, 1].

    One bit wider than a state word of the same width so the fully chaotic
    setting lambda = 1 (raw = 2**k) is exact.
    """

    raw: int
    k: int

    def __post_init__(self) -> None:
        _check_width(self.k, "k")
        if not 0 <= self.raw <= (1 << self.k):
            raise ValueError(f"raw {self.raw:#x} out of range for k={self.k}")

    @property
    def value(self) -> float:
        return self.raw / (1 << self.k)


def fx_from_rational(numerator: int, denominator: int, m: int) -> FxWord:
    """Largest m-bit word not exceeding numerator/denominator.

    The rational must lie in [0, 1); width errors and improper fractions
    raise ValueError.
    """
    _check_width(m, "m")
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    if not 0 <= numerator < denominator:
        raise ValueError("need 0 <= numerator < denominator for a word in [0, 1)")
    return FxWord((numerator << m) // denominator, m)


def logistic_step_raw(x: int, lam: int, m: int, k: int) -> int:
    """One iterate of the map on raw integers; the hot kernel.

    Computes floor(lam * x * (2**m - x) / 2**(k+m-2)) in full precision,
    flooring exactly once.  The only value that can overflow the word is
    1.0 itself (x = 1/2 at lambda = 1); it clamps to the top word 2**m - 1.
    """
    full = 1 << m
    result = (lam * x * (full - x)) >> (k + m - 2)
    top = full - 1
    return top if result > top else result


def logistic_step(x: FxWord, lam: Lambda) -> FxWord:
    """One iterate of x -> 4*lambda*x*(1-x) in m-bit fixed point."""
    return FxWord(logistic_step_raw(x.raw, lam.raw, x.m, lam.k), x.m)


def logistic_orbit(x0: FxWord, lam: Lambda, count: int) -> list[FxWord]:
    """The first `count` iterates after x0 (x0 itself is not included)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return [FxWord(r, x0.m) for r in orbit_raw(x0.raw, lam.raw, x0.m, lam.k, count)]


def orbit_raw(x0: int, lam: int, m: int, k: int, count: int) -> list[int]:
    """Bulk orbit on raw integers; used for long phase-space runs."""
    full = 1 << m
    top = full - 1
    shift = k + m - 2
    x = x0
    out = []
    append = out.append
    for _ in range(count):
        x = (lam * x * (full - x)) >> shift
        if x > top:
            x = top
        append(x)
    return out


def zero_repair_word(m: int) -> int:
    """Nonzero constant substituted when a free-running trajectory lands on 0.

    The top m bits of the repeating byte pattern 0x5A: 0x5A5A for m=16,
    0x5A5 for m=12, 0x5A for m=8.  Nonzero for every supported width.
    """
    _check_width(m, "m")
    nbytes = (m + 7) // 8
    pattern = int.from_bytes(b"\x5a" * nbytes, "big")
    return pattern >> (8 * nbytes - m)
