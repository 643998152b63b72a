"""Key material, session seeds, and the ASCII key-file format.

A key fixes the word width m, the parameter width k, the round count n with
one lambda per round, the x' initialisation mode, and the dummy-region
geometry (length D, offset o, stride s) used to hide session seeds inside a
container.  Session seeds themselves are per-message and travel with the
message; everything in the key is long-term secret.

Lambdas are restricted to the chaotic band [ceil(0.99 * 2**k), 2**k]; the
validator runs both on generation and on parse, so a tampered key file is
rejected before any cipher state is built.

Key files are line-oriented ASCII, one ``name=hex`` pair per line (lowercase
hex, no 0x prefix), LF line endings, fields in a fixed order.  Unknown or
out-of-order fields are rejected and every parse error carries the offending
line number.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .fxchaos import MAX_WIDTH, MIN_WIDTH, logistic_step_raw, zero_repair_word

XPRIME_DERIVED = "derived"
XPRIME_INDEPENDENT = "independent"


class KeyFormatError(ValueError):
    """Raised on malformed, out-of-order, missing, or out-of-range key fields.

    `line` is the 1-based line number of the offending line, or None when the
    problem is not attributable to a single line (e.g. truncated file).
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EntropyExhausted(RuntimeError):
    """A fixed entropy source ran out of bytes."""


class FixedEntropy:
    """Deterministic entropy source backed by a caller-supplied byte string."""

    def __init__(self, data: bytes):
        self._data = bytes(data)
        self._pos = 0

    def read(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise EntropyExhausted(
                f"fixed entropy exhausted: wanted {n} more bytes, "
                f"{len(self._data) - self._pos} left of {len(self._data)}"
            )
        chunk = self._data[self._pos : self._pos + n]
        self._pos += n
        return chunk


class SystemEntropy:
    """Entropy source backed by os.urandom."""

    def read(self, n: int) -> bytes:
        return os.urandom(n)


def draw_below(source, bound: int) -> int:
    """Uniform integer in [0, bound) by top-bits rejection sampling.

    Reads ceil(bits/8) bytes at a time, keeps the top `bits` bits, and
    redraws on overshoot, so the result is exactly uniform and depends only
    on the bytes consumed.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound == 1:
        return 0
    bits = (bound - 1).bit_length()
    nbytes = (bits + 7) // 8
    shift = 8 * nbytes - bits
    while True:
        value = int.from_bytes(source.read(nbytes), "big") >> shift
        if value < bound:
            return value


def draw_word(source, m: int, nonzero: bool = True) -> int:
    """Uniform m-bit word (top m bits of ceil(m/8) entropy bytes)."""
    nbytes = (m + 7) // 8
    shift = 8 * nbytes - m
    while True:
        value = int.from_bytes(source.read(nbytes), "big") >> shift
        if value or not nonzero:
            return value


def chaotic_floor(k: int) -> int:
    """Smallest lambda raw in the chaotic key band: ceil(0.99 * 2**k)."""
    return (99 * (1 << k) + 99) // 100


@dataclass(frozen=True)
class CipherKey:
    """Long-term key material; validated on construction."""

    m: int
    k: int
    rounds: int
    lambdas: tuple[int, ...]
    xprime_mode: str = XPRIME_DERIVED
    xprimes: tuple[int, ...] | None = None
    dummy_len: int = 32
    offset: int = 0
    stride: int = 1

    def __post_init__(self) -> None:
        if not MIN_WIDTH <= self.m <= MAX_WIDTH:
            raise ValueError(f"m out of range: {self.m}")
        if not MIN_WIDTH <= self.k <= MAX_WIDTH:
            raise ValueError(f"k out of range: {self.k}")
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if len(self.lambdas) != self.rounds:
            raise ValueError("need exactly one lambda per round")
        lo, hi = chaotic_floor(self.k), 1 << self.k
        for i, lam in enumerate(self.lambdas):
            if not lo <= lam <= hi:
                raise ValueError(f"lambda{i} out of chaotic band [{lo:#x}, {hi:#x}]: {lam:#x}")
        if self.xprime_mode == XPRIME_DERIVED:
            if self.xprimes is not None:
                raise ValueError("derived mode carries no xprime words")
        elif self.xprime_mode == XPRIME_INDEPENDENT:
            if self.xprimes is None or len(self.xprimes) != self.rounds:
                raise ValueError("independent mode needs one xprime word per round")
            for i, xp in enumerate(self.xprimes):
                if not 0 < xp < (1 << self.m):
                    raise ValueError(f"xprime{i} must be a nonzero m-bit word")
        else:
            raise ValueError(f"unknown xprime mode {self.xprime_mode!r}")
        if self.dummy_len < self.rounds * self.stride + 1:
            raise ValueError(
                f"dummy length {self.dummy_len} cannot hold {self.rounds} seeds at stride {self.stride}"
            )
        if self.stride < 1 or math.gcd(self.stride, self.dummy_len) != 1:
            raise ValueError(f"stride {self.stride} must be positive and coprime with D={self.dummy_len}")
        if not 0 <= self.offset < self.dummy_len:
            raise ValueError(f"offset {self.offset} out of range for D={self.dummy_len}")

    def seed_slots(self) -> list[int]:
        """Dummy-region slot of each round's session seed, in round order."""
        return [(self.offset + r * self.stride) % self.dummy_len for r in range(self.rounds)]


def keygen(m: int, k: int, rounds: int, dummy_len: int, entropy,
           xprime_mode: str = XPRIME_DERIVED) -> CipherKey:
    """Draw a fresh key from the entropy source.

    Draw order is fixed (lambdas, offset, stride, then xprime words in
    independent mode) so a given entropy byte stream always yields the same
    key.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    if dummy_len < rounds + 1:
        raise ValueError(f"dummy length {dummy_len} cannot hold {rounds} seeds")
    lo, hi = chaotic_floor(k), 1 << k
    lambdas = tuple(lo + draw_below(entropy, hi - lo + 1) for _ in range(rounds))
    offset = draw_below(entropy, dummy_len)
    strides = [s for s in range(1, (dummy_len - 1) // rounds + 1)
               if math.gcd(s, dummy_len) == 1]
    if not strides:
        raise ValueError(f"no usable stride for D={dummy_len}, rounds={rounds}")
    stride = strides[draw_below(entropy, len(strides))]
    xprimes = None
    if xprime_mode == XPRIME_INDEPENDENT:
        xprimes = tuple(draw_word(entropy, m) for _ in range(rounds))
    return CipherKey(m=m, k=k, rounds=rounds, lambdas=lambdas,
                     xprime_mode=xprime_mode, xprimes=xprimes,
                     dummy_len=dummy_len, offset=offset, stride=stride)


def draw_session(entropy, m: int, rounds: int) -> list[int]:
    """Per-message session seeds: one nonzero m-bit word per round."""
    return [draw_word(entropy, m) for _ in range(rounds)]


def derive_xprime(x1: int, lam: int, m: int, k: int) -> int:
    """Initial free-running word from a session seed: one map application.

    A zero result (possible only at small lambda) is replaced by the fixed
    repair constant so the free trajectory never starts at the absorbing
    point.  A zero seed is rejected outright.
    """
    if x1 == 0:
        raise ValueError("session word must be nonzero")
    if not 0 < x1 < (1 << m):
        raise ValueError(f"session word {x1:#x} out of range for m={m}")
    xp = logistic_step_raw(x1, lam, m, k)
    return xp if xp else zero_repair_word(m)


# Key file field order.  lambda/xprime lines are indexed: lambda0, lambda1, ...
_HEAD_FIELDS = ("m", "k", "n", "xprime_mode", "D", "o", "s")


def serialize_key(key: CipherKey) -> bytes:
    """Render a key as its canonical ASCII file form."""
    mode = 0 if key.xprime_mode == XPRIME_DERIVED else 1
    lines = [
        f"m={key.m:x}",
        f"k={key.k:x}",
        f"n={key.rounds:x}",
        f"xprime_mode={mode:x}",
        f"D={key.dummy_len:x}",
        f"o={key.offset:x}",
        f"s={key.stride:x}",
    ]
    lines += [f"lambda{i}={v:x}" for i, v in enumerate(key.lambdas)]
    if key.xprimes is not None:
        lines += [f"xprime{i}={v:x}" for i, v in enumerate(key.xprimes)]
    return ("\n".join(lines) + "\n").encode("ascii")


def _parse_hex(text: str, lineno: int, field: str) -> int:
    text = text.strip()
    if not text:
        raise KeyFormatError(f"empty value for {field}", lineno)
    try:
        return int(text, 16)
    except ValueError:
        raise KeyFormatError(f"bad hex value for {field}: {text!r}", lineno) from None


def parse_key(data: bytes) -> CipherKey:
    """Parse and validate a key file; inverse of serialize_key."""
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise KeyFormatError(f"key file is not ASCII: {exc}") from None

    lines = text.split("\n")
    pairs: list[tuple[int, str, int]] = []  # (lineno, name, value)
    for lineno, line in enumerate(lines, start=1):
        if line == "" and lineno == len(lines):
            continue  # trailing newline
        if line == "":
            raise KeyFormatError("blank line", lineno)
        if "=" not in line:
            raise KeyFormatError(f"malformed line (expected name=hex): {line!r}", lineno)
        name, _, value = line.partition("=")
        pairs.append((lineno, name, _parse_hex(value, lineno, name)))

    fields: dict[str, int] = {}
    pos = 0
    for want in _HEAD_FIELDS:
        if pos >= len(pairs):
            raise KeyFormatError(f"missing field {want}")
        lineno, name, value = pairs[pos]
        if name != want:
            raise KeyFormatError(f"expected field {want}, found {name!r}", lineno)
        fields[want] = value
        pos += 1

    m, k, n = fields["m"], fields["k"], fields["n"]
    mode_flag = fields["xprime_mode"]
    if mode_flag not in (0, 1):
        raise KeyFormatError("xprime_mode must be 0 (derived) or 1 (independent)")
    if n < 1:
        raise KeyFormatError("n must be at least 1")

    lambdas = []
    for i in range(n):
        if pos >= len(pairs):
            raise KeyFormatError(f"missing field lambda{i}")
        lineno, name, value = pairs[pos]
        if name != f"lambda{i}":
            raise KeyFormatError(f"expected field lambda{i}, found {name!r}", lineno)
        if MIN_WIDTH <= k <= MAX_WIDTH and not chaotic_floor(k) <= value <= (1 << k):
            raise KeyFormatError("lambda out of range", lineno)
        lambdas.append(value)
        pos += 1

    xprimes = None
    if mode_flag == 1:
        xprimes = []
        for i in range(n):
            if pos >= len(pairs):
                raise KeyFormatError(f"missing field xprime{i}")
            lineno, name, value = pairs[pos]
            if name != f"xprime{i}":
                raise KeyFormatError(f"expected field xprime{i}, found {name!r}", lineno)
            if MIN_WIDTH <= m <= MAX_WIDTH and not 0 < value < (1 << m):
                raise KeyFormatError("xprime out of range", lineno)
            xprimes.append(value)
            pos += 1

    if pos != len(pairs):
        lineno, name, _ = pairs[pos]
        raise KeyFormatError(f"unknown field {name!r}", lineno)

    try:
        return CipherKey(m=m, k=k, rounds=n, lambdas=tuple(lambdas),
                         xprime_mode=XPRIME_DERIVED if mode_flag == 0 else XPRIME_INDEPENDENT,
                         xprimes=None if xprimes is None else tuple(xprimes),
                         dummy_len=fields["D"], offset=fields["o"], stride=fields["s"])
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from None
