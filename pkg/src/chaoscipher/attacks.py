"""Known-plaintext brute force, zero-keystream scanning, and divergence probes.

The brute force enumerates single-round states (lambda in the chaotic band
crossed with every seed, and in independent mode every seed pair) and keeps
the ones that reproduce an observed plaintext/ciphertext prefix exactly.
The full space is |band| * 2**m in derived mode and |band| * 2**(2m) in
independent mode; anything above the configured cap is refused up front with
the closed-form size, because the point of the exercise is the count, not
the wait.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fxchaos import logistic_step_raw, zero_repair_word
from .keyspace import XPRIME_DERIVED, XPRIME_INDEPENDENT, chaotic_floor

DEFAULT_SPACE_CAP = 1 << 26
MIN_KNOWN_WORDS = 4


class SpaceTooLargeError(RuntimeError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(
            f"search space of {size} states (2^{math.log2(size):.1f}) exceeds cap {cap}"
        )


@dataclass(frozen=True)
class SearchSpace:
    """Enumerable single-round state space."""

    m: int
    k: int
    xprime_mode: str = XPRIME_DERIVED
    lambda_lo: int | None = None  # defaults to the chaotic floor
    lambda_hi: int | None = None  # defaults to 2**k (lambda = 1)

    def band(self) -> tuple[int, int]:
        lo = chaotic_floor(self.k) if self.lambda_lo is None else self.lambda_lo
        hi = (1 << self.k) if self.lambda_hi is None else self.lambda_hi
        if not chaotic_floor(self.k) <= lo <= hi <= (1 << self.k):
            raise ValueError("lambda bounds must lie inside the chaotic band")
        return lo, hi

    def size(self) -> int:
        lo, hi = self.band()
        seeds = 1 << self.m
        if self.xprime_mode == XPRIME_INDEPENDENT:
            seeds *= 1 << self.m
        return (hi - lo + 1) * seeds


@dataclass(frozen=True)
class Candidate:
    lam: int
    x1: int
    xprime1: int | None = None


@dataclass
class AttackResult:
    candidates: list[Candidate]
    attempts: int
    space_size: int
    paper_bound: int  # 2**(2m+k): the naive two-trajectory figure
    elapsed: float


def paper_bound(m: int, k: int, rounds: int = 1) -> int:
    """Closed-form naive state count 2**(n*(2m+k)); never enumerated."""
    return 1 << (rounds * (2 * m + k))


def _scan_lambda(args) -> tuple[int, list[tuple[int, int, int | None]]]:
    """Try every seed (pair) under one lambda; returns (attempts, hits)."""
    lam, plain, cipher, m, k, independent = args
    full = 1 << m
    top = full - 1
    shift = k + m - 2
    repair = zero_repair_word(m)
    hits: list[tuple[int, int, int | None]] = []
    attempts = 0

    def matches(x: int, xp: int) -> bool:
        for y, c_exp in zip(plain, cipher):
            xn = (lam * x * (full - x)) >> shift
            if xn > top:
                xn = top
            xpn = (lam * xp * (full - xp)) >> shift
            if xpn > top:
                xpn = top
            elif xpn == 0:
                xpn = repair
            c = x ^ xp ^ y
            if c != c_exp:
                return False
            x = xn ^ c
            xp = xpn
        return True

    if independent:
        for x1 in range(full):
            for xp1 in range(full):
                attempts += 1
                if x1 == 0 or xp1 == 0:
                    continue  # not a reachable initial state; still an enumerated point
                if matches(x1, xp1):
                    hits.append((lam, x1, xp1))
    else:
        for x1 in range(full):
            attempts += 1
            if x1 == 0:
                continue
            xp1 = logistic_step_raw(x1, lam, m, k)
            if xp1 == 0:
                xp1 = repair
            if matches(x1, xp1):
                hits.append((lam, x1, None))
    return attempts, hits


def brute_force(known_plain: Sequence[int], observed_cipher: Sequence[int],
                space: SearchSpace, cap: int = DEFAULT_SPACE_CAP,
                workers: int = 1) -> AttackResult:
    """Exhaust the space, returning every state that explains the prefix.

    Needs at least 4 known words so false positives stay rare.  The result
    is deterministic regardless of worker count: candidates come back sorted
    by (lambda, x1, xprime1) and the attempt count always equals the
    closed-form space size.
    """
    plain = list(known_plain)
    cipher = list(observed_cipher)
    if len(plain) != len(cipher):
        raise ValueError("known plaintext and ciphertext must have equal length")
    if len(plain) < MIN_KNOWN_WORDS:
        raise ValueError(f"need at least {MIN_KNOWN_WORDS} known words")
    size = space.size()
    if size > cap:
        raise SpaceTooLargeError(size, cap)

    lo, hi = space.band()
    independent = space.xprime_mode == XPRIME_INDEPENDENT
    tasks = [(lam, plain, cipher, space.m, space.k, independent)
             for lam in range(lo, hi + 1)]
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_lambda, tasks))
    else:
        results = [_scan_lambda(t) for t in tasks]
    elapsed = time.perf_counter() - start

    attempts = sum(a for a, _ in results)
    hits = sorted(h for _, hs in results for h in hs)
    candidates = [Candidate(lam=l, x1=x, xprime1=xp) for l, x, xp in hits]
    return AttackResult(candidates=candidates, attempts=attempts, space_size=size,
                        paper_bound=paper_bound(space.m, space.k), elapsed=elapsed)


@dataclass
class ZeroPnScan:
    positions: list[int]
    count: int
    total: int
    rate: float


def zero_pn_scan(plain: Sequence[int], cipher: Sequence[int]) -> ZeroPnScan:
    """Positions where the cipher word equals the plaintext word.

    Those are exactly the words where the keystream P was zero; they occur
    at rate about 2**-m and, when the plaintext has no zero words, never at
    two adjacent positions (a zero P forces the next P to equal the previous
    plaintext word).
    """
    p = np.asarray(plain, dtype=np.uint64)
    c = np.asarray(cipher, dtype=np.uint64)
    if p.shape != c.shape:
        raise ValueError("plain and cipher streams must have equal length")
    if p.size == 0:
        raise ValueError("empty streams")
    positions = np.nonzero(p == c)[0]
    return ZeroPnScan(positions=[int(i) for i in positions],
                      count=int(positions.size), total=int(p.size),
                      rate=float(positions.size / p.size))


@dataclass
class DivergenceCurve:
    fractions: list[float]
    mean_tail: float  # mean fraction beyond word 16
    tail_start: int = 16


def divergence(key, session_a: Sequence[int], session_b: Sequence[int],
               plain: Sequence[int]) -> DivergenceCurve:
    """Per-word bit-difference fraction between two sessions' ciphertexts.

    Measures avalanche: a session pair differing in a single bit should
    drive the curve to ~0.5 within a few words and keep it there.
    """
    from .cipher import cipher_init, encrypt_stream

    if list(session_a) == list(session_b):
        raise ValueError("sessions must differ")
    words = list(plain)
    ca = encrypt_stream(cipher_init(key, session_a), words)
    cb = encrypt_stream(cipher_init(key, session_b), words)
    m = key.m
    fractions = [(a ^ b).bit_count() / m for a, b in zip(ca, cb)]
    tail = fractions[16:]
    mean_tail = sum(tail) / len(tail) if tail else 0.0
    return DivergenceCurve(fractions=fractions, mean_tail=mean_tail)
