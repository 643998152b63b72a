"""Word-level cipher state machine and the multi-round pipeline.

Each round keeps two m-bit logistic trajectories.  Per word, in this order:
both trajectories advance one map step, the keystream word P is the XOR of
the current (pre-step) values, the cipher word is C = P ^ y, and then the
feedback trajectory is replaced by (stepped x) ^ C while the free trajectory
takes its stepped value.  Decryption runs the same update with the received
word in place of C, so the two sides track the same state as long as the
channel is clean.

The free trajectory gets a fixed nonzero repair word whenever a step lands
on 0 (the map's absorbing point); the feedback trajectory needs no repair
because the ciphertext XOR reinjects variation.

States are mutable and must not be shared across threads; a stream may be
fed in chunks, with the state carrying over between calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .fxchaos import zero_repair_word
from .keyspace import XPRIME_INDEPENDENT, CipherKey, derive_xprime


@dataclass
class CipherState:
    """One round's live state: raw feedback word x, free word xprime."""

    x: int
    xprime: int
    lam: int
    m: int
    k: int


@dataclass
class RoundPipeline:
    """Round states in encryption order (decryption walks them backwards)."""

    states: list[CipherState]

    @property
    def rounds(self) -> int:
        return len(self.states)

    @property
    def m(self) -> int:
        return self.states[0].m


def cipher_init(key: CipherKey, session: Sequence[int]) -> RoundPipeline:
    """Build per-round states from a key and per-message session words.

    Session words seed the feedback trajectories; the free trajectories come
    from the key's xprime words (independent mode) or from one map step off
    each session word (derived mode).  Zero session words are rejected.
    """
    if len(session) != key.rounds:
        raise ValueError(f"need {key.rounds} session words, got {len(session)}")
    states = []
    for r, x1 in enumerate(session):
        if not 0 < x1 < (1 << key.m):
            raise ValueError(f"session word {r} must be a nonzero {key.m}-bit word")
        if key.xprime_mode == XPRIME_INDEPENDENT:
            xp = key.xprimes[r]
        else:
            xp = derive_xprime(x1, key.lambdas[r], key.m, key.k)
        states.append(CipherState(x=x1, xprime=xp, lam=key.lambdas[r], m=key.m, k=key.k))
    return RoundPipeline(states)


def _run_raw(state: CipherState, words: Iterable[int], decrypt: bool) -> list[int]:
    # Hot loop: everything in locals, two map steps and three XORs per word.
    m = state.m
    full = 1 << m
    top = full - 1
    shift = state.k + m - 2
    lam = state.lam
    repair = zero_repair_word(m)
    x = state.x
    xp = state.xprime
    out: list[int] = []
    append = out.append
    for w in words:
        if w < 0 or w > top:
            raise ValueError(f"word {w:#x} out of range for m={m}")
        xn = (lam * x * (full - x)) >> shift
        if xn > top:
            xn = top
        xpn = (lam * xp * (full - xp)) >> shift
        if xpn > top:
            xpn = top
        elif xpn == 0:
            xpn = repair
        if decrypt:
            c = w
            append(x ^ xp ^ w)
        else:
            c = x ^ xp ^ w
            append(c)
        x = xn ^ c
        xp = xpn
    state.x = x
    state.xprime = xp
    return out


def encrypt_word(state: CipherState, y: int) -> int:
    """Encrypt one plaintext word, advancing the state."""
    return _run_raw(state, (y,), decrypt=False)[0]


def decrypt_word(state: CipherState, c: int) -> int:
    """Decrypt one cipher word, advancing the state."""
    return _run_raw(state, (c,), decrypt=True)[0]


def encrypt_stream(pipeline: RoundPipeline, words: Iterable[int]) -> list[int]:
    """Encrypt a word sequence through every round, first round innermost.

    Word i of a round is fully processed before word i+1 of that round;
    round r+1 consumes round r's output.  Calling again continues the same
    cipher stream.
    """
    out = list(words)
    for state in pipeline.states:
        out = _run_raw(state, out, decrypt=False)
    return out


def decrypt_stream(pipeline: RoundPipeline, words: Iterable[int]) -> list[int]:
    """Inverse of encrypt_stream: rounds unwound in reverse order."""
    out = list(words)
    for state in reversed(pipeline.states):
        out = _run_raw(state, out, decrypt=True)
    return out
