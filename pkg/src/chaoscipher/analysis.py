"""Statistical test battery: entropy growth, flatness, compressibility,
phase-space coverage, and the exhaustive single-bit combiner table.

Word inputs are sequences of raw m-bit integers; byte inputs are plain
``bytes``.  Verdict thresholds used by the CLI live here as module
constants so reports stay consistent everywhere.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

# Default verdict thresholds.
R2_LINEAR_MIN = 0.99
FLATNESS_MAX_DEV = 0.10
INCOMPRESSIBLE_MAX_RATIO = 1.00
OCCUPANCY_MIN = 0.50
DEFAULT_SLOTS = 30000
DEFAULT_GRID = 64
HUFFMAN_TABLE_BYTES = 256


def _as_word_array(words: Sequence[int], m: int) -> np.ndarray:
    arr = np.asarray(words, dtype=np.uint64)
    if arr.size and int(arr.max()) >= (1 << m):
        raise ValueError(f"word exceeds {m} bits")
    return arr


@dataclass
class SlotHistogram:
    """Counts of words binned into `slots` equal value ranges.

    The slot of word v is floor(v * slots / 2**m); slots must not exceed
    2**m so the top word always lands in the last slot.
    """

    slots: int
    m: int
    counts: np.ndarray
    total: int

    @classmethod
    def build(cls, words: Sequence[int], slots: int, m: int) -> "SlotHistogram":
        if slots < 2:
            raise ValueError("need at least 2 slots")
        if slots > (1 << m):
            raise ValueError(f"slots={slots} exceeds the {m}-bit value space")
        arr = _as_word_array(words, m)
        if arr.size == 0:
            raise ValueError("empty word sequence")
        idx = (arr * np.uint64(slots)) >> np.uint64(m)
        counts = np.bincount(idx.astype(np.int64), minlength=slots)
        return cls(slots=slots, m=m, counts=counts, total=int(arr.size))


def shannon_entropy(hist: SlotHistogram) -> float:
    """Shannon entropy of the slot distribution, in bits."""
    p = hist.counts[hist.counts > 0] / hist.total
    return float(-(p * np.log2(p)).sum())


@dataclass
class EntropyProfile:
    """Cumulative entropy over slot index plus a linearity score."""

    slots: int
    m: int
    cumulative: np.ndarray
    h_total: float
    r_squared: float


def entropy_profile(words: Sequence[int], slots: int, m: int) -> EntropyProfile:
    """Entropy accumulated slot by slot in ascending value order.

    A well-mixed stream spreads its mass evenly, so the cumulative curve
    grows linearly in the slot index; r_squared is the squared Pearson
    correlation of that curve against the index (0 when the curve is flat).
    """
    hist = SlotHistogram.build(words, slots, m)
    contrib = np.zeros(slots, dtype=np.float64)
    occupied = hist.counts > 0
    p = hist.counts[occupied] / hist.total
    contrib[occupied] = -p * np.log2(p)
    cumulative = np.cumsum(contrib)
    x = np.arange(slots, dtype=np.float64)
    sy = cumulative.std()
    if sy == 0.0:
        r2 = 0.0
    else:
        r = np.corrcoef(x, cumulative)[0, 1]
        r2 = float(r * r)
    return EntropyProfile(slots=slots, m=m, cumulative=cumulative,
                          h_total=float(cumulative[-1]), r_squared=r2)


@dataclass
class ByteFlatness:
    """256-bin byte histogram summary; ratio is inf when a byte is absent."""

    counts: np.ndarray
    ratio: float
    max_deviation: float
    chi_square: float


def byte_flatness(data: bytes) -> ByteFlatness:
    """Max/min frequency ratio and worst relative deviation from the mean.

    The chi-square statistic is informational only; no verdict keys off it.
    """
    if len(data) < 256:
        raise ValueError("need at least 256 bytes for a byte histogram")
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    mean = counts.mean()
    cmin, cmax = int(counts.min()), int(counts.max())
    ratio = math.inf if cmin == 0 else cmax / cmin
    max_dev = float(np.abs(counts - mean).max() / mean)
    chi2 = float(((counts - mean) ** 2 / mean).sum())
    return ByteFlatness(counts=counts, ratio=ratio, max_deviation=max_dev, chi_square=chi2)


def huffman_code_lengths(freqs: Sequence[int]) -> list[int]:
    """Code length per symbol for an order-0 Huffman code over the alphabet.

    Tree built by repeatedly merging the two lowest-weight subtrees; ties
    break toward the subtree containing the smallest symbol, which makes the
    lengths deterministic.  Absent symbols get length 0; a one-symbol
    alphabet gets length 1.
    """
    alive = [(f, s) for s, f in enumerate(freqs) if f > 0]
    if not alive:
        raise ValueError("no symbols present")
    lengths = [0] * len(freqs)
    if len(alive) == 1:
        lengths[alive[0][1]] = 1
        return lengths
    heap = [(f, s, (s,)) for f, s in alive]
    heapq.heapify(heap)
    while len(heap) > 1:
        f1, m1, syms1 = heapq.heappop(heap)
        f2, m2, syms2 = heapq.heappop(heap)
        for s in syms1 + syms2:
            lengths[s] += 1
        heapq.heappush(heap, (f1 + f2, min(m1, m2), syms1 + syms2))
    return lengths


def canonical_codes(lengths: Sequence[int]) -> dict[int, tuple[int, int]]:
    """Canonical (code, length) per symbol: codes assigned in (length, symbol) order."""
    order = sorted((l, s) for s, l in enumerate(lengths) if l > 0)
    codes: dict[int, tuple[int, int]] = {}
    code = 0
    prev_len = order[0][0] if order else 0
    for l, s in order:
        code <<= l - prev_len
        codes[s] = (code, l)
        code += 1
        prev_len = l
    return codes


def huffman_encode(data: bytes, lengths: Sequence[int]) -> tuple[bytes, int]:
    """Bit-pack data under the canonical code; returns (payload, bit count)."""
    codes = canonical_codes(lengths)
    acc = 0
    nbits = 0
    out = bytearray()
    for b in data:
        code, l = codes[b]
        acc = (acc << l) | code
        nbits += l
        while nbits >= 8:
            nbits -= 8
            out.append((acc >> nbits) & 0xFF)
    total_bits = len(out) * 8 + nbits
    if nbits:
        out.append((acc << (8 - nbits)) & 0xFF)
    return bytes(out), total_bits


def huffman_decode(payload: bytes, total_bits: int, lengths: Sequence[int],
                   count: int) -> bytes:
    """Decode `count` symbols from a canonical-code payload."""
    by_code = {v: s for s, v in canonical_codes(lengths).items()}
    out = bytearray()
    code = 0
    l = 0
    seen = 0
    for byte in payload:
        for bit in range(7, -1, -1):
            if seen == total_bits or len(out) == count:
                break
            code = (code << 1) | ((byte >> bit) & 1)
            l += 1
            seen += 1
            if (code, l) in by_code:
                out.append(by_code[(code, l)])
                code = 0
                l = 0
    if len(out) != count:
        raise ValueError("payload did not decode to the expected symbol count")
    return bytes(out)


def huffman_ratio(data: bytes) -> float:
    """original_size / (coded_size + 256-byte length table) for an order-0 code.

    Below 1.0 means the stream gained nothing from entropy coding, i.e. it
    already looks byte-flat.
    """
    if not data:
        raise ValueError("empty input")
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    lengths = huffman_code_lengths([int(c) for c in counts])
    coded_bits = int(sum(int(c) * l for c, l in zip(counts, lengths)))
    coded_bytes = (coded_bits + 7) // 8
    return len(data) / (coded_bytes + HUFFMAN_TABLE_BYTES)


def phase_occupancy(words: Sequence[int], grid: int, m: int) -> float:
    """Fraction of g*g cells hit by consecutive pairs (w_i, w_{i+1}).

    A raw orbit stays on the map's parabola and hits O(g) cells; a mixed
    cipher stream should flood the square.
    """
    if grid < 2 or grid > (1 << m):
        raise ValueError("grid must be in [2, 2**m]")
    arr = _as_word_array(words, m)
    if arr.size < 2:
        raise ValueError("need at least 2 words")
    cells = ((arr[:-1] * np.uint64(grid)) >> np.uint64(m)) * np.uint64(grid) \
        + ((arr[1:] * np.uint64(grid)) >> np.uint64(m))
    return len(np.unique(cells)) / (grid * grid)


def phase_cells(words: Sequence[int], grid: int, m: int) -> list[tuple[int, int, int]]:
    """Occupied phase cells as (cell_x, cell_y, count), sorted."""
    if grid < 2 or grid > (1 << m):
        raise ValueError("grid must be in [2, 2**m]")
    arr = _as_word_array(words, m)
    if arr.size < 2:
        raise ValueError("need at least 2 words")
    gx = (arr[:-1] * np.uint64(grid)) >> np.uint64(m)
    gy = (arr[1:] * np.uint64(grid)) >> np.uint64(m)
    flat = gx * np.uint64(grid) + gy
    cells, counts = np.unique(flat, return_counts=True)
    return [(int(c) // grid, int(c) % grid, int(n)) for c, n in zip(cells, counts)]


@dataclass(frozen=True)
class CombinerRow:
    x: int
    xprime: int
    p: int
    y: int
    c: int
    leak: int  # 1 when y == C, i.e. the keystream bit was 0


@dataclass(frozen=True)
class CombinerTable:
    rows: tuple[CombinerRow, ...]
    balance_percent: tuple[float, ...]  # per column: x, x', P, y, C, leak


def combiner_table() -> CombinerTable:
    """All eight single-bit combiner cases and the per-column balance row.

    Every column, including the plaintext-leak indicator y == C, sits at
    exactly 50%: observing C says nothing about y without both trajectories.
    """
    rows = []
    for x, xp, y in product((0, 1), repeat=3):
        p = x ^ xp
        c = p ^ y
        rows.append(CombinerRow(x=x, xprime=xp, p=p, y=y, c=c, leak=int(y == c)))
    cols = zip(*[(r.x, r.xprime, r.p, r.y, r.c, r.leak) for r in rows])
    balance = tuple(100.0 * sum(col) / len(rows) for col in cols)
    return CombinerTable(rows=tuple(rows), balance_percent=balance)


@dataclass
class AnalysisReport:
    """One-stop summary of every metric over a ciphertext sample."""

    h_total: float
    r_squared: float
    flatness: ByteFlatness
    ratio: float
    occupancy: float
    verdicts: dict = field(default_factory=dict)


def build_report(data: bytes, m: int = 16, slots: int = DEFAULT_SLOTS,
                 grid: int = DEFAULT_GRID) -> AnalysisReport:
    from .framing import pack_words

    words = pack_words(data, m)
    profile = entropy_profile(words, slots, m)
    flat = byte_flatness(data)
    ratio = huffman_ratio(data)
    occ = phase_occupancy(words, grid, m)
    verdicts = {
        "entropy_linear": profile.r_squared >= R2_LINEAR_MIN,
        "byte_flat": flat.max_deviation <= FLATNESS_MAX_DEV,
        "incompressible": ratio <= INCOMPRESSIBLE_MAX_RATIO,
        "space_filling": occ >= OCCUPANCY_MIN,
    }
    return AnalysisReport(h_total=profile.h_total, r_squared=profile.r_squared,
                          flatness=flat, ratio=ratio, occupancy=occ, verdicts=verdicts)
