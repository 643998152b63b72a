"""Statistical battery: entropy profile, flatness, Huffman, phase space."""

import math
from fractions import Fraction

import numpy as np
import pytest

from chaoscipher.analysis import (
    SlotHistogram,
    build_report,
    byte_flatness,
    canonical_codes,
    combiner_table,
    entropy_profile,
    huffman_code_lengths,
    huffman_decode,
    huffman_encode,
    huffman_ratio,
    phase_cells,
    phase_occupancy,
    shannon_entropy,
)
from chaoscipher.fxchaos import orbit_raw


def test_slot_histogram_rule():
    hist = SlotHistogram.build([0, 0xFFFF, 0x8000], 30000, 16)
    assert hist.total == 3
    assert hist.counts[0] == 1
    assert hist.counts[29999] == 1  # top word lands in the last slot
    assert hist.counts[(0x8000 * 30000) >> 16] == 1
    with pytest.raises(ValueError):
        SlotHistogram.build([], 100, 16)
    with pytest.raises(ValueError):
        SlotHistogram.build([0], 1, 16)
    with pytest.raises(ValueError):
        SlotHistogram.build([0], 1 << 17, 16)  # more slots than the value space
    with pytest.raises(ValueError):
        SlotHistogram.build([1 << 16], 100, 16)  # word too wide


def test_shannon_entropy_known_values():
    assert shannon_entropy(SlotHistogram.build([5] * 10, 100, 16)) == 0.0
    # words 0,4,8,12 at m=4 with 4 slots: perfectly uniform
    hist = SlotHistogram.build([0, 4, 8, 12], 4, 4)
    assert shannon_entropy(hist) == pytest.approx(2.0)
    hist = SlotHistogram.build([0, 0, 8], 2, 4)
    expect = -(Fraction(2, 3) * math.log2(2 / 3) + Fraction(1, 3) * math.log2(1 / 3))
    assert shannon_entropy(hist) == pytest.approx(float(expect))


def test_entropy_profile_constant_stream():
    prof = entropy_profile([0x4242] * 500, 30000, 16)
    assert prof.h_total == 0.0
    assert prof.r_squared == 0.0  # flat curve has no linear trend


def test_entropy_profile_exhaustive_uniform():
    prof = entropy_profile(np.arange(1 << 16), 30000, 16)
    assert prof.r_squared >= 0.9999
    # 65536 = 2*30000 + 5536, so 5536 slots hold 3 words and the rest hold 2
    n = 1 << 16
    expect = -(24464 * (2 / n) * math.log2(2 / n)
               + 5536 * (3 / n) * math.log2(3 / n))
    assert prof.h_total == pytest.approx(expect)


def test_entropy_profile_shape_invariants():
    words = np.random.default_rng(1).integers(0, 1 << 16, size=5000)
    prof = entropy_profile(words, 1000, 16)
    assert np.all(np.diff(prof.cumulative) >= 0)
    assert prof.cumulative[-1] == pytest.approx(prof.h_total)
    assert prof.h_total == pytest.approx(
        shannon_entropy(SlotHistogram.build(words, 1000, 16)))
    assert 0.0 <= prof.r_squared <= 1.0


def test_byte_flatness():
    flat = byte_flatness(bytes(range(256)) * 10)
    assert flat.max_deviation == 0.0
    assert flat.ratio == 1.0
    assert flat.chi_square == 0.0
    skew = byte_flatness(b"\x00" * 999 + b"\x01")
    assert skew.ratio == math.inf  # 254 byte values absent
    assert skew.max_deviation > 100
    with pytest.raises(ValueError):
        byte_flatness(b"short")


def test_huffman_lengths_and_kraft():
    assert huffman_code_lengths([10, 0, 0]) == [1, 0, 0]  # lone symbol
    assert huffman_code_lengths([3, 1, 1]) == [1, 2, 2]
    lengths = huffman_code_lengths([5, 5, 5, 5])
    assert lengths == [2, 2, 2, 2]
    freqs = np.random.default_rng(2).integers(0, 50, size=256)
    lengths = huffman_code_lengths([int(f) for f in freqs])
    kraft = sum(Fraction(1, 1 << l) for l in lengths if l > 0)
    assert kraft == 1
    with pytest.raises(ValueError):
        huffman_code_lengths([0, 0])


def test_canonical_codes_are_prefix_free():
    lengths = huffman_code_lengths([7, 1, 1, 1, 4, 2])
    codes = canonical_codes(lengths)
    seen = [format(c, f"0{l}b") for c, l in codes.values()]
    for i, a in enumerate(seen):
        for j, b in enumerate(seen):
            if i != j:
                assert not b.startswith(a)


def test_huffman_encode_decode_round_trip(prose):
    data = prose[:2000]
    lengths = huffman_code_lengths(np.bincount(
        np.frombuffer(data, dtype=np.uint8), minlength=256).tolist())
    payload, bits = huffman_encode(data, lengths)
    assert len(payload) == (bits + 7) // 8
    assert huffman_decode(payload, bits, lengths, len(data)) == data
    with pytest.raises(ValueError):
        huffman_decode(payload, bits, lengths, len(data) + 1)


def test_huffman_ratio_values(prose):
    # 1000 identical bytes: 1000 one-bit codes = 125 bytes, plus the table
    assert huffman_ratio(b"\x00" * 1000) == pytest.approx(1000 / 381)
    assert huffman_ratio(prose) == pytest.approx(1.7712, abs=0.01)
    uniform = np.random.default_rng(3).bytes(100_000)
    assert huffman_ratio(uniform) <= 1.0
    with pytest.raises(ValueError):
        huffman_ratio(b"")


def test_phase_occupancy_bounds():
    assert phase_occupancy([7, 7, 7, 7], 64, 16) == pytest.approx(1 / 4096)
    rng = np.random.default_rng(4)
    flood = phase_occupancy(rng.integers(0, 1 << 16, size=100_000), 64, 16)
    assert flood >= 0.5
    orbit = orbit_raw(0x4321, 1 << 16, 16, 16, 100_000)
    assert phase_occupancy(orbit, 64, 16) <= 0.05  # parabola, not a cloud
    with pytest.raises(ValueError):
        phase_occupancy([1], 64, 16)
    with pytest.raises(ValueError):
        phase_occupancy([1, 2], 1, 16)


def test_phase_cells_match_occupancy():
    words = [0, 0xFFFF, 0, 0xFFFF, 0x8000]
    cells = phase_cells(words, 64, 16)
    assert sum(n for _, _, n in cells) == len(words) - 1
    assert len(cells) / 4096 == pytest.approx(phase_occupancy(words, 64, 16))
    assert (0, 63, 2) in cells  # (0 -> 0xffff) happens twice


EXPECTED_TABLE = [
    # x, x', P, y, C, y == C
    (0, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 1, 1),
    (0, 1, 1, 0, 1, 0),
    (0, 1, 1, 1, 0, 0),
    (1, 0, 1, 0, 1, 0),
    (1, 0, 1, 1, 0, 0),
    (1, 1, 0, 0, 0, 1),
    (1, 1, 0, 1, 1, 1),
]


def test_combiner_table_exhaustive():
    table = combiner_table()
    got = [(r.x, r.xprime, r.p, r.y, r.c, r.leak) for r in table.rows]
    assert got == EXPECTED_TABLE
    assert table.balance_percent == (50.0,) * 6


def test_build_report_on_uniform_bytes():
    data = np.random.default_rng(5).bytes(1_000_000)
    report = build_report(data)
    assert report.verdicts == {
        "entropy_linear": True,
        "byte_flat": True,
        "incompressible": True,
        "space_filling": True,
    }
    assert report.r_squared >= 0.99
    assert report.ratio <= 1.0
