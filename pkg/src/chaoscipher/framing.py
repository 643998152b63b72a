"""Container format: dummy-region seed hiding, packing, and sync sentinels.

Layout of a sealed message::

    "CHS1" | dummy region: D words | body words

Every word is serialized big-endian in ceil(m/8) bytes.  D, the seed slots,
and all cipher parameters come from the key, never from the file, so the
container itself reveals nothing about the geometry.

The dummy region holds the per-round session seeds at slots
(offset + r*stride) mod D; every other slot is filler drawn from the same
entropy source, so seed slots are statistically invisible.

The body is the encryption of: 8-byte big-endian plaintext length, then the
plaintext, packed big-endian into m-bit words (last word zero-padded), with
one sentinel word (plaintext 0x00A5 reduced to m bits) inserted after every
256 payload words and after the trailing partial block.  Sentinels pass
through the cipher like any other word, so they are indistinguishable from
payload on the wire; on open, every sentinel must decrypt back to the
constant, which catches corruption and wrong keys alike.
"""

from __future__ import annotations

from .cipher import cipher_init, decrypt_stream, encrypt_stream
from .keyspace import CipherKey, draw_session, draw_word

MAGIC = b"CHS1"
BLOCK_WORDS = 256
SENTINEL_BASE = 0x00A5
MAX_PLAINTEXT = 1 << 61


class ContainerError(Exception):
    """Base class for container failures."""


class BadMagicError(ContainerError):
    pass


class TruncatedError(ContainerError):
    pass


class IntegrityError(ContainerError):
    """Sentinel mismatch or structurally impossible body.

    Deliberately does not distinguish corruption from a wrong key; both
    scramble the decrypted stream the same way.
    """


class LengthHeaderError(ContainerError):
    """Decrypted length field does not match the payload actually present."""


def sentinel_word(m: int) -> int:
    """The sync constant reduced to m bits; nonzero for every width >= 4."""
    return SENTINEL_BASE & ((1 << m) - 1)


def pack_words(data: bytes, m: int) -> list[int]:
    """Pack a byte string big-endian into m-bit words, zero-padding the tail."""
    if m % 8 == 0:
        bpw = m // 8
        buf = data + b"\x00" * (-len(data) % bpw)
        return [int.from_bytes(buf[i : i + bpw], "big") for i in range(0, len(buf), bpw)]
    acc = 0
    nbits = 0
    out = []
    for b in data:
        acc = (acc << 8) | b
        nbits += 8
        while nbits >= m:
            nbits -= m
            out.append(acc >> nbits)
            acc &= (1 << nbits) - 1
    if nbits:
        out.append(acc << (m - nbits))
    return out


def unpack_words(words: list[int], byte_len: int, m: int) -> bytes:
    """Inverse of pack_words for a known byte length.

    The word count must be exactly what pack_words would have produced for
    byte_len bytes, i.e. ceil(8*byte_len / m) words.
    """
    if (8 * byte_len + m - 1) // m != len(words):
        raise ValueError(f"{len(words)} words inconsistent with byte_len={byte_len} at m={m}")
    return _words_to_bytes(words, m, byte_len)


def _words_to_bytes(words: list[int], m: int, byte_len: int) -> bytes:
    if m % 8 == 0:
        bpw = m // 8
        return b"".join(w.to_bytes(bpw, "big") for w in words)[:byte_len]
    acc = 0
    nbits = 0
    out = bytearray()
    for w in words:
        acc = (acc << m) | w
        nbits += m
        while nbits >= 8:
            nbits -= 8
            out.append(acc >> nbits)
            acc &= (1 << nbits) - 1
            if len(out) == byte_len:
                return bytes(out)
    if nbits and len(out) < byte_len:
        out.append(acc << (8 - nbits))
    return bytes(out[:byte_len])


def serialize_words(words: list[int], m: int) -> bytes:
    """Fixed-width wire form: each word big-endian in ceil(m/8) bytes."""
    bpw = (m + 7) // 8
    return b"".join(w.to_bytes(bpw, "big") for w in words)


def deserialize_words(data: bytes, m: int) -> list[int]:
    bpw = (m + 7) // 8
    if len(data) % bpw:
        raise TruncatedError(f"{len(data)} bytes is not a whole number of {bpw}-byte words")
    limit = 1 << m
    words = [int.from_bytes(data[i : i + bpw], "big") for i in range(0, len(data), bpw)]
    for w in words:
        if w >= limit:
            raise IntegrityError(f"word {w:#x} exceeds {m} bits (corrupt container or wrong width)")
    return words


def _with_sentinels(payload: list[int], m: int) -> list[int]:
    sent = sentinel_word(m)
    out = []
    for i in range(0, len(payload), BLOCK_WORDS):
        out.extend(payload[i : i + BLOCK_WORDS])
        out.append(sent)
    return out


def _body_shape(body_words: int) -> tuple[int, list[int]]:
    """Payload word count and sentinel positions for a body of given size.

    Bodies are k groups of (<=256 payload words + 1 sentinel) with only the
    last group allowed to be short, so valid sizes satisfy either
    B = 257*f or B = 257*f + rem + 1 with 1 <= rem <= 255.
    """
    b = body_words
    if b < 2:
        raise IntegrityError(f"body of {b} words cannot hold a payload and sentinel")
    if b % (BLOCK_WORDS + 1) == 0:
        full = b // (BLOCK_WORDS + 1)
        rem = 0
    else:
        full = (b - 1) // (BLOCK_WORDS + 1)
        rem = (b - 1) % (BLOCK_WORDS + 1)
        if rem == 0:
            raise IntegrityError(f"body of {b} words has an impossible block structure")
    payload = BLOCK_WORDS * full + rem
    positions = [j * (BLOCK_WORDS + 1) + BLOCK_WORDS for j in range(full)]
    if rem:
        positions.append(b - 1)
    return payload, positions


def seal(key: CipherKey, plaintext: bytes, entropy) -> bytes:
    """Encrypt plaintext into a self-contained container.

    Session seeds are drawn fresh from the entropy source per message and
    hidden in the dummy region; the caller keeps only the key.
    """
    if len(plaintext) >= MAX_PLAINTEXT:
        raise ValueError("plaintext too long for the 8-byte length header")
    session = draw_session(entropy, key.m, key.rounds)
    slots = key.seed_slots()
    dummy = [0] * key.dummy_len
    for r, slot in enumerate(slots):
        dummy[slot] = session[r]
    seed_slots = set(slots)
    for slot in range(key.dummy_len):
        if slot not in seed_slots:
            dummy[slot] = draw_word(entropy, key.m, nonzero=False)

    header = len(plaintext).to_bytes(8, "big")
    payload = pack_words(header + plaintext, key.m)
    body = encrypt_stream(cipher_init(key, session), _with_sentinels(payload, key.m))
    return MAGIC + serialize_words(dummy, key.m) + serialize_words(body, key.m)


def open_container(key: CipherKey, blob: bytes) -> bytes:
    """Decrypt and verify a container, returning the plaintext.

    Raises BadMagicError, TruncatedError, IntegrityError (corruption and
    wrong keys are indistinguishable by design), or LengthHeaderError.
    """
    if len(blob) < len(MAGIC) or blob[: len(MAGIC)] != MAGIC:
        raise BadMagicError("not a container (bad magic)")
    bpw = (key.m + 7) // 8
    dummy_bytes = key.dummy_len * bpw
    if len(blob) < len(MAGIC) + dummy_bytes:
        raise TruncatedError("container shorter than its dummy region")
    dummy = deserialize_words(blob[len(MAGIC) : len(MAGIC) + dummy_bytes], key.m)
    body_words = deserialize_words(blob[len(MAGIC) + dummy_bytes :], key.m)

    payload_count, sentinel_at = _body_shape(len(body_words))
    session = [dummy[slot] for slot in key.seed_slots()]
    if any(w == 0 for w in session):
        raise IntegrityError("zero word in a seed slot (corrupt container or wrong key)")

    stream = decrypt_stream(cipher_init(key, session), body_words)
    sent = sentinel_word(key.m)
    for pos in sentinel_at:
        if stream[pos] != sent:
            raise IntegrityError(
                f"sync sentinel mismatch at body word {pos} (corrupt container or wrong key)"
            )
    sentinel_set = set(sentinel_at)
    payload = [w for i, w in enumerate(stream) if i not in sentinel_set]
    assert len(payload) == payload_count

    capacity = payload_count * key.m // 8
    if capacity < 8:
        raise IntegrityError("payload too small for a length header")
    data = _words_to_bytes(payload, key.m, capacity)
    length = int.from_bytes(data[:8], "big")
    if (8 * (8 + length) + key.m - 1) // key.m != payload_count:
        raise LengthHeaderError(
            f"length header {length} inconsistent with {payload_count} payload words"
        )
    return data[8 : 8 + length]
