"""Self-synchronous stream cipher over fixed-point logistic maps.

Library layout:

- fxchaos: exact m-bit map arithmetic
- cipher: word-level state machine and round pipeline
- keyspace: keys, session seeds, entropy sources, key-file format
- framing: container seal/open with hidden seeds and sync sentinels
- analysis: entropy, flatness, compressibility, phase-space metrics
- attacks: known-plaintext brute force and divergence probes
- cli: the `chaoscipher` command
"""

from .cipher import CipherState, RoundPipeline, cipher_init, decrypt_stream, encrypt_stream
from .framing import open_container, seal
from .fxchaos import FxWord, Lambda, fx_from_rational, logistic_orbit, logistic_step
from .keyspace import (
    CipherKey,
    FixedEntropy,
    SystemEntropy,
    derive_xprime,
    keygen,
    parse_key,
    serialize_key,
)

__version__ = "0.1.0"

__all__ = [
    "CipherKey",
    "CipherState",
    "FixedEntropy",
    "FxWord",
    "Lambda",
    "RoundPipeline",
    "SystemEntropy",
    "cipher_init",
    "decrypt_stream",
    "derive_xprime",
    "encrypt_stream",
    "fx_from_rational",
    "keygen",
    "logistic_orbit",
    "logistic_step",
    "open_container",
    "parse_key",
    "seal",
    "serialize_key",
    "__version__",
]
