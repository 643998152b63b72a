"""Shared fixtures and the acceptance-criteria summary hook.

The committed fixtures (key file, container, prose sample) are deterministic
functions of the entropy constants below; regenerating any of them with the
same constants must reproduce the committed bytes exactly.
"""

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# Entropy bytes behind the committed fixtures.
KEY_ENTROPY_HEX = "1d80c0e0"
HELLO_ENTROPY_HEX = "9d1f" + "c0ffee0042" + "ab" * 59
HELLO_PLAINTEXT = b"Hello, chaos."
MB_ENTROPY_HEX = "7731" + "c3" * 64

# Results registered by the acceptance tests; printed at the end of the run
# so each criterion gets one visible pass/fail line even under capture.
_ACCEPTANCE_LINES = []


def record_criterion(number: int, name: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE_LINES.append((number, name, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, name, ok, detail in sorted(_ACCEPTANCE_LINES):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {name}: {verdict} ({detail})")


@pytest.fixture(scope="session")
def fixture_key():
    from chaoscipher.keyspace import parse_key

    return parse_key((FIXTURES / "fixture.key").read_bytes())


@pytest.fixture(scope="session")
def prose():
    return (FIXTURES / "prose.txt").read_bytes()


@pytest.fixture(scope="session")
def mb_plaintext(prose):
    reps = (1 << 20) // len(prose) + 1
    return (prose * reps)[: 1 << 20]


@pytest.fixture(scope="session")
def mb_container(fixture_key, mb_plaintext):
    from chaoscipher.framing import seal
    from chaoscipher.keyspace import FixedEntropy

    return seal(fixture_key, mb_plaintext, FixedEntropy(bytes.fromhex(MB_ENTROPY_HEX)))
