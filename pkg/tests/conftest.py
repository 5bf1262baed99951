import pytest

from gkalab.scheme import SchemeParams
from gkalab.session import Session


@pytest.fixture
def params():
    return SchemeParams(1009, 12, 2, 4)


@pytest.fixture
def make_session(params):
    def make(variant="chh", roster=(1, 2, 3, 4, 5), seed=0, p=None):
        prm = params if p is None else SchemeParams(p, params.n, params.t, params.h)
        return Session(prm, roster, variant, seed)
    return make


def flip(data: bytes, index: int, mask: int = 0x01) -> bytes:
    b = bytearray(data)
    b[index] ^= mask
    return bytes(b)


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}" + (f"  ({detail})" if detail else ""))
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
