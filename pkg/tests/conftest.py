import functools

import pytest

from qch.char_subalg import char_data
from qch.qm_algebra import make_evaluation
from qch.scalar_ring import RingConfig
from qch.yang_baxter import yb_data

EXACT = RingConfig.rational("7/5")
FLOAT = RingConfig.floating(1.4)


def ring_for(kind: str) -> RingConfig:
    return EXACT if kind == "exact" else FLOAT


@functools.lru_cache(maxsize=None)
def yb(k: int, kind: str = "exact"):
    return yb_data(k, ring_for(kind))


def _freeze(spec: dict):
    return tuple(sorted((key, tuple(v) if isinstance(v, list) else v) for key, v in spec.items()))


@functools.lru_cache(maxsize=None)
def _point(k: int, frozen, kind: str):
    spec = {key: list(v) if isinstance(v, tuple) else v for key, v in frozen}
    ev = make_evaluation(yb(k, kind), spec)
    return ev, char_data(ev)


def point(k: int, spec: dict, kind: str = "exact"):
    """Cached (Evaluation, CharData) for a spec dict."""
    return _point(k, _freeze(spec), kind)


TORUS = {
    2: {"kind": "torus", "F": "P", "t": [2, 3]},
    3: {"kind": "torus", "F": "P", "t": [2, 4, 8]},
    4: {"kind": "torus", "F": "P", "t": [2, 3, 10, 15]},
    5: {"kind": "torus", "F": "P", "t": [2, 3, 6, 12, 18]},
}
REFLECTION = {
    2: {"kind": "reflection", "F": "P", "t": [], "a": 2, "c": 3},
    4: {"kind": "reflection", "F": "P", "t": [2], "a": 3, "c": 5},
}


@pytest.fixture
def exact():
    return EXACT


@pytest.fixture
def floating():
    return FLOAT


ACCEPTANCE_LINES: list[str] = []


def acceptance_line(n: int, ok: bool, what: str) -> str:
    """Print and remember one PASS/FAIL line for an acceptance criterion."""
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {what}"
    print(line, flush=True)
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
