from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from topoloom.circuit import Circuit, CnotGate  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@st.composite
def circuits(draw, min_qubits=2, max_qubits=7, max_gates=12):
    n = draw(st.integers(min_qubits, max_qubits))
    gates = []
    for _ in range(draw(st.integers(0, max_gates if n > 1 else 0))):
        control = draw(st.integers(0, n - 1))
        others = [q for q in range(n) if q != control]
        targets = draw(st.lists(st.sampled_from(others), min_size=1, max_size=len(others), unique=True))
        gates.append(CnotGate(control, tuple(targets)))
    return Circuit(n, tuple(gates))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
