"""Multi-target CNOT circuits and the line-oriented netlist format.

A netlist looks like::

    # comments and blank lines are ignored
    qubits 4
    cnot 3: 0 1
    cnot 0: 3

The header must be the first non-comment line and appear exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO


class NetlistError(ValueError):
    """Raised for malformed netlists and invalid gates."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CnotGate:
    control: int
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "control", int(self.control))
        if not self.targets:
            raise NetlistError("gate has no targets")
        if self.control in self.targets:
            raise NetlistError(f"control {self.control} is also a target")
        if len(set(self.targets)) != len(self.targets):
            raise NetlistError(f"duplicate target in {list(self.targets)}")
        if self.control < 0 or min(self.targets) < 0:
            raise NetlistError("qubit indices must be non-negative")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, *self.targets)


@dataclass(frozen=True)
class Circuit:
    """An ordered list of multi-target CNOTs over qubits ``0 .. qubit_count-1``.

    Gates are applied left to right.
    """

    qubit_count: int
    gates: tuple[CnotGate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.qubit_count < 1:
            raise NetlistError("qubit_count must be positive")
        for gate in self.gates:
            bad = [q for q in gate.qubits if q >= self.qubit_count]
            if bad:
                raise NetlistError(
                    f"qubit {bad[0]} out of range for {self.qubit_count} qubits"
                )

    @classmethod
    def from_pairs(cls, qubit_count: int, gates: Iterable[tuple[int, Iterable[int]]]):
        return cls(qubit_count, tuple(CnotGate(c, tuple(ts)) for c, ts in gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.qubit_count != self.qubit_count:
            raise ValueError("cannot concatenate circuits of different width")
        return Circuit(self.qubit_count, self.gates + other.gates)

    def used_qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}


def _int(token: str, lineno: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise NetlistError(f"expected integer {what}, got {token!r}", lineno) from None
    if value < 0:
        raise NetlistError(f"{what} must be non-negative, got {value}", lineno)
    return value


def parse_circuit(text: str | TextIO) -> Circuit:
    if not isinstance(text, str):
        text = text.read()
    qubit_count = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "qubits":
            if qubit_count is not None:
                raise NetlistError("duplicate 'qubits' header", lineno)
            fields = rest.split()
            if len(fields) != 1:
                raise NetlistError("header must be 'qubits <N>'", lineno)
            qubit_count = _int(fields[0], lineno, "qubit count")
            if qubit_count < 1:
                raise NetlistError("qubit count must be positive", lineno)
        elif keyword == "cnot":
            if qubit_count is None:
                raise NetlistError("'qubits' header must come first", lineno)
            head, sep, tail = rest.partition(":")
            if not sep:
                raise NetlistError("gate must be 'cnot <control>: <targets...>'", lineno)
            control = _int(head.strip(), lineno, "control")
            targets = [_int(t, lineno, "target") for t in tail.split()]
            if not targets:
                raise NetlistError("gate has no targets", lineno)
            for q in (control, *targets):
                if q >= qubit_count:
                    raise NetlistError(
                        f"qubit {q} out of range for {qubit_count} qubits", lineno
                    )
            try:
                gates.append(CnotGate(control, tuple(targets)))
            except NetlistError as exc:
                raise NetlistError(str(exc), lineno) from None
        else:
            raise NetlistError(f"unknown directive {keyword!r}", lineno)
    if qubit_count is None:
        raise NetlistError("missing 'qubits' header")
    return Circuit(qubit_count, tuple(gates))


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.qubit_count}"]
    for gate in circuit.gates:
        lines.append(f"cnot {gate.control}: " + " ".join(map(str, gate.targets)))
    return "\n".join(lines) + "\n"
