"""CNOT circuits as linear maps over GF(2).

Convention: output bit ``i`` is the XOR over ``j`` of ``M[i][j] * input[j]``,
so a gate applied after ``M`` left-multiplies it. Rows are stored bit-packed
in Python ints (bit ``j`` of ``rows[i]`` is ``M[i][j]``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit


@dataclass(frozen=True)
class TransferMatrix:
    n: int
    rows: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "TransferMatrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_array(cls, bits) -> "TransferMatrix":
        arr = np.asarray(bits, dtype=np.uint8) & 1
        n = arr.shape[0]
        if arr.shape != (n, n):
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        rows = tuple(sum(1 << int(j) for j in np.flatnonzero(arr[i])) for i in range(n))
        return cls(n, rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            for j in range(self.n):
                out[i, j] = (row >> j) & 1
        return out

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return (self.rows[i] >> j) & 1

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        """Matrix product ``self @ other`` (apply ``other`` first)."""
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = []
        for row in self.rows:
            acc = 0
            j = 0
            while row:
                if row & 1:
                    acc ^= other.rows[j]
                row >>= 1
                j += 1
            out.append(acc)
        return TransferMatrix(self.n, tuple(out))

    def apply(self, bits: Sequence[int]) -> list[int]:
        if len(bits) != self.n:
            raise ValueError(f"expected {self.n} bits, got {len(bits)}")
        x = sum(1 << j for j, b in enumerate(bits) if b)
        return [(row & x).bit_count() & 1 for row in self.rows]

    def is_identity(self) -> bool:
        return all(row == 1 << i for i, row in enumerate(self.rows))

    def rank(self) -> int:
        pivots: dict[int, int] = {}  # leading bit -> reduced row
        for row in self.rows:
            while row:
                top = row.bit_length() - 1
                if top not in pivots:
                    pivots[top] = row
                    break
                row ^= pivots[top]
        return len(pivots)

    def is_invertible(self) -> bool:
        return self.rank() == self.n


def transfer_matrix(circuit: Circuit) -> TransferMatrix:
    rows = [1 << i for i in range(circuit.qubit_count)]
    for gate in circuit.gates:
        src = rows[gate.control]
        for t in gate.targets:
            rows[t] ^= src
    return TransferMatrix(circuit.qubit_count, tuple(rows))


def simulate_basis(circuit: Circuit, bits: Sequence[int] | str) -> list[int] | str:
    """Run the circuit on one computational basis state, gate by gate.

    A bit string such as ``"10"`` gives a bit string back; a sequence of
    ints gives a list.
    """
    as_text = isinstance(bits, str)
    if as_text:
        if set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        bits = [int(ch) for ch in bits]
    if len(bits) != circuit.qubit_count:
        raise ValueError(
            f"input has {len(bits)} bits, circuit has {circuit.qubit_count} qubits"
        )
    state = [int(b) & 1 for b in bits]
    for gate in circuit.gates:
        if state[gate.control]:
            for t in gate.targets:
                state[t] ^= 1
    return "".join(map(str, state)) if as_text else state


def equivalent(a: Circuit, b: Circuit) -> bool:
    if a.qubit_count != b.qubit_count:
        raise ValueError(
            f"qubit count mismatch: {a.qubit_count} vs {b.qubit_count}"
        )
    return transfer_matrix(a) == transfer_matrix(b)
