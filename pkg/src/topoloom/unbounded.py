"""Unbounded synthesis: the field grows a fresh row and column per control move.

Between gates every qubit sits on a row. For a gate the control leaves its
row through a bend, walks down a fresh column (CNOT on each target row,
CROSS on every other live row) and bends east into a fresh bottom row.
Targets that sit above the control cannot be reached walking down, so they
are first moved to fresh bottom rows, each through its own column.

A qubit seen for the first time as a target gets a new row entering from
the west edge. One seen first as a control gets a column instead: it enters
from the top edge straight into its gate column, so every target lies below
it and it needs no row of its own until it lands.

Rows and columns are handed out monotonically, so the field grows along the
diagonal and every row or column allocated is occupied.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .circuit import Circuit, CnotGate
from .field import NO_QUBIT, Field, Port, Primitive, Terminus


@dataclass
class UnboundedState:
    row_of: dict[int, int] = dc_field(default_factory=dict)
    row_start: dict[int, int] = dc_field(default_factory=dict)
    next_free_row: int = 0
    next_free_col: int = 0
    # (row, first_col, last_col, qubit)
    h_runs: list[tuple[int, int, int, int]] = dc_field(default_factory=list)
    # (col, top_row, bottom_row, qubit)
    v_runs: list[tuple[int, int, int, int]] = dc_field(default_factory=list)
    cnots: list[tuple[int, int]] = dc_field(default_factory=list)
    # columns whose control enters from the top edge
    entered: list[int] = dc_field(default_factory=list)

    def insert(self, q: int) -> None:
        self.row_of[q] = self.next_free_row
        self.row_start[q] = 0
        self.next_free_row += 1

    def drop(self, q: int, targets: tuple[int, ...] = ()) -> int:
        """Move ``q`` from its row down a fresh column into a fresh row."""
        col = self.next_free_col
        self.next_free_col += 1
        top = self.row_of[q]
        bottom = self.next_free_row
        self.next_free_row += 1
        self.h_runs.append((top, self.row_start[q], col, q))
        self.v_runs.append((col, top, bottom, q))
        for t in targets:
            self.cnots.append((self.row_of[t], col))
        self.row_of[q] = bottom
        self.row_start[q] = col
        return col

    def enter(self, q: int, targets: tuple[int, ...]) -> None:
        """Bring a new control in from the top edge down a fresh column."""
        col = self.next_free_col
        self.next_free_col += 1
        bottom = self.next_free_row
        self.next_free_row += 1
        self.v_runs.append((col, 0, bottom, q))
        self.entered.append(col)
        for t in targets:
            self.cnots.append((self.row_of[t], col))
        self.row_of[q] = bottom
        self.row_start[q] = col

    def place(self, gate: CnotGate) -> None:
        c = gate.control
        for t in gate.targets:
            if t not in self.row_of:
                self.insert(t)
            elif c in self.row_of and self.row_of[t] < self.row_of[c]:
                self.drop(t)
        if c in self.row_of:
            self.drop(c, gate.targets)
        else:
            self.enter(c, gate.targets)


def synth_unbounded(circuit: Circuit) -> Field:
    state = UnboundedState()
    for gate in circuit.gates:
        state.place(gate)
    for q in range(circuit.qubit_count):
        if q not in state.row_of:
            state.insert(q)
    rows = state.next_free_row
    cols = max(state.next_free_col, 1)
    return _render(state, rows, cols)


def _render(state: UnboundedState, rows: int, cols: int) -> Field:
    h = np.full((rows, cols), NO_QUBIT, dtype=np.int32)
    v = np.full((rows, cols), NO_QUBIT, dtype=np.int32)
    for r, a, b, q in state.h_runs:
        h[r, a:b + 1] = q
    for q, r in state.row_of.items():
        h[r, state.row_start[q]:] = q
    for c, top, bottom, q in state.v_runs:
        v[top:bottom + 1, c] = q

    has_h = h != NO_QUBIT
    has_v = v != NO_QUBIT
    prim = np.zeros((rows, cols), dtype=np.int8)
    prim[has_h] = Primitive.WIRE_H
    prim[has_v] = Primitive.WIRE_V
    prim[has_h & has_v] = Primitive.CROSS
    if state.v_runs:
        runs = np.array(state.v_runs, dtype=np.int64)
        prim[runs[:, 1], runs[:, 0]] = Primitive.BEND_SW
        prim[runs[:, 2], runs[:, 0]] = Primitive.BEND_NE
    if state.entered:
        top = np.array(state.entered, dtype=np.int64)
        prim[0, top] = np.where(has_h[0, top], Primitive.CROSS, Primitive.WIRE_V)
    if state.cnots:
        cells = np.array(state.cnots, dtype=np.int64)
        prim[cells[:, 0], cells[:, 1]] = Primitive.CNOT
    termini = [Terminus(0, int(c), Port.N, "init") for c in state.entered]
    return Field._adopt(prim, h, v, termini)
