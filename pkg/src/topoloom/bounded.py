"""Bounded synthesis: a fixed-height field woven by the controls.

Qubit ``i`` lives on row ``i + 1``; rows ``0`` and ``|Q| + 1`` are buffer
rows where a control turns around. A full weave takes the control down to
the bottom buffer, up to the top buffer and back down to its home row, three
columns in all, and so passes every other qubit row. With the directional
heuristic, a gate whose targets all sit on one side of the control only
sweeps that side and returns, using two columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .circuit import Circuit, CnotGate
from .field import NO_QUBIT, Field, Primitive


class Direction(Enum):
    FULL_WEAVE = "full"
    UP_ONLY = "up"
    DOWN_ONLY = "down"


@dataclass(frozen=True)
class WeavePlan:
    gate: CnotGate
    direction: Direction
    start_col: int

    @property
    def cols_used(self) -> int:
        return 3 if self.direction is Direction.FULL_WEAVE else 2


def choose_direction(gate: CnotGate, heuristic: bool = True) -> Direction:
    if heuristic:
        if all(t < gate.control for t in gate.targets):
            return Direction.UP_ONLY
        if all(t > gate.control for t in gate.targets):
            return Direction.DOWN_ONLY
    return Direction.FULL_WEAVE


def plan_weaves(circuit: Circuit, heuristic: bool = True) -> list[WeavePlan]:
    plans = []
    col = 0
    for gate in circuit.gates:
        plan = WeavePlan(gate, choose_direction(gate, heuristic), col)
        plans.append(plan)
        col += plan.cols_used
    return plans


def synth_bounded(circuit: Circuit, heuristic: bool = True) -> Field:
    n = circuit.qubit_count
    plans = plan_weaves(circuit, heuristic)
    rows = n + 2
    cols = max(1, sum(p.cols_used for p in plans))
    bottom = rows - 1

    h = np.full((rows, cols), NO_QUBIT, dtype=np.int32)
    h[1:bottom, :] = np.arange(n, dtype=np.int32)[:, None]
    v = np.full((rows, cols), NO_QUBIT, dtype=np.int32)
    prim = np.zeros((rows, cols), dtype=np.int8)
    prim[1:bottom, :] = Primitive.WIRE_H

    def column(col: int, first: int, last: int, q: int) -> None:
        # vertical strand of q through rows first..last inclusive
        v[first:last + 1, col] = q
        span = prim[first:last + 1, col]
        span[:] = np.where(h[first:last + 1, col] != NO_QUBIT, Primitive.CROSS, Primitive.WIRE_V)

    def bend(r: int, col: int, kind: Primitive, q: int) -> None:
        prim[r, col] = kind
        h[r, col] = q
        v[r, col] = q

    for plan in plans:
        c = plan.gate.control
        home = c + 1
        j = plan.start_col
        below = [t + 1 for t in plan.gate.targets if t > c]
        above = [t + 1 for t in plan.gate.targets if t < c]
        if plan.direction is Direction.DOWN_ONLY:
            column(j, home, bottom, c)
            column(j + 1, home, bottom, c)
            bend(home, j, Primitive.BEND_SW, c)
            bend(bottom, j, Primitive.BEND_NE, c)
            bend(bottom, j + 1, Primitive.BEND_NW, c)
            bend(home, j + 1, Primitive.BEND_SE, c)
            prim[below, j] = Primitive.CNOT
        elif plan.direction is Direction.UP_ONLY:
            column(j, 0, home, c)
            column(j + 1, 0, home, c)
            bend(home, j, Primitive.BEND_NW, c)
            bend(0, j, Primitive.BEND_SE, c)
            bend(0, j + 1, Primitive.BEND_SW, c)
            bend(home, j + 1, Primitive.BEND_NE, c)
            prim[above, j] = Primitive.CNOT
        else:
            h[home, j + 1] = NO_QUBIT
            column(j, home, bottom, c)
            column(j + 1, 0, bottom, c)
            column(j + 2, 0, home, c)
            bend(home, j, Primitive.BEND_SW, c)
            bend(bottom, j, Primitive.BEND_NE, c)
            bend(bottom, j + 1, Primitive.BEND_NW, c)
            bend(0, j + 1, Primitive.BEND_SE, c)
            bend(0, j + 2, Primitive.BEND_SW, c)
            bend(home, j + 2, Primitive.BEND_NE, c)
            # first crossing of each target row gets the CNOT
            prim[below, j] = Primitive.CNOT
            prim[above, j + 1] = Primitive.CNOT
    return Field._adopt(prim, h, v)
