"""Read a gate list back out of a field.

A control segment is a stretch of one qubit's path that runs through
vertical strands and U-turns only (a U-turn being two adjacent bends that
open to the same side), and crosses at least one CNOT cell as the vertical
(control) strand. Each segment becomes one multi-target CNOT;
segments are ordered by their leftmost column since a field is consumed
from left to right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .circuit import Circuit, CnotGate
from .field import IS_BEND, PORT_BIT, Field, Port, Primitive, StrandRuns, termini_of


class ExtractionError(ValueError):
    pass


class AmbiguousOrder(ExtractionError):
    pass


class MalformedField(ExtractionError):
    pass


@dataclass(frozen=True)
class ControlSegment:
    qubit: int
    column_range: tuple[int, int]
    cnot_cells: tuple[tuple[int, int], ...]


def _home_rows(field: Field) -> set[tuple[int, int]]:
    entries, exits = termini_of(field)
    home = set()
    for table in (entries, exits):
        for q, ends in table.items():
            for r, _, port in ends:
                if port in (Port.W, Port.E):
                    home.add((r, q))
    return home


def control_segments(field: Field) -> list[ControlSegment]:
    """All control segments, sorted by first column."""
    cols = field.cols
    flat_prim = field.prim.ravel()
    runs = StrandRuns(field)
    if runs.n_v == 0:
        return []
    cnots = np.flatnonzero(flat_prim == Primitive.CNOT)
    if cnots.size == 0:
        return []

    # Two bends side by side that both open north (or both south) form a
    # U-turn and keep the qubit in control mode, unless they lie on the row
    # the qubit enters or leaves by: reaching that row turns the control back
    # into a target. A staircase (one bend opening north, the other south)
    # is a control arriving on a row and leaving it again, i.e. two gates.
    is_bend = IS_BEND[flat_prim]
    ports = field.ports.ravel()
    same_side = (ports[:-1] & ports[1:] & (PORT_BIT[Port.N] | PORT_BIT[Port.S])) != 0
    left = np.flatnonzero(is_bend[:-1] & is_bend[1:] & same_side
                          & ((ports[:-1] & PORT_BIT[Port.E]) != 0))
    left = left[left % cols != cols - 1]  # pairs wrapping to the next row
    if left.size:
        home = _home_rows(field)
        owners_h = field.h.ravel()
        keep = [k for k, i in enumerate(left)
                if (int(i // cols), int(owners_h[i])) not in home]
        left = left[keep]
    a = runs.v_run(left) - runs.n_h
    b = runs.v_run(left + 1) - runs.n_h
    graph = coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(runs.n_v, runs.n_v))
    _, labels = connected_components(graph, directed=False)

    v_col = runs.v_starts % cols
    n_labels = int(labels.max()) + 1
    first = np.full(n_labels, cols, dtype=np.int64)
    last = np.full(n_labels, -1, dtype=np.int64)
    np.minimum.at(first, labels, v_col)
    np.maximum.at(last, labels, v_col)

    seg_of_cnot = labels[runs.v_run(cnots) - runs.n_h]
    segments = []
    order = np.lexsort((cnots // cols, cnots % cols, seg_of_cnot))
    owners = field.v.ravel()
    bounds = np.flatnonzero(np.diff(seg_of_cnot[order])) + 1
    for group in np.split(order, bounds):
        label = int(seg_of_cnot[group[0]])
        cells = tuple((int(i // cols), int(i % cols)) for i in cnots[group])
        segments.append(ControlSegment(
            int(owners[cnots[group[0]]]),
            (int(first[label]), int(last[label])),
            cells,
        ))
    segments.sort(key=lambda s: (s.column_range, s.cnot_cells))
    return segments


def extract(field: Field, qubit_count: int | None = None) -> Circuit:
    """One CNOT per control segment, in left-to-right order.

    The field is assumed to validate. ``qubit_count`` defaults to one more
    than the largest qubit id in the field.
    """
    segments = control_segments(field)
    for prev, seg in zip(segments, segments[1:]):
        if seg.column_range[0] <= prev.column_range[1]:
            raise AmbiguousOrder(
                f"control segments of qubits {prev.qubit} (cols {prev.column_range}) and "
                f"{seg.qubit} (cols {seg.column_range}) overlap"
            )
    gates = []
    for seg in segments:
        targets = tuple(int(field.h[r, c]) for r, c in seg.cnot_cells)
        if len(set(targets)) != len(targets):
            raise MalformedField(
                f"qubit {seg.qubit} targets the same qubit twice in columns {seg.column_range}"
            )
        gates.append(CnotGate(seg.qubit, targets))
    if qubit_count is None:
        qubits = field.qubits()
        qubit_count = max(qubits) + 1 if qubits else 1
    return Circuit(qubit_count, tuple(gates))
