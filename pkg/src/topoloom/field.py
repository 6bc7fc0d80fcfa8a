"""Two-dimensional fields of topological primitives.

A field is a rectangular grid. Every cell holds one primitive; the strands a
primitive carries touch the compass ports of the cell. Horizontal ports
(W/E) belong to the cell's ``h`` owner, vertical ports (N/S) to its ``v``
owner. Inputs enter on the west edge of column 0, outputs leave on the east
edge of the last column. A strand may also begin or end elsewhere when the
dangling port is flagged as a terminus (``init`` or ``measure``).

The grid is stored as three numpy arrays (primitive code, h owner, v owner,
``-1`` meaning no owner) so that validation stays vectorised on the
multi-million-cell fields the unbounded synthesizer produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Mapping, NamedTuple, TextIO

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

NO_QUBIT = -1


class Primitive(IntEnum):
    EMPTY = 0
    WIRE_H = 1
    WIRE_V = 2
    BEND_NE = 3
    BEND_NW = 4
    BEND_SE = 5
    BEND_SW = 6
    CROSS = 7
    CNOT = 8


class Port(str, Enum):
    N = "N"
    E = "E"
    S = "S"
    W = "W"

    @property
    def opposite(self) -> "Port":
        return _OPPOSITE[self]

    @property
    def step(self) -> tuple[int, int]:
        return _STEP[self]


_OPPOSITE = {Port.N: Port.S, Port.S: Port.N, Port.E: Port.W, Port.W: Port.E}
_STEP = {Port.N: (-1, 0), Port.S: (1, 0), Port.E: (0, 1), Port.W: (0, -1)}

# strands of each primitive, as port pairs
STRANDS: dict[Primitive, tuple[tuple[Port, Port], ...]] = {
    Primitive.EMPTY: (),
    Primitive.WIRE_H: ((Port.W, Port.E),),
    Primitive.WIRE_V: ((Port.N, Port.S),),
    Primitive.BEND_NE: ((Port.N, Port.E),),
    Primitive.BEND_NW: ((Port.N, Port.W),),
    Primitive.BEND_SE: ((Port.S, Port.E),),
    Primitive.BEND_SW: ((Port.S, Port.W),),
    Primitive.CROSS: ((Port.N, Port.S), (Port.W, Port.E)),
    Primitive.CNOT: ((Port.N, Port.S), (Port.W, Port.E)),
}

BENDS = frozenset({Primitive.BEND_NE, Primitive.BEND_NW, Primitive.BEND_SE, Primitive.BEND_SW})
BEND_FOR_PORTS = {
    frozenset(ports): prim for prim in BENDS for ports in STRANDS[prim]
}


def _port_table(port: Port) -> np.ndarray:
    return np.array(
        [any(port in pair for pair in STRANDS[p]) for p in Primitive], dtype=bool
    )


HAS = {port: _port_table(port) for port in Port}
HAS_H = HAS[Port.W] | HAS[Port.E]
HAS_V = HAS[Port.N] | HAS[Port.S]
IS_BEND = np.array([p in BENDS for p in Primitive], dtype=bool)
IS_TWO_STRAND = np.array([p in (Primitive.CROSS, Primitive.CNOT) for p in Primitive], dtype=bool)

# port occupancy packed into one byte per primitive, for whole-field passes
PORT_BIT = {Port.N: 1, Port.E: 2, Port.S: 4, Port.W: 8}
PORT_MASK = sum(HAS[port].astype(np.uint8) * bit for port, bit in PORT_BIT.items()).astype(np.uint8)


class Cell(NamedTuple):
    primitive: Primitive
    h: int | None = None
    v: int | None = None

    def owner(self, port: Port) -> int | None:
        return self.h if port in (Port.W, Port.E) else self.v


@dataclass(frozen=True, order=True)
class Terminus:
    """A flagged strand end away from the west/east edges."""

    row: int
    col: int
    port: Port
    kind: str  # "init" or "measure"

    def __post_init__(self):
        object.__setattr__(self, "port", Port(self.port))
        if self.kind not in ("init", "measure"):
            raise ValueError(f"terminus kind must be init or measure, got {self.kind!r}")


@dataclass(frozen=True)
class Violation:
    row: int
    col: int
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"({self.row},{self.col}) {self.rule}"
        return f"{text}: {self.detail}" if self.detail else text


class FieldFormatError(ValueError):
    pass


class Field:
    """Immutable grid of primitives with per-cell strand owners."""

    __slots__ = ("prim", "h", "v", "termini", "_ports")

    def __init__(self, prim, h, v, termini: Iterable[Terminus] = ()):
        prim = np.array(prim, dtype=np.int8)
        h = np.array(h, dtype=np.int32)
        v = np.array(v, dtype=np.int32)
        if prim.ndim != 2 or prim.shape != h.shape or prim.shape != v.shape:
            raise ValueError("prim, h and v must be 2-D arrays of equal shape")
        if prim.shape[0] < 1 or prim.shape[1] < 1:
            raise ValueError("a field needs at least one row and one column")
        if prim.min() < 0 or prim.max() >= len(Primitive):
            raise ValueError("unknown primitive code")
        for arr in (prim, h, v):
            arr.setflags(write=False)
        self.prim, self.h, self.v = prim, h, v
        self.termini = tuple(sorted(termini))
        self._ports = None

    @classmethod
    def _adopt(cls, prim: np.ndarray, h: np.ndarray, v: np.ndarray, termini=()) -> "Field":
        # no-copy constructor for synthesizers that built the arrays themselves
        self = cls.__new__(cls)
        for arr in (prim, h, v):
            arr.setflags(write=False)
        self.prim, self.h, self.v = prim, h, v
        self.termini = tuple(sorted(termini))
        self._ports = None
        return self

    @classmethod
    def from_cells(
        cls,
        rows: int,
        cols: int,
        cells: Mapping[tuple[int, int], Cell | tuple],
        termini: Iterable[Terminus] = (),
    ) -> "Field":
        prim = np.zeros((rows, cols), dtype=np.int8)
        h = np.full((rows, cols), NO_QUBIT, dtype=np.int32)
        v = np.full((rows, cols), NO_QUBIT, dtype=np.int32)
        for (r, c), cell in cells.items():
            cell = Cell(*cell)
            prim[r, c] = Primitive(cell.primitive)
            h[r, c] = NO_QUBIT if cell.h is None else cell.h
            v[r, c] = NO_QUBIT if cell.v is None else cell.v
        return cls(prim, h, v, termini)

    @classmethod
    def wires(cls, qubits: int, cols: int = 1) -> "Field":
        """``qubits`` parallel horizontal wires, qubit ``i`` on row ``i``."""
        prim = np.full((qubits, cols), Primitive.WIRE_H, dtype=np.int8)
        h = np.repeat(np.arange(qubits, dtype=np.int32)[:, None], cols, axis=1)
        v = np.full((qubits, cols), NO_QUBIT, dtype=np.int32)
        return cls(prim, h, v)

    @property
    def rows(self) -> int:
        return self.prim.shape[0]

    @property
    def cols(self) -> int:
        return self.prim.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.prim.shape

    def __getitem__(self, index: tuple[int, int]) -> Cell:
        r, c = index
        h, v = int(self.h[r, c]), int(self.v[r, c])
        return Cell(
            Primitive(int(self.prim[r, c])),
            None if h == NO_QUBIT else h,
            None if v == NO_QUBIT else v,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.prim, other.prim)
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.v, other.v)
            and self.termini == other.termini
        )

    def __repr__(self) -> str:
        return f"Field(rows={self.rows}, cols={self.cols})"

    def qubits(self) -> set[int]:
        hi = max(int(self.h.max()), int(self.v.max()))
        if hi < 0:
            return set()
        seen = np.zeros(hi + 2, dtype=bool)
        seen[self.h.ravel() + 1] = True
        seen[self.v.ravel() + 1] = True
        return {int(q) for q in np.flatnonzero(seen[1:])}

    @property
    def ports(self) -> np.ndarray:
        """Occupied ports of every cell as ``PORT_BIT`` flags (computed once)."""
        if self._ports is None:
            self._ports = PORT_MASK[self.prim]
            self._ports.setflags(write=False)
        return self._ports

    def cells(self):
        """Yield ``((row, col), Cell)`` for every non-empty cell, row-major."""
        for r, c in np.argwhere(self.prim != Primitive.EMPTY):
            yield (int(r), int(c)), self[int(r), int(c)]

    def count(self, primitive: Primitive) -> int:
        return int(np.count_nonzero(self.prim == primitive))


def area(field: Field) -> int:
    return field.rows * field.cols


# -- validation ------------------------------------------------------------


def _cells_where(mask: np.ndarray):
    for r, c in np.argwhere(mask):
        yield int(r), int(c)


def _terminus_lookup(field: Field) -> dict[tuple[int, int, Port], str]:
    return {(t.row, t.col, t.port): t.kind for t in field.termini}


def _cell_violations(field: Field) -> list[Violation]:
    prim, h, v = field.prim, field.h, field.v
    h_set, v_set = h != NO_QUBIT, v != NO_QUBIT
    bad_h = h_set != HAS_H[prim]
    bad_v = v_set != HAS_V[prim]
    same = h == v
    bad_bend = IS_BEND[prim] & ~same
    bad_two = IS_TWO_STRAND[prim] & same
    if not (bad_h.any() or bad_v.any() or bad_bend.any() or bad_two.any()
            or h.min() < NO_QUBIT or v.min() < NO_QUBIT):
        return []
    out = []
    for r, c in _cells_where(bad_h):
        out.append(Violation(r, c, "h-owner", "h owner must be set iff the cell has W/E ports"))
    for r, c in _cells_where(bad_v):
        out.append(Violation(r, c, "v-owner", "v owner must be set iff the cell has N/S ports"))
    for r, c in _cells_where((h < NO_QUBIT) | (v < NO_QUBIT)):
        out.append(Violation(r, c, "owner-range", "negative qubit id"))
    for r, c in _cells_where(bad_bend):
        out.append(Violation(r, c, "bend-owner", "bend carries one strand; h and v must match"))
    for r, c in _cells_where(bad_two):
        out.append(Violation(r, c, "self-crossing", "CROSS/CNOT strands need distinct qubits"))
    return out


def _continuity_violations(field: Field, flagged) -> list[Violation]:
    prim, h, v = field.prim, field.h, field.v
    out = []
    ports = field.ports
    east = (ports[:, :-1] & PORT_BIT[Port.E]) != 0
    west = (ports[:, 1:] & PORT_BIT[Port.W]) != 0
    open_ew = east != west
    owner_ew = east & west & (h[:, :-1] != h[:, 1:])
    if open_ew.any():
        for r, c in _cells_where(open_ew):
            if east[r, c] and (r, c, Port.E) not in flagged:
                out.append(Violation(r, c, "continuity", f"E port open towards ({r},{c + 1})"))
            elif west[r, c] and (r, c + 1, Port.W) not in flagged:
                out.append(Violation(r, c + 1, "continuity", f"W port open towards ({r},{c})"))
    if owner_ew.any():
        for r, c in _cells_where(owner_ew):
            out.append(Violation(r, c, "continuity",
                                 f"E owner {h[r, c]} != W owner {h[r, c + 1]} of ({r},{c + 1})"))
    south = (ports[:-1, :] & PORT_BIT[Port.S]) != 0
    north = (ports[1:, :] & PORT_BIT[Port.N]) != 0
    open_ns = south != north
    owner_ns = south & north & (v[:-1, :] != v[1:, :])
    if open_ns.any():
        for r, c in _cells_where(open_ns):
            if south[r, c] and (r, c, Port.S) not in flagged:
                out.append(Violation(r, c, "continuity", f"S port open towards ({r + 1},{c})"))
            elif north[r, c] and (r + 1, c, Port.N) not in flagged:
                out.append(Violation(r + 1, c, "continuity", f"N port open towards ({r},{c})"))
    if owner_ns.any():
        for r, c in _cells_where(owner_ns):
            out.append(Violation(r, c, "continuity",
                                 f"S owner {v[r, c]} != N owner {v[r + 1, c]} of ({r + 1},{c})"))
    rows = field.rows
    for c in np.flatnonzero(HAS[Port.N][prim[0]]):
        if (0, int(c), Port.N) not in flagged:
            out.append(Violation(0, int(c), "boundary", "strand leaves through the top edge"))
    for c in np.flatnonzero(HAS[Port.S][prim[-1]]):
        if (rows - 1, int(c), Port.S) not in flagged:
            out.append(Violation(rows - 1, int(c), "boundary", "strand leaves through the bottom edge"))
    return out


def _terminus_violations(field: Field) -> list[Violation]:
    prim = field.prim
    rows, cols = field.shape
    out = []
    seen = set()
    for t in field.termini:
        if (t.row, t.col, t.port) in seen:
            out.append(Violation(t.row, t.col, "terminus", f"port {t.port.value} flagged twice"))
            continue
        seen.add((t.row, t.col, t.port))
        if not (0 <= t.row < rows and 0 <= t.col < cols):
            out.append(Violation(t.row, t.col, "terminus", "outside the field"))
            continue
        if not HAS[t.port][prim[t.row, t.col]]:
            out.append(Violation(t.row, t.col, "terminus", f"port {t.port.value} is not occupied"))
            continue
        dr, dc = t.port.step
        nr, nc = t.row + dr, t.col + dc
        if 0 <= nr < rows and 0 <= nc < cols and HAS[t.port.opposite][prim[nr, nc]]:
            out.append(Violation(t.row, t.col, "terminus", f"port {t.port.value} is connected"))
    return out


def validate(field: Field) -> list[Violation]:
    """Check every composition rule; an empty list means the field is valid."""
    out = _cell_violations(field)
    out += _terminus_violations(field)
    out += _continuity_violations(field, _terminus_lookup(field))
    if out:
        return out
    return _path_violations(field)


def termini_of(field: Field) -> tuple[dict[int, list], dict[int, list]]:
    """Entry and exit points of every qubit: ``{qubit: [(row, col, port), ...]}``."""
    prim, h, v = field.prim, field.h, field.v
    flagged = _terminus_lookup(field)
    entries: dict[int, list] = {}
    exits: dict[int, list] = {}
    for r in np.flatnonzero(HAS[Port.W][prim[:, 0]]):
        r = int(r)
        if (r, 0, Port.W) not in flagged:
            entries.setdefault(int(h[r, 0]), []).append((r, 0, Port.W))
    last = field.cols - 1
    for r in np.flatnonzero(HAS[Port.E][prim[:, last]]):
        r = int(r)
        if (r, last, Port.E) not in flagged:
            exits.setdefault(int(h[r, last]), []).append((r, last, Port.E))
    for t in field.termini:
        if not (0 <= t.row < field.rows and 0 <= t.col < field.cols):
            continue
        owner = int(h[t.row, t.col] if t.port in (Port.W, Port.E) else v[t.row, t.col])
        target = entries if t.kind == "init" else exits
        target.setdefault(owner, []).append((t.row, t.col, t.port))
    return entries, exits


class StrandRuns:
    """Maximal straight runs of linked ports, identified by their first cell.

    Horizontal runs are numbered ``0 .. n_h-1`` in row-major order of their
    first cell, vertical runs ``n_h .. n_h+n_v-1`` in column-major order.
    Lookups only touch the queried cells, so the per-cell work stays a
    handful of vectorised passes.
    """

    def __init__(self, field: Field):
        ports = field.ports
        self.rows, self.cols = field.shape
        # a run starts where a cell carries the axis but is not linked backwards
        start_h = (ports & (PORT_BIT[Port.W] | PORT_BIT[Port.E])) != 0
        start_h[:, 1:] &= (ports[:, 1:] & (ports[:, :-1] << 2) & PORT_BIT[Port.W]) == 0
        start_v = (ports & (PORT_BIT[Port.N] | PORT_BIT[Port.S])) != 0
        start_v[1:, :] &= (ports[1:, :] & (ports[:-1, :] >> 2) & PORT_BIT[Port.N]) == 0
        self.h_starts = np.flatnonzero(start_h)
        v_flat = np.flatnonzero(start_v)
        v_keys = (v_flat % self.cols) * self.rows + v_flat // self.cols
        order = np.argsort(v_keys)
        self.v_keys = v_keys[order]
        self.v_starts = v_flat[order]
        self.n_h = len(self.h_starts)
        self.n_v = len(self.v_starts)

    def h_run(self, cells: np.ndarray) -> np.ndarray:
        """Horizontal run id of W/E-carrying cells (flat indices)."""
        return np.searchsorted(self.h_starts, cells, side="right") - 1

    def v_run(self, cells: np.ndarray) -> np.ndarray:
        """Vertical run id (offset by ``n_h``) of N/S-carrying cells."""
        keys = (cells % self.cols) * self.rows + cells // self.cols
        return np.searchsorted(self.v_keys, keys, side="right") - 1 + self.n_h

    def v_column(self, run_ids: np.ndarray) -> np.ndarray:
        return self.v_starts[run_ids - self.n_h] % self.cols


def strand_runs(field: Field) -> StrandRuns:
    return StrandRuns(field)


def strand_components(field: Field):
    """Connected strand components of a port-continuous field.

    Returns ``(labels, owner)`` indexed by run id: the component of every
    straight run and the qubit that owns it.
    """
    runs = StrandRuns(field)
    bends = np.flatnonzero(IS_BEND[field.prim.ravel()])
    n = runs.n_h + runs.n_v
    graph = coo_matrix(
        (np.ones(len(bends), dtype=np.int8), (runs.h_run(bends), runs.v_run(bends))),
        shape=(n, n),
    )
    _, labels = connected_components(graph, directed=False)
    owner = np.concatenate([field.h.ravel()[runs.h_starts], field.v.ravel()[runs.v_starts]])
    return labels, owner


def _path_violations(field: Field) -> list[Violation]:
    out: list[Violation] = []
    entries, exits = termini_of(field)
    labels, owner = strand_components(field)
    qubits = sorted({int(q) for q in np.unique(owner)})
    for q in qubits:
        e_in, e_out = entries.get(q, []), exits.get(q, [])
        if len(e_in) != 1:
            r, c, _ = e_in[1] if e_in else _first_cell(field, q)
            out.append(Violation(r, c, "path", f"qubit {q} has {len(e_in)} entry termini"))
        if len(e_out) != 1:
            r, c, _ = e_out[1] if e_out else _first_cell(field, q)
            out.append(Violation(r, c, "path", f"qubit {q} has {len(e_out)} exit termini"))
    if not qubits:
        return out
    comp_owner = np.full(labels.max() + 1, -1, dtype=np.int64)
    comp_owner[labels] = owner
    counts = np.bincount(comp_owner, minlength=qubits[-1] + 1)
    for q in qubits:
        if counts[q] != 1:
            r, c, _ = _first_cell(field, q)
            out.append(Violation(r, c, "path",
                                 f"qubit {q} strands form {counts[q]} disconnected pieces"))
    return out


def _first_cell(field: Field, q: int):
    hit = np.argwhere((field.h == q) | (field.v == q))
    r, c = hit[0]
    return int(r), int(c), None


# -- tracing ---------------------------------------------------------------


class TraceStep(NamedTuple):
    row: int
    col: int
    port_in: Port
    port_out: Port


def _strand_through(cell: Cell, port_in: Port) -> Port:
    for a, b in STRANDS[cell.primitive]:
        if port_in is a:
            return b
        if port_in is b:
            return a
    raise ValueError(f"{cell.primitive.name} has no strand through port {port_in.value}")


def trace(field: Field, qubit: int) -> list[TraceStep]:
    """Path of ``qubit`` from its entry terminus to its exit terminus."""
    entries, exits = termini_of(field)
    if qubit not in entries:
        raise KeyError(f"qubit {qubit} does not enter the field")
    if len(entries[qubit]) != 1:
        raise ValueError(f"qubit {qubit} has {len(entries[qubit])} entries")
    stop = {(r, c, p) for r, c, p in exits.get(qubit, [])}
    r, c, port_in = entries[qubit][0]
    rows, cols = field.shape
    path: list[TraceStep] = []
    seen = set()
    while True:
        cell = field[r, c]
        if cell.owner(port_in) != qubit:
            raise ValueError(f"strand at ({r},{c}) port {port_in.value} is not qubit {qubit}")
        port_out = _strand_through(cell, port_in)
        key = (r, c, frozenset((port_in, port_out)))
        if key in seen:
            raise ValueError(f"qubit {qubit} revisits ({r},{c})")
        seen.add(key)
        path.append(TraceStep(r, c, port_in, port_out))
        if (r, c, port_out) in stop:
            return path
        dr, dc = port_out.step
        r, c = r + dr, c + dc
        if not (0 <= r < rows and 0 <= c < cols):
            raise ValueError(f"qubit {qubit} leaves the field without an exit terminus")
        port_in = port_out.opposite


# -- file format -------------------------------------------------------------


def serialize_field(field: Field) -> str:
    lines = [f"field {field.rows} {field.cols}"]
    prim, h, v = field.prim, field.h, field.v
    names = [p.name for p in Primitive]
    for r, c in np.argwhere(prim != Primitive.EMPTY):
        hq, vq = h[r, c], v[r, c]
        lines.append(
            f"cell {r} {c} {names[prim[r, c]]} "
            f"h={'-' if hq == NO_QUBIT else hq} v={'-' if vq == NO_QUBIT else vq}"
        )
    for t in field.termini:
        lines.append(f"terminus {t.row} {t.col} {t.port.value} {t.kind}")
    return "\n".join(lines) + "\n"


def _owner(token: str, key: str, lineno: int) -> int | None:
    name, sep, value = token.partition("=")
    if name != key or not sep:
        raise FieldFormatError(f"line {lineno}: expected {key}=<qubit|->, got {token!r}")
    if value == "-":
        return None
    try:
        q = int(value)
    except ValueError:
        raise FieldFormatError(f"line {lineno}: bad qubit id {value!r}") from None
    if q < 0:
        raise FieldFormatError(f"line {lineno}: negative qubit id")
    return q


def parse_field(text: str | TextIO) -> Field:
    if not isinstance(text, str):
        text = text.read()
    shape = None
    cells: dict[tuple[int, int], Cell] = {}
    termini = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "field" and len(tok) == 3:
                if shape is not None:
                    raise FieldFormatError(f"line {lineno}: duplicate header")
                shape = (int(tok[1]), int(tok[2]))
                if shape[0] < 1 or shape[1] < 1:
                    raise FieldFormatError(f"line {lineno}: field must be at least 1x1")
            elif shape is None:
                raise FieldFormatError(f"line {lineno}: 'field <rows> <cols>' header must come first")
            elif tok[0] == "cell" and len(tok) == 6:
                r, c = int(tok[1]), int(tok[2])
                if not (0 <= r < shape[0] and 0 <= c < shape[1]):
                    raise FieldFormatError(f"line {lineno}: cell ({r},{c}) outside field")
                if (r, c) in cells:
                    raise FieldFormatError(f"line {lineno}: duplicate cell ({r},{c})")
                try:
                    prim = Primitive[tok[3]]
                except KeyError:
                    raise FieldFormatError(f"line {lineno}: unknown primitive {tok[3]!r}") from None
                cells[r, c] = Cell(prim, _owner(tok[4], "h", lineno), _owner(tok[5], "v", lineno))
            elif tok[0] == "terminus" and len(tok) == 5:
                termini.append(Terminus(int(tok[1]), int(tok[2]), Port(tok[3]), tok[4]))
            else:
                raise FieldFormatError(f"line {lineno}: cannot parse {line!r}")
        except ValueError as exc:
            if isinstance(exc, FieldFormatError):
                raise
            raise FieldFormatError(f"line {lineno}: {exc}") from None
    if shape is None:
        raise FieldFormatError("missing 'field <rows> <cols>' header")
    return Field.from_cells(shape[0], shape[1], cells, termini)
