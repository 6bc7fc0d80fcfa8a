"""From a 2-D field to 3-D defect traces, resource counts and pictures.

Field cell ``(r, c)`` covers ``x in [c*d, (c+1)*d]`` and ``y in [r*d, (r+1)*d]``
in lattice unit cells, where ``d`` is the pitch. Every strand is a pair of
parallel defects. Horizontal strands are stacked in depth at ``z = d`` (role
A) and ``z = 2d`` (role B); vertical strands straddle them at ``z = 0`` and
``z = 3d``. A crossing therefore passes one pair over and under the other,
and a bend joins the two levels with short risers at the cell centre.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .extract import control_segments
from .field import Field, Port, Primitive, STRANDS, validate

PHYSICAL_QUBITS_PER_UNIT_CELL = 18

Point = tuple[float, float, float]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class DefectSegment:
    qubit: int
    role: str  # "A" or "B"
    start: Point
    end: Point
    cell: tuple[int, int]

    @property
    def length(self) -> float:
        return float(sum(abs(b - a) for a, b in zip(self.start, self.end)))


@dataclass(frozen=True)
class Junction:
    at: Point
    gate: int
    control: int
    cell: tuple[int, int]
    ring: bool = True  # the encircling defect ring is implied, not traced


@dataclass(frozen=True)
class Geometry:
    pitch: int
    segments: tuple[DefectSegment, ...]
    junctions: tuple[Junction, ...]


def _levels(d: int, horizontal: bool) -> dict[str, int]:
    return {"A": d, "B": 2 * d} if horizontal else {"A": 0, "B": 3 * d}


def _edge_point(r: int, c: int, port: Port, d: int) -> tuple[float, float]:
    cx, cy = (c + 0.5) * d, (r + 0.5) * d
    dx, dy = {Port.N: (0, -0.5), Port.S: (0, 0.5), Port.E: (0.5, 0), Port.W: (-0.5, 0)}[port]
    return cx + dx * d, cy + dy * d


def _cell_segments(field: Field, r: int, c: int, d: int) -> list[DefectSegment]:
    prim = Primitive(int(field.prim[r, c]))
    centre = ((c + 0.5) * d, (r + 0.5) * d)
    out = []
    for a, b in STRANDS[prim]:
        horizontal_end = {p for p in (a, b) if p in (Port.W, Port.E)}
        vertical_end = {p for p in (a, b) if p in (Port.N, Port.S)}
        owner = int(field.h[r, c] if horizontal_end else field.v[r, c])
        if not vertical_end or not horizontal_end:
            # straight strand: one full-length segment per defect
            horizontal = bool(horizontal_end)
            p, q = sorted((a, b), key=lambda port: port.value)
            for role, z in _levels(d, horizontal).items():
                out.append(DefectSegment(owner, role, (*_edge_point(r, c, p, d), z),
                                         (*_edge_point(r, c, q, d), z), (r, c)))
            continue
        (hp,), (vp,) = horizontal_end, vertical_end
        hz, vz = _levels(d, True), _levels(d, False)
        for role in ("A", "B"):
            out.append(DefectSegment(owner, role, (*_edge_point(r, c, hp, d), hz[role]),
                                     (*centre, hz[role]), (r, c)))
            out.append(DefectSegment(owner, role, (*centre, hz[role]),
                                     (*centre, vz[role]), (r, c)))
            out.append(DefectSegment(owner, role, (*centre, vz[role]),
                                     (*_edge_point(r, c, vp, d), vz[role]), (r, c)))
    return out


def field_to_geometry(field: Field, pitch: int = 2) -> Geometry:
    """Defect traces of a valid field plus one junction record per gate."""
    if pitch < 2:
        raise GeometryError("pitch must be at least 2")
    problems = validate(field)
    if problems:
        raise GeometryError(f"field does not validate: {problems[0]}")
    segments = []
    for r, c in np.argwhere(field.prim != Primitive.EMPTY):
        segments.extend(_cell_segments(field, int(r), int(c), pitch))
    junctions = []
    for k, seg in enumerate(control_segments(field)):
        r, c = seg.cnot_cells[0]
        at = ((c + 0.5) * pitch, (r + 0.5) * pitch, 1.5 * pitch)
        junctions.append(Junction(at, k, seg.qubit, (r, c)))
    return Geometry(pitch, tuple(segments), tuple(junctions))


def segment_distance(a: DefectSegment, b: DefectSegment) -> float:
    """Euclidean distance between two axis-aligned segments.

    Each segment is a degenerate box, and for boxes the per-axis gaps
    combine exactly.
    """
    gaps = []
    for i in range(3):
        lo_a, hi_a = sorted((a.start[i], a.end[i]))
        lo_b, hi_b = sorted((b.start[i], b.end[i]))
        gaps.append(max(0.0, lo_b - hi_a, lo_a - hi_b))
    return float(np.hypot.reduce(gaps)) if any(gaps) else 0.0


def separation_violations(
    geometry: Geometry, separation: float | None = None
) -> list[tuple[DefectSegment, DefectSegment, float]]:
    """Pairs of defects closer than ``separation`` (default: the pitch).

    A defect may touch itself, and control and target may meet inside a
    CNOT cell where they join at the junction. The two defects of one qubit
    must stay apart like any other pair.
    """
    sep = geometry.pitch if separation is None else separation
    segs = geometry.segments
    if len(segs) < 2:
        return []
    ends = np.array([(s.start, s.end) for s in segs], dtype=float)
    lo, hi = ends.min(axis=1), ends.max(axis=1)
    gap = np.maximum(0.0, np.maximum(lo[None, :, :] - hi[:, None, :], lo[:, None, :] - hi[None, :, :]))
    dist = np.sqrt((gap ** 2).sum(axis=2))
    qubit = np.array([s.qubit for s in segs])
    role = np.array([s.role for s in segs])
    cell = np.array([s.cell for s in segs])
    junction = np.array([s.cell in {j.cell for j in geometry.junctions} for s in segs])
    same_trace = (qubit[:, None] == qubit[None, :]) & (role[:, None] == role[None, :])
    at_junction = ((qubit[:, None] != qubit[None, :]) & junction[:, None]
                   & (cell[:, None, :] == cell[None, :, :]).all(axis=2))
    close = (dist < sep - 1e-9) & ~same_trace & ~at_junction
    i, j = np.nonzero(np.triu(close, k=1))
    return [(segs[a], segs[b], float(dist[a, b])) for a, b in zip(i, j)]


@dataclass(frozen=True)
class ResourceEstimate:
    """Lattice size for a field.

    ``physical_qubit_count`` counts every qubit of the lattice block and so
    is an upper bound: qubits removed to carve out defects are not
    subtracted.
    """

    pitch: int
    depth: int
    extent: tuple[int, int, int]
    unit_cell_count: int
    physical_qubit_count: int


def estimate_resources(field: Field, pitch: int = 2, depth: int = 1) -> ResourceEstimate:
    if pitch < 1 or depth < 1:
        raise GeometryError("pitch and depth must be positive")
    extent = (field.cols * pitch, field.rows * pitch, depth * pitch)
    cells = extent[0] * extent[1] * extent[2]
    return ResourceEstimate(pitch, depth, extent, cells, PHYSICAL_QUBITS_PER_UNIT_CELL * cells)


# -- renderers -------------------------------------------------------------

ASCII_GLYPHS = {
    Primitive.EMPTY: ".",
    Primitive.WIRE_H: "-",
    Primitive.WIRE_V: "|",
    Primitive.BEND_NE: "L",
    Primitive.BEND_NW: "J",
    Primitive.BEND_SE: "r",
    Primitive.BEND_SW: "7",
    Primitive.CROSS: "+",
    Primitive.CNOT: "X",
}


def render_ascii(field: Field) -> str:
    """One character per cell, one line per row."""
    table = np.array([ASCII_GLYPHS[p] for p in Primitive])
    return "\n".join("".join(row) for row in table[field.prim]) + "\n"


def _num(x: float) -> str:
    return f"{x:g}"


def render_geometry(geometry: Geometry) -> str:
    def point(p: Point) -> str:
        return "(" + ",".join(_num(v) for v in p) + ")"

    lines = [
        f"segment qubit={s.qubit} role={s.role} from={point(s.start)} to={point(s.end)}"
        for s in geometry.segments
    ]
    lines += [f"junction at={point(j.at)} gate={j.gate}" for j in geometry.junctions]
    return "\n".join(lines) + "\n"


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def render_svg(field: Field, cell: int = 24) -> str:
    """SVG drawing: one glyph per primitive, coloured by owning qubit."""
    w, h = field.cols * cell, field.rows * cell
    half = cell / 2
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]

    def colour(q: int) -> str:
        return _PALETTE[q % len(_PALETTE)]

    def line(x1, y1, x2, y2, q):
        out.append(f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
                   f'stroke="{colour(q)}" stroke-width="2"/>')

    offsets = {Port.N: (0, -half), Port.S: (0, half), Port.E: (half, 0), Port.W: (-half, 0)}
    for (r, c), cellv in field.cells():
        cx, cy = c * cell + half, r * cell + half
        for a, b in STRANDS[cellv.primitive]:
            q = cellv.owner(a)
            ax, ay = offsets[a]
            bx, by = offsets[b]
            if {a, b} in ({Port.W, Port.E}, {Port.N, Port.S}):
                line(cx + ax, cy + ay, cx + bx, cy + by, q)
            else:
                line(cx + ax, cy + ay, cx, cy, q)
                line(cx, cy, cx + bx, cy + by, q)
        if cellv.primitive is Primitive.CNOT:
            rad = cell * 0.3
            out.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(rad)}" fill="none" '
                       f'stroke="{colour(cellv.h)}" stroke-width="2"/>')
            out.append(f'<circle cx="{_num(cx)}" cy="{_num(cy - half + 3)}" r="3" '
                       f'fill="{colour(cellv.v)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
