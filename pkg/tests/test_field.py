import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circuits
from topoloom.bounded import synth_bounded
from topoloom.field import (
    Cell,
    Field,
    FieldFormatError,
    Port,
    Primitive as P,
    Terminus,
    area,
    parse_field,
    serialize_field,
    termini_of,
    trace,
    validate,
)
from topoloom.unbounded import synth_unbounded


def rules(field):
    return sorted({v.rule for v in validate(field)})


def test_single_wire_is_valid():
    f = Field.from_cells(1, 1, {(0, 0): (P.WIRE_H, 0)})
    assert validate(f) == []
    assert area(f) == 1


def test_parallel_wires():
    f = Field.wires(3, 4)
    assert validate(f) == []
    assert f.qubits() == {0, 1, 2}
    assert f.count(P.WIRE_H) == 12


def test_owner_mismatch_is_one_continuity_violation():
    f = Field.from_cells(1, 2, {(0, 0): (P.WIRE_H, 0), (0, 1): (P.WIRE_H, 1)})
    problems = validate(f)
    assert len(problems) == 1
    assert problems[0].rule == "continuity"
    assert (problems[0].row, problems[0].col) == (0, 0)


def test_open_port_inside_field():
    f = Field.from_cells(1, 3, {(0, 0): (P.WIRE_H, 0), (0, 2): (P.WIRE_H, 0)})
    assert rules(f) == ["continuity"]
    assert len(validate(f)) == 2


def test_vertical_open_port_and_mismatch():
    f = Field.from_cells(2, 1, {(0, 0): (P.BEND_SW, 0, 0), (1, 0): (P.BEND_NE, 1, 1)})
    assert "continuity" in rules(f)
    f = Field.from_cells(2, 1, {(0, 0): (P.BEND_SW, 0, 0)})
    assert "continuity" in rules(f)


@pytest.mark.parametrize(
    "cell, rule",
    [
        ((P.WIRE_H, None, None), "h-owner"),
        ((P.WIRE_H, 0, 1), "v-owner"),
        ((P.WIRE_V, 0, 0), "h-owner"),
        ((P.EMPTY, 0, None), "h-owner"),
        ((P.CROSS, 0, 0), "self-crossing"),
        ((P.CNOT, 1, 1), "self-crossing"),
        ((P.BEND_SW, 0, 1), "bend-owner"),
    ],
)
def test_cell_rules(cell, rule):
    f = Field.from_cells(1, 1, {(0, 0): cell})
    assert rule in rules(f)


def test_negative_owner():
    f = Field(np.array([[P.WIRE_H]]), np.array([[-5]]), np.array([[-1]]))
    assert "owner-range" in rules(f)


def test_top_and_bottom_edges_must_be_closed():
    f = Field.from_cells(1, 1, {(0, 0): (P.WIRE_V, None, 0)})
    assert [v.rule for v in validate(f)] == ["boundary", "boundary"]


def test_flagged_termini_open_the_edges():
    cells = {(0, 0): (P.WIRE_V, None, 0)}
    termini = [Terminus(0, 0, Port.N, "init"), Terminus(0, 0, Port.S, "measure")]
    f = Field.from_cells(1, 1, cells, termini)
    assert validate(f) == []
    entries, exits = termini_of(f)
    assert entries == {0: [(0, 0, Port.N)]}
    assert exits == {0: [(0, 0, Port.S)]}


def test_terminus_mistakes():
    wire = {(0, 0): (P.WIRE_H, 0), (0, 1): (P.WIRE_H, 0)}
    for t in (
        Terminus(0, 0, Port.N, "init"),      # port not occupied
        Terminus(0, 0, Port.E, "measure"),   # port connected to a neighbour
        Terminus(4, 4, Port.W, "init"),      # outside
    ):
        assert "terminus" in rules(Field.from_cells(1, 2, wire, [t]))
    dup = [Terminus(0, 0, Port.W, "init")] * 2
    assert "terminus" in rules(Field.from_cells(1, 2, wire, dup))
    with pytest.raises(ValueError):
        Terminus(0, 0, Port.W, "reset")


def test_mid_field_termini():
    # qubit 1 starts at the top of column 1, bends east and leaves right
    cells = {
        (0, 0): (P.WIRE_H, 0), (0, 1): (P.CROSS, 0, 1), (0, 2): (P.WIRE_H, 0),
        (1, 1): (P.BEND_NE, 1, 1), (1, 2): (P.WIRE_H, 1),
    }
    f = Field.from_cells(2, 3, cells, [Terminus(0, 1, Port.N, "init")])
    assert validate(f) == []
    assert [s[:2] for s in trace(f, 1)] == [(0, 1), (1, 1), (1, 2)]


def test_detached_loop_is_a_path_violation():
    cells = {
        (0, 0): (P.WIRE_H, 0), (0, 1): (P.WIRE_H, 0),
        (1, 0): (P.BEND_SE, 0, 0), (1, 1): (P.BEND_SW, 0, 0),
        (2, 0): (P.BEND_NE, 0, 0), (2, 1): (P.BEND_NW, 0, 0),
    }
    problems = validate(Field.from_cells(3, 2, cells))
    assert [v.rule for v in problems] == ["path"]
    assert "2 disconnected pieces" in problems[0].detail


def test_loop_without_termini():
    cells = {
        (0, 0): (P.BEND_SE, 4, 4), (0, 1): (P.BEND_SW, 4, 4),
        (1, 0): (P.BEND_NE, 4, 4), (1, 1): (P.BEND_NW, 4, 4),
    }
    details = [v.detail for v in validate(Field.from_cells(2, 2, cells))]
    assert "qubit 4 has 0 entry termini" in details
    assert "qubit 4 has 0 exit termini" in details


def test_qubit_on_two_rows():
    f = Field.from_cells(2, 1, {(0, 0): (P.WIRE_H, 0), (1, 0): (P.WIRE_H, 0)})
    details = " ".join(v.detail for v in validate(f))
    assert "2 entry termini" in details and "2 exit termini" in details


def test_trace_straight_row():
    f = Field.wires(1, 5)
    steps = trace(f, 0)
    assert len(steps) == 5
    assert all((s.row, s.port_in, s.port_out) == (0, Port.W, Port.E) for s in steps)
    assert [s.col for s in steps] == list(range(5))
    with pytest.raises(KeyError):
        trace(Field.wires(1, 1), 99)


def test_trace_compact_field(fixtures):
    f = parse_field((fixtures / "compact.fld").read_text())
    steps = trace(f, 3)
    prims = [f[s.row, s.col].primitive for s in steps]
    assert P.BEND_NE in prims and prims.count(P.CNOT) == 3
    # connected: every step leaves through the port the next one enters by
    for a, b in zip(steps, steps[1:]):
        dr, dc = a.port_out.step
        assert (a.row + dr, a.col + dc) == (b.row, b.col)
        assert b.port_in is a.port_out.opposite
    assert len({(s.row, s.col) for s in steps}) == len(steps)


@settings(max_examples=40, deadline=None)
@given(circuits(), st.booleans())
def test_synthesized_fields_trace_simply(c, bounded):
    f = synth_bounded(c) if bounded else synth_unbounded(c)
    entries, _ = termini_of(f)
    assert sorted(entries) == list(range(c.qubit_count))
    for q in range(c.qubit_count):
        steps = trace(f, q)
        keys = [(s.row, s.col, frozenset((s.port_in, s.port_out))) for s in steps]
        assert len(keys) == len(set(keys))


def test_cell_access_and_equality():
    f = Field.from_cells(1, 2, {(0, 0): (P.WIRE_H, 0), (0, 1): (P.WIRE_H, 0)})
    assert f[0, 0] == Cell(P.WIRE_H, 0, None)
    assert f[0, 0].owner(Port.E) == 0 and f[0, 0].owner(Port.N) is None
    assert f == Field.wires(1, 2)
    assert f != Field.wires(1, 3)
    assert list(f.cells())[1] == ((0, 1), Cell(P.WIRE_H, 0, None))
    with pytest.raises(ValueError):
        f.prim[0, 0] = 2


def test_construction_errors():
    with pytest.raises(ValueError):
        Field(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)))
    with pytest.raises(ValueError):
        Field(np.full((1, 1), 12), np.zeros((1, 1)), np.zeros((1, 1)))
    with pytest.raises(ValueError):
        Field(np.zeros((1, 2)), np.zeros((1, 1)), np.zeros((1, 2)))


def test_file_format_example(fixtures):
    text = (fixtures / "compact.fld").read_text()
    f = parse_field(text)
    assert f.shape == (3, 3)
    assert f[2, 1] == Cell(P.CNOT, 3, 0)
    assert len(f.termini) == 4
    assert parse_field(serialize_field(f)) == f


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("cell 0 0 WIRE_H h=0 v=-\n", "header must come first"),
        ("field 1 1\nfield 1 1\n", "duplicate header"),
        ("field 0 1\n", "at least 1x1"),
        ("field 1 1\ncell 1 0 WIRE_H h=0 v=-\n", "outside"),
        ("field 1 1\ncell 0 0 WIRE_H h=0 v=-\ncell 0 0 WIRE_H h=0 v=-\n", "duplicate cell"),
        ("field 1 1\ncell 0 0 PIPE h=0 v=-\n", "unknown primitive"),
        ("field 1 1\ncell 0 0 WIRE_H q=0 v=-\n", "expected h="),
        ("field 1 1\ncell 0 0 WIRE_H h=x v=-\n", "bad qubit id"),
        ("field 1 1\ncell 0 0 WIRE_H h=-3 v=-\n", "negative"),
        ("field 1 1\nterminus 0 0 Q init\n", "line 2"),
        ("field 1 1\nbogus\n", "cannot parse"),
        ("", "missing"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(FieldFormatError, match=fragment):
        parse_field(text)


@st.composite
def arbitrary_fields(draw):
    rows, cols = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    shape = (rows, cols)
    prim = np.array(draw(st.lists(st.integers(0, 8), min_size=rows * cols, max_size=rows * cols)))
    owners = st.lists(st.integers(-1, 20), min_size=rows * cols, max_size=rows * cols)
    h, v = np.array(draw(owners)), np.array(draw(owners))
    termini = draw(st.lists(st.builds(
        Terminus, st.integers(0, rows - 1), st.integers(0, cols - 1),
        st.sampled_from(list(Port)), st.sampled_from(["init", "measure"])), max_size=3, unique=True))
    # the file format records only non-empty cells, so empty cells carry no owners
    prim = prim.reshape(shape)
    h, v = h.reshape(shape), v.reshape(shape)
    h[prim == 0] = -1
    v[prim == 0] = -1
    return Field(prim, h, v, termini)


@given(arbitrary_fields())
def test_format_round_trip_is_exact(f):
    text = serialize_field(f)
    again = parse_field(text)
    assert again == f
    assert serialize_field(again) == text


@settings(max_examples=30, deadline=None)
@given(arbitrary_fields())
def test_validate_never_crashes(f):
    for v in validate(f):
        assert v.rule and str(v)
