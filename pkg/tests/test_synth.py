import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circuits
from topoloom.bench import worst_case_areas
from topoloom.bounded import Direction, WeavePlan, choose_direction, plan_weaves, synth_bounded
from topoloom.circuit import Circuit, CnotGate, parse_circuit
from topoloom.extract import control_segments, extract
from topoloom.field import Port, Primitive as P, area, termini_of, validate
from topoloom.gf2 import equivalent
from topoloom.unbounded import UnboundedState, synth_unbounded


# -- unbounded ---------------------------------------------------------------


def test_unbounded_empty_circuit_is_parallel_wires():
    f = synth_unbounded(Circuit(5))
    assert f.shape == (5, 1)
    assert area(f) == 5
    assert (f.prim == P.WIRE_H).all()


def test_unbounded_small_circuit(fixtures):
    c = parse_circuit((fixtures / "small_circuit.cnot").read_text())
    f = synth_unbounded(c)
    assert validate(f) == []
    assert equivalent(extract(f, 4), c)
    assert f.shape == (5, 3)


def test_unbounded_single_gate_layout():
    f = synth_unbounded(Circuit.from_pairs(2, [(0, [1])]))
    # q1 gets row 0; q0 enters from the top of column 0 and lands on row 1
    assert f.shape == (2, 1)
    assert [P(p) for p in f.prim[:, 0]] == [P.CNOT, P.BEND_NE]
    assert [(t.row, t.col, t.port, t.kind) for t in f.termini] == [(0, 0, Port.N, "init")]
    assert validate(f) == []


def test_target_above_control_is_moved_first():
    # q2 gets row 0 and q1 lands below it; in the second gate q2 is a target
    # above the control while the new target q0 is not
    c = Circuit.from_pairs(3, [(1, [2]), (1, [0, 2])])
    state = UnboundedState()
    state.place(c.gates[0])
    row_q1 = state.row_of[1]
    cols_before = state.next_free_col
    row_q2 = state.row_of[2]
    state.place(c.gates[1])
    assert state.row_of[1] > row_q1 and state.row_of[2] > row_q2
    assert state.next_free_col == cols_before + 2  # one move column plus the gate column
    f = synth_unbounded(c)
    assert equivalent(extract(f, 3), c)


def test_consecutive_gates_same_control_unbounded():
    c = Circuit.from_pairs(3, [(0, [1]), (0, [2])])
    f = synth_unbounded(c)
    assert extract(f, 3).gates == c.gates


@settings(max_examples=80, deadline=None)
@given(circuits(max_gates=15))
def test_unbounded_counters_only_grow(c):
    state = UnboundedState()
    last = (0, 0)
    for gate in c.gates:
        state.place(gate)
        now = (state.next_free_row, state.next_free_col)
        assert now[0] >= last[0] and now[1] > last[1]
        last = now


@settings(max_examples=60, deadline=None)
@given(circuits(max_gates=15))
def test_unbounded_prefix_never_shrinks(c):
    prev = (0, 0)
    for k in range(len(c.gates) + 1):
        f = synth_unbounded(Circuit(c.qubit_count, c.gates[:k]))
        assert f.rows >= prev[0] and f.cols >= prev[1]
        prev = f.shape


@settings(max_examples=100, deadline=None)
@given(circuits(max_gates=15))
def test_unbounded_properties(c):
    f = synth_unbounded(c)
    assert validate(f) == []
    assert equivalent(extract(f, c.qubit_count), c)
    # each gate allocates one row and one column for the control plus one of
    # each per target that sits above it
    n, g = c.qubit_count, len(c.gates)
    assert f.rows <= n + g * n and f.cols <= max(1, g * n)
    # qubits enter on the left edge, or on the top edge when first seen as a
    # control, and all of them leave on the right edge
    entries, exits = termini_of(f)
    first_role = {}
    for gate in c.gates:
        first_role.setdefault(gate.control, "control")
        for t in gate.targets:
            first_role.setdefault(t, "target")
    for q, ((r, col, port),) in entries.items():
        if first_role.get(q) == "control":
            assert (r, port) == (0, Port.N)
        else:
            assert (col, port) == (0, Port.W)
    assert all(e[0][1:] == (f.cols - 1, Port.E) for e in exits.values())
    # the field grows diagonally, so no row or column is left empty
    assert (f.prim != P.EMPTY).any(axis=0).all() and (f.prim != P.EMPTY).any(axis=1).all()
    assert synth_unbounded(c) == f


def test_worst_case_formula_is_tight_for_single_gates():
    assert area(synth_unbounded(Circuit.from_pairs(2, [(0, [1])]))) == worst_case_areas(2, 1)[0]
    c = Circuit.from_pairs(3, [(2, [0, 1]), (2, [0, 1])])
    assert area(synth_unbounded(c)) == worst_case_areas(3, 2)[0] == 24


def test_worst_case_formula_is_not_a_strict_bound():
    # a repeated gate finds its target above the landed control every time,
    # so each repeat moves the target and the control to fresh rows
    f = synth_unbounded(Circuit.from_pairs(2, [(0, [1])] * 2))
    assert f.shape == (4, 3)
    assert area(f) == 12 > worst_case_areas(2, 2)[0] == 8
    c = Circuit.from_pairs(3, [(0, [1, 2])] * 3)
    assert area(synth_unbounded(c)) == 63 > worst_case_areas(3, 3)[0] == 54


def test_worst_case_formula_fails_for_long_adversarial_circuits():
    c = Circuit.from_pairs(4, [(3, [0, 1, 2])] * 10)
    assert area(synth_unbounded(c)) > worst_case_areas(4, 10)[0]


# -- bounded -----------------------------------------------------------------


def test_direction_choice():
    assert choose_direction(CnotGate(3, (0, 1))) is Direction.UP_ONLY
    assert choose_direction(CnotGate(0, (5,))) is Direction.DOWN_ONLY
    assert choose_direction(CnotGate(2, (0, 5))) is Direction.FULL_WEAVE
    assert choose_direction(CnotGate(0, (5,)), heuristic=False) is Direction.FULL_WEAVE


def test_plan_columns():
    c = Circuit.from_pairs(4, [(0, [1]), (2, [0, 3]), (3, [1])])
    plans = plan_weaves(c)
    assert [(p.direction, p.start_col, p.cols_used) for p in plans] == [
        (Direction.DOWN_ONLY, 0, 2), (Direction.FULL_WEAVE, 2, 3), (Direction.UP_ONLY, 5, 2),
    ]
    assert WeavePlan(c.gates[0], Direction.FULL_WEAVE, 0).cols_used == 3


def test_down_only_single_gate():
    c = Circuit.from_pairs(6, [(0, [5])])
    f = synth_bounded(c)
    assert f.shape == (8, 2)
    col0 = [P(p) for p in f.prim[:, 0]]
    assert col0[0] == P.EMPTY
    assert col0[1] == P.BEND_SW and col0[7] == P.BEND_NE
    assert col0[6] == P.CNOT and col0[2:6] == [P.CROSS] * 4
    assert P(f.prim[7, 1]) == P.BEND_NW and P(f.prim[1, 1]) == P.BEND_SE
    assert extract(f, 6).gates == c.gates


def test_full_weave_places_each_cnot_once():
    c = Circuit.from_pairs(5, [(2, [0, 4])])
    f = synth_bounded(c)
    assert f.shape == (7, 3)
    cnots = {tuple(x) for x in np.argwhere(f.prim == P.CNOT)}
    assert cnots == {(5, 0), (1, 1)}


def test_bounded_empty_circuit():
    f = synth_bounded(Circuit(4))
    assert f.shape == (6, 1)
    assert validate(f) == []


def test_seven_qubit_sample(fixtures):
    c = parse_circuit((fixtures / "seven_qubit.cnot").read_text())
    f = synth_bounded(c)
    assert f.rows == 9
    assert validate(f) == []
    assert equivalent(extract(f, 7), c)
    assert f.cols == sum(p.cols_used for p in plan_weaves(c))


@settings(max_examples=100, deadline=None)
@given(circuits(max_gates=15), st.booleans())
def test_bounded_properties(c, heuristic):
    f = synth_bounded(c, heuristic)
    n = c.qubit_count
    assert f.rows == n + 2
    assert validate(f) == []
    assert equivalent(extract(f, n), c)
    assert area(f) <= worst_case_areas(n, len(c.gates))[1] + (n + 2)
    if not heuristic:
        assert f.cols == max(1, 3 * len(c.gates))
    # qubit i enters and leaves on row i + 1
    entries, exits = termini_of(f)
    for q in range(n):
        assert entries[q] == [(q + 1, 0, Port.W)]
        assert exits[q] == [(q + 1, f.cols - 1, Port.E)]
    # buffer rows only hold turns and no CNOT; CNOTs sit on target rows only
    assert not (f.prim[[0, n + 1]] == P.CNOT).any()
    for seg, gate in zip(control_segments(f), c.gates):
        assert sorted(r - 1 for r, _ in seg.cnot_cells) == sorted(gate.targets)


@settings(max_examples=40, deadline=None)
@given(circuits(max_gates=10))
def test_heuristic_never_costs_columns(c):
    assert synth_bounded(c).cols <= synth_bounded(c, heuristic=False).cols
