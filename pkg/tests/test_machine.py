"""Machine model, graph views, matrix views and interchange formats."""

import random

import pytest

from fsmwm import (
    BitMatrix,
    ConnGraph,
    Fsm,
    HaltError,
    SemanticError,
    SyntaxError_,
    adjacency,
    connectivity_graph,
    format_fsm,
    format_graph,
    graph_of_adjacency,
    parse_fsm,
    parse_graph,
    parse_kiss2,
    run,
    run_states,
    standard_cg_machine,
    step,
)
from conftest import random_graph


def test_fsm_rejects_unknown_reset():
    with pytest.raises(SemanticError):
        Fsm(frozenset([0]), ("0",), ("a",), 5, {}, {})


def test_fsm_rejects_mismatched_maps():
    with pytest.raises(SemanticError):
        Fsm(frozenset([0]), ("0",), ("a",), 0, {(0, "0"): 0}, {})


def test_fsm_rejects_unknown_symbols():
    with pytest.raises(SemanticError):
        Fsm(frozenset([0]), ("0",), ("a",), 0, {(0, "x"): 0}, {(0, "x"): "a"})
    with pytest.raises(SemanticError):
        Fsm(frozenset([0]), ("0",), ("a",), 0, {(0, "0"): 0}, {(0, "0"): "b"})


def test_connectivity_graph_collapses_parallel_inputs():
    m = Fsm(
        frozenset([0, 1]), ("0", "1"), ("a",), 0,
        {(0, "0"): 1, (0, "1"): 1, (1, "0"): 0},
        {(0, "0"): "a", (0, "1"): "a", (1, "0"): "a"},
    )
    g = connectivity_graph(m)
    assert g.edges == frozenset({(0, 1), (1, 0)})
    assert g.root == 0


def test_adjacency_round_trip_random(rng):
    for _ in range(100):
        g = random_graph(rng, rng.randint(1, 10))
        assert graph_of_adjacency(adjacency(g), g.root) == g


def test_adjacency_index_mapping_sorted():
    g = ConnGraph(frozenset([7, 3, 11]), frozenset([(3, 11), (11, 7)]), 3)
    a = adjacency(g)
    assert a.ids == (3, 7, 11)
    # row of 3 has a one in the column of 11
    assert a.rows[0][2] == 1 and a.rows[2][1] == 1


def test_bitmatrix_matmul_boolean():
    a = BitMatrix((0, 1), ((1, 1), (0, 1)))
    b = BitMatrix((0, 1), ((1, 0), (1, 1)))
    assert a.matmul(b).rows == ((1, 1), (1, 1))
    assert a.transpose().rows == ((1, 0), (1, 1))


def test_standard_machine_linear_graph_single_tick():
    g = ConnGraph(frozenset([1, 2, 3]), frozenset([(1, 2), (2, 3)]), 1)
    m = standard_cg_machine(g)
    assert m.inputs == ("0",)
    outs, consumed = run(m, ["0", "0", "0"])
    assert outs == ["1", "2"] and consumed == 2


def test_standard_machine_branch_choice_ordered_by_target():
    g = ConnGraph(frozenset([0, 2, 5]), frozenset([(0, 5), (0, 2)]), 0)
    m = standard_cg_machine(g)
    assert m.inputs == ("0", "1")
    assert m.transitions[(0, "0")] == 2
    assert m.transitions[(0, "1")] == 5
    assert m.output_map[(0, "0")] == "0"


def test_step_raises_on_hole():
    g = ConnGraph(frozenset([1, 2]), frozenset([(1, 2)]), 1)
    m = standard_cg_machine(g)
    with pytest.raises(HaltError):
        step(m, 2, "0")


def test_run_states_includes_reset():
    g = ConnGraph(frozenset([1, 2, 3]), frozenset([(1, 2), (2, 3)]), 1)
    m = standard_cg_machine(g)
    assert run_states(m, ["0", "0", "0"]) == [1, 2, 3]


def test_fsm_json_round_trip(host8):
    assert parse_fsm(format_fsm(host8)) == host8
    # formatting is deterministic byte for byte
    assert format_fsm(host8) == format_fsm(parse_fsm(format_fsm(host8)))


def test_fsm_json_syntax_error_position():
    with pytest.raises(SyntaxError_) as e:
        parse_fsm('{"states": [0,]\n}')
    assert e.value.line is not None


def test_fsm_json_duplicate_transition():
    doc = (
        '{"states":[0],"inputs":["0"],"outputs":["a"],"reset":0,'
        '"transitions":[{"from":0,"in":"0","to":0,"out":"a"},'
        '{"from":0,"in":"0","to":0,"out":"a"}]}'
    )
    with pytest.raises(SemanticError):
        parse_fsm(doc)


def test_fsm_json_unknown_state():
    doc = (
        '{"states":[0],"inputs":["0"],"outputs":["a"],"reset":0,'
        '"transitions":[{"from":0,"in":"0","to":9,"out":"a"}]}'
    )
    with pytest.raises(SemanticError):
        parse_fsm(doc)


def test_graph_round_trip(rng):
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 8))
        assert parse_graph(format_graph(g)) == g


KISS = """\
# comment
.i 2
.o 1
.s 3
.p 4
.r st0
01 st0 st1 1
1- st1 st2 0
00 st2 st0 1
"""


def test_kiss2_hand_oracle():
    m = parse_kiss2(KISS)
    # reset state first, then first-appearance order
    assert m.reset == 0
    assert m.states == frozenset([0, 1, 2])
    assert m.transitions[(0, "01")] == 1
    # the don't-care expands to both 10 and 11
    assert m.transitions[(1, "10")] == 2
    assert m.transitions[(1, "11")] == 2
    assert m.output_map[(2, "00")] == "1"
    assert (0, "00") not in m.transitions


def test_kiss2_rejects_duplicates():
    bad = ".i 1\n.o 1\n0 a b 1\n0 a b 1\n"
    with pytest.raises(SemanticError):
        parse_kiss2(bad)


def test_kiss2_rejects_short_line():
    with pytest.raises(SyntaxError_):
        parse_kiss2(".i 1\n.o 1\n0 a b\n")
