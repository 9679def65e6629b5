import pytest

from ambp import errors
from ambp.program import Program, SinkOutcome, all_inputs, disjoint_union
from ambp.construction import build_amortized
from ambp.truthtable import named_function


def two_node_const1():
    """Minimal valid program: the start IS the accept; the reject sink exists
    but is never reached."""
    return Program.from_rows(
        1,
        1,
        nodes=[("FWD1", 0, 1, 0), ("FWD1", 0, 0, 0)],
        edges=[],
        starts=[0],
        accepts=[0],
        rejects=[1],
    )


def tiny_identity():
    """m=1 program computing x_1 with two levels."""
    return Program.from_rows(
        1,
        1,
        nodes=[("FWD1", 0, 0, 0), ("FWD1", 1, 0, 0), ("FWD1", 1, 0, 1)],
        edges=[(0, 1, 0, 1), (0, 1, 1, 2)],
        starts=[0],
        accepts=[2],
        rejects=[1],
    )


# --- validation ------------------------------------------------------------

def test_validate_build_clean(xor2):
    assert xor2.validate_structure().ok


def test_validate_start_equals_accept():
    assert two_node_const1().validate_structure().ok


def test_validate_duplicate_label():
    p = Program.from_rows(
        1,
        1,
        nodes=[("FWD1", 0, 0, 0), ("FWD1", 1, 0, 0), ("FWD1", 1, 0, 1)],
        edges=[(0, 1, 0, 1), (0, 1, 0, 2)],  # two x1=0 edges
        starts=[0],
        accepts=[2],
        rejects=[1],
    )
    assert "duplicate-label" in p.validate_structure().kinds()


def test_validate_mixed_variable():
    p = Program.from_rows(
        2,
        1,
        nodes=[("FWD1", 0, 0, 0), ("FWD1", 1, 0, 0), ("FWD1", 1, 0, 1)],
        edges=[(0, 1, 0, 1), (0, 2, 1, 2)],
        starts=[0],
        accepts=[2],
        rejects=[1],
    )
    assert "mixed-variable" in p.validate_structure().kinds()


def test_validate_bad_outdegree_and_unregistered_sink():
    p = Program.from_rows(
        1,
        1,
        nodes=[("FWD1", 0, 0, 0), ("FWD1", 1, 0, 0), ("FWD1", 1, 0, 1)],
        edges=[(0, 1, 0, 1)],
        starts=[0],
        accepts=[1],
        rejects=[1],
    )
    kinds = p.validate_structure().kinds()
    assert "bad-outdegree" in kinds          # outdegree 1 on an unpruned program
    assert "unregistered-sink" in kinds      # node 2 is a sink in no list
    assert "multiply-registered" in kinds    # node 1 is both accept and reject


def test_validate_level_order():
    p = Program.from_rows(
        1,
        1,
        nodes=[("FWD1", 1, 0, 0), ("FWD1", 1, 0, 1), ("FWD1", 0, 0, 2)],
        edges=[(0, 1, 0, 1), (0, 1, 1, 2)],
        starts=[0],
        accepts=[1],
        rejects=[2],
    )
    assert "level-order" in p.validate_structure().kinds()


def test_validate_list_length():
    p = Program.from_rows(
        1, 2,
        nodes=[("FWD1", 0, 1, 0), ("FWD1", 0, 0, 0)],
        edges=[],
        starts=[0],
        accepts=[0],
        rejects=[1],
    )
    assert "list-length" in p.validate_structure().kinds()


# --- walk -------------------------------------------------------------------

def test_walk_build_examples(xor1):
    # n=1, f = x1: hand-traced outcomes
    assert xor1.walk(1, (1,)) == SinkOutcome("accept", 1)
    assert xor1.walk(2, (0,)) == SinkOutcome("reject", 2)


def test_walk_start_is_accept():
    assert two_node_const1().walk(1, (0,)) == SinkOutcome("accept", 1)
    assert two_node_const1().walk(1, (1,)) == SinkOutcome("accept", 1)


def test_walk_range_errors(xor1):
    with pytest.raises(errors.RangeError):
        xor1.walk(0, (1,))
    with pytest.raises(errors.RangeError):
        xor1.walk(3, (1,))
    with pytest.raises(errors.ArityMismatch):
        xor1.walk(1, (1, 0))
    with pytest.raises(errors.RangeError):
        xor1.walk(1, (2,))


def test_walk_requires_valid_structure():
    p = Program.from_rows(
        1,
        1,
        nodes=[("FWD1", 0, 0, 0), ("FWD1", 1, 0, 0)],
        edges=[(0, 1, 0, 1)],
        starts=[0],
        accepts=[1],
        rejects=[1],
    )
    with pytest.raises(errors.StructureInvalid):
        p.walk(1, (0,))


def test_walk_path_lengths(xor2):
    for x in all_inputs(2):
        for i in range(1, xor2.m + 1):
            _, path = xor2.walk(i, x, return_path=True)
            assert len(path) == 4 * 2 + 1  # 4n edges


def test_walk_total_n3(maj3):
    # never a missing labeled edge, all (i, x)
    for x in all_inputs(3):
        for i in range(1, maj3.m + 1):
            maj3.walk(i, x)


# --- union --------------------------------------------------------------------

def test_union_sizes(xor2):
    u = disjoint_union(xor2, xor2)
    assert u.m == 16
    assert u.num_nodes == 448  # 2 x 224
    assert u.validate_structure().ok


def test_union_walks_shift(xor1):
    other = build_amortized(named_function("xor", 1))
    u = disjoint_union(xor1, other)
    for x in all_inputs(1):
        for i in range(1, 3):
            left = xor1.walk(i, x)
            assert u.walk(i, x) == left
            right = other.walk(i, x)
            shifted = u.walk(2 + i, x)
            assert shifted.kind == right.kind
            assert shifted.index == right.index + 2


def test_union_requires_same_arity(xor1, xor2):
    with pytest.raises(errors.ArityMismatch):
        disjoint_union(xor1, xor2)


def test_union_rejects_empty(xor1):
    empty = Program.from_rows(1, 0, nodes=[], edges=[], starts=[], accepts=[], rejects=[])
    with pytest.raises(errors.EmptyProgram):
        disjoint_union(xor1, empty)


# --- reachability helper ---------------------------------------------------------

def test_reachable_under_counts(xor2):
    for x in all_inputs(2):
        visited = xor2.reachable_under(x)
        # m disjoint walks of 4n+1 nodes each
        assert int(visited.sum()) == xor2.m * (4 * 2 + 1)


def test_node_ref_round_trip(xor1):
    for u in range(xor1.num_nodes):
        assert xor1.node_id(xor1.ref(u)) == u
