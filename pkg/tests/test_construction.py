import numpy as np
import pytest

from ambp import errors
from ambp.construction import (
    BuildOptions,
    build_amortized,
    estimate_build_bytes,
    forward_arity,
    glue_map,
    part1_target,
    part2_target,
    prune_unreachable,
    replica_count,
    reverse_segment,
    size_report,
    transition_variable,
)
from ambp.program import SEG_FWD1, SEG_FWD2, all_inputs
from ambp.truthtable import evaluate, from_id, named_function, parse_table, restrict


# --- replica space and schedule ------------------------------------------------

def test_replica_counts():
    assert [replica_count(2, j) for j in range(3)] == [8, 4, 1]
    # R(j-1) = 2^(2^(j-1)) * R(j)
    for n in (1, 2, 3, 4):
        for j in range(1, n + 1):
            assert replica_count(n, j - 1) == (1 << (1 << (j - 1))) * replica_count(n, j)


def test_schedule_palindrome():
    assert [transition_variable(1, t) for t in range(4)] == [1, 1, 1, 1]
    assert [transition_variable(2, t) for t in range(8)] == [1, 2, 2, 1, 1, 2, 2, 1]
    for n in (1, 2, 3, 4):
        sched = [transition_variable(n, t) for t in range(4 * n)]
        assert sched == sched[::-1]
        assert all(sched.count(k) == 4 for k in range(1, n + 1))
        assert all(sched[: 2 * n].count(k) == 2 for k in range(1, n + 1))


# --- widening edge map -----------------------------------------------------------

def test_part1_worked_example():
    # n=2, j=1, b=1, g=const1, r=5: q=1, r'=1, g' = both halves 1 = "11"
    assert part1_target(2, 1, 1, 1, 5) == (3, 1)


def test_part1_extension_constraint():
    n = 2
    for j in (1, 2):
        for b in (0, 1):
            for g in range(1 << (1 << (j - 1))):
                for r in range(replica_count(n, j - 1)):
                    g_new, r_new = part1_target(n, j, b, g, r)
                    assert 0 <= r_new < replica_count(n, j)
                    assert restrict(from_id(j, g_new), b) == from_id(j - 1, g)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_part1_bijection_exhaustive(n):
    width = 1 << (1 << n)
    for j in range(1, n + 1):
        for b in (0, 1):
            seen = set()
            for g in range(1 << (1 << (j - 1))):
                for r in range(replica_count(n, j - 1)):
                    seen.add(part1_target(n, j, b, g, r))
            assert len(seen) == width


# --- narrowing edge map -----------------------------------------------------------

def test_part2_worked_example():
    # n=2, j=2, b=0, G=XOR: kept half "01" (id 2), freed half "10" (id 1)
    assert part2_target(2, 2, 0, 6, 0) == (2, 1)


def test_part2_restriction_constraint():
    n = 2
    for j in (1, 2):
        for b in (0, 1):
            for big in range(1 << (1 << j)):
                for r in range(replica_count(n, j)):
                    kept, r_new = part2_target(n, j, b, big, r)
                    assert from_id(j - 1, kept) == restrict(from_id(j, big), b)
                    assert 0 <= r_new < replica_count(n, j - 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_part2_bijection_exhaustive(n):
    width = 1 << (1 << n)
    for j in range(1, n + 1):
        for b in (0, 1):
            seen = set()
            for big in range(1 << (1 << j)):
                for r in range(replica_count(n, j)):
                    seen.add(part2_target(n, j, b, big, r))
            assert len(seen) == width


def test_part_maps_are_mutually_inverse():
    n = 3
    for j in (1, 2, 3):
        for b in (0, 1):
            for big in range(0, 1 << (1 << j), 7 if j == 3 else 1):
                for r in range(0, replica_count(n, j), 5 if j == 1 else 1):
                    kept, r_new = part2_target(n, j, b, big, r)
                    assert part1_target(n, j, b, kept, r_new) == (big, r)


def test_target_range_errors():
    with pytest.raises(errors.RangeError):
        part1_target(2, 3, 0, 0, 0)
    with pytest.raises(errors.RangeError):
        part1_target(2, 1, 0, 4, 0)  # arity-0 ids are 0..1
    with pytest.raises(errors.RangeError):
        part2_target(2, 2, 0, 16, 0)
    with pytest.raises(errors.RangeError):
        part2_target(2, 2, 2, 0, 0)


# --- glue ---------------------------------------------------------------------------

def test_glue_examples():
    f = named_function("xor", 2)
    full = (1 << 4) - 1
    assert glue_map(f, f.bits) == full
    for g in range(16):
        assert glue_map(f, glue_map(f, g)) == g
    assert glue_map(parse_table("0001", 2), parse_table("0110", 2).bits) == 1  # "1000"


# --- build sizes ----------------------------------------------------------------------

def test_build_n1_size(xor1):
    report = size_report(xor1)
    assert (xor1.num_nodes, xor1.m) == (32, 2)
    assert report.per_copy == 16
    assert report.matches_formula


def test_build_n2_size(xor2):
    report = size_report(xor2)
    assert report.total_nodes == 224
    assert report.total_bound == 1024
    assert report.bounds_ok


def test_build_n3_size(maj3):
    report = size_report(maj3)
    assert report.total_nodes == (6 * 3 + 2) * 256 == 5120
    assert report.per_copy == 40
    assert report.per_copy_bound == 192
    assert report.bounds_ok


def test_histogram_level_widths(maj3):
    n, width = 3, 256
    hist = size_report(maj3).per_level_histogram
    for level in range(2 * n):
        assert hist[level] == width
    assert hist[2 * n] == 2 * width
    for level in range(2 * n + 1, 4 * n + 1):
        assert hist[level] == 2 * width
    # forward levels alone carry exactly 2^(2^n) nodes each
    fwd = (maj3.seg == SEG_FWD1) | (maj3.seg == SEG_FWD2)
    for level in range(2 * n + 1):
        assert int(np.count_nonzero(fwd & (maj3.level == level))) == width


def test_per_level_replica_counts(xor2):
    # "2^(2^n - 2^j) nodes corresponding to g" at every forward level
    n = 2
    for level in range(2 * n + 1):
        arity = forward_arity(n, level)
        fwd = (xor2.seg == SEG_FWD1) | (xor2.seg == SEG_FWD2)
        mask = fwd & (xor2.level == level)
        for g in range(1 << (1 << arity)):
            count = int(np.count_nonzero(mask & (xor2.func == g)))
            assert count == replica_count(n, arity)


def test_value_preservation_along_consistent_edges(xor2):
    """Following the input's own edge never changes the carried value: in the
    widening pass the extended function agrees with the old one at the prefix,
    in the narrowing pass the restriction keeps the evaluated value."""
    n = 2
    f = named_function("xor", 2)
    for x in all_inputs(n):
        prefix_index = [0] * (n + 1)
        for a in range(1, n + 1):
            prefix_index[a] = prefix_index[a - 1] | (x[a - 1] << (a - 1))
        for e in range(xor2.num_edges):
            src, dst = int(xor2.edge_src[e]), int(xor2.edge_dst[e])
            level = int(xor2.level[src])
            if level >= 2 * n or xor2.edge_bit[e] != x[int(xor2.edge_var[e]) - 1]:
                continue
            if level < n:  # widening: value at the extended prefix is preserved
                old = (int(xor2.func[src]) >> prefix_index[level]) & 1
                new = (int(xor2.func[dst]) >> prefix_index[level + 1]) & 1
                assert new == old
            elif level > n:  # narrowing: evaluated value is preserved
                j = 2 * n - level
                old = (int(xor2.func[src]) >> prefix_index[j]) & 1
                new = (int(xor2.func[dst]) >> prefix_index[j - 1]) & 1
                assert new == old
            else:  # glue transition: the relabeled value is f==g at x
                g_value = (int(xor2.func[src]) >> prefix_index[n]) & 1
                relabeled = 1 if g_value == evaluate(f, x) else 0
                new = (int(xor2.func[dst]) >> prefix_index[n - 1]) & 1
                assert new == relabeled


def test_build_deterministic():
    f = named_function("random:2", 2)
    assert build_amortized(f) == build_amortized(f)


def test_build_guards():
    with pytest.raises(errors.ArityOutOfRange):
        build_amortized(named_function("xor", 5))
    with pytest.raises(errors.ArityOutOfRange):
        build_amortized(named_function("const1", 0))
    with pytest.raises(errors.MemoryGuardExceeded):
        build_amortized(named_function("xor", 3), BuildOptions(memory_limit=1000))
    assert estimate_build_bytes(5) > estimate_build_bytes(4) > 0


# --- reversal ----------------------------------------------------------------------

def test_reverse_build_edge_set(xor1):
    rows = np.column_stack(
        [xor1.edge_src, xor1.edge_var, xor1.edge_bit, xor1.edge_dst]
    )
    flipped = reverse_segment(rows)
    assert np.array_equal(flipped[:, 0], rows[:, 3])
    again = reverse_segment(flipped)
    assert np.array_equal(again, rows)


def test_reverse_rejects_same_label_collision():
    rows = [(0, 1, 0, 2), (1, 1, 0, 2)]
    with pytest.raises(errors.ReversibilityViolation) as info:
        reverse_segment(rows)
    assert info.value.node == 2


def test_reverse_rejects_odd_indegree():
    with pytest.raises(errors.ReversibilityViolation):
        reverse_segment([(0, 1, 0, 1)])


# --- pruning -----------------------------------------------------------------------


def python_reachable_oracle(program, x):
    """Independent dict-based traversal: set of nodes on start walks under x."""
    succ = {}
    for e in range(program.num_edges):
        succ[(int(program.edge_src[e]), int(program.edge_bit[e]))] = int(program.edge_dst[e])
    var_of = {}
    for e in range(program.num_edges):
        var_of[int(program.edge_src[e])] = int(program.edge_var[e])
    visited = set()
    for i in range(len(program.starts)):
        node = int(program.starts[i])
        visited.add(node)
        while node in var_of:
            node = succ[(node, x[var_of[node] - 1])]
            visited.add(node)
    return visited


def test_prune_matches_oracle_and_is_stable(xor2):
    pruned = prune_unreachable(xor2)
    oracle = set()
    for x in all_inputs(2):
        oracle |= python_reachable_oracle(xor2, x)
    assert pruned.num_nodes == len(oracle) == 155  # frozen for n=2 xor
    assert prune_unreachable(xor2).num_nodes == 155
    assert pruned.num_nodes < 224


def test_prune_preserves_walks(xor1, xor2):
    for program, n in ((xor1, 1), (xor2, 2)):
        pruned = prune_unreachable(program)
        assert pruned.validate_structure().ok
        for x in all_inputs(n):
            for i in range(1, program.m + 1):
                assert pruned.walk(i, x) == program.walk(i, x)


def test_prune_removes_dead_weight(xor2):
    pruned = prune_unreachable(xor2)
    assert len(pruned.dead_sinks) == 0
    assert len(pruned.unreachable_roots) == 0
    assert pruned.pruned
    report = size_report(pruned)
    assert report.matches_formula is None
    assert report.bounds_ok


def test_prune_constant_function_keeps_registered_sinks():
    program = build_amortized(named_function("const0", 2))
    pruned = prune_unreachable(program)
    assert len(pruned.accepts) == pruned.m
    assert pruned.validate_structure().ok
    for x in all_inputs(2):
        for i in (1, pruned.m):
            assert pruned.walk(i, x).kind == "reject"


def test_prune_via_build_option():
    direct = build_amortized(named_function("xor", 2), BuildOptions(prune=True))
    assert direct == prune_unreachable(build_amortized(named_function("xor", 2)))
