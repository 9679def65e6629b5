import warnings

import pytest

from ambp import errors
from ambp.construction import BuildOptions, build_amortized
from ambp.dot import DotOptions, export_dot
from ambp.serial import deserialize, serialize
from ambp.truthtable import named_function


def test_round_trip_n1(xor1):
    text = serialize(xor1)
    again = deserialize(text)
    assert again == xor1
    assert serialize(again) == text


@pytest.mark.parametrize("n", [1, 2, 3])
def test_round_trip_builds(n):
    f = named_function("random:3", n)
    program = build_amortized(f)
    assert deserialize(serialize(program)) == program


def test_round_trip_pruned():
    program = build_amortized(named_function("xor", 2), BuildOptions(prune=True))
    again = deserialize(serialize(program))
    assert again == program
    assert again.pruned


def test_truncated_file(xor1):
    lines = serialize(xor1).splitlines()
    with pytest.raises(errors.ParseError):
        deserialize("\n".join(lines[:10]))  # no starts/accepts/rejects lines


def test_version_mismatch():
    with pytest.raises(errors.VersionMismatch):
        deserialize("AMBP v2\nn 1 m 1 pruned 0\n")


def test_dangling_edge(xor1):
    text = serialize(xor1)
    tampered = text.replace("edge 0 x1 0", "edge 999 x1 0", 1)
    with pytest.raises(errors.DanglingEdge):
        deserialize(tampered)


def test_bad_header():
    with pytest.raises(errors.ParseError):
        deserialize("hello\n")
    with pytest.raises(errors.ParseError):
        deserialize("AMBP v1\nn 1 m 1\n")


def test_sparse_ids_rejected():
    text = (
        "AMBP v1\n"
        "n 1 m 1 pruned 0\n"
        "node 0 seg FWD1 level 0 func 1 replica 0 kind start\n"
        "node 5 seg FWD1 level 0 func 0 replica 0 kind reject\n"
        "starts 0\naccepts 0\nrejects 5\n"
    )
    with pytest.raises(errors.ParseError):
        deserialize(text)


def test_serialize_deterministic(xor2):
    rebuilt = build_amortized(named_function("xor", 2))
    assert serialize(xor2) == serialize(rebuilt)


# --- DOT ------------------------------------------------------------------------


def node_statements(text):
    return [l for l in text.splitlines() if l.strip().startswith('"n') and "[label=" in l]


def test_dot_n1_node_count(xor1):
    assert len(node_statements(export_dot(xor1))) == 32


def test_dot_n2_node_count(xor2):
    assert len(node_statements(export_dot(xor2))) == 224


def test_dot_deterministic(xor1):
    assert export_dot(xor1) == export_dot(build_amortized(named_function("xor", 1)))


def test_dot_colors(xor1):
    text = export_dot(xor1)
    assert "[color=blue" in text and "[color=red" in text


def test_dot_shapes(xor1):
    text = export_dot(xor1)
    for shape in ("invhouse", "doublecircle", "doubleoctagon", "octagon", "diamond"):
        assert f"shape={shape}" in text


def test_dot_size_warning(maj3):
    with pytest.warns(UserWarning):
        text = export_dot(maj3)
    assert "// warning" in text


def test_dot_segment_filter(xor2):
    text = export_dot(xor2, DotOptions(segments=("FWD1",)))
    # FWD1 owns levels 0..n, 16 nodes each
    assert len(node_statements(text)) == 3 * 16
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # small subgraph: no size warning
        export_dot(xor2, DotOptions(segments=("FWD1",)))
