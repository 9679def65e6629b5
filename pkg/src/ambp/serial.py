"""AMBP v1, a line-oriented whitespace-separated program format.

    AMBP v1
    n <n> m <m> pruned <0|1>
    node <id> seg <FWD1|FWD2|REVA|REVB> level <l> func <hex> replica <int> kind <kind>
    edge <src> x<k> <0|1> <dst>
    starts <id ...>
    accepts <id ...>
    rejects <id ...>

Node ids must be the dense range 0..N-1 (any declaration order).  The start,
accept and reject lines are ordered: position i is copy i.  Dead sinks and
unreachable roots travel in the kind column.  serialize/deserialize round-trip
is the identity, including list orders, and identical programs serialize to
byte-identical text.
"""

from __future__ import annotations

import numpy as np

from . import errors
from .program import Program, SEGMENTS, _SEG_CODE

_KINDS = ("internal", "start", "accept", "reject", "dead", "root")


def _node_kinds(program: Program) -> list[str]:
    kinds = ["internal"] * program.num_nodes
    for u in program.unreachable_roots:
        kinds[u] = "root"
    for u in program.starts:
        kinds[u] = "start"
    # sink classifications win over "start"; startness lives in the starts line
    for name, arr in (("accept", program.accepts), ("reject", program.rejects), ("dead", program.dead_sinks)):
        for u in arr:
            kinds[u] = name
    return kinds


def serialize(program: Program) -> str:
    kinds = _node_kinds(program)
    lines = [
        "AMBP v1",
        f"n {program.n} m {program.m} pruned {int(program.pruned)}",
    ]
    seg, level = program.seg, program.level
    func, replica = program.func, program.replica
    for u in range(program.num_nodes):
        lines.append(
            f"node {u} seg {SEGMENTS[seg[u]]} level {level[u]} "
            f"func {func[u]:x} replica {replica[u]} kind {kinds[u]}"
        )
    src, var = program.edge_src, program.edge_var
    bit, dst = program.edge_bit, program.edge_dst
    for e in range(program.num_edges):
        lines.append(f"edge {src[e]} x{var[e]} {bit[e]} {dst[e]}")
    for name, arr in (("starts", program.starts), ("accepts", program.accepts), ("rejects", program.rejects)):
        lines.append(name + ("" if len(arr) == 0 else " " + " ".join(str(u) for u in arr)))
    return "\n".join(lines) + "\n"


def write_program(program: Program, path) -> None:
    with open(path, "w", encoding="ascii") as handle:
        handle.write(serialize(program))


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise errors.ParseError(f"bad {what} {token!r}", line=lineno) from None


def deserialize(text: str) -> Program:
    lines = text.splitlines()
    if not lines:
        raise errors.ParseError("empty input", line=1)
    if lines[0].strip() != "AMBP v1":
        if lines[0].strip().startswith("AMBP"):
            raise errors.VersionMismatch(
                f"unsupported version {lines[0].strip()!r}", line=1
            )
        raise errors.ParseError("missing AMBP header", line=1)
    if len(lines) < 2:
        raise errors.ParseError("missing size header", line=2)
    header = lines[1].split()
    if len(header) != 6 or header[0] != "n" or header[2] != "m" or header[4] != "pruned":
        raise errors.ParseError("expected 'n <n> m <m> pruned <0|1>'", line=2)
    n = _parse_int(header[1], "n", 2)
    m = _parse_int(header[3], "m", 2)
    pruned_token = _parse_int(header[5], "pruned flag", 2)
    if pruned_token not in (0, 1):
        raise errors.ParseError(f"pruned flag must be 0 or 1, got {pruned_token}", line=2)

    nodes: dict[int, tuple[int, int, int, int, str]] = {}
    edges: list[tuple[int, int, int, int]] = []
    lists: dict[str, list[int]] = {}
    section = "nodes"
    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        if keyword == "node":
            if section != "nodes":
                raise errors.ParseError("node line after edge/list section", line=lineno)
            if len(tokens) != 12 or tokens[2] != "seg" or tokens[4] != "level" \
                    or tokens[6] != "func" or tokens[8] != "replica" or tokens[10] != "kind":
                raise errors.ParseError("malformed node line", line=lineno)
            node_id = _parse_int(tokens[1], "node id", lineno)
            if node_id in nodes:
                raise errors.ParseError(f"duplicate node id {node_id}", line=lineno)
            if tokens[3] not in _SEG_CODE:
                raise errors.ParseError(f"unknown segment {tokens[3]!r}", line=lineno)
            try:
                func_value = int(tokens[7], 16)
            except ValueError:
                raise errors.ParseError(f"bad func hex {tokens[7]!r}", line=lineno) from None
            if tokens[11] not in _KINDS:
                raise errors.ParseError(f"unknown kind {tokens[11]!r}", line=lineno)
            nodes[node_id] = (
                _SEG_CODE[tokens[3]],
                _parse_int(tokens[5], "level", lineno),
                func_value,
                _parse_int(tokens[9], "replica", lineno),
                tokens[11],
            )
        elif keyword == "edge":
            if section == "lists":
                raise errors.ParseError("edge line after list section", line=lineno)
            section = "edges"
            if len(tokens) != 5 or not tokens[2].startswith("x"):
                raise errors.ParseError("malformed edge line", line=lineno)
            src = _parse_int(tokens[1], "edge source", lineno)
            var = _parse_int(tokens[2][1:], "edge variable", lineno)
            bit = _parse_int(tokens[3], "edge bit", lineno)
            dst = _parse_int(tokens[4], "edge target", lineno)
            if src not in nodes or dst not in nodes:
                missing = src if src not in nodes else dst
                raise errors.DanglingEdge(
                    f"edge references undeclared node {missing}", line=lineno
                )
            edges.append((src, var, bit, dst))
        elif keyword in ("starts", "accepts", "rejects"):
            section = "lists"
            if keyword in lists:
                raise errors.ParseError(f"duplicate {keyword} line", line=lineno)
            ids = [_parse_int(t, "list entry", lineno) for t in tokens[1:]]
            for u in ids:
                if u not in nodes:
                    raise errors.DanglingEdge(
                        f"{keyword} references undeclared node {u}", line=lineno
                    )
            lists[keyword] = ids
        else:
            raise errors.ParseError(f"unknown keyword {keyword!r}", line=lineno)

    for required in ("starts", "accepts", "rejects"):
        if required not in lists:
            raise errors.ParseError(f"missing {required} line", line=len(lines))
    count = len(nodes)
    if sorted(nodes) != list(range(count)):
        raise errors.ParseError(
            f"node ids must be the dense range 0..{count - 1}", line=len(lines)
        )

    seg = np.empty(count, np.uint8)
    level = np.empty(count, np.int32)
    func = np.empty(count, np.int64)
    replica = np.empty(count, np.int64)
    dead, roots = [], []
    for node_id in range(count):
        s, l, fv, r, kind = nodes[node_id]
        seg[node_id] = s
        level[node_id] = l
        func[node_id] = fv
        replica[node_id] = r
        if kind == "dead":
            dead.append(node_id)
        elif kind == "root":
            roots.append(node_id)

    edge_arr = np.array(edges, np.int64).reshape(-1, 4)
    return Program(
        n,
        m,
        seg=seg,
        level=level,
        func=func,
        replica=replica,
        edge_src=edge_arr[:, 0],
        edge_var=edge_arr[:, 1],
        edge_bit=edge_arr[:, 2],
        edge_dst=edge_arr[:, 3],
        starts=lists["starts"],
        accepts=lists["accepts"],
        rejects=lists["rejects"],
        dead_sinks=dead,
        unreachable_roots=roots,
        pruned=bool(pruned_token),
    )


def read_program(path) -> Program:
    with open(path, "r", encoding="ascii") as handle:
        return deserialize(handle.read())
