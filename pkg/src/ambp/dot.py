"""Graphviz export.  Edges taken on value 1 are blue, on value 0 red; start,
accept and reject nodes are shape-coded.  Output is deterministic."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .program import Program, SEGMENTS
from .serial import _node_kinds

SIZE_WARNING_THRESHOLD = 300  # a full n=2 build is 224 nodes

_SHAPES = {
    "start": "invhouse",
    "accept": "doublecircle",
    "reject": "doubleoctagon",
    "dead": "octagon",
    "root": "diamond",
    "internal": "ellipse",
}


@dataclass(frozen=True)
class DotOptions:
    graph_name: str = "ambp"
    segments: tuple[str, ...] | None = None
    min_level: int | None = None
    max_level: int | None = None


def export_dot(program: Program, options: DotOptions | None = None, labeler=None) -> str:
    """Render the (optionally filtered) program as a DOT digraph.

    `labeler(node_id) -> str` overrides the default hex func/replica label.
    Emits one node statement per included node, grouped rank-same by level.
    """
    options = options or DotOptions()
    keep = np.ones(program.num_nodes, bool)
    if options.segments is not None:
        wanted = {SEGMENTS.index(s) for s in options.segments}
        keep &= np.isin(program.seg, sorted(wanted))
    if options.min_level is not None:
        keep &= program.level >= options.min_level
    if options.max_level is not None:
        keep &= program.level <= options.max_level

    kinds = _node_kinds(program)
    included = int(keep.sum())
    lines = [f"digraph {options.graph_name} {{", "  rankdir=TB;"]
    if included > SIZE_WARNING_THRESHOLD:
        message = (
            f"{included} nodes; graphviz rendering is impractical beyond n=2"
        )
        warnings.warn(message, stacklevel=2)
        lines.append(f"  // warning: {message}")

    suffix = {}
    for name, arr in (("s", program.starts), ("a", program.accepts), ("r", program.rejects)):
        for position, u in enumerate(arr, start=1):
            suffix[int(u)] = f" {name}{position}"

    for level, ids in program.level_blocks():
        ids = ids[keep[ids]]
        if len(ids) == 0:
            continue
        lines.append("  { rank=same;")
        for u in np.sort(ids):
            u = int(u)
            if labeler is not None:
                label = labeler(u)
            else:
                label = f"{program.func[u]:x}/{program.replica[u]}"
            label += suffix.get(u, "")
            lines.append(
                f'    "n{u}" [label="{label}", shape={_SHAPES[kinds[u]]}];'
            )
        lines.append("  }")

    for e in range(program.num_edges):
        src, dst = int(program.edge_src[e]), int(program.edge_dst[e])
        if not (keep[src] and keep[dst]):
            continue
        color = "blue" if program.edge_bit[e] else "red"
        lines.append(
            f'  "n{src}" -> "n{dst}" [color={color}, label="x{program.edge_var[e]}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
