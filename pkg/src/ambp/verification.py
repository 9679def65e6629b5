"""Exhaustive and vectorized checkers for every semantic claim a build makes.

Each verifier returns a VerificationReport rather than raising: a failure is
data with a witness.  The checks assume nothing about how the program was
produced except where noted (node semantics and the fast evaluator need the
standard unpruned layout).  Two independent evaluation routes exist on
purpose: `Program.walk` follows stored edges one node at a time, while
`eval_all_fast` composes the per-layer next-maps for all starts at once; the
suite requires them to agree everywhere.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import errors
from .program import (
    Program,
    SinkOutcome,
    SEG_FWD1,
    SEG_FWD2,
    SEG_REVA,
    SEG_REVB,
    all_inputs,
)
from .truthtable import TruthTable, evaluate

DEFAULT_SPOT_SEED = 0x5EED


@dataclass
class VerificationReport:
    check: str
    passed: bool
    witness: dict | None
    counts: dict[str, int]
    millis: float

    def to_json_dict(self) -> dict:
        d = {
            "check": self.check,
            "pass": self.passed,
            "counts": self.counts,
            "millis": round(self.millis, 3),
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d

    def __str__(self) -> str:
        status = "PASS" if self.passed else f"FAIL {self.witness}"
        return f"{self.check}: {status} {self.counts}"


def _report(check, passed, witness, counts, t0) -> VerificationReport:
    return VerificationReport(
        check, passed, witness, counts, (time.perf_counter() - t0) * 1000.0
    )


def _input_text(x) -> str:
    return "".join(str(b) for b in x)


# --------------------------------------------------------------------------
# copy correctness


def expected_outcome(f: TruthTable, i: int, x) -> SinkOutcome:
    return SinkOutcome("accept" if evaluate(f, x) else "reject", i)


def verify_m_copies(program: Program, f: TruthTable) -> VerificationReport:
    """Walk every (start, input) pair and demand the exact paired sink:
    accept i when f(x)=1, reject i when f(x)=0.  Kind alone is not enough,
    and a walk into a dead sink is a failure like any other mismatch."""
    t0 = time.perf_counter()
    if f.arity != program.n:
        raise errors.ArityMismatch(f"f has arity {f.arity}, program has n={program.n}")
    checked = 0
    for x in all_inputs(program.n):
        for i in range(1, program.m + 1):
            got = program.walk(i, x)
            want = expected_outcome(f, i, x)
            checked += 1
            if got != want:
                return _report(
                    "m-copies",
                    False,
                    {
                        "start": i,
                        "input": _input_text(x),
                        "expected": str(want),
                        "got": str(got),
                    },
                    {"paths": checked},
                    t0,
                )
    return _report("m-copies", True, None, {"paths": checked}, t0)


def _final_nodes_fast(program: Program, x) -> np.ndarray:
    nxt = program.next_under(x)
    _, _, outvar = program._adj()
    cur = program.starts.copy()
    for _ in range(len(program.level_blocks())):
        alive = outvar[cur] > 0
        if not alive.any():
            break
        stepped = nxt[cur[alive]]
        if (stepped < 0).any():
            raise errors.MissingEdge("fast evaluation hit a pruned branch")
        cur[alive] = stepped
    return cur


def eval_all_fast(program: Program, x) -> list[SinkOutcome]:
    """Advance all m starts through the layers at once by composing the
    per-layer next-maps under x.  Returns the outcome for each start; the
    final nodes must be pairwise distinct (the composed maps are bijections),
    anything else means the program is not a faithful build."""
    if program.pruned:
        raise errors.RequiresUnpruned("eval_all_fast needs the full layers")
    final = _final_nodes_fast(program, x)
    if len(np.unique(final)) != len(final):
        raise errors.StructureInvalid(
            "fast evaluation produced colliding final nodes"
        )
    return [program.outcome_of(int(u)) for u in final]


def verify_m_copies_fast(
    program: Program,
    f: TruthTable,
    spot_walks: int = 1024,
    seed: int = DEFAULT_SPOT_SEED,
) -> VerificationReport:
    """Copy correctness via the composed-bijection evaluator over every input
    and every start, cross-checked by random individual walks."""
    t0 = time.perf_counter()
    if program.pruned:
        raise errors.RequiresUnpruned("fast verification needs the full layers")
    kind, index = program._sinks()
    checked = 0
    finals: dict[tuple, np.ndarray] = {}
    for x in all_inputs(program.n):
        final = _final_nodes_fast(program, x)
        finals[tuple(x)] = final
        want_kind = 1 if evaluate(f, x) else 2
        bad = (kind[final] != want_kind) | (index[final] != np.arange(1, program.m + 1))
        checked += program.m
        if bad.any():
            i = int(np.flatnonzero(bad)[0]) + 1
            return _report(
                "m-copies-fast",
                False,
                {
                    "start": i,
                    "input": _input_text(x),
                    "expected": str(expected_outcome(f, i, x)),
                    "got": str(program.outcome_of(int(final[i - 1]))),
                },
                {"paths": checked},
                t0,
            )
    rng = random.Random(seed)
    xs = list(all_inputs(program.n))
    for _ in range(spot_walks):
        i = rng.randrange(1, program.m + 1)
        x = xs[rng.randrange(len(xs))]
        got = program.walk(i, x)
        fast = program.outcome_of(int(finals[tuple(x)][i - 1]))
        checked += 1
        if got != fast:
            return _report(
                "m-copies-fast",
                False,
                {
                    "start": i,
                    "input": _input_text(x),
                    "expected": str(fast),
                    "got": str(got),
                },
                {"paths": checked, "spot_walks": spot_walks},
                t0,
            )
    return _report(
        "m-copies-fast", True, None, {"paths": checked, "spot_walks": spot_walks}, t0
    )


# --------------------------------------------------------------------------
# path disjointness


def verify_disjoint_paths(program: Program, x=None) -> VerificationReport:
    """The m walks on one input must be pairwise vertex-disjoint.  With x
    omitted, checks every input."""
    t0 = time.perf_counter()
    inputs = [tuple(x)] if x is not None else list(all_inputs(program.n))
    _, _, outvar = program._adj()
    nodes_checked = 0
    for x_value in inputs:
        visits = np.zeros(program.num_nodes, np.int32)
        nxt = program.next_under(x_value)
        cur = program.starts.copy()
        np.add.at(visits, cur, 1)
        for _ in range(len(program.level_blocks())):
            alive = outvar[cur] > 0
            if not alive.any():
                break
            cur = cur.copy()
            cur[alive] = nxt[cur[alive]]
            np.add.at(visits, cur[alive], 1)
        nodes_checked += int(visits.sum())
        if visits.max(initial=0) > 1:
            node = int(visits.argmax())
            holders = [
                i
                for i in range(1, program.m + 1)
                if node in program.walk(i, x_value, return_path=True)[1]
            ][:2]
            return _report(
                "disjoint-paths",
                False,
                {"input": _input_text(x_value), "node": node, "starts": holders},
                {"inputs": len(inputs), "visits": nodes_checked},
                t0,
            )
    return _report(
        "disjoint-paths", True, None, {"inputs": len(inputs), "visits": nodes_checked}, t0
    )


# --------------------------------------------------------------------------
# node semantics


def _node_arities(program: Program) -> np.ndarray:
    n = program.n
    level = program.level.astype(np.int64)
    seg = program.seg
    arity = np.where(
        seg == SEG_FWD1,
        level,
        np.where(seg == SEG_FWD2, 2 * n - level, np.minimum(4 * n - level, level - 2 * n)),
    )
    if arity.min(initial=0) < 0 or arity.max(initial=0) > n:
        raise errors.RangeError("node levels do not follow the standard build layout")
    return arity


def predicted_reachable(program: Program, f: TruthTable, x) -> np.ndarray:
    """Closed-form reachability predicate per node, independent of the edges.

    Widening-pass nodes labeled g are visited exactly when g is true at the
    consumed prefix.  Narrowing-pass nodes labeled h are visited exactly when
    h's prefix value AGREES WITH f(x): on rejecting inputs the start walks
    ride the disagreeing side down to the constant-0 sinks.  The first
    reversed copy only carries start walks when f(x)=1 and revisits the value
    side (f and label both true); the second only when f(x)=0, revisiting the
    mirrored labels' false side until it crosses back into widening-pass
    labels at level 3n.  Accepts, rejects and dead sinks inherit f, not-f and
    never from these cases.
    """
    n = program.n
    fx = evaluate(f, x)
    arity = _node_arities(program)
    idx = np.zeros(n + 1, np.int64)
    for a in range(1, n + 1):
        idx[a] = idx[a - 1] | (x[a - 1] << (a - 1))
    bit = (program.func >> idx[arity]) & 1
    seg = program.seg
    level = program.level
    pred = np.zeros(program.num_nodes, bool)
    fwd1 = seg == SEG_FWD1
    fwd2 = seg == SEG_FWD2
    reva = seg == SEG_REVA
    revb_low = (seg == SEG_REVB) & (level < 3 * n)
    revb_high = (seg == SEG_REVB) & (level >= 3 * n)
    pred[fwd1] = bit[fwd1] == 1
    pred[fwd2] = bit[fwd2] == fx
    pred[reva] = (bit[reva] == 1) if fx else False
    pred[revb_low] = (bit[revb_low] == 0) if not fx else False
    pred[revb_high] = (bit[revb_high] == 1) if not fx else False
    return pred


def verify_node_semantics(program: Program, f: TruthTable) -> VerificationReport:
    """Graph reachability from the starts must equal the closed-form per-node
    predicate on every input; in particular accepts carry f, rejects not-f,
    and dead sinks are never reached.  Unpruned builds only."""
    t0 = time.perf_counter()
    if program.pruned:
        raise errors.RequiresUnpruned("node semantics needs the full layers")
    if f.arity != program.n:
        raise errors.ArityMismatch(f"f has arity {f.arity}, program has n={program.n}")
    checked = 0
    for x in all_inputs(program.n):
        got = program.reachable_under(x)
        want = predicted_reachable(program, f, x)
        checked += program.num_nodes
        if not np.array_equal(got, want):
            node = int(np.flatnonzero(got != want)[0])
            return _report(
                "node-semantics",
                False,
                {
                    "input": _input_text(x),
                    "node": node,
                    "ref": str(program.ref(node)),
                    "expected_reachable": bool(want[node]),
                    "got_reachable": bool(got[node]),
                },
                {"node_inputs": checked},
                t0,
            )
    return _report("node-semantics", True, None, {"node_inputs": checked}, t0)


# --------------------------------------------------------------------------
# read schedule


@dataclass
class ReadSchedule:
    variables: tuple[int, ...]
    oblivious: bool
    var_counts: dict[int, int]
    forward_var_counts: dict[int, int]  # transitions below level 2n only


def read_schedule(program: Program) -> ReadSchedule:
    """Per-transition variable; raises NotOblivious if two edges in one layer
    transition disagree."""
    src_levels = program.level[program.edge_src]
    levels = sorted(set(src_levels.tolist()))
    variables = []
    for level in levels:
        vars_here = np.unique(program.edge_var[src_levels == level])
        if len(vars_here) != 1:
            raise errors.NotOblivious(
                f"transition from level {level} reads {sorted(int(v) for v in vars_here)}"
            )
        variables.append(int(vars_here[0]))
    counts: dict[int, int] = {}
    fwd_counts: dict[int, int] = {}
    for level, var in zip(levels, variables):
        counts[var] = counts.get(var, 0) + 1
        if level < 2 * program.n:
            fwd_counts[var] = fwd_counts.get(var, 0) + 1
    return ReadSchedule(tuple(variables), True, counts, fwd_counts)


# --------------------------------------------------------------------------
# layer bijections and per-input matchings


def _transitions(program: Program):
    """Edges grouped by source level, ascending; yields (level, row indices)."""
    src_levels = program.level[program.edge_src]
    order = np.argsort(src_levels, kind="stable")
    values = src_levels[order]
    if len(values) == 0:
        return
    cuts = np.flatnonzero(np.diff(values)) + 1
    for group in np.split(order, cuts):
        yield int(src_levels[group[0]]), group


def verify_level_bijections(program: Program) -> VerificationReport:
    """For every layer transition and each label bit, the edge map must be a
    bijection: each non-sink source node exactly once, all targets one level
    up and pairwise distinct, and both labels covering the same target set.
    This is a single pass per transition, so it scales to the n=4 build."""
    t0 = time.perf_counter()
    out0, out1, outvar = program._adj()
    transitions = 0
    for level, rows in _transitions(program):
        transitions += 1
        sources = np.sort(np.unique(program.edge_src[rows]))
        dst_sets = {}
        for b in (0, 1):
            sel = rows[program.edge_bit[rows] == b]
            srcs = program.edge_src[sel]
            dsts = program.edge_dst[sel]
            if len(np.unique(srcs)) != len(srcs) or not np.array_equal(np.sort(srcs), sources):
                return _report(
                    "level-bijections",
                    False,
                    {"level": level, "bit": b, "problem": "source coverage"},
                    {"transitions": transitions},
                    t0,
                )
            if (program.level[dsts] != level + 1).any():
                return _report(
                    "level-bijections",
                    False,
                    {"level": level, "bit": b, "problem": "target level"},
                    {"transitions": transitions},
                    t0,
                )
            sorted_dsts = np.sort(dsts)
            if len(np.unique(sorted_dsts)) != len(sorted_dsts):
                dup = int(sorted_dsts[np.flatnonzero(np.diff(sorted_dsts) == 0)[0]])
                return _report(
                    "level-bijections",
                    False,
                    {"level": level, "bit": b, "problem": "duplicate target", "node": dup},
                    {"transitions": transitions},
                    t0,
                )
            dst_sets[b] = sorted_dsts
        if not np.array_equal(dst_sets[0], dst_sets[1]):
            return _report(
                "level-bijections",
                False,
                {"level": level, "problem": "labels cover different target sets"},
                {"transitions": transitions},
                t0,
            )
    return _report("level-bijections", True, None, {"transitions": transitions}, t0)


def verify_matching_decomposition(program: Program, x=None) -> VerificationReport:
    """For each input, the edges consistent with it must form a perfect
    matching between consecutive layers (hence vertex-disjoint full paths
    through every layer node).  With x omitted, checks every input."""
    t0 = time.perf_counter()
    inputs = [tuple(x)] if x is not None else list(all_inputs(program.n))
    groups = list(_transitions(program))
    checked = 0
    for x_value in inputs:
        xbits = np.asarray(x_value, np.int8)
        for level, rows in groups:
            sel = rows[program.edge_bit[rows] == xbits[program.edge_var[rows] - 1]]
            srcs = program.edge_src[sel]
            dsts = program.edge_dst[sel]
            checked += len(sel)
            all_srcs = np.unique(program.edge_src[rows])
            ok = (
                len(np.unique(srcs)) == len(srcs)
                and len(srcs) == len(all_srcs)
                and len(np.unique(dsts)) == len(dsts)
            )
            if not ok:
                return _report(
                    "matching-decomposition",
                    False,
                    {"input": _input_text(x_value), "level": level},
                    {"inputs": len(inputs), "edges": checked},
                    t0,
                )
    return _report(
        "matching-decomposition",
        True,
        None,
        {"inputs": len(inputs), "edges": checked},
        t0,
    )


# --------------------------------------------------------------------------
# vertex traffic (bottleneck demonstration)


@dataclass
class TrafficTable:
    """Per-node count of inputs from I whose start walks visit the node,
    plus the densities that cap any per-vertex assignment criterion."""

    input_count: int
    node_counts: np.ndarray
    forward_levels_carry_m: bool
    size_per_copy: Fraction
    per_copy_bound: int
    within_bound: bool
    min_level_width_ratio: Fraction

    def to_json_dict(self) -> dict:
        return {
            "inputs": self.input_count,
            "max_node_traffic": int(self.node_counts.max(initial=0)),
            "forward_levels_carry_m": self.forward_levels_carry_m,
            "size_per_copy": str(self.size_per_copy),
            "per_copy_bound": self.per_copy_bound,
            "within_bound": self.within_bound,
            "min_level_width_ratio": str(self.min_level_width_ratio),
        }


def vertex_traffic(program: Program, inputs: Sequence) -> TrafficTable:
    """Counts how many inputs of I route a start walk through each node.

    Every forward layer carries exactly m visits per input, so a criterion
    assigning a path vertex to each input can pin at most (layer width)/m of
    the program per input; the reported ratios make that cap concrete, and
    size/m itself must stay within the per-copy ceiling."""
    inputs = list(inputs)
    counts = np.zeros(program.num_nodes, np.int64)
    forward_ok = True
    fwd = (program.seg == SEG_FWD1) | (program.seg == SEG_FWD2)
    for x in inputs:
        visited = program.reachable_under(x)
        counts += visited
        for level in range(2 * program.n + 1):
            hits = int(np.count_nonzero(visited & fwd & (program.level == level)))
            if hits != program.m:
                forward_ok = False
    widths = [
        (level, len(ids)) for level, ids in program.level_blocks()
    ]
    min_ratio = min(
        (Fraction(width, program.m) for _, width in widths),
        default=Fraction(0),
    )
    per_copy = Fraction(program.num_nodes, program.m)
    return TrafficTable(
        input_count=len(inputs),
        node_counts=counts,
        forward_levels_carry_m=forward_ok,
        size_per_copy=per_copy,
        per_copy_bound=64 * program.n,
        within_bound=per_copy <= 64 * program.n,
        min_level_width_ratio=min_ratio,
    )


# --------------------------------------------------------------------------
# mutation helper


def mutate_edge(program: Program, rng: random.Random):
    """Redirect one random edge to a different node on the target's level.
    Returns the mutated program and a description of the change."""
    if program.num_edges == 0:
        raise errors.EmptyProgram("no edges to mutate")
    e = rng.randrange(program.num_edges)
    old_dst = int(program.edge_dst[e])
    level = program.level[old_dst]
    candidates = np.flatnonzero(program.level == level)
    candidates = candidates[candidates != old_dst]
    if len(candidates) == 0:
        raise errors.RangeError(f"level {level} has a single node")
    new_dst = int(candidates[rng.randrange(len(candidates))])
    edge_dst = program.edge_dst.copy()
    edge_dst[e] = new_dst
    mutated = Program(
        program.n,
        program.m,
        seg=program.seg,
        level=program.level,
        func=program.func,
        replica=program.replica,
        edge_src=program.edge_src,
        edge_var=program.edge_var,
        edge_bit=program.edge_bit,
        edge_dst=edge_dst,
        starts=program.starts,
        accepts=program.accepts,
        rejects=program.rejects,
        dead_sinks=program.dead_sinks,
        unreachable_roots=program.unreachable_roots,
        pruned=program.pruned,
    )
    return mutated, {"edge": e, "old_dst": old_dst, "new_dst": new_dst}
