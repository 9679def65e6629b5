"""Multi-start branching programs as layered labeled DAGs.

A program is a directed acyclic multigraph whose non-sink nodes carry two
out-edges labeled with complementary values of one variable, plus ordered
lists of m start, m accept and m reject nodes.  Index pairing is semantic:
the walk from start i must finish at accept i or reject i.  Sinks belonging
to neither list are tracked as dead sinks, and indegree-0 non-start interior
nodes as unreachable roots; both arise from the reversed copies of the
amortized construction and are proven unreachable by the verifiers.

Node identity is structured: (segment, level, func, replica).  Levels must
strictly increase along edges, which is the format's acyclicity witness.

Programs are immutable after construction and safe to share across threads;
all caches are derived data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import errors

SEGMENTS = ("FWD1", "FWD2", "REVA", "REVB")
SEG_FWD1, SEG_FWD2, SEG_REVA, SEG_REVB = range(4)
_SEG_CODE = {name: code for code, name in enumerate(SEGMENTS)}

_KIND_NAMES = (None, "accept", "reject", "dead")


@dataclass(frozen=True)
class NodeRef:
    """Structured node identity."""

    segment: str
    level: int
    func: int
    replica: int


@dataclass(frozen=True)
class SinkOutcome:
    """Where a walk ended: accept/reject carry a 1-based copy index."""

    kind: str
    index: int | None = None

    def __str__(self) -> str:
        return self.kind if self.index is None else f"{self.kind} {self.index}"


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    node: int | None = None
    edge: int | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "structure ok"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  [{v.kind}] {v.message}" for v in self.violations[:20]]
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)


def _as_array(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    return arr if arr.ndim == 1 else arr.reshape(-1)


class Program:
    """Immutable branching-program graph with ordered start/accept/reject lists."""

    def __init__(
        self,
        n: int,
        m: int,
        *,
        seg,
        level,
        func,
        replica,
        edge_src,
        edge_var,
        edge_bit,
        edge_dst,
        starts,
        accepts,
        rejects,
        dead_sinks=(),
        unreachable_roots=(),
        pruned: bool = False,
    ):
        self.n = int(n)
        self.m = int(m)
        self.pruned = bool(pruned)
        self.seg = _as_array(seg, np.uint8)
        self.level = _as_array(level, np.int32)
        self.func = _as_array(func, np.int64)
        self.replica = _as_array(replica, np.int64)
        if not (len(self.seg) == len(self.level) == len(self.func) == len(self.replica)):
            raise ValueError("node attribute arrays disagree in length")
        self.edge_src = _as_array(edge_src, np.int64)
        self.edge_var = _as_array(edge_var, np.int16)
        self.edge_bit = _as_array(edge_bit, np.int8)
        self.edge_dst = _as_array(edge_dst, np.int64)
        if not (
            len(self.edge_src) == len(self.edge_var) == len(self.edge_bit) == len(self.edge_dst)
        ):
            raise ValueError("edge attribute arrays disagree in length")
        self.starts = _as_array(starts, np.int64)
        self.accepts = _as_array(accepts, np.int64)
        self.rejects = _as_array(rejects, np.int64)
        self.dead_sinks = _as_array(dead_sinks, np.int64)
        self.unreachable_roots = _as_array(unreachable_roots, np.int64)
        self._validation: ValidationReport | None = None
        self._adjacency = None
        self._sink_info = None
        self._levels = None
        self._ref_index: dict | None = None

    # -- basic shape --------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.seg)

    @property
    def num_edges(self) -> int:
        return len(self.edge_src)

    def ref(self, node: int) -> NodeRef:
        return NodeRef(
            SEGMENTS[self.seg[node]],
            int(self.level[node]),
            int(self.func[node]),
            int(self.replica[node]),
        )

    def node_id(self, ref: NodeRef) -> int:
        if self._ref_index is None:
            self._ref_index = {
                (int(s), int(l), int(f), int(r)): u
                for u, (s, l, f, r) in enumerate(
                    zip(self.seg, self.level, self.func, self.replica)
                )
            }
        key = (_SEG_CODE[ref.segment], ref.level, ref.func, ref.replica)
        try:
            return self._ref_index[key]
        except KeyError:
            raise errors.RangeError(f"no node {ref}") from None

    @classmethod
    def from_rows(
        cls,
        n: int,
        m: int,
        nodes: Sequence[tuple],
        edges: Sequence[tuple],
        starts: Iterable[int],
        accepts: Iterable[int],
        rejects: Iterable[int],
        dead_sinks: Iterable[int] = (),
        unreachable_roots: Iterable[int] = (),
        pruned: bool = False,
    ) -> "Program":
        """Convenience constructor from (seg, level, func, replica) node rows
        and (src, var, bit, dst) edge rows; segments may be names or codes."""
        segs, levels, funcs, replicas = [], [], [], []
        for s, l, f, r in nodes:
            segs.append(_SEG_CODE[s] if isinstance(s, str) else s)
            levels.append(l)
            funcs.append(f)
            replicas.append(r)
        srcs = [e[0] for e in edges]
        vars_ = [e[1] for e in edges]
        bits = [e[2] for e in edges]
        dsts = [e[3] for e in edges]
        return cls(
            n,
            m,
            seg=segs or np.zeros(0, np.uint8),
            level=levels or np.zeros(0, np.int32),
            func=funcs or np.zeros(0, np.int64),
            replica=replicas or np.zeros(0, np.int64),
            edge_src=srcs or np.zeros(0, np.int64),
            edge_var=vars_ or np.zeros(0, np.int16),
            edge_bit=bits or np.zeros(0, np.int8),
            edge_dst=dsts or np.zeros(0, np.int64),
            starts=list(starts),
            accepts=list(accepts),
            rejects=list(rejects),
            dead_sinks=list(dead_sinks),
            unreachable_roots=list(unreachable_roots),
            pruned=pruned,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and self.pruned == other.pruned
            and np.array_equal(self.seg, other.seg)
            and np.array_equal(self.level, other.level)
            and np.array_equal(self.func, other.func)
            and np.array_equal(self.replica, other.replica)
            and np.array_equal(self.edge_src, other.edge_src)
            and np.array_equal(self.edge_var, other.edge_var)
            and np.array_equal(self.edge_bit, other.edge_bit)
            and np.array_equal(self.edge_dst, other.edge_dst)
            and np.array_equal(self.starts, other.starts)
            and np.array_equal(self.accepts, other.accepts)
            and np.array_equal(self.rejects, other.rejects)
            and set(self.dead_sinks.tolist()) == set(other.dead_sinks.tolist())
            and set(self.unreachable_roots.tolist()) == set(other.unreachable_roots.tolist())
        )

    __hash__ = None

    # -- structural validation ----------------------------------------------

    def validate_structure(self) -> ValidationReport:
        """Check every structural invariant; violations are data, not errors.

        An empty report means: edges stay in range and strictly increase in
        level, every node has outdegree 0 or 2 with complementary labels of
        one variable (outdegree 1 is additionally allowed on pruned programs,
        whose dangling branches were removed with their unreachable targets),
        every sink is registered in exactly one of accepts/rejects/dead_sinks,
        and the three index lists have length m without duplicates.
        """
        if self._validation is not None:
            return self._validation
        report = ValidationReport()
        add = report.violations.append
        n_nodes = self.num_nodes

        def check_list(name, arr, expect_len):
            if expect_len is not None and len(arr) != expect_len:
                add(Violation("list-length", f"{name} has {len(arr)} entries, expected {expect_len}"))
            bad = (arr < 0) | (arr >= n_nodes)
            for u in arr[bad]:
                add(Violation("id-range", f"{name} references node {u}", node=int(u)))
            seen = np.unique(arr[~bad], return_counts=True)
            for u, c in zip(*seen):
                if c > 1:
                    add(Violation("duplicate-listing", f"{name} lists node {u} {c} times", node=int(u)))

        check_list("starts", self.starts, self.m)
        check_list("accepts", self.accepts, self.m)
        check_list("rejects", self.rejects, self.m)
        check_list("dead_sinks", self.dead_sinks, None)
        check_list("unreachable_roots", self.unreachable_roots, None)

        src, var, bit, dst = self.edge_src, self.edge_var, self.edge_bit, self.edge_dst
        endpoint_bad = (src < 0) | (src >= n_nodes) | (dst < 0) | (dst >= n_nodes)
        for e in np.flatnonzero(endpoint_bad):
            add(Violation("edge-endpoint", f"edge {e} references a node outside [0,{n_nodes})", edge=int(e)))
        if endpoint_bad.any():
            # remaining checks index node arrays by edge endpoints
            self._validation = report
            return report

        for e in np.flatnonzero((var < 1) | (var > self.n)):
            add(Violation("var-range", f"edge {e} reads x{var[e]}, n={self.n}", edge=int(e)))
        for e in np.flatnonzero((bit != 0) & (bit != 1)):
            add(Violation("bad-bit", f"edge {e} has label bit {bit[e]}", edge=int(e)))
        level_bad = self.level[dst] <= self.level[src]
        for e in np.flatnonzero(level_bad)[:1000]:
            add(Violation(
                "level-order",
                f"edge {e}: level {self.level[dst[e]]} not above {self.level[src[e]]}",
                edge=int(e),
            ))

        deg = np.bincount(src, minlength=n_nodes) if len(src) else np.zeros(n_nodes, np.int64)
        allowed = {0, 2} | ({1} if self.pruned else set())
        for u in np.flatnonzero(~np.isin(deg, sorted(allowed))):
            add(Violation("bad-outdegree", f"node {u} has outdegree {deg[u]}", node=int(u)))

        # label discipline on outdegree-2 nodes: one variable, both bits
        if len(src):
            order = np.argsort(src, kind="stable")
            sorted_src = src[order]
            first = np.searchsorted(sorted_src, np.arange(n_nodes))
            two = np.flatnonzero(deg == 2)
            e1 = order[first[two]]
            e2 = order[first[two] + 1]
            same_var = var[e1] == var[e2]
            dup = same_var & (bit[e1] == bit[e2])
            mixed = ~same_var
            for u in two[dup]:
                add(Violation("duplicate-label", f"node {u} has two out-edges with the same label", node=int(u)))
            for u in two[mixed]:
                add(Violation("mixed-variable", f"node {u} branches on two different variables", node=int(u)))

        # sink registration: outdegree-0 nodes sit in exactly one sink list
        kind_count = np.zeros(n_nodes, np.int8)
        for arr in (self.accepts, self.rejects, self.dead_sinks):
            ok = (arr >= 0) & (arr < n_nodes)
            np.add.at(kind_count, arr[ok], 1)
        sinks = deg == 0
        for u in np.flatnonzero(sinks & (kind_count == 0)):
            add(Violation("unregistered-sink", f"sink node {u} is in no sink list", node=int(u)))
        for u in np.flatnonzero(kind_count > 1):
            add(Violation("multiply-registered", f"node {u} appears in several sink lists", node=int(u)))
        for u in np.flatnonzero(~sinks & (kind_count > 0)):
            add(Violation("registered-not-sink", f"node {u} is listed as a sink but has out-edges", node=int(u)))

        self._validation = report
        return report

    def _require_valid(self):
        report = self.validate_structure()
        if not report.ok:
            raise errors.StructureInvalid(str(report), report)

    # -- derived tables -------------------------------------------------------

    def _adj(self):
        """(out0, out1, outvar): per-node branch targets, -1 where absent."""
        if self._adjacency is None:
            self._require_valid()
            n_nodes = self.num_nodes
            out0 = np.full(n_nodes, -1, np.int64)
            out1 = np.full(n_nodes, -1, np.int64)
            outvar = np.zeros(n_nodes, np.int16)
            outvar[self.edge_src] = self.edge_var
            zero = self.edge_bit == 0
            out0[self.edge_src[zero]] = self.edge_dst[zero]
            out1[self.edge_src[~zero]] = self.edge_dst[~zero]
            self._adjacency = (out0, out1, outvar)
        return self._adjacency

    def _sinks(self):
        if self._sink_info is None:
            kind = np.zeros(self.num_nodes, np.int8)
            index = np.zeros(self.num_nodes, np.int64)
            for code, arr in ((1, self.accepts), (2, self.rejects), (3, self.dead_sinks)):
                kind[arr] = code
                if code != 3:
                    index[arr] = np.arange(1, len(arr) + 1)
            self._sink_info = (kind, index)
        return self._sink_info

    def level_blocks(self):
        """Node ids grouped by level, ascending; cached."""
        if self._levels is None:
            if self.num_nodes == 0:
                self._levels = []
            else:
                order = np.argsort(self.level, kind="stable")
                values = self.level[order]
                cuts = np.flatnonzero(np.diff(values)) + 1
                groups = np.split(order, cuts)
                levels = [int(values[c]) for c in [0] + cuts.tolist()]
                self._levels = list(zip(levels, groups))
        return self._levels

    # -- walking ---------------------------------------------------------------

    def outcome_of(self, node: int) -> SinkOutcome:
        kind, index = self._sinks()
        code = kind[node]
        if code == 0:
            raise errors.RangeError(f"node {node} is not a registered sink")
        if code == 3:
            return SinkOutcome("dead")
        return SinkOutcome(_KIND_NAMES[code], int(index[node]))

    def walk(self, start_index: int, x: Sequence[int], *, return_path: bool = False):
        """Follow the edges matching x from start s_i to a sink.

        `start_index` is 1-based.  Raises StructureInvalid on a malformed
        program and MissingEdge if a pruned-away branch is taken (impossible
        from a registered start of a faithful build).
        """
        out0, out1, outvar = self._adj()
        if not 1 <= start_index <= len(self.starts):
            raise errors.RangeError(
                f"start index {start_index} outside [1,{len(self.starts)}]"
            )
        if len(x) != self.n:
            raise errors.ArityMismatch(f"input has {len(x)} bits, n={self.n}")
        for b in x:
            if b not in (0, 1):
                raise errors.RangeError(f"input bit {b!r} is not 0 or 1")
        node = int(self.starts[start_index - 1])
        path = [node]
        while outvar[node]:
            nxt = out1[node] if x[outvar[node] - 1] else out0[node]
            if nxt < 0:
                raise errors.MissingEdge(
                    f"node {node} lacks its x{outvar[node]}={x[outvar[node] - 1]} branch"
                )
            node = int(nxt)
            path.append(node)
        outcome = self.outcome_of(node)
        return (outcome, path) if return_path else outcome

    def next_under(self, x: Sequence[int]) -> np.ndarray:
        """Per-node successor under input x; -1 at sinks and missing branches."""
        out0, out1, outvar = self._adj()
        xbits = np.asarray(x, np.int8)
        nxt = np.full(self.num_nodes, -1, np.int64)
        live = outvar > 0
        take1 = np.zeros(self.num_nodes, bool)
        take1[live] = xbits[outvar[live] - 1] == 1
        sel0 = live & ~take1
        sel1 = live & take1
        nxt[sel0] = out0[sel0]
        nxt[sel1] = out1[sel1]
        return nxt

    def reachable_under(self, x: Sequence[int]) -> np.ndarray:
        """Boolean mask of nodes visited by some start walk on input x."""
        nxt = self.next_under(x)
        visited = np.zeros(self.num_nodes, bool)
        visited[self.starts] = True
        for _, ids in self.level_blocks():
            hot = ids[visited[ids]]
            targets = nxt[hot]
            targets = targets[targets >= 0]
            visited[targets] = True
        return visited


def disjoint_union(p1: Program, p2: Program) -> Program:
    """Node-disjoint union; p1's start/accept/reject indices come first."""
    if p1.n != p2.n:
        raise errors.ArityMismatch(f"variable counts differ: {p1.n} vs {p2.n}")
    if p1.m < 1 or p2.m < 1:
        raise errors.EmptyProgram("both operands need at least one start")
    shift = p1.num_nodes
    return Program(
        p1.n,
        p1.m + p2.m,
        seg=np.concatenate([p1.seg, p2.seg]),
        level=np.concatenate([p1.level, p2.level]),
        func=np.concatenate([p1.func, p2.func]),
        replica=np.concatenate([p1.replica, p2.replica]),
        edge_src=np.concatenate([p1.edge_src, p2.edge_src + shift]),
        edge_var=np.concatenate([p1.edge_var, p2.edge_var]),
        edge_bit=np.concatenate([p1.edge_bit, p2.edge_bit]),
        edge_dst=np.concatenate([p1.edge_dst, p2.edge_dst + shift]),
        starts=np.concatenate([p1.starts, p2.starts + shift]),
        accepts=np.concatenate([p1.accepts, p2.accepts + shift]),
        rejects=np.concatenate([p1.rejects, p2.rejects + shift]),
        dead_sinks=np.concatenate([p1.dead_sinks, p2.dead_sinks + shift]),
        unreachable_roots=np.concatenate(
            [p1.unreachable_roots, p2.unreachable_roots + shift]
        ),
        pruned=p1.pruned and p2.pruned,
    )


def all_inputs(n: int):
    """All assignments (x_1, ..., x_n) in index order."""
    for index in range(1 << n):
        yield tuple((index >> k) & 1 for k in range(n))
