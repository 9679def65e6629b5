"""Builder for the amortized multi-copy branching program.

Given f on n variables, the build produces one program with m = 2^(2^n - 1)
starts such that the walk from start i on input x finishes at accept i when
f(x) = 1 and at reject i when f(x) = 0.  The graph stacks 4n+1 layers in
four segments:

* FWD1 (levels 0..n), the widening pass.  Level j holds every function g of
  x_1..x_j, each in R(j) = 2^(2^n - 2^j) replicas, so each level has exactly
  2^(2^n) nodes.  The transition into level j reads x_j, and the edge labeled
  x_j = b from g lands on an extension g' with the b-half equal to g.  After
  consuming x_1..x_j, the walks sit exactly on the functions whose value at
  the prefix is 1; the m starts are the constant-1 replicas of level 0.

* FWD2 (levels n..2n), the narrowing pass.  Reading x_n..x_1 in reverse, the
  edge labeled b from G goes to the b-restriction of G, so the value of G at
  the consumed prefix is carried down to the constant sinks at level 2n.  At
  the shared level n each node relabels itself from g to the agreement
  function of f and g; the surviving walks therefore all reach the constant-1
  sinks a'_1..a'_m when f(x) = 1 and the constant-0 sinks r'_1..r'_m when
  f(x) = 0 — but in a permuted order.

* REVA and REVB (levels 2n..4n), two edge-reversed copies of the above that
  undo the permutation.  Every label map below is a bijection between full
  layers, so every non-source node has indegree exactly 2 with complementary
  labels and the reversed copy is again a branching program that retraces
  forward walks backwards.  REVA starts at the a' sinks and ends on copies of
  the start nodes relabeled accept 1..m; REVB does the same from the r'
  sinks for the rejects.  The copies' other boundary nodes survive as
  unreachable roots and dead sinks so that every layer keeps its full width.

Edge targets are fixed by a div/mod replica-splitting rule: a replica index
at the wider-function side carries the free half-table in its high digits.
That makes every per-label transition map a closed-form bijection, and the
whole build deterministic: identical (n, f, options) give identical programs
byte for byte.

Unpruned size is (6n+2) * 2^(2^n) nodes, i.e. 12n+4 per copy; both are well
under the guaranteed ceilings 32n * 2^(2^n) and 64n that size_report checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import errors
from .program import Program, SEG_FWD1, SEG_FWD2, SEG_REVA, SEG_REVB, all_inputs
from .truthtable import TruthTable, from_id, xnor_glue

DEFAULT_MEMORY_LIMIT = 2 << 30  # bytes
ARITY_GUARD = 4


def replica_count(n: int, j: int) -> int:
    """R(j) = 2^(2^n - 2^j): replicas per arity-j function in an n-build."""
    if not 0 <= j <= n:
        raise errors.RangeError(f"arity {j} outside [0,{n}]")
    return 1 << ((1 << n) - (1 << j))


def forward_arity(n: int, level: int) -> int:
    """Function arity at a forward level: grows to n, then shrinks back."""
    if not 0 <= level <= 2 * n:
        raise errors.RangeError(f"level {level} outside [0,{2 * n}]")
    return level if level <= n else 2 * n - level


def transition_variable(n: int, t: int) -> int:
    """Variable read by layer transition t in [0, 4n): the palindromic
    schedule x_1..x_n, x_n..x_1, x_1..x_n, x_n..x_1."""
    if not 0 <= t < 4 * n:
        raise errors.RangeError(f"transition {t} outside [0,{4 * n})")
    if t >= 2 * n:
        t = 4 * n - 1 - t
    return t + 1 if t < n else 2 * n - t


def part1_target(n: int, j: int, b: int, g: int, r: int) -> tuple[int, int]:
    """Widening edge target: from (g, r) at level j-1 under label x_j = b.

    The replica splits as r = q * R(j) + r'; the free (1-b)-half of the new
    function is the arity-(j-1) table with id q.  For fixed (j, b) this is a
    bijection of the 2^(2^n) level nodes.
    """
    if not 1 <= j <= n:
        raise errors.RangeError(f"j={j} outside [1,{n}]")
    if b not in (0, 1):
        raise errors.RangeError(f"label bit {b!r}")
    r_prev, r_next = replica_count(n, j - 1), replica_count(n, j)
    if not 0 <= g < (1 << (1 << (j - 1))):
        raise errors.RangeError(f"function id {g} out of range at arity {j - 1}")
    if not 0 <= r < r_prev:
        raise errors.RangeError(f"replica {r} out of range at arity {j - 1}")
    q, r_new = divmod(r, r_next)
    multiplier = 1 << (1 << (j - 1))
    g_new = q + g * multiplier if b else g + q * multiplier
    return g_new, r_new


def part2_target(n: int, j: int, b: int, big: int, r: int) -> tuple[int, int]:
    """Narrowing edge target: from (G, r) at arity j under label x_j = b.

    The kept half is the b-restriction; the discarded half moves into the
    high digits of the replica: r'' = id(other half) * R(j) + r.  For fixed
    (j, b) this is the inverse of the widening map, hence a bijection.
    """
    if not 1 <= j <= n:
        raise errors.RangeError(f"j={j} outside [1,{n}]")
    if b not in (0, 1):
        raise errors.RangeError(f"label bit {b!r}")
    r_here, r_next = replica_count(n, j), replica_count(n, j - 1)
    if not 0 <= big < (1 << (1 << j)):
        raise errors.RangeError(f"function id {big} out of range at arity {j}")
    if not 0 <= r < r_here:
        raise errors.RangeError(f"replica {r} out of range at arity {j}")
    shift = 1 << (j - 1)
    lo = big & ((1 << shift) - 1)
    hi = big >> shift
    kept, freed = (hi, lo) if b else (lo, hi)
    r_new = freed * r_here + r
    assert r_new < r_next
    return kept, r_new


def glue_map(f: TruthTable, g: int) -> int:
    """Relabeling applied at the shared level n: g becomes the agreement
    function of f and g.  Self-inverse for fixed f."""
    table = from_id(f.arity, g)
    return xnor_glue(f, table).id


@dataclass(frozen=True)
class BuildOptions:
    prune: bool = False
    memory_limit: int = DEFAULT_MEMORY_LIMIT
    allow_huge_n: bool = False


def estimate_build_bytes(n: int) -> int:
    """Rough in-memory footprint of an unpruned n-build."""
    width = 1 << (1 << n)
    nodes = (6 * n + 2) * width
    edges = 12 * n * width
    return nodes * 21 + edges * 19  # node arrays: 8+8+4+1, edge arrays: 8+8+2+1


def reverse_segment(edges) -> np.ndarray:
    """Flip every edge of a layered edge set, validating reversibility first.

    Input rows are (src, var, bit, dst).  Every node with positive indegree
    must have exactly two in-edges carrying complementary labels of one
    variable; otherwise the flipped set would not be a branching program and
    a ReversibilityViolation names the witness node.  Row order is kept, so
    reversing twice returns the original rows.
    """
    arr = np.asarray(edges, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise errors.RangeError("edge set must be rows of (src, var, bit, dst)")
    if len(arr):
        dst = arr[:, 3]
        order = np.argsort(dst, kind="stable")
        sorted_dst = dst[order]
        uniq, first, counts = np.unique(sorted_dst, return_index=True, return_counts=True)
        bad = counts != 2
        if bad.any():
            node = int(uniq[bad][0])
            raise errors.ReversibilityViolation(
                f"node {node} has indegree {int(counts[bad][0])}, expected 2", node=node
            )
        e1 = order[first]
        e2 = order[first + 1]
        mismatch = (arr[e1, 1] != arr[e2, 1]) | (arr[e1, 2] + arr[e2, 2] != 1)
        if mismatch.any():
            node = int(uniq[mismatch][0])
            raise errors.ReversibilityViolation(
                f"node {node} lacks complementary in-labels of one variable", node=node
            )
    return arr[:, [3, 1, 2, 0]]


class _Layout:
    """Dense id layout: forward levels first, then each reversed copy's
    root block and levels 2n+1..4n.  Within a layer, offset = func * R + replica."""

    def __init__(self, n: int):
        self.n = n
        self.width = 1 << (1 << n)
        self.m = self.width >> 1
        self.rev_a_roots = (2 * n + 1) * self.width
        self.rev_a_levels = self.rev_a_roots + self.m
        self.rev_b_roots = self.rev_a_levels + 2 * n * self.width
        self.rev_b_levels = self.rev_b_roots + self.m
        self.total = self.rev_b_levels + 2 * n * self.width

    def fwd_base(self, level: int) -> int:
        return level * self.width

    def rev_base(self, copy_b: bool, level: int) -> int:
        base = self.rev_b_levels if copy_b else self.rev_a_levels
        return base + (level - 2 * self.n - 1) * self.width


def build_amortized(f: TruthTable, opts: BuildOptions | None = None) -> Program:
    opts = opts or BuildOptions()
    n = f.arity
    if n < 1:
        raise errors.ArityOutOfRange("build needs n >= 1")
    estimate = estimate_build_bytes(n)
    if n > ARITY_GUARD and not opts.allow_huge_n:
        raise errors.ArityOutOfRange(
            f"n={n} exceeds the default guard of {ARITY_GUARD} "
            f"(estimated footprint {estimate:,} bytes)"
        )
    if estimate > opts.memory_limit:
        raise errors.MemoryGuardExceeded(
            f"estimated footprint {estimate:,} bytes exceeds the limit "
            f"of {opts.memory_limit:,}"
        )

    lay = _Layout(n)
    width, m = lay.width, lay.m

    seg = np.empty(lay.total, np.uint8)
    level = np.empty(lay.total, np.int32)
    func = np.empty(lay.total, np.int64)
    replica = np.empty(lay.total, np.int64)
    offsets = np.arange(width, dtype=np.int64)

    def fill_layer(base, segment, lvl, arity):
        count = replica_count(n, arity)
        stop = base + width
        seg[base:stop] = segment
        level[base:stop] = lvl
        func[base:stop] = offsets // count
        replica[base:stop] = offsets % count

    for lvl in range(2 * n + 1):
        fill_layer(
            lay.fwd_base(lvl),
            SEG_FWD1 if lvl <= n else SEG_FWD2,
            lvl,
            forward_arity(n, lvl),
        )
    for copy_b, segment, roots, root_func in (
        (False, SEG_REVA, lay.rev_a_roots, 0),
        (True, SEG_REVB, lay.rev_b_roots, 1),
    ):
        seg[roots:roots + m] = segment
        level[roots:roots + m] = 2 * n
        func[roots:roots + m] = root_func
        replica[roots:roots + m] = np.arange(m)
        for t in range(1, 2 * n + 1):
            fill_layer(
                lay.rev_base(copy_b, 2 * n + t),
                segment,
                2 * n + t,
                forward_arity(n, 2 * n - t),
            )

    # ---- forward edges, one (transition, label) block at a time
    mask = width - 1
    fwd_src, fwd_var, fwd_bit, fwd_dst = [], [], [], []
    for lvl in range(2 * n):
        read = transition_variable(n, lvl)
        for b in (0, 1):
            if lvl < n:
                r_here = replica_count(n, lvl)
                r_next = replica_count(n, lvl + 1)
                g = offsets // r_here
                r = offsets % r_here
                q, r_new = r // r_next, r % r_next
                multiplier = 1 << (1 << lvl)
                g_new = q + g * multiplier if b else g + q * multiplier
                dst_off = g_new * r_next + r_new
            else:
                j = 2 * n - lvl
                r_here = replica_count(n, j)
                r_next = replica_count(n, j - 1)
                c = offsets // r_here
                r = offsets % r_here
                big = (c ^ f.bits) ^ mask if lvl == n else c
                shift = 1 << (j - 1)
                lo = big & ((1 << shift) - 1)
                hi = big >> shift
                kept, freed = (hi, lo) if b else (lo, hi)
                dst_off = kept * r_next + freed * r_here + r
            fwd_src.append(lay.fwd_base(lvl) + offsets)
            fwd_var.append(np.full(width, read, np.int64))
            fwd_bit.append(np.full(width, b, np.int64))
            fwd_dst.append(lay.fwd_base(lvl + 1) + dst_off)
    forward = np.column_stack(
        [np.concatenate(a) for a in (fwd_src, fwd_var, fwd_bit, fwd_dst)]
    )

    # ---- reversal; also proves the indegree-2 invariant of the forward part
    flipped = reverse_segment(forward)

    def mirror(copy_b: bool) -> np.ndarray:
        table = np.empty((2 * n + 1) * width, np.int64)
        for lvl in range(2 * n):
            base = lay.fwd_base(lvl)
            table[base:base + width] = lay.rev_base(copy_b, 4 * n - lvl) + offsets
        base = lay.fwd_base(2 * n)
        roots = lay.rev_b_roots if copy_b else lay.rev_a_roots
        if copy_b:
            table[base:base + m] = base + np.arange(m)          # r' sinks merge
            table[base + m:base + width] = roots + np.arange(m)  # a' copies: roots
        else:
            table[base:base + m] = roots + np.arange(m)          # r' copies: roots
            table[base + m:base + width] = base + m + np.arange(m)  # a' sinks merge
        return table

    block = 2 * width  # edge rows per forward transition (both labels)
    rev_parts = []
    for copy_b in (False, True):
        mir = mirror(copy_b)
        for t in range(2 * n):
            rows = flipped[block * (2 * n - 1 - t):block * (2 * n - t)]
            part = rows.copy()
            part[:, 0] = mir[rows[:, 0]]
            part[:, 3] = mir[rows[:, 3]]
            rev_parts.append(part)
    edges = np.vstack([forward] + rev_parts)

    starts = lay.fwd_base(0) + m + np.arange(m)
    accepts = lay.rev_base(False, 4 * n) + m + np.arange(m)
    rejects = lay.rev_base(True, 4 * n) + m + np.arange(m)
    dead = np.concatenate(
        [lay.rev_base(False, 4 * n) + np.arange(m), lay.rev_base(True, 4 * n) + np.arange(m)]
    )
    roots = np.concatenate(
        [lay.rev_a_roots + np.arange(m), lay.rev_b_roots + np.arange(m)]
    )

    program = Program(
        n,
        m,
        seg=seg,
        level=level,
        func=func,
        replica=replica,
        edge_src=edges[:, 0],
        edge_var=edges[:, 1],
        edge_bit=edges[:, 2],
        edge_dst=edges[:, 3],
        starts=starts,
        accepts=accepts,
        rejects=rejects,
        dead_sinks=dead,
        unreachable_roots=roots,
        pruned=False,
    )
    return prune_unreachable(program) if opts.prune else program


def prune_unreachable(program: Program) -> Program:
    """Keep the nodes some start walk visits under some input, plus the
    registered start/accept/reject nodes themselves.

    The registered lists survive untouched so the program still computes f
    m times; for non-constant f they are all visited anyway, while a build
    for a constant function never reaches one of its sink families.  Dead
    sinks and unreachable roots disappear.  Walk outcomes are unchanged
    because removed nodes were never visited.  Removing a dead sink leaves
    its (reachable) predecessors with a single out-edge, which the pruned
    flag legitimizes.
    """
    keep = np.zeros(program.num_nodes, bool)
    for x in all_inputs(program.n):
        keep |= program.reachable_under(x)
    keep[program.starts] = True
    keep[program.accepts] = True
    keep[program.rejects] = True
    new_id = np.cumsum(keep, dtype=np.int64) - 1
    edge_keep = keep[program.edge_src] & keep[program.edge_dst]

    return Program(
        program.n,
        program.m,
        seg=program.seg[keep],
        level=program.level[keep],
        func=program.func[keep],
        replica=program.replica[keep],
        edge_src=new_id[program.edge_src[edge_keep]],
        edge_var=program.edge_var[edge_keep],
        edge_bit=program.edge_bit[edge_keep],
        edge_dst=new_id[program.edge_dst[edge_keep]],
        starts=new_id[program.starts],
        accepts=new_id[program.accepts],
        rejects=new_id[program.rejects],
        dead_sinks=(),
        unreachable_roots=(),
        pruned=True,
    )


@dataclass
class SizeReport:
    """Graph-counted sizes compared against the guaranteed ceilings."""

    n: int
    m: int
    pruned: bool
    total_nodes: int
    total_edges: int
    per_copy: Fraction
    total_bound: int          # 32 * n * 2^(2^n)
    per_copy_bound: int       # 64 * n
    total_within_bound: bool
    per_copy_within_bound: bool
    unpruned_formula_total: int  # (6n+2) * 2^(2^n)
    matches_formula: bool | None
    per_level_histogram: dict[int, int]
    dead_sink_count: int
    unreachable_root_count: int

    @property
    def bounds_ok(self) -> bool:
        return self.total_within_bound and self.per_copy_within_bound

    def to_json_dict(self) -> dict:
        d = {
            "n": self.n,
            "m": self.m,
            "pruned": self.pruned,
            "total_nodes": self.total_nodes,
            "total_edges": self.total_edges,
            "per_copy": str(self.per_copy),
            "per_copy_float": float(self.per_copy),
            "total_bound": self.total_bound,
            "per_copy_bound": self.per_copy_bound,
            "total_within_bound": self.total_within_bound,
            "per_copy_within_bound": self.per_copy_within_bound,
            "unpruned_formula_total": self.unpruned_formula_total,
            "matches_formula": self.matches_formula,
            "per_level_histogram": {str(k): v for k, v in self.per_level_histogram.items()},
            "dead_sink_count": self.dead_sink_count,
            "unreachable_root_count": self.unreachable_root_count,
        }
        return d


def size_report(program: Program) -> SizeReport:
    """Counts come from the graph, never from the closed-form formula."""
    n, m = program.n, program.m
    total = program.num_nodes
    width = 1 << (1 << n)
    if total and program.level.min() < 0:
        raise errors.StructureInvalid("negative node levels")
    histogram_counts = np.bincount(program.level, minlength=1)
    histogram = {
        int(lvl): int(count)
        for lvl, count in enumerate(histogram_counts)
        if count
    }
    formula = (6 * n + 2) * width
    per_copy = Fraction(total, m)
    report = SizeReport(
        n=n,
        m=m,
        pruned=program.pruned,
        total_nodes=total,
        total_edges=program.num_edges,
        per_copy=per_copy,
        total_bound=32 * n * width,
        per_copy_bound=64 * n,
        total_within_bound=total <= 32 * n * width,
        per_copy_within_bound=per_copy <= 64 * n,
        unpruned_formula_total=formula,
        matches_formula=(total == formula) if not program.pruned else None,
        per_level_histogram=histogram,
        dead_sink_count=len(program.dead_sinks),
        unreachable_root_count=len(program.unreachable_roots),
    )
    return report
