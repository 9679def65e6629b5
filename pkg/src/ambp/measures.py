"""Complexity-measure audits over the full lattice of n-variable functions.

A measure assigns a nonnegative rational to every function id at a fixed
arity.  Two axiom families are audited exactly (fractions, no tolerances):

branching measures
    1. every literal and negated literal has value 1
    2. every value is nonnegative
    3. restriction: mu(f & x_i) + mu(f & ~x_i) <= mu(f) + 2 for all f, i
    4. or-subadditivity: mu(f | g) <= mu(f) + mu(g) for all pairs

submodular measures
    1, 2 as above
    3. mu(f | g) + mu(f & g) <= mu(f) + mu(g) for all pairs

Every submodular measure is a branching measure; the suite re-checks that
implication over every audited table.  The accounting inequality bounds the
non-end node count of a pruned m-copy program from below by
(m*mu(f) + m*mu(not f) - m*mu(1)) / 2, and the ceiling check compares a
measure's maximum against 130n together with the sharper program-derived
bound 2*(non-end nodes per copy) + mu(1).

Pairwise scans are quadratic in 2^(2^n); n=4 (4.3e9 pairs) sits behind an
explicit allow_long flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import errors
from .construction import BuildOptions, build_amortized
from .program import Program
from .truthtable import TruthTable, from_id

LONG_SCAN_ARITY = 4


def _mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def literal_id(n: int, i: int, negated: bool = False) -> int:
    """Function id of the literal x_i (or its negation) at arity n."""
    if not 1 <= i <= n:
        raise errors.RangeError(f"variable {i} outside [1,{n}]")
    bits = 0
    for index in range(1 << n):
        if ((index >> (i - 1)) & 1) != negated:
            bits |= 1 << index
    return bits


@dataclass
class MeasureTable:
    """Values for all 2^(2^n) function ids at arity n, exact rationals."""

    n: int
    values: dict[int, Fraction]

    def require_complete(self):
        expected = 1 << (1 << self.n)
        if len(self.values) != expected or set(self.values) != set(range(expected)):
            raise errors.IncompleteTable(
                f"need values for all {expected} functions at arity {self.n}"
            )

    def __getitem__(self, func_id: int) -> Fraction:
        return self.values[func_id]


@dataclass(frozen=True)
class AxiomViolation:
    """One concrete axiom failure; re-verifiable from the stored witnesses."""

    axiom: str             # literal | nonnegative | restriction | or-subadditive | submodular
    f: int
    g: int | None = None
    var: int | None = None
    lhs: Fraction = Fraction(0)
    rhs: Fraction = Fraction(0)

    def __str__(self) -> str:
        where = f"f={self.f:x}"
        if self.g is not None:
            where += f" g={self.g:x}"
        if self.var is not None:
            where += f" i={self.var}"
        return f"[{self.axiom}] {where}: {self.lhs} vs {self.rhs}"


def _common_violations(table: MeasureTable) -> list[AxiomViolation]:
    violations = []
    one = Fraction(1)
    for i in range(1, table.n + 1):
        for negated in (False, True):
            lit = literal_id(table.n, i, negated)
            if table[lit] != one:
                violations.append(
                    AxiomViolation("literal", lit, var=i, lhs=table[lit], rhs=one)
                )
    for func_id in range(1 << (1 << table.n)):
        if table[func_id] < 0:
            violations.append(
                AxiomViolation("nonnegative", func_id, lhs=table[func_id], rhs=Fraction(0))
            )
    return violations


def _gate_long_scan(table: MeasureTable, allow_long: bool):
    if table.n >= LONG_SCAN_ARITY and not allow_long:
        raise errors.LongScanRefused(
            f"pairwise scan at n={table.n} covers "
            f"{(1 << (1 << table.n)) ** 2:,} pairs; pass allow_long=True"
        )


def audit_branching(table: MeasureTable, allow_long: bool = False) -> list[AxiomViolation]:
    """All four branching axioms; empty list means the table is a branching
    complexity measure."""
    _gate_long_scan(table, allow_long)
    table.require_complete()
    n = table.n
    count = 1 << (1 << n)
    violations = _common_violations(table)
    two = Fraction(2)
    for f in range(count):
        for i in range(1, n + 1):
            pos = literal_id(n, i)
            lhs = table[f & pos] + table[f & (pos ^ _mask(n))]
            rhs = table[f] + two
            if lhs > rhs:
                violations.append(AxiomViolation("restriction", f, var=i, lhs=lhs, rhs=rhs))
    for f in range(count):
        for g in range(count):
            lhs = table[f | g]
            rhs = table[f] + table[g]
            if lhs > rhs:
                violations.append(AxiomViolation("or-subadditive", f, g=g, lhs=lhs, rhs=rhs))
    return violations


def audit_submodular(table: MeasureTable, allow_long: bool = False) -> list[AxiomViolation]:
    _gate_long_scan(table, allow_long)
    table.require_complete()
    count = 1 << (1 << table.n)
    violations = _common_violations(table)
    for f in range(count):
        for g in range(count):
            lhs = table[f | g] + table[f & g]
            rhs = table[f] + table[g]
            if lhs > rhs:
                violations.append(AxiomViolation("submodular", f, g=g, lhs=lhs, rhs=rhs))
    return violations


# --------------------------------------------------------------------------
# accounting and ceiling


@dataclass
class AccountingReport:
    """Both sides of the end-node accounting inequality, exactly."""

    m: int
    mu_f: Fraction
    mu_not_f: Fraction
    mu_one: Fraction
    lhs: Fraction           # (m*mu(f) + m*mu(~f) - m*mu(1)) / 2
    non_end_nodes: int
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "mu_f": str(self.mu_f),
            "mu_not_f": str(self.mu_not_f),
            "mu_one": str(self.mu_one),
            "lhs": str(self.lhs),
            "non_end_nodes": self.non_end_nodes,
            "pass": self.passed,
        }


def accounting_check(program: Program, table: MeasureTable, f: TruthTable) -> AccountingReport:
    """End-node sums against the non-end node count of a pruned program.

    Sources are then exactly the m starts (reachability value 1) and end
    nodes exactly the m accepts (value f) and m rejects (value not f)."""
    if not program.pruned:
        raise errors.RequiresPruned("accounting needs a pruned program")
    if table.n != program.n or f.arity != program.n:
        raise errors.IncompleteTable(
            f"measure/function arity must match the program's n={program.n}"
        )
    table.require_complete()
    mask = _mask(program.n)
    mu_f = table[f.bits]
    mu_not_f = table[f.bits ^ mask]
    mu_one = table[mask]
    lhs = Fraction(program.m) * (mu_f + mu_not_f - mu_one) / 2
    degrees = np.bincount(program.edge_src, minlength=program.num_nodes)
    non_end = int(np.count_nonzero(degrees > 0))
    return AccountingReport(
        m=program.m,
        mu_f=mu_f,
        mu_not_f=mu_not_f,
        mu_one=mu_one,
        lhs=lhs,
        non_end_nodes=non_end,
        passed=lhs <= non_end,
    )


@dataclass
class CeilingReport:
    n: int
    max_value: Fraction
    argmax: int
    bound: int               # 130 n
    passed: bool
    sharper_bound: Fraction  # 2 * (non-end nodes per copy) + mu(1)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "max_value": str(self.max_value),
            "argmax": f"{self.argmax:x}",
            "bound": self.bound,
            "pass": self.passed,
            "sharper_bound": str(self.sharper_bound),
        }


def ceiling_check(table: MeasureTable, allow_long: bool = False) -> CeilingReport:
    """Maximum of an audited branching measure against 130n, plus the sharper
    bound implied by the pruned build for the maximizing function."""
    if audit_branching(table, allow_long=allow_long):
        raise errors.AuditNotPassed("measure fails the branching axioms")
    argmax, max_value = max(table.values.items(), key=lambda kv: (kv[1], -kv[0]))
    program = build_amortized(from_id(table.n, argmax), BuildOptions(prune=True))
    degrees = np.bincount(program.edge_src, minlength=program.num_nodes)
    non_end = int(np.count_nonzero(degrees > 0))
    sharper = 2 * Fraction(non_end, program.m) + table[_mask(table.n)]
    bound = 130 * table.n
    return CeilingReport(
        n=table.n,
        max_value=max_value,
        argmax=argmax,
        bound=bound,
        passed=max_value <= bound,
        sharper_bound=sharper,
    )


# --------------------------------------------------------------------------
# built-in measures


def constant_measure(n: int) -> MeasureTable:
    """mu = 1 everywhere; passes both audits."""
    one = Fraction(1)
    return MeasureTable(n, {f: one for f in range(1 << (1 << n))})


def dependency_count_measure(n: int) -> MeasureTable:
    """Number of variables the function actually depends on.  Violates both
    the restriction and submodularity axioms; the witnesses re-verify."""
    values = {}
    for func_id in range(1 << (1 << n)):
        depends = 0
        for i in range(1, n + 1):
            half = 1 << (i - 1)
            for index in range(1 << n):
                if not (index >> (i - 1)) & 1:
                    if ((func_id >> index) & 1) != ((func_id >> (index + half)) & 1):
                        depends += 1
                        break
        values[func_id] = Fraction(depends)
    return MeasureTable(n, values)


def support_fraction_measure(n: int) -> MeasureTable:
    """|support(f)| / 2^(n-1): modular (submodularity holds with equality)
    and normalized so literals get value 1."""
    if n < 1:
        raise errors.RangeError("needs n >= 1")
    half = 1 << (n - 1)
    return MeasureTable(
        n,
        {f: Fraction(bin(f).count("1"), half) for f in range(1 << (1 << n))},
    )


def mix_measures(a: MeasureTable, b: MeasureTable, weight: Fraction) -> MeasureTable:
    """Convex combination; preserves both axiom families and literal values."""
    if a.n != b.n:
        raise errors.ArityMismatch("tables have different arities")
    if not 0 <= weight <= 1:
        raise errors.RangeError("weight must lie in [0,1]")
    return MeasureTable(
        a.n,
        {f: weight * a[f] + (1 - weight) * b[f] for f in a.values},
    )


# --------------------------------------------------------------------------
# file format: MEASURE v1


def store_measure(table: MeasureTable) -> str:
    table.require_complete()
    lines = [f"MEASURE v1 n {table.n}"]
    for func_id in range(1 << (1 << table.n)):
        value = table[func_id]
        rendered = str(value.numerator) if value.denominator == 1 else str(value)
        lines.append(f"{func_id:x} {rendered}")
    return "\n".join(lines) + "\n"


def load_measure(text: str) -> MeasureTable:
    lines = [line for line in text.splitlines()]
    if not lines:
        raise errors.ParseError("empty measure file", line=1)
    header = lines[0].split()
    if len(header) != 4 or header[0] != "MEASURE" or header[2] != "n":
        raise errors.ParseError("expected 'MEASURE v1 n <n>'", line=1)
    if header[1] != "v1":
        raise errors.VersionMismatch(f"unsupported version {header[1]!r}", line=1)
    try:
        n = int(header[3])
    except ValueError:
        raise errors.ParseError(f"bad arity {header[3]!r}", line=1) from None
    expected = 1 << (1 << n)
    values: dict[int, Fraction] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise errors.ParseError("expected '<funcid-hex> <value>'", line=lineno)
        try:
            func_id = int(tokens[0], 16)
        except ValueError:
            raise errors.ParseError(f"bad function id {tokens[0]!r}", line=lineno) from None
        if not 0 <= func_id < expected:
            raise errors.ParseError(f"function id {tokens[0]} out of range", line=lineno)
        if func_id in values:
            raise errors.ParseError(f"duplicate function id {tokens[0]}", line=lineno)
        try:
            value = Fraction(tokens[1])
        except (ValueError, ZeroDivisionError):
            raise errors.ParseError(f"bad value {tokens[1]!r}", line=lineno) from None
        if value < 0:
            raise errors.NegativeValue(f"negative value {tokens[1]}", line=lineno)
        values[func_id] = value
    if len(values) != expected:
        raise errors.WrongCount(
            f"got {len(values)} values, need {expected} for n={n}"
        )
    return MeasureTable(n, values)
