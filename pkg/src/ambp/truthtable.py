"""Boolean functions on a handful of variables, stored as explicit truth tables.

A function g on j variables is a vector of 2^j bits.  Position i holds
g(x) for the assignment with i = sum_k x_k * 2^(k-1), i.e. x_1 is the least
significant index bit.  The vector is kept as a little-endian integer, which
doubles as the function's canonical id at a fixed arity: with this layout,
restricting on the highest variable x_j is a contiguous half-slice, so
restriction and concatenation become shifts and masks.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence

from . import errors


@dataclass(frozen=True)
class TruthTable:
    """A Boolean function of `arity` variables as a 2^arity-bit vector."""

    arity: int
    bits: int

    def __post_init__(self):
        if self.arity < 0:
            raise errors.ArityMismatch(f"arity must be >= 0, got {self.arity}")
        if not 0 <= self.bits < (1 << (1 << self.arity)):
            raise errors.RangeError(
                f"bits 0x{self.bits:x} out of range for arity {self.arity}"
            )

    @property
    def id(self) -> int:
        """Canonical integer id: the little-endian reading of the bit vector."""
        return self.bits

    @property
    def size(self) -> int:
        return 1 << self.arity

    def bit(self, index: int) -> int:
        if not 0 <= index < self.size:
            raise errors.RangeError(f"index {index} out of range")
        return (self.bits >> index) & 1

    def text(self) -> str:
        """'0'/'1' string, position i = value at assignment index i."""
        return "".join(str((self.bits >> i) & 1) for i in range(self.size))

    def __str__(self) -> str:
        return self.text()


def from_id(arity: int, value: int) -> TruthTable:
    """Inverse of TruthTable.id at a fixed arity."""
    return TruthTable(arity, value)


def parse_table(text: str, arity: int) -> TruthTable:
    if arity < 0:
        raise errors.ArityMismatch(f"arity must be >= 0, got {arity}")
    if len(text) != (1 << arity):
        raise errors.LengthMismatch(
            f"expected {1 << arity} characters for arity {arity}, got {len(text)}"
        )
    bits = 0
    for i, ch in enumerate(text):
        if ch == "1":
            bits |= 1 << i
        elif ch != "0":
            raise errors.BadCharacter(f"bad character {ch!r} at position {i}")
    return TruthTable(arity, bits)


def evaluate(g: TruthTable, x: Sequence[int]) -> int:
    """Value of g at the assignment x = (x_1, ..., x_j)."""
    if len(x) != g.arity:
        raise errors.ArityMismatch(
            f"assignment has {len(x)} bits, table has arity {g.arity}"
        )
    index = 0
    for k, bit in enumerate(x):
        if bit not in (0, 1):
            raise errors.RangeError(f"assignment bit {bit!r} is not 0 or 1")
        index |= bit << k
    return (g.bits >> index) & 1


def restrict(g: TruthTable, b: int) -> TruthTable:
    """Fix the highest variable x_j to b; the b-half of the table."""
    if g.arity < 1:
        raise errors.ArityZero("cannot restrict an arity-0 table")
    if b not in (0, 1):
        raise errors.RangeError(f"restriction bit {b!r} is not 0 or 1")
    half = 1 << (g.arity - 1)
    if b:
        return TruthTable(g.arity - 1, g.bits >> half)
    return TruthTable(g.arity - 1, g.bits & ((1 << half) - 1))


def combine(h0: TruthTable, h1: TruthTable) -> TruthTable:
    """Table with x_j=0 half h0 and x_j=1 half h1; inverse of restrict."""
    if h0.arity != h1.arity:
        raise errors.ArityMismatch(
            f"halves have arities {h0.arity} and {h1.arity}"
        )
    half = 1 << h0.arity
    return TruthTable(h0.arity + 1, h0.bits | (h1.bits << half))


def complement(g: TruthTable) -> TruthTable:
    return TruthTable(g.arity, g.bits ^ ((1 << g.size) - 1))


def xnor_glue(f: TruthTable, g: TruthTable) -> TruthTable:
    """Pointwise agreement indicator: 1 exactly where f and g coincide."""
    if f.arity != g.arity:
        raise errors.ArityMismatch(
            f"operands have arities {f.arity} and {g.arity}"
        )
    mask = (1 << f.size) - 1
    return TruthTable(f.arity, (f.bits ^ g.bits) ^ mask)


def random_table(n: int, seed: int) -> TruthTable:
    """Deterministic per (seed, n); string seeding keeps it stable across
    platforms and interpreter runs."""
    rng = random.Random(f"random:{seed}:{n}")
    return TruthTable(n, rng.getrandbits(1 << n))


_RANDOM_SPEC = re.compile(r"^random[:(](\d+)\)?$")

_NAMED = ("and", "or", "xor", "maj", "const0", "const1")


def named_function(name: str, n: int) -> TruthTable:
    """Canonical table for a named family: and, or, xor, maj (odd n only),
    const0, const1, or random:<seed>."""
    match = _RANDOM_SPEC.match(name)
    if match:
        if n < 0:
            raise errors.UnsupportedArity("random needs n >= 0")
        return random_table(n, int(match.group(1)))
    if name not in _NAMED:
        raise errors.UnknownName(f"unknown function name {name!r}")
    if name == "const0":
        return TruthTable(n, 0)
    if name == "const1":
        return TruthTable(n, (1 << (1 << n)) - 1)
    if n < 1:
        raise errors.UnsupportedArity(f"{name} needs n >= 1")
    if name == "maj" and n % 2 == 0:
        raise errors.UnsupportedArity("maj is only defined for odd n")
    bits = 0
    for index in range(1 << n):
        ones = bin(index).count("1")
        if name == "and":
            value = index == (1 << n) - 1
        elif name == "or":
            value = index != 0
        elif name == "xor":
            value = ones % 2 == 1
        else:  # maj
            value = 2 * ones > n
        if value:
            bits |= 1 << index
    return TruthTable(n, bits)


def function_from_spec(spec: str, n: int) -> TruthTable:
    """Resolve a CLI-style function spec: `table:<bits>` or a named form."""
    if spec.startswith("table:"):
        return parse_table(spec[len("table:"):], n)
    return named_function(spec, n)
