"""Finite universes, bit-vector reals, and block rules.

A "real" here is a subset of the finite universe [0, N), stored as a Python
int bitmask so intersection/comparison run at machine speed regardless of N.
A rule is a finite list of blocks (A_n, B_n) with A_n a subset of B_n; a real
X matches block n when X restricted to B_n equals A_n exactly.  Everything is
immutable; operations return fresh objects or plain data certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .errors import UniverseMismatch

__all__ = [
    "Universe",
    "RealSet",
    "Block",
    "Rule",
    "Constant",
    "PerIndex",
    "WidthBound",
    "ValidationReport",
    "OneRuleWitness",
    "SlowReport",
    "validate_rule",
    "match_set",
    "one_rule_witness",
    "slow_report",
    "iter_bits",
    "mask_of",
]


def mask_of(points: Iterable[int]) -> int:
    """Bitmask with exactly the given points set."""
    m = 0
    for p in points:
        m |= 1 << p
    return m


def iter_bits(bits: int) -> Iterator[int]:
    """Yield set bit positions of a nonnegative int, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class Universe:
    """The finite ground set [0, size)."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"universe size must be >= 1, got {self.size}")

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def check_point(self, p: int) -> None:
        if not 0 <= p < self.size:
            raise ValueError(f"point {p} outside universe [0, {self.size})")

    def points(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class RealSet:
    """A subset of a universe, stored as an int bitmask."""

    universe: Universe
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.universe.size:
            raise ValueError("bits outside universe")

    @classmethod
    def empty(cls, universe: Universe) -> "RealSet":
        return cls(universe, 0)

    @classmethod
    def full(cls, universe: Universe) -> "RealSet":
        return cls(universe, universe.full_mask)

    @classmethod
    def from_members(cls, universe: Universe, members: Iterable[int]) -> "RealSet":
        bits = 0
        for p in members:
            universe.check_point(p)
            bits |= 1 << p
        return cls(universe, bits)

    def __contains__(self, p: int) -> bool:
        self.universe.check_point(p)
        return bool((self.bits >> p) & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def members(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.bits))

    def complement(self) -> "RealSet":
        return RealSet(self.universe, self.bits ^ self.universe.full_mask)

    def _check_same(self, other: "RealSet") -> None:
        if self.universe != other.universe:
            raise UniverseMismatch(
                f"universe sizes differ: {self.universe.size} vs {other.universe.size}"
            )

    def __and__(self, other: "RealSet") -> "RealSet":
        self._check_same(other)
        return RealSet(self.universe, self.bits & other.bits)

    def __or__(self, other: "RealSet") -> "RealSet":
        self._check_same(other)
        return RealSet(self.universe, self.bits | other.bits)

    def __sub__(self, other: "RealSet") -> "RealSet":
        self._check_same(other)
        return RealSet(self.universe, self.bits & ~other.bits)


@dataclass(frozen=True)
class Block:
    """One rule block: a committed pattern A inside a window B.

    Invariants (A subset of B, B nonempty, disjointness across blocks) are
    deliberately NOT enforced here; validate_rule reports violations as data
    so invalid rules can be constructed, inspected, and rejected.
    """

    A: frozenset[int]
    B: frozenset[int]

    def __init__(self, A: Iterable[int], B: Iterable[int]):
        object.__setattr__(self, "A", frozenset(A))
        object.__setattr__(self, "B", frozenset(B))


@dataclass(frozen=True)
class Rule:
    """A finite sequence of blocks over one universe, with precomputed masks."""

    universe: Universe
    blocks: tuple[Block, ...]
    a_masks: tuple[int, ...] = field(init=False, compare=False, repr=False)
    b_masks: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __init__(self, universe: Universe, blocks: Iterable[Block]):
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(
            self, "a_masks", tuple(mask_of(b.A) for b in self.blocks)
        )
        object.__setattr__(
            self, "b_masks", tuple(mask_of(b.B) for b in self.blocks)
        )

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class Constant:
    """Width bound: every block has at most k points."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"width bound must be positive, got {self.k}")

    def limit(self, n: int) -> int:
        return self.k


@dataclass(frozen=True)
class PerIndex:
    """Width bound: block n has at most f(n) points."""

    values: tuple[int, ...]

    def __init__(self, values: Iterable[int]):
        vals = tuple(values)
        for n, v in enumerate(vals):
            if v < 1:
                raise ValueError(f"width bound at index {n} must be positive, got {v}")
        object.__setattr__(self, "values", vals)

    def limit(self, n: int):
        if n < len(self.values):
            return self.values[n]
        return None


WidthBound = Union[Constant, PerIndex]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_rule: ok flag plus one message per violation."""

    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _fmt_set(points: Iterable[int]) -> str:
    return "{" + ", ".join(str(p) for p in sorted(points)) + "}"


def validate_rule(rule: Rule, bound: WidthBound) -> ValidationReport:
    """Check structure and width of a rule; violations come back as data.

    Checks, per block: B nonempty, A subset of B, all points inside the
    universe, |B| within the bound.  Across blocks: pairwise disjointness
    of the B windows.  Never raises on a bad rule.
    """
    msgs: list[str] = []
    n_size = rule.universe.size
    for i, blk in enumerate(rule.blocks):
        if not blk.B:
            msgs.append(f"block {i}: B is empty")
        extra = blk.A - blk.B
        if extra:
            msgs.append(f"block {i}: A not within B, extra points {_fmt_set(extra)}")
        outside = {p for p in blk.B | blk.A if not 0 <= p < n_size}
        if outside:
            msgs.append(
                f"block {i}: points {_fmt_set(outside)} outside universe [0, {n_size})"
            )
        limit = bound.limit(i)
        if limit is None:
            msgs.append(f"block {i}: no width bound entry")
        elif len(blk.B) > limit:
            msgs.append(f"block {i} width {len(blk.B)} > {limit}")
    owner: dict[int, int] = {}
    reported: set[tuple[int, int]] = set()
    for i, blk in enumerate(rule.blocks):
        for p in blk.B:
            j = owner.setdefault(p, i)
            if j != i and (j, i) not in reported:
                reported.add((j, i))
                overlap = rule.blocks[j].B & blk.B
                msgs.append(f"blocks {j},{i} intersect at {_fmt_set(overlap)}")
    return ValidationReport(ok=not msgs, violations=tuple(msgs))


def match_set(x: RealSet, rule: Rule) -> frozenset[int]:
    """Indices n with X restricted to B_n equal to A_n, exactly."""
    if x.universe != rule.universe:
        raise UniverseMismatch(
            f"real over [0, {x.universe.size}) vs rule over [0, {rule.universe.size})"
        )
    bits = x.bits
    return frozenset(
        n
        for n, (am, bm) in enumerate(zip(rule.a_masks, rule.b_masks))
        if bits & bm == am
    )


class OneRuleWitness(NamedTuple):
    winner: RealSet
    matches: int


def one_rule_witness(rule: Rule) -> OneRuleWitness:
    """For a width-1 rule, whichever of empty/full matches more blocks.

    Each singleton block is matched by the empty real (when A is empty) or
    by the full real (when A = B), never both, so one of the two matches at
    least half the blocks.
    """
    report = validate_rule(rule, Constant(1))
    if not report:
        raise ValueError("not a valid 1-rule: " + "; ".join(report.violations))
    by_empty = sum(1 for blk in rule.blocks if not blk.A)
    by_full = sum(1 for blk in rule.blocks if blk.A == blk.B)
    if by_empty >= by_full:
        return OneRuleWitness(RealSet.empty(rule.universe), by_empty)
    return OneRuleWitness(RealSet.full(rule.universe), by_full)


class SlowReport(NamedTuple):
    partial_sums: tuple[Fraction, ...]
    total: Fraction


def slow_report(f: Sequence[int], horizon: int) -> SlowReport:
    """Exact partial sums of 2^-f(n) for n < horizon.

    The divergence of this series is what makes a width profile slow; at
    finite horizon only the trajectory is reportable, so that is what
    comes back.  f holds nonnegative ints; horizon at most len(f).
    """
    if horizon < 0 or horizon > len(f):
        raise ValueError(f"horizon {horizon} outside [0, {len(f)}]")
    sums = []
    acc = Fraction(0)
    for n in range(horizon):
        if f[n] < 0:
            raise ValueError(f"f({n}) = {f[n]} is negative")
        acc += Fraction(1, 1 << f[n])
        sums.append(acc)
    return SlowReport(tuple(sums), acc)
