"""Predictors derived from width-2 rules, and who evades them.

A predictor guesses the bit of a real at selected positions from the bits
below.  Width-2 rules induce one guess per two-point block: read the low
point, either copy it or flip it.  Evasion at a position means the real's
actual bit differs from the guess; the transfer result links every evasion
back to a block matched by the real or by its complement.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple, Union

from .core import Constant, RealSet, Rule, validate_rule
from .errors import GuaranteeViolation, UniverseMismatch

__all__ = [
    "Projection",
    "FlippedProjection",
    "TableFn",
    "PredictorFn",
    "Predictor",
    "PredictorFromRule",
    "TransferEntry",
    "rule_to_predictor",
    "evades_set",
    "evasion_transfer",
]

TABLE_LIMIT = 20


@dataclass(frozen=True)
class Projection:
    """Guess = the bit at a fixed lower position."""

    index: int


@dataclass(frozen=True)
class FlippedProjection:
    """Guess = the negation of the bit at a fixed lower position."""

    index: int


@dataclass(frozen=True)
class TableFn:
    """Guess = explicit lookup on the full length-ell prefix (ell <= 20)."""

    table: Mapping[str, int]


PredictorFn = Union[Projection, FlippedProjection, TableFn]


def _check_fn(ell: int, fn: PredictorFn) -> None:
    if isinstance(fn, (Projection, FlippedProjection)):
        if not 0 <= fn.index < ell:
            raise ValueError(f"projection index {fn.index} not below {ell}")
        return
    if isinstance(fn, TableFn):
        if ell > TABLE_LIMIT:
            raise ValueError(f"table at position {ell} exceeds limit {TABLE_LIMIT}")
        if len(fn.table) != 1 << ell:
            raise ValueError(
                f"table at position {ell} has {len(fn.table)} entries, wants {1 << ell}"
            )
        for key, val in fn.table.items():
            if len(key) != ell or set(key) - {"0", "1"}:
                raise ValueError(f"bad table key {key!r} at position {ell}")
            if val not in (0, 1):
                raise ValueError(f"bad table value {val!r} at position {ell}")
        return
    raise TypeError(f"unknown predictor function {fn!r}")


@dataclass(frozen=True)
class Predictor:
    """A guess function for each position in a finite domain."""

    fns: Mapping[int, PredictorFn]

    def __post_init__(self):
        if not self.fns:
            raise ValueError("predictor domain must be nonempty")
        for ell, fn in self.fns.items():
            if ell < 0:
                raise ValueError(f"negative position {ell}")
            _check_fn(ell, fn)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.fns)

    def guess(self, x: RealSet, ell: int) -> int:
        """Predicted bit of x at ell, from the prefix below ell."""
        fn = self.fns[ell]
        if isinstance(fn, Projection):
            return (x.bits >> fn.index) & 1
        if isinstance(fn, FlippedProjection):
            return 1 - ((x.bits >> fn.index) & 1)
        prefix = format(x.bits & ((1 << ell) - 1), f"0{ell}b")[::-1] if ell else ""
        return fn.table[prefix]


class PredictorFromRule(NamedTuple):
    predictor: Predictor
    skipped: tuple[int, ...]


@lru_cache(maxsize=512)
def rule_to_predictor(rule: Rule) -> PredictorFromRule:
    """Turn each two-point block into a guess at its top point.

    A two-point block {lo, hi} commits the real on both points; whichever
    way A splits the pair, the bit at hi is determined by the bit at lo
    whenever the block is matched: equal bits when A picks one endpoint,
    opposite bits when A is empty or everything.  One-point blocks carry
    no cross-position information and are reported in skipped.
    """
    report = validate_rule(rule, Constant(2))
    if not report:
        raise ValueError("invalid 2-rule: " + "; ".join(report.violations))
    fns: dict[int, PredictorFn] = {}
    skipped = []
    for n, blk in enumerate(rule.blocks):
        if len(blk.B) == 1:
            skipped.append(n)
            continue
        lo, hi = sorted(blk.B)
        if len(blk.A) == 1:
            fns[hi] = Projection(lo)
        else:
            fns[hi] = FlippedProjection(lo)
    if not fns:
        raise ValueError("every block has one point; predictor domain would be empty")
    return PredictorFromRule(Predictor(fns), tuple(skipped))


def evades_set(x: RealSet, predictor: Predictor) -> frozenset[int]:
    """Domain positions where x's actual bit differs from the guess."""
    for ell in predictor.fns:
        x.universe.check_point(ell)
    return frozenset(
        ell
        for ell in predictor.fns
        if (x.bits >> ell) & 1 != predictor.guess(x, ell)
    )


class TransferEntry(NamedTuple):
    block: int
    position: int
    matched_by: str  # "real" or "complement"


def evasion_transfer(x: RealSet, rule: Rule) -> tuple[TransferEntry, ...]:
    """Account for every evasion of the rule's predictor.

    For each evaded position, exactly one of x and its complement matches
    the block topping out there; anything else is a broken guarantee and
    raises GuaranteeViolation.  Entries come back sorted by block index.
    """
    if x.universe != rule.universe:
        raise UniverseMismatch(
            f"real over [0, {x.universe.size}) vs rule over [0, {rule.universe.size})"
        )
    predictor, _ = rule_to_predictor(rule)
    top_to_block = {
        max(blk.B): n for n, blk in enumerate(rule.blocks) if len(blk.B) == 2
    }
    comp_bits = x.universe.full_mask ^ x.bits
    entries = []
    for ell in sorted(evades_set(x, predictor)):
        n = top_to_block[ell]
        am, bm = rule.a_masks[n], rule.b_masks[n]
        by_real = x.bits & bm == am
        by_comp = comp_bits & bm == am
        if by_real == by_comp:
            raise GuaranteeViolation(
                f"evasion at {ell}: block {n} matched by "
                f"{'both' if by_real else 'neither'} of the real and its complement"
            )
        entries.append(
            TransferEntry(n, ell, "real" if by_real else "complement")
        )
    return tuple(sorted(entries))
