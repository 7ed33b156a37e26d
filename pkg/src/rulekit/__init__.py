"""rulekit: a finite-scale laboratory for block rules and their followers.

A rule lists disjoint finite windows with a committed pattern inside each;
a real (a subset of the finite universe) follows the rule where its trace
on a window equals the pattern.  The package builds and certifies the
classical constructions around this notion: majority combinations of
candidate followers, splicing followers along a partition, rules extracted
from nowhere-dense word trees, bit predictors from width-2 rules, slalom
defeat via coincident pairs, and orbit rules over independent set families.
Every construction re-verifies its own guarantee before returning.
"""

from .core import (
    Block,
    Constant,
    PerIndex,
    RealSet,
    Rule,
    Universe,
    WidthBound,
    match_set,
    one_rule_witness,
    slow_report,
    validate_rule,
)
from .errors import (
    FragmentShortfall,
    GuaranteeViolation,
    NoWitnessWithinDepth,
    RulekitError,
    UniverseMismatch,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "Constant",
    "PerIndex",
    "RealSet",
    "Rule",
    "Universe",
    "WidthBound",
    "match_set",
    "one_rule_witness",
    "slow_report",
    "validate_rule",
    "RulekitError",
    "UniverseMismatch",
    "GuaranteeViolation",
    "NoWitnessWithinDepth",
    "FragmentShortfall",
    "__version__",
]
