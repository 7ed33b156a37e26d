"""Combining, splicing, and building rules from trees.

The centerpiece: given a width-(k+1) rule and k+1 candidate reals, the
pointwise majority of the candidates matches every block that survives a
chain of elimination rounds, and the construction re-verifies that claim
before returning it.  Also here: splicing reals along a partition of the
universe, turning a nowhere-dense word tree into a rule whose followers
escape the tree, and a greedy follower serving several rules at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

from .core import (
    Block,
    RealSet,
    Rule,
    Universe,
    Constant,
    match_set,
    mask_of,
    validate_rule,
)
from .errors import GuaranteeViolation, NoWitnessWithinDepth, UniverseMismatch

__all__ = [
    "EChain",
    "TreeOracle",
    "SpliceFunction",
    "MajorityCombineResult",
    "DiagonalResult",
    "derived_subrule",
    "e_chain",
    "majority_real",
    "majority_combine",
    "splice",
    "splice_certify",
    "tree_to_rule",
    "diagonal_follower",
]


def _require_same_universe(universe: Universe, reals: Iterable[RealSet]) -> None:
    for x in reals:
        if x.universe != universe:
            raise UniverseMismatch(
                f"real over [0, {x.universe.size}) vs expected [0, {universe.size})"
            )


def _uniform_block_size(rule: Rule) -> int:
    sizes = {len(blk.B) for blk in rule.blocks}
    if len(sizes) > 1:
        raise ValueError(f"ragged rule: block sizes {sorted(sizes)}")
    return sizes.pop() if sizes else 0


def derived_subrule(rule: Rule, i: int) -> Rule:
    """Drop the i-th smallest point of every window.

    All blocks must share one size s; 0 <= i < s.  The new block keeps
    A restricted to the shrunken window.
    """
    if not rule.blocks:
        return rule
    s = _uniform_block_size(rule)
    if not 0 <= i < s:
        raise ValueError(f"index {i} outside [0, {s})")
    out = []
    for blk in rule.blocks:
        removed = sorted(blk.B)[i]
        nb = blk.B - {removed}
        out.append(Block(blk.A & nb, nb))
    return Rule(rule.universe, out)


@dataclass(frozen=True)
class EChain:
    """Nested elimination sets E_0 >= E_1 >= ... plus the reals that cut them."""

    sets: tuple[frozenset[int], ...]
    reals: tuple[RealSet, ...]


def e_chain(rule: Rule, reals: Sequence[RealSet]) -> EChain:
    """Elimination rounds: round i keeps block n if the i-th derived window
    of block n is matched by reals[i].

    Requires every block to have exactly len(reals) points, so each round
    can drop a distinct point.  E_0 is all block indices; len(reals)+1 sets
    come back, nested by construction.
    """
    m = len(reals)
    if m == 0:
        raise ValueError("need at least one real")
    _require_same_universe(rule.universe, reals)
    if rule.blocks:
        s = _uniform_block_size(rule)
        if s != m:
            raise ValueError(f"block size {s} != number of reals {m}")
    sorted_b = [sorted(blk.B) for blk in rule.blocks]
    sets = [frozenset(range(len(rule.blocks)))]
    for i, x in enumerate(reals):
        keep = []
        for n in sets[-1]:
            drop = 1 << sorted_b[n][i]
            bm = rule.b_masks[n] ^ drop
            am = rule.a_masks[n] & ~drop
            if x.bits & bm == am:
                keep.append(n)
        sets.append(frozenset(keep))
    return EChain(tuple(sets), tuple(reals))


def majority_real(reals: Sequence[RealSet]) -> RealSet:
    """Points belonging to strictly more than half of the reals.

    Bit-sliced: per-point counts are kept in binary planes and compared to
    the threshold with whole-universe bitwise ops, so cost scales with the
    number of reals, not the universe size.
    """
    if not reals:
        raise ValueError("need at least one real")
    universe = reals[0].universe
    _require_same_universe(universe, reals)
    planes: list[int] = []
    for x in reals:
        carry = x.bits
        for j in range(len(planes)):
            if not carry:
                break
            planes[j], carry = planes[j] ^ carry, planes[j] & carry
        if carry:
            planes.append(carry)
    threshold = len(reals) // 2
    gt = 0
    eq = universe.full_mask
    for j in reversed(range(len(planes))):
        tbit = (threshold >> j) & 1
        if tbit:
            eq &= planes[j]
        else:
            gt |= eq & planes[j]
            eq &= ~planes[j]
    if threshold.bit_length() > len(planes):
        gt = 0
    return RealSet(universe, gt)


class MajorityCombineResult(NamedTuple):
    real: RealSet
    certified: frozenset[int]


def majority_combine(rule: Rule, reals: Sequence[RealSet]) -> MajorityCombineResult:
    """Majority of k+1 reals, certified on the blocks surviving elimination.

    rule must be a valid rule whose blocks all have k+1 points, k >= 2.
    Every certified index n is re-verified to satisfy C cap B_n = A_n, and
    every point of a certified window must lie in either at most one or at
    least k of the candidate reals (at least k exactly when the point is
    committed).  Failure of either check raises GuaranteeViolation.
    """
    m = len(reals)
    k = m - 1
    if k < 2:
        raise ValueError(f"need k >= 2 (so at least 3 reals), got {m}")
    report = validate_rule(rule, Constant(m))
    if not report:
        raise ValueError("invalid rule: " + "; ".join(report.violations))
    if rule.blocks and _uniform_block_size(rule) != m:
        raise ValueError(f"block size {_uniform_block_size(rule)} != k+1 = {m}")
    chain = e_chain(rule, reals)
    combined = majority_real(reals)
    certified = chain.sets[-1]
    for n in certified:
        if combined.bits & rule.b_masks[n] != rule.a_masks[n]:
            raise GuaranteeViolation(
                f"certified block {n} not matched by the majority real"
            )
        blk = rule.blocks[n]
        for p in blk.B:
            count = sum(1 for x in reals if (x.bits >> p) & 1)
            committed = p in blk.A
            if committed and count < k:
                raise GuaranteeViolation(
                    f"point {p} of block {n} committed but in only {count} reals"
                )
            if not committed and count > 1:
                raise GuaranteeViolation(
                    f"point {p} of block {n} uncommitted yet in {count} reals"
                )
    return MajorityCombineResult(combined, certified)


@dataclass(frozen=True)
class SpliceFunction:
    """Strictly increasing cut points; segment i is (values[i-1], values[i]]."""

    values: tuple[int, ...]

    def __init__(self, values: Iterable[int]):
        vals = tuple(values)
        if not vals:
            raise ValueError("need at least one cut point")
        if vals[0] < 0:
            raise ValueError("cut points must be nonnegative")
        for a, b in zip(vals, vals[1:]):
            if b <= a:
                raise ValueError(f"cut points not strictly increasing: {a} then {b}")
        object.__setattr__(self, "values", vals)

    def segment_mask(self, i: int) -> int:
        lo = self.values[i - 1] if i > 0 else -1
        hi = self.values[i]
        return ((1 << (hi + 1)) - 1) ^ ((1 << (lo + 1)) - 1)


def splice(f: SpliceFunction, reals: Sequence[RealSet]) -> RealSet:
    """Glue reals segment-wise: segment i of the result copies reals[i].

    Segment i is (f(i-1), f(i)] with f(-1) = -1.  Points above the last
    used cut point stay empty.  len(f) must cover len(reals) and the last
    used cut must stay inside the universe.
    """
    if not reals:
        raise ValueError("need at least one real")
    universe = reals[0].universe
    _require_same_universe(universe, reals)
    if len(reals) > len(f.values):
        raise ValueError(
            f"{len(reals)} reals but only {len(f.values)} cut points"
        )
    if f.values[len(reals) - 1] >= universe.size:
        raise ValueError("cut points run past the universe")
    bits = 0
    for i, x in enumerate(reals):
        bits |= x.bits & f.segment_mask(i)
    return RealSet(universe, bits)


def splice_certify(
    rule: Rule,
    k: int,
    f: SpliceFunction,
    reals: Sequence[RealSet],
    chains: Sequence[Iterable[int]],
) -> frozenset[int]:
    """Splice reals X_k..X_j and certify which blocks the result matches.

    reals[0] plays the role of index k (the rule's width class); segments
    below k are unused because every window starts above f(k).  chains[i]
    lists block indices matched by reals[i]; the chains must be nested.
    Certified: indices in the last chain whose window ends below f(j).
    The guarantee (spliced real matches every certified block) is
    re-verified; failure raises GuaranteeViolation.
    """
    if not reals:
        raise ValueError("need at least one real")
    if len(chains) != len(reals):
        raise ValueError(f"{len(reals)} reals but {len(chains)} chains")
    if k < 0:
        raise ValueError("width class k must be nonnegative")
    report = validate_rule(rule, Constant(k))
    if not report:
        raise ValueError("invalid rule: " + "; ".join(report.violations))
    j = k + len(reals) - 1
    if len(f.values) <= j:
        raise ValueError(
            f"need cut points through index {j}, got {len(f.values)}"
        )
    universe = rule.universe
    _require_same_universe(universe, reals)
    chain_sets = [frozenset(c) for c in chains]
    n_blocks = len(rule.blocks)
    for idx, cs in enumerate(chain_sets):
        if any(not 0 <= n < n_blocks for n in cs):
            raise ValueError(f"chain {idx} mentions unknown block indices")
        if idx and not cs <= chain_sets[idx - 1]:
            raise ValueError(f"chain {idx} not nested inside chain {idx - 1}")
        x = reals[idx]
        for n in cs:
            if x.bits & rule.b_masks[n] != rule.a_masks[n]:
                raise ValueError(
                    f"chain {idx} claims block {n} but real {idx} does not match it"
                )
    floor = f.values[k]
    for n, blk in enumerate(rule.blocks):
        if min(blk.B) <= floor:
            raise ValueError(
                f"block {n} reaches down to {min(blk.B)}, not above f({k}) = {floor}"
            )
    ceiling = f.values[j]
    certified = frozenset(
        n for n in chain_sets[-1] if max(rule.blocks[n].B) < ceiling
    )
    padding = [RealSet.empty(universe)] * k
    glued = splice(f, padding + list(reals))
    for n in certified:
        if glued.bits & rule.b_masks[n] != rule.a_masks[n]:
            raise GuaranteeViolation(f"spliced real fails certified block {n}")
    return certified


@dataclass(frozen=True)
class TreeOracle:
    """Membership oracle for a downward-closed set of 0/1 words.

    contains("") answers for the root.  max_depth caps how deep block
    construction will look; the oracle itself may extend further.
    """

    contains: Callable[[str], bool]
    max_depth: int

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    @classmethod
    def avoid_substring(cls, pattern: str, max_depth: int) -> "TreeOracle":
        """Words not containing the given pattern as a factor."""
        if not pattern or set(pattern) - {"0", "1"}:
            raise ValueError(f"pattern must be a nonempty 0/1 word, got {pattern!r}")
        return cls(lambda w: pattern not in w, max_depth)

    @classmethod
    def finite_antichain(cls, words: Sequence[str], max_depth: int) -> "TreeOracle":
        """Prefixes of finitely many words."""
        for w in words:
            if set(w) - {"0", "1"}:
                raise ValueError(f"not a 0/1 word: {w!r}")
        tips = tuple(words)
        return cls(lambda w: any(t.startswith(w) for t in tips), max_depth)

    @classmethod
    def from_words(cls, words: Iterable[str], max_depth: int) -> "TreeOracle":
        """Explicit word set; must be downward closed."""
        wordset = frozenset(words)
        for w in wordset:
            if set(w) - {"0", "1"}:
                raise ValueError(f"not a 0/1 word: {w!r}")
            if w and w[:-1] not in wordset:
                raise ValueError(f"not downward closed: {w!r} present, parent missing")
        return cls(lambda w: w in wordset, max_depth)


def tree_to_rule(tree: TreeOracle, universe: Universe) -> Rule:
    """Blocks whose followers' characteristic words leave the tree.

    Window i is the interval [n_i, n_{i+1}); its pattern is the shortest
    word (lexicographically least among the shortest) that no tree word of
    the corresponding level ends with.  Any real matching window i has a
    length-n_{i+1} prefix outside the tree.  Raises NoWitnessWithinDepth
    if max_depth is exhausted before even one block exists.
    """
    depth = min(tree.max_depth, universe.size)
    levels: list[set[str]] = [set() if not tree.contains("") else {""}]

    def level(d: int) -> set[str]:
        while len(levels) <= d:
            prev = levels[-1]
            nxt = set()
            for w in prev:
                for c in ("0", "1"):
                    if tree.contains(w + c):
                        nxt.add(w + c)
            levels.append(nxt)
        return levels[d]

    blocks = []
    start = 0
    while start < depth:
        found = None
        for length in range(1, depth - start + 1):
            tails = {w[-length:] for w in level(start + length)}
            if len(tails) < (1 << length):
                v = 0
                while format(v, f"0{length}b") in tails:
                    v += 1
                found = format(v, f"0{length}b")
                break
        if found is None:
            break
        a = {start + pos for pos, ch in enumerate(found) if ch == "1"}
        blocks.append(Block(a, range(start, start + len(found))))
        start += len(found)
    if not blocks:
        raise NoWitnessWithinDepth(
            f"no escaping pattern within depth {depth}"
        )
    return Rule(universe, blocks)


class DiagonalResult(NamedTuple):
    real: RealSet
    achieved: tuple[int, ...]
    committed: tuple[tuple[int, ...], ...]


def diagonal_follower(
    rules: Sequence[Rule], multiplicity: int, universe: Universe | None = None
) -> DiagonalResult:
    """One real following every rule, built greedily.

    Round-robin over the rules; each visit commits the lowest-indexed
    still-unconsidered block whose window avoids everything committed so
    far, until the rule has multiplicity committed blocks or runs out.
    achieved[i] is the final matched-block count of rules[i] against the
    result (recomputed from scratch, so incidental matches count too).
    """
    if multiplicity < 0:
        raise ValueError("multiplicity must be nonnegative")
    if rules:
        if universe is None:
            universe = rules[0].universe
        for r in rules:
            if r.universe != universe:
                raise UniverseMismatch("rules span different universes")
    elif universe is None:
        raise ValueError("universe required when no rules are given")
    x_bits = 0
    committed_mask = 0
    pointers = [0] * len(rules)
    counts = [0] * len(rules)
    taken: list[list[int]] = [[] for _ in rules]
    while True:
        progress = False
        for idx, rule in enumerate(rules):
            if counts[idx] >= multiplicity:
                continue
            n = pointers[idx]
            while n < len(rule.blocks) and rule.b_masks[n] & committed_mask:
                n += 1
            if n >= len(rule.blocks):
                pointers[idx] = n
                continue
            x_bits |= rule.a_masks[n]
            committed_mask |= rule.b_masks[n]
            counts[idx] += 1
            taken[idx].append(n)
            pointers[idx] = n + 1
            progress = True
        if not progress:
            break
    real = RealSet(universe, x_bits)
    achieved = tuple(len(match_set(real, r)) for r in rules)
    return DiagonalResult(real, achieved, tuple(tuple(t) for t in taken))
