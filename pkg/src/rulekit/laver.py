"""Interval ladders, block slaloms, and the two-point escape rule.

The universe is carved into intervals whose lengths double-and-one:
interval n spans [a_n, a_n + 2^n + 1).  A block slalom guesses a real by
listing, per interval n >= 1, at most n candidate words.  Because each
interval holds more than 2^n points while the guess list has at most n
entries, some two positions of the interval agree on every candidate word;
committing the real to differ from itself on such a pair defeats every
candidate at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .core import Block, RealSet, Rule, Universe
from .errors import GuaranteeViolation

__all__ = [
    "IntervalLadder",
    "BlockSlalom",
    "CoincidentPair",
    "interval_ladder",
    "coincident_pair",
    "block_encode",
    "capture_check",
    "avoiding_rule",
]


@dataclass(frozen=True)
class IntervalLadder:
    """Cut points a_0 = 0, a_{n+1} = a_n + 2^n + 1."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = self.values
        if len(vals) < 2:
            raise ValueError("ladder needs at least one interval")
        if vals[0] != 0:
            raise ValueError(f"ladder must start at 0, got {vals[0]}")
        for n in range(len(vals) - 1):
            want = vals[n] + (1 << n) + 1
            if vals[n + 1] != want:
                raise ValueError(
                    f"ladder breaks at step {n}: {vals[n + 1]} != {want}"
                )

    @property
    def count(self) -> int:
        return len(self.values) - 1

    def interval(self, n: int) -> range:
        if not 0 <= n < self.count:
            raise ValueError(f"interval {n} outside [0, {self.count})")
        return range(self.values[n], self.values[n + 1])


def interval_ladder(count: int, universe: Universe) -> IntervalLadder:
    """The first count intervals; they must fit inside the universe."""
    if count < 1:
        raise ValueError("count must be >= 1")
    vals = [0]
    for n in range(count):
        vals.append(vals[-1] + (1 << n) + 1)
    if vals[-1] > universe.size:
        raise ValueError(
            f"ladder of {count} intervals ends at {vals[-1]}, "
            f"past universe size {universe.size}"
        )
    return IntervalLadder(tuple(vals))


@dataclass(frozen=True)
class BlockSlalom:
    """Per interval n >= 1, a set of at most n candidate words.

    sets[idx] lists the candidates for interval idx+1 (interval 0 is never
    guessed: it has no room for a useful pair).  Words are 0/1 strings of
    exactly the interval length 2^n + 1.
    """

    ladder: IntervalLadder
    sets: tuple[frozenset[str], ...]

    def __init__(self, ladder: IntervalLadder, sets: Iterable[Iterable[str]]):
        object.__setattr__(self, "ladder", ladder)
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in sets))
        if len(self.sets) != ladder.count - 1:
            raise ValueError(
                f"need {ladder.count - 1} word sets for {ladder.count} intervals, "
                f"got {len(self.sets)}"
            )
        for idx, words in enumerate(self.sets):
            n = idx + 1
            if len(words) > n:
                raise ValueError(f"interval {n} lists {len(words)} words, cap is {n}")
            want_len = (1 << n) + 1
            for w in words:
                if len(w) != want_len or set(w) - {"0", "1"}:
                    raise ValueError(
                        f"interval {n} word {w!r} is not a 0/1 word of length {want_len}"
                    )


class CoincidentPair(NamedTuple):
    i: int
    j: int
    guaranteed: bool


def coincident_pair(words: Iterable[str], n: int) -> CoincidentPair:
    """Two positions agreeing on every word of a small word set.

    For at most n words of common length k, positions are grouped by their
    across-words bit signature; at most 2^n groups exist, so k > 2^n forces
    a repeat (guaranteed=True).  The lexicographically least pair (i, j)
    with i < j is returned; below the pigeonhole bound the search still
    runs and may succeed with guaranteed=False, or raise ValueError.
    An empty word set makes every pair coincident; (0, 1) comes back.
    """
    wordset = sorted(set(words))
    if len(wordset) > n:
        raise ValueError(f"{len(wordset)} distinct words exceed the cap {n}")
    if not wordset:
        return CoincidentPair(0, 1, True)
    k = len(wordset[0])
    for w in wordset:
        if len(w) != k or set(w) - {"0", "1"}:
            raise ValueError(f"bad word {w!r}: want 0/1 words of one common length")
    guaranteed = k > (1 << n)
    first_seen: dict[tuple[str, ...], int] = {}
    best: tuple[int, int] | None = None
    for pos in range(k):
        sig = tuple(w[pos] for w in wordset)
        if sig in first_seen:
            cand = (first_seen[sig], pos)
            if best is None or cand < best:
                best = cand
        else:
            first_seen[sig] = pos
    if best is None:
        if guaranteed:
            raise GuaranteeViolation(
                f"{len(wordset)} words of length {k} > 2^{n} admit no coincident pair"
            )
        raise ValueError(
            f"no coincident pair: {k} positions, all signatures distinct"
        )
    return CoincidentPair(best[0], best[1], guaranteed)


def block_encode(x: RealSet, ladder: IntervalLadder) -> tuple[str, ...]:
    """Write x interval by interval as 0/1 words; word[p] is bit a_n + p."""
    if ladder.values[-1] > x.universe.size:
        raise ValueError("ladder runs past the universe")
    words = []
    for n in range(ladder.count):
        lo, hi = ladder.values[n], ladder.values[n + 1]
        chunk = (x.bits >> lo) & ((1 << (hi - lo)) - 1)
        words.append(format(chunk, f"0{hi - lo}b")[::-1])
    return tuple(words)


def capture_check(slalom: BlockSlalom, x: RealSet) -> frozenset[int]:
    """Intervals n >= 1 where the slalom's candidate list contains x's word."""
    words = block_encode(x, slalom.ladder)
    return frozenset(
        n for n in range(1, slalom.ladder.count) if words[n] in slalom.sets[n - 1]
    )


def avoiding_rule(slalom: BlockSlalom, universe: Universe) -> Rule:
    """One two-point block per guessed interval; followers defeat the slalom.

    For interval n the block is ({a_n + i}, {a_n + i, a_n + j}) with (i, j)
    a pair of positions agreeing on every candidate word.  A real matching
    the block differs from itself across the pair, so its interval word
    cannot be any candidate: capture and following are mutually exclusive.
    """
    ladder = slalom.ladder
    if ladder.values[-1] > universe.size:
        raise ValueError("ladder runs past the universe")
    blocks = []
    for n in range(1, ladder.count):
        pair = coincident_pair(slalom.sets[n - 1], n)
        base = ladder.values[n]
        i, j = base + pair.i, base + pair.j
        blocks.append(Block({i}, {i, j}))
    return Rule(universe, blocks)
