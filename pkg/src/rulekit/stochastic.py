"""Exact and sampled odds of matching a rule's early blocks.

A uniformly random real matches a block of w points with probability
2^-w; disjoint windows make the events independent, so the chance of
dodging the first t blocks is an exact rational product.  The sampler
cross-checks that number with counter-based pseudo-random reals: the
same (seed, sample index) always yields the same real, on any backend.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction
from typing import IO, NamedTuple, Sequence

from . import kernels
from .core import Rule

__all__ = [
    "AvoidanceProbability",
    "SampleReport",
    "SweepRow",
    "exact_avoid_probability",
    "mc_follow_estimate",
    "slow_vs_fast_sweep",
    "sample_rows",
    "write_rows_csv",
    "rows_to_json",
]


class AvoidanceProbability(NamedTuple):
    exact: Fraction
    per_block: tuple[Fraction, ...]


def _first_blocks(rule: Rule, first: int):
    if not 0 <= first <= len(rule.blocks):
        raise ValueError(f"first = {first} outside [0, {len(rule.blocks)}]")
    blocks = rule.blocks[:first]
    seen: dict[int, int] = {}
    for n, blk in enumerate(blocks):
        if not blk.B:
            raise ValueError(f"block {n}: B is empty")
        if not blk.A <= blk.B:
            raise ValueError(f"block {n}: A not within B")
        for p in blk.B:
            rule.universe.check_point(p)
            if p in seen:
                raise ValueError(f"blocks {seen[p]},{n} intersect at point {p}")
            seen[p] = n
    return blocks


def exact_avoid_probability(rule: Rule, first: int) -> AvoidanceProbability:
    """Probability a uniform real matches none of the first blocks.

    Exact rational: the product over blocks of 1 - 2^-|B_n|.  Blocks must
    be disjoint (independence) and structurally sound.
    """
    blocks = _first_blocks(rule, first)
    per_block = tuple(
        Fraction(1) - Fraction(1, 1 << len(blk.B)) for blk in blocks
    )
    return AvoidanceProbability(math.prod(per_block, start=Fraction(1)), per_block)


class SampleReport(NamedTuple):
    samples: int
    hits: int
    estimate: Fraction
    stderr: float
    seed: int


def mc_follow_estimate(rule: Rule, first: int, samples: int, seed: int) -> SampleReport:
    """Fraction of sampled reals matching at least one of the first blocks.

    Reals are drawn bit-by-bit from the counter-based generator, so only
    bits inside the sampled windows are ever computed.  estimate is the
    exact hit fraction; stderr the usual binomial sqrt(p(1-p)/n).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    blocks = _first_blocks(rule, first)
    positions = sorted({p for blk in blocks for p in blk.B})
    col = {p: i for i, p in enumerate(positions)}
    starts = [0]
    member_pos: list[int] = []
    member_want: list[int] = []
    for blk in blocks:
        for p in sorted(blk.B):
            member_pos.append(col[p])
            member_want.append(1 if p in blk.A else 0)
        starts.append(len(member_pos))
    if blocks:
        hits = kernels.count_follow_hits(
            seed, samples, positions, starts, member_pos, member_want
        )
    else:
        hits = 0
    p_hat = Fraction(hits, samples)
    stderr = math.sqrt(float(p_hat * (1 - p_hat)) / samples)
    return SampleReport(samples, hits, p_hat, stderr, seed)


class SweepRow(NamedTuple):
    profile: str
    t: int
    exact: Fraction
    estimate: float | None
    stderr: float | None
    seed: int | None


def slow_vs_fast_sweep(
    profiles: Sequence[tuple[str, Sequence[int]]], horizon: int
) -> tuple[SweepRow, ...]:
    """Exact avoid-probability trajectories for several width profiles.

    Each profile is (label, values of f); row t carries the exact product
    of 1 - 2^-f(n) over n < t, for t up to horizon (clipped to the profile
    length).  Slow profiles drive the product toward zero, fast ones
    plateau.  The sampled columns stay empty here; Monte-Carlo reports
    share the same row shape.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    rows = []
    for label, values in profiles:
        acc = Fraction(1)
        rows.append(SweepRow(label, 0, acc, None, None, None))
        for t, width in enumerate(values[:horizon], start=1):
            if width < 1:
                raise ValueError(f"profile {label!r}: width {width} at index {t - 1}")
            acc *= Fraction(1) - Fraction(1, 1 << width)
            rows.append(SweepRow(label, t, acc, None, None, None))
    return tuple(rows)


def sample_rows(label: str, reports: Sequence[SampleReport], exact: Fraction) -> tuple[SweepRow, ...]:
    """Wrap Monte-Carlo reports as sweep rows against one exact value."""
    return tuple(
        SweepRow(label, t, exact, float(rep.estimate), rep.stderr, rep.seed)
        for t, rep in enumerate(reports)
    )


_COLUMNS = ("profile", "t", "exact_num", "exact_den", "estimate", "stderr", "seed")


def write_rows_csv(rows: Sequence[SweepRow], fp: IO[str]) -> None:
    w = csv.writer(fp)
    w.writerow(_COLUMNS)
    for r in rows:
        w.writerow(
            (
                r.profile,
                r.t,
                r.exact.numerator,
                r.exact.denominator,
                "" if r.estimate is None else repr(r.estimate),
                "" if r.stderr is None else repr(r.stderr),
                "" if r.seed is None else r.seed,
            )
        )


def rows_to_json(rows: Sequence[SweepRow]) -> list[dict]:
    out = []
    for r in rows:
        out.append(
            {
                "profile": r.profile,
                "t": r.t,
                "exact": {"num": r.exact.numerator, "den": r.exact.denominator},
                "estimate": r.estimate,
                "stderr": r.stderr,
                "seed": r.seed,
            }
        )
    return out
