"""Core types: universes, real sets, rules, validation, matching."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rulekit.core import (
    Block,
    Constant,
    PerIndex,
    RealSet,
    Rule,
    Universe,
    iter_bits,
    mask_of,
    match_set,
    one_rule_witness,
    slow_report,
    validate_rule,
)
from rulekit.errors import UniverseMismatch


def test_mask_roundtrip():
    assert mask_of([0, 3, 5]) == 0b101001
    assert list(iter_bits(0b101001)) == [0, 3, 5]
    assert mask_of([]) == 0
    assert list(iter_bits(0)) == []


def test_universe_basics():
    u = Universe(6)
    assert u.full_mask == 63
    assert list(u.points()) == [0, 1, 2, 3, 4, 5]
    u.check_point(5)
    with pytest.raises(ValueError):
        u.check_point(6)
    with pytest.raises(ValueError):
        Universe(0)


def test_real_set_operations():
    u = Universe(6)
    x = RealSet.from_members(u, [0, 2, 4])
    y = RealSet.from_members(u, [2, 3])
    assert 2 in x and 1 not in x
    assert len(x) == 3
    assert x.members() == (0, 2, 4)
    assert (x & y).members() == (2,)
    assert (x | y).members() == (0, 2, 3, 4)
    assert (x - y).members() == (0, 4)
    assert x.complement().members() == (1, 3, 5)
    assert RealSet.empty(u).bits == 0
    assert RealSet.full(u).bits == 63


def test_real_set_rejects_foreign_universe():
    x = RealSet.empty(Universe(4))
    y = RealSet.empty(Universe(5))
    with pytest.raises(UniverseMismatch):
        _ = x & y
    with pytest.raises(ValueError):
        RealSet(Universe(3), 0b1000)
    with pytest.raises(ValueError):
        _ = 5 in RealSet.empty(Universe(2))


def test_block_normalizes_to_frozensets():
    blk = Block([1, 1, 2], (2, 1, 5))
    assert blk.A == frozenset({1, 2})
    assert blk.B == frozenset({1, 2, 5})


def test_validate_rule_accepts_clean_rule():
    u = Universe(6)
    rule = Rule(u, [Block([0], [0, 1]), Block([2, 3], [2, 3])])
    report = validate_rule(rule, Constant(2))
    assert report.ok and bool(report)
    assert report.violations == ()


def test_validate_rule_flags_overlap():
    u = Universe(6)
    rule = Rule(u, [Block([0], [0, 1]), Block([1], [1, 2])])
    report = validate_rule(rule, Constant(2))
    assert not report.ok
    assert any("blocks 0,1 intersect at {1}" in v for v in report.violations)


def test_validate_rule_flags_width():
    u = Universe(6)
    rule = Rule(u, [Block([0], [0, 1, 2])])
    report = validate_rule(rule, Constant(2))
    assert any("block 0 width 3 > 2" in v for v in report.violations)


def test_validate_rule_flags_structure():
    u = Universe(4)
    rule = Rule(u, [Block([0, 3], [0, 1]), Block([], []), Block([9], [9])])
    report = validate_rule(rule, Constant(3))
    text = "\n".join(report.violations)
    assert "A not within B" in text
    assert "B is empty" in text
    assert "outside universe" in text


def test_validate_rule_per_index_bound():
    u = Universe(9)
    rule = Rule(u, [Block([], [0]), Block([], [2, 3]), Block([], [5, 6, 7])])
    assert validate_rule(rule, PerIndex([1, 2, 3])).ok
    short = validate_rule(rule, PerIndex([1, 2]))
    assert any("no width bound entry" in v for v in short.violations)
    tight = validate_rule(rule, PerIndex([1, 2, 2]))
    assert any("width 3 > 2" in v for v in tight.violations)


def test_width_bounds_demand_positive_entries():
    with pytest.raises(ValueError):
        Constant(0)
    with pytest.raises(ValueError):
        PerIndex([1, 0, 2])
    assert Constant(3).limit(17) == 3
    assert PerIndex([1, 2]).limit(1) == 2
    assert PerIndex([1, 2]).limit(2) is None


def test_match_set_mixed_blocks():
    u = Universe(6)
    x = RealSet.from_members(u, [0, 2, 3, 5])
    rule = Rule(u, [Block([0], [0, 1]), Block([2, 3], [2, 3]), Block([], [4, 5])])
    assert match_set(x, rule) == {0, 1}


def test_match_set_degenerate_patterns():
    u = Universe(8)
    blocks = [Block([], [2 * i, 2 * i + 1]) for i in range(4)]
    assert match_set(RealSet.empty(u), Rule(u, blocks)) == {0, 1, 2, 3}
    blocks = [Block([2 * i, 2 * i + 1], [2 * i, 2 * i + 1]) for i in range(4)]
    assert match_set(RealSet.full(u), Rule(u, blocks)) == {0, 1, 2, 3}


def test_match_set_requires_same_universe():
    with pytest.raises(UniverseMismatch):
        match_set(RealSet.empty(Universe(3)), Rule(Universe(4), []))


@settings(derandomize=True, max_examples=60, deadline=None)
@given(st.data())
def test_match_set_agrees_with_pointwise_oracle(data):
    size = data.draw(st.integers(4, 16))
    u = Universe(size)
    n_blocks = data.draw(st.integers(0, 4))
    free = list(range(size))
    blocks = []
    for _ in range(n_blocks):
        if not free:
            break
        width = data.draw(st.integers(1, min(3, len(free))))
        window = free[:width]
        free = free[width:]
        committed = [p for p in window if data.draw(st.booleans())]
        blocks.append(Block(committed, window))
    rule = Rule(u, blocks)
    x = RealSet(u, data.draw(st.integers(0, u.full_mask)))
    expected = frozenset(
        n
        for n, blk in enumerate(rule.blocks)
        if {p for p in blk.B if p in x} == blk.A
    )
    assert match_set(x, rule) == expected


def test_one_rule_witness_majority_side():
    u = Universe(8)
    rule = Rule(u, [Block([], [0]), Block([], [2]), Block([], [4]), Block([6], [6])])
    witness = one_rule_witness(rule)
    assert witness.matches == 3
    assert witness.winner.bits == 0
    assert len(match_set(witness.winner, rule)) == 3


def test_one_rule_witness_full_side():
    u = Universe(4)
    rule = Rule(u, [Block([i], [i]) for i in range(4)])
    witness = one_rule_witness(rule)
    assert witness.matches == 4
    assert witness.winner.bits == u.full_mask


def test_one_rule_witness_alternating_tie():
    u = Universe(6)
    blocks = [Block([i] if i % 2 else [], [i]) for i in range(6)]
    witness = one_rule_witness(rule := Rule(u, blocks))
    assert witness.matches == 3
    assert len(match_set(witness.winner, rule)) == 3


def test_one_rule_witness_empty_rule():
    witness = one_rule_witness(Rule(Universe(3), []))
    assert witness.matches == 0


def test_one_rule_witness_rejects_wide_blocks():
    rule = Rule(Universe(4), [Block([0], [0, 1])])
    with pytest.raises(ValueError):
        one_rule_witness(rule)


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=40))
def test_one_rule_witness_always_covers_half(flags):
    u = Universe(len(flags))
    rule = Rule(u, [Block([i] if f else [], [i]) for i, f in enumerate(flags)])
    witness = one_rule_witness(rule)
    assert 2 * witness.matches >= len(flags)
    empties = sum(1 for f in flags if not f)
    assert witness.matches == max(empties, len(flags) - empties)


def test_slow_report_constant_one():
    rep = slow_report([1] * 10, 10)
    assert rep.total == 5
    assert rep.partial_sums[0] == Fraction(1, 2)
    assert rep.partial_sums[4] == Fraction(5, 2)


def test_slow_report_identity_widths():
    rep = slow_report(list(range(20)), 20)
    assert rep.total == 2 - Fraction(1, 1 << 19)


def test_slow_report_constant_two():
    assert slow_report([2] * 8, 8).total == 2


def test_slow_report_validation():
    with pytest.raises(ValueError):
        slow_report([1, 2], 3)
    with pytest.raises(ValueError):
        slow_report([1, -1], 2)
    assert slow_report([5, 5], 0).total == 0


@settings(derandomize=True, max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=30))
def test_slow_report_partial_sums_accumulate(widths):
    rep = slow_report(widths, len(widths))
    acc = Fraction(0)
    for w, s in zip(widths, rep.partial_sums):
        acc += Fraction(1, 1 << w)
        assert s == acc
    assert rep.total == acc
