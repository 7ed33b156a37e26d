"""Polynomial-indexed families, finite-support permutations, orbit rules."""

from __future__ import annotations

from fractions import Fraction

import pytest

from rulekit.core import Block, RealSet, Universe, match_set
from rulekit.errors import FragmentShortfall, UniverseMismatch
from rulekit.families import (
    BooleanCombo,
    FamilyFragment,
    FinSuppPermutation,
    Polynomial,
    combo_witnesses,
    density_witnesses,
    enumerate_polynomials,
    extend_check,
    is_automorphism,
    orbit_rule,
    polynomial_member,
    support,
    support_chain,
)

U8 = Universe(8)


def _real(u, members):
    return RealSet.from_members(u, members)


def test_polynomial_normalization_and_eval():
    assert Polynomial((1, 2, 0)).coeffs == (1, 2)
    assert Polynomial((0, 0)).coeffs == (0,)
    assert Polynomial(()).coeffs == (0,)
    p = Polynomial((1, -2))
    assert p.degree == 1
    assert p.height == 2
    assert p(Fraction(3)) == -5
    assert p(Fraction(1, 4)) == Fraction(1, 2)
    assert Polynomial((0, 1)).height == 1
    assert Polynomial((0,)).height == 0


def test_enumeration_starts_with_zero_then_height_one():
    polys = enumerate_polynomials(9)
    assert [p.coeffs for p in polys] == [
        (0,),
        (-1,),
        (1,),
        (-1, -1),
        (-1, 1),
        (0, -1),
        (0, 1),
        (1, -1),
        (1, 1),
    ]


def test_enumeration_places_known_polynomials():
    polys = enumerate_polynomials(20)
    assert polys[6].coeffs == (0, 1)
    assert polys[19].coeffs == (1, -2)


def test_enumeration_is_injective_and_stable():
    polys = enumerate_polynomials(64)
    assert len({p.coeffs for p in polys}) == 64
    assert enumerate_polynomials(30) == polys[:30]
    assert enumerate_polynomials(0) == ()
    with pytest.raises(ValueError):
        enumerate_polynomials(-1)


def test_polynomial_member_at_zero_is_positive_constants():
    polys = enumerate_polynomials(9)
    member = polynomial_member(0, polys)
    assert member.members() == (2, 7, 8)
    assert member.universe.size == 9


def test_polynomial_member_signs():
    member = polynomial_member(-3, [Polynomial((1, 0, 1))])
    assert member.members() == (0,)
    polys = enumerate_polynomials(40)
    for r in (0, 1, Fraction(-5, 2), Fraction(1, 3)):
        assert 0 not in polynomial_member(r, polys)


def test_family_fragment_indexing():
    fam = FamilyFragment(U8, (_real(U8, [0, 1]), _real(U8, [2])))
    assert len(fam) == 2
    assert fam.index_of(_real(U8, [2])) == 1
    assert fam.index_of(_real(U8, [3])) is None
    with pytest.raises(ValueError, match="identical"):
        FamilyFragment(U8, (_real(U8, [1]), _real(U8, [1])))
    with pytest.raises(UniverseMismatch):
        FamilyFragment(U8, (RealSet.empty(Universe(3)),))


def test_family_fragment_dedup_keeps_first():
    fam = FamilyFragment.dedup(
        U8, [_real(U8, [1]), _real(U8, [2]), _real(U8, [1])]
    )
    assert [m.members() for m in fam.members] == [(1,), (2,)]


def test_permutation_canonical_form():
    sigma = FinSuppPermutation.from_mapping({1: 1, 2: 3, 3: 2})
    assert sigma.pairs == ((2, 3), (3, 2))
    assert FinSuppPermutation.identity().is_identity
    assert FinSuppPermutation.from_cycles((0, 1, 2)).pairs == (
        (0, 1),
        (1, 2),
        (2, 0),
    )


def test_permutation_validation():
    with pytest.raises(ValueError):
        FinSuppPermutation(((1, 1),))
    with pytest.raises(ValueError):
        FinSuppPermutation(((-1, 0), (0, -1)))
    with pytest.raises(ValueError):
        FinSuppPermutation(((0, 1), (0, 2)))
    with pytest.raises(ValueError, match="close into a permutation"):
        FinSuppPermutation(((0, 1),))
    with pytest.raises(ValueError, match="sorted"):
        FinSuppPermutation(((1, 0), (0, 1)))
    with pytest.raises(ValueError, match="two cycles"):
        FinSuppPermutation.from_cycles((0, 1), (1, 2))


def test_permutation_apply_and_inverse():
    sigma = FinSuppPermutation.from_cycles((0, 1, 2))
    assert [sigma.apply(p) for p in (0, 1, 2, 7)] == [1, 2, 0, 7]
    assert [sigma.apply_inverse(p) for p in (0, 1, 2, 7)] == [2, 0, 1, 7]
    assert sigma.inverse().compose(sigma).is_identity
    assert support(sigma) == {0, 1, 2}
    assert support(FinSuppPermutation.identity()) == frozenset()


def test_permutation_compose_order():
    sigma = FinSuppPermutation.from_cycles((0, 1))
    tau = FinSuppPermutation.from_cycles((1, 2))
    assert sigma.compose(tau) == FinSuppPermutation.from_cycles((0, 1, 2))
    assert tau.compose(sigma) == FinSuppPermutation.from_cycles((0, 2, 1))


def test_permutation_image():
    sigma = FinSuppPermutation.from_cycles((0, 1))
    x = _real(U8, [0, 5])
    assert sigma.image(x).members() == (1, 5)
    assert sigma.image(sigma.image(x)) == x
    with pytest.raises(ValueError, match="outside universe"):
        FinSuppPermutation.from_cycles((0, 9)).image(x)


def test_is_automorphism_cases():
    fam = FamilyFragment(U8, (_real(U8, [0]), _real(U8, [1])))
    assert is_automorphism(FinSuppPermutation.identity(), fam) == (True, None)
    swap = FinSuppPermutation.from_cycles((0, 1))
    assert is_automorphism(swap, fam) == (True, None)
    broken_on = FamilyFragment(U8, (_real(U8, [0, 1]), _real(U8, [2])))
    got = is_automorphism(FinSuppPermutation.from_cycles((0, 2)), broken_on)
    assert got == (False, 0)


def test_support_chain_toy():
    u = Universe(3)
    fam = FamilyFragment(u, (_real(u, [0, 2]), _real(u, [1, 2])))
    sigma = FinSuppPermutation.from_cycles((0, 1))
    chain = support_chain(fam, sigma, 1)
    assert chain == ((0, 1), 0)
    c_even = fam.members[chain.indices[0]]
    c_odd = fam.members[chain.indices[1]]
    assert sigma.image(c_even) == c_odd
    diff = c_even - c_odd
    assert chain.k_star in diff
    assert set(diff.members()) <= support(sigma)


def test_support_chain_zero_pairs():
    u = Universe(3)
    fam = FamilyFragment(u, (_real(u, [0, 2]),))
    sigma = FinSuppPermutation.from_cycles((0, 2))
    assert support_chain(fam, sigma, 0) == ((), 0)


def test_support_chain_rejects_identity_and_non_automorphisms():
    u = Universe(3)
    fam = FamilyFragment(u, (_real(u, [0, 2]),))
    with pytest.raises(ValueError, match="identity"):
        support_chain(fam, FinSuppPermutation.identity(), 1)
    with pytest.raises(ValueError, match="not an automorphism"):
        support_chain(fam, FinSuppPermutation.from_cycles((0, 1)), 1)


def test_support_chain_shortfall_carries_partial():
    u = Universe(3)
    fam = FamilyFragment(u, (_real(u, [0, 2]), _real(u, [1, 2])))
    sigma = FinSuppPermutation.from_cycles((0, 1))
    with pytest.raises(FragmentShortfall) as exc:
        support_chain(fam, sigma, 2)
    err = exc.value
    assert err.found == 1
    assert err.wanted == 2
    assert err.partial == ((0, 1), 0)


def test_boolean_combo_rejects_overlap():
    with pytest.raises(ValueError):
        BooleanCombo([1], [1])
    combo = BooleanCombo([0], [1])
    assert combo.positives == frozenset({0})
    assert combo.negatives == frozenset({1})


def test_combo_witnesses_basic():
    u = Universe(4)
    fam = FamilyFragment(u, (_real(u, [0, 1]), _real(u, [1, 2])))
    assert combo_witnesses(fam, BooleanCombo([0], [1])).members() == (0,)
    assert combo_witnesses(fam, BooleanCombo([], [])).members() == (0, 1, 2, 3)
    extra = combo_witnesses(fam, BooleanCombo([], [], _real(u, [1, 3])))
    assert extra.members() == (1, 3)
    with pytest.raises(ValueError, match="member index"):
        combo_witnesses(fam, BooleanCombo([5], []))
    with pytest.raises(UniverseMismatch):
        combo_witnesses(fam, BooleanCombo([], [], RealSet.empty(Universe(9))))


def test_combo_witnesses_separate_polynomial_by_sign_pattern():
    polys = enumerate_polynomials(64)
    u = Universe(64)
    members = tuple(
        polynomial_member(r, polys) for r in (0, Fraction(1, 4), 1)
    )
    fam = FamilyFragment(u, members)
    witnesses = combo_witnesses(fam, BooleanCombo([0, 1], [2]))
    assert 19 in witnesses  # the slot of 1 - 2x, positive below 1/2 only


def test_density_witnesses_cases():
    u = Universe(4)
    fam = FamilyFragment(
        u, (_real(u, [0, 1]), _real(u, [1, 2]), _real(u, [2, 3]))
    )
    assert density_witnesses(fam, [1], [3], 5) == (0, 1)
    assert density_witnesses(fam, [], [], 2) == (0, 1)
    assert density_witnesses(fam, [1], [3], 1) == (0,)
    assert density_witnesses(fam, [0, 3], [], 4) == ()
    with pytest.raises(ValueError):
        density_witnesses(fam, [1], [1], 2)
    with pytest.raises(ValueError):
        density_witnesses(fam, [9], [], 2)
    with pytest.raises(ValueError):
        density_witnesses(fam, [], [], -1)


def _toy_orbit_family():
    fam = FamilyFragment(U8, (_real(U8, [2, 4]), _real(U8, [3, 4])))
    sigmas = [
        FinSuppPermutation.identity(),
        FinSuppPermutation.from_cycles((2, 3)),
    ]
    return fam, sigmas


def test_orbit_rule_two_permutations():
    fam, sigmas = _toy_orbit_family()
    result = orbit_rule(fam, BooleanCombo([], []), sigmas, 1, 1)
    assert result.rule.blocks == (Block({2}, {2, 3}),)
    assert result.points == (2,)
    assert result.ground.members() == (2,)
    assert result.chains == ((0, 1),)


def test_orbit_rule_replay_guarantee():
    fam, sigmas = _toy_orbit_family()
    result = orbit_rule(fam, BooleanCombo([], []), sigmas, 1, 1)
    for bits in range(1 << U8.size):
        x = RealSet(U8, bits)
        for n in match_set(x, result.rule):
            j = result.points[n]
            for k, sig in enumerate(sigmas):
                assert (sig.apply_inverse(j) in x) == (k < 1)


def test_orbit_rule_single_permutation_gives_singletons():
    fam = FamilyFragment(U8, (_real(U8, [2, 4]),))
    result = orbit_rule(
        fam,
        BooleanCombo([0], []),
        [FinSuppPermutation.identity()],
        1,
        2,
    )
    assert result.rule.blocks == (Block({2}, {2}), Block({4}, {4}))
    assert result.points == (2, 4)
    assert result.chains == ()


def test_orbit_rule_shortfall_on_blocks():
    fam, sigmas = _toy_orbit_family()
    with pytest.raises(FragmentShortfall) as exc:
        orbit_rule(fam, BooleanCombo([], []), sigmas, 1, 2)
    assert exc.value.found == 1
    assert exc.value.wanted == 2


def test_orbit_rule_shortfall_on_chains():
    fam = FamilyFragment(U8, (_real(U8, [0, 1]),))
    sigmas = [
        FinSuppPermutation.identity(),
        FinSuppPermutation.from_cycles((0, 1)),
    ]
    with pytest.raises(FragmentShortfall, match="support-chain pair"):
        orbit_rule(fam, BooleanCombo([], []), sigmas, 1, 1)


def test_orbit_rule_validation():
    fam, sigmas = _toy_orbit_family()
    with pytest.raises(ValueError, match="distinct"):
        orbit_rule(fam, BooleanCombo([], []), [sigmas[1], sigmas[1]], 1, 1)
    with pytest.raises(ValueError):
        orbit_rule(fam, BooleanCombo([], []), [], 0, 1)
    with pytest.raises(ValueError):
        orbit_rule(fam, BooleanCombo([], []), sigmas, 3, 1)
    with pytest.raises(ValueError):
        orbit_rule(fam, BooleanCombo([], []), sigmas, 1, 0)
    with pytest.raises(ValueError, match="not an automorphism"):
        orbit_rule(
            fam,
            BooleanCombo([], []),
            [FinSuppPermutation.identity(), FinSuppPermutation.from_cycles((2, 5))],
            1,
            1,
        )


def test_extend_check_degenerate_flag():
    fam = FamilyFragment(U8, (_real(U8, [0, 1]),))
    group = [FinSuppPermutation.identity()]
    combo = BooleanCombo([0], [1])
    (dup,) = extend_check(fam, group, _real(U8, [0, 1]), [combo])
    assert dup.degenerate
    assert dup.count == 0
    (fresh,) = extend_check(fam, group, _real(U8, [2]), [combo])
    assert not fresh.degenerate
    assert fresh.witnesses.members() == (0, 1)
    assert fresh.count == 2


def test_extend_check_orbit_indexing():
    fam = FamilyFragment(U8, (_real(U8, [0]), _real(U8, [1])))
    swap = FinSuppPermutation.from_cycles((0, 1))
    group = [FinSuppPermutation.identity(), swap]
    x = _real(U8, [0, 5])
    reports = extend_check(fam, group, x, [BooleanCombo([2], [3])])
    # index 2 is x itself, index 3 its swapped image {1, 5}
    assert reports[0].witnesses.members() == (0,)
    with pytest.raises(ValueError, match="outside the extended list"):
        extend_check(fam, group, x, [BooleanCombo([4], [])])
    with pytest.raises(ValueError, match="not an automorphism"):
        extend_check(
            FamilyFragment(U8, (_real(U8, [0, 3]),)), [swap], x, []
        )


def test_extend_check_rejects_foreign_real():
    fam = FamilyFragment(U8, (_real(U8, [0]),))
    with pytest.raises(UniverseMismatch):
        extend_check(fam, [], RealSet.empty(Universe(3)), [])
