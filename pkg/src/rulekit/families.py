"""Set families over polynomial indices, their automorphisms, and orbit rules.

The running example: index the universe by integer polynomials and let
A_r = {indices of p with p(r) > 0} for rationals r.  Boolean combinations
of such sets are the family's "large" sets.  Finite-support permutations
act on indices; when a permutation maps family members to family members
it is an automorphism, and a short chain argument extracts, from any
automorphism moving a point, rule blocks that force a follower's orbit
to stay entangled with the family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, NamedTuple, Sequence

from .core import Block, RealSet, Rule, Universe, Constant, iter_bits, mask_of, validate_rule
from .errors import FragmentShortfall, GuaranteeViolation, UniverseMismatch

__all__ = [
    "Polynomial",
    "FamilyFragment",
    "FinSuppPermutation",
    "BooleanCombo",
    "AutomorphismReport",
    "SupportChain",
    "OrbitRuleResult",
    "ComboReport",
    "enumerate_polynomials",
    "polynomial_member",
    "combo_witnesses",
    "density_witnesses",
    "support",
    "is_automorphism",
    "support_chain",
    "orbit_rule",
    "extend_check",
]


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial; coeffs[d] multiplies x^d, top coefficient nonzero.

    The zero polynomial is (0,).
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        cs = list(coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def height(self) -> int:
        return max(self.degree, max(abs(c) for c in self.coeffs))

    def __call__(self, r) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * r + c
        return acc


def enumerate_polynomials(count: int) -> tuple[Polynomial, ...]:
    """The first count polynomials, graded by height.

    Height h = max(degree, largest |coefficient|).  Within a height grade,
    order by (number of coefficients, coefficient tuple).  Index 0 is the
    zero polynomial; the order is a fixed convention shared by every
    caller, so indices are stable.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    out: list[Polynomial] = []
    h = 0
    while len(out) < count:
        grade = []
        for d in range(h + 1):
            for tup in product(range(-h, h + 1), repeat=d + 1):
                if d > 0 and tup[-1] == 0:
                    continue
                height = max(d, max(abs(c) for c in tup))
                if height == h:
                    grade.append(tup)
        grade.sort(key=lambda t: (len(t), t))
        out.extend(Polynomial(t) for t in grade)
        h += 1
        if h > 64:
            raise ValueError("enumeration ran away; count too large")
    return tuple(out[:count])


def polynomial_member(r, polys: Sequence[Polynomial]) -> RealSet:
    """Indices of polynomials strictly positive at r, as a real."""
    universe = Universe(len(polys))
    r = Fraction(r)
    bits = 0
    for idx, p in enumerate(polys):
        if p(r) > 0:
            bits |= 1 << idx
    return RealSet(universe, bits)


@dataclass(frozen=True)
class FamilyFragment:
    """Finitely many distinct member sets over one universe."""

    universe: Universe
    members: tuple[RealSet, ...]
    _index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        index: dict[int, int] = {}
        for i, m in enumerate(self.members):
            if m.universe != self.universe:
                raise UniverseMismatch(f"member {i} lives in a different universe")
            if m.bits in index:
                raise ValueError(f"members {index[m.bits]} and {i} are identical")
            index[m.bits] = i
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.members)

    def index_of(self, x: RealSet) -> int | None:
        return self._index.get(x.bits)

    @classmethod
    def dedup(cls, universe: Universe, members: Iterable[RealSet]) -> "FamilyFragment":
        seen = set()
        kept = []
        for m in members:
            if m.bits not in seen:
                seen.add(m.bits)
                kept.append(m)
        return cls(universe, tuple(kept))


@dataclass(frozen=True)
class FinSuppPermutation:
    """Permutation of the nonnegative ints moving only finitely many points.

    Canonical form: sorted (source, target) pairs with source != target.
    """

    pairs: tuple[tuple[int, int], ...]
    _map: dict = field(init=False, compare=False, repr=False)
    _inv: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        fwd: dict[int, int] = {}
        for src, dst in self.pairs:
            if src < 0 or dst < 0:
                raise ValueError(f"negative point in pair ({src}, {dst})")
            if src == dst:
                raise ValueError(f"fixed point {src} listed; strip it")
            if src in fwd:
                raise ValueError(f"source {src} listed twice")
            fwd[src] = dst
        if set(fwd.values()) != set(fwd):
            raise ValueError("pairs do not close into a permutation")
        if self.pairs != tuple(sorted(self.pairs)):
            raise ValueError("pairs must be sorted by source")
        object.__setattr__(self, "_map", fwd)
        object.__setattr__(self, "_inv", {d: s for s, d in fwd.items()})

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> "FinSuppPermutation":
        return cls(tuple(sorted((s, d) for s, d in mapping.items() if s != d)))

    @classmethod
    def identity(cls) -> "FinSuppPermutation":
        return cls(())

    @classmethod
    def from_cycles(cls, *cycles: Sequence[int]) -> "FinSuppPermutation":
        mapping: dict[int, int] = {}
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + type(cyc)((cyc[0],))):
                if a in mapping:
                    raise ValueError(f"point {a} in two cycles")
                mapping[a] = b
        return cls.from_mapping(mapping)

    def apply(self, p: int) -> int:
        return self._map.get(p, p)

    def apply_inverse(self, p: int) -> int:
        return self._inv.get(p, p)

    def inverse(self) -> "FinSuppPermutation":
        return FinSuppPermutation(tuple(sorted((d, s) for s, d in self.pairs)))

    def compose(self, other: "FinSuppPermutation") -> "FinSuppPermutation":
        """self after other: (self.compose(other))(p) = self(other(p))."""
        points = set(self._map) | set(other._map)
        return FinSuppPermutation.from_mapping(
            {p: self.apply(other.apply(p)) for p in points}
        )

    @property
    def is_identity(self) -> bool:
        return not self.pairs

    @property
    def support_set(self) -> frozenset[int]:
        return frozenset(self._map)

    def image(self, x: RealSet) -> RealSet:
        """Pointwise image of a real; the support must fit the universe."""
        n = x.universe.size
        for s, d in self.pairs:
            if s >= n or d >= n:
                raise ValueError(
                    f"permutation moves {s} -> {d}, outside universe [0, {n})"
                )
        supp_mask = mask_of(self._map)
        bits = x.bits & ~supp_mask
        for s, d in self.pairs:
            if (x.bits >> s) & 1:
                bits |= 1 << d
        return RealSet(x.universe, bits)


def support(sigma: FinSuppPermutation) -> frozenset[int]:
    """The points the permutation moves."""
    return sigma.support_set


class AutomorphismReport(NamedTuple):
    ok: bool
    counterexample: int | None


def is_automorphism(sigma: FinSuppPermutation, family: FamilyFragment) -> AutomorphismReport:
    """Does sigma map every member to a member?

    Injectivity is free (permutations are injective), so hitting the
    family pointwise makes the induced member map a bijection.  On failure
    the first offending member index is reported.
    """
    for i, m in enumerate(family.members):
        if family.index_of(sigma.image(m)) is None:
            return AutomorphismReport(False, i)
    return AutomorphismReport(True, None)


class SupportChain(NamedTuple):
    indices: tuple[int, ...]
    k_star: int


def _chain_pairs(
    family: FamilyFragment,
    sigma: FinSuppPermutation,
    pairs: int,
    k_star: int,
    banned: set[int],
) -> list[int] | None:
    """Greedy (C, sigma[C]) pairs pinned at k_star, avoiding banned indices.

    Each C must contain k_star but not sigma(k_star), so C and sigma[C]
    provably differ at k_star.  Returns member indices c0, d0, c1, d1, ...
    or None when the next pair cannot be found.
    """
    moved = sigma.apply(k_star)
    used = set(banned)
    out: list[int] = []
    for _ in range(pairs):
        hit = None
        for ci, c in enumerate(family.members):
            if ci in used:
                continue
            if not ((c.bits >> k_star) & 1) or ((c.bits >> moved) & 1):
                continue
            di = family.index_of(sigma.image(c))
            if di is None or di in used or di == ci:
                continue
            hit = (ci, di)
            break
        if hit is None:
            return None
        used.update(hit)
        out.extend(hit)
    return out


def support_chain(
    family: FamilyFragment, sigma: FinSuppPermutation, pairs: int
) -> SupportChain:
    """Distinct members C_0, C_1, ..., pairwise linked by sigma.

    C_{2n} contains some fixed moved point k* while missing sigma(k*);
    C_{2n+1} = sigma[C_{2n}].  Consequently C_{2n} minus C_{2n+1} is a
    nonempty subset of sigma's support: the chain witnesses, inside the
    family, that sigma genuinely moves things.  k* is chosen as the
    smallest support point admitting the full chain; FragmentShortfall
    (carrying the best partial chain) when the family is too small.
    """
    if sigma.is_identity:
        raise ValueError("identity permutation has no support to witness")
    report = is_automorphism(sigma, family)
    if not report.ok:
        raise ValueError(
            f"not an automorphism: member {report.counterexample} maps outside the family"
        )
    if pairs < 0:
        raise ValueError("pairs must be nonnegative")
    supp = sorted(sigma.support_set)
    if pairs == 0:
        return SupportChain((), supp[0])
    best: tuple[list[int], int] | None = None
    for k_star in supp:
        got = _chain_pairs(family, sigma, pairs, k_star, set())
        if got is not None:
            return SupportChain(tuple(got), k_star)
        for partial_n in range(pairs - 1, 0, -1):
            got = _chain_pairs(family, sigma, partial_n, k_star, set())
            if got is not None:
                if best is None or len(got) > len(best[0]):
                    best = (got, k_star)
                break
    found = len(best[0]) // 2 if best else 0
    raise FragmentShortfall(
        f"only {found} of {pairs} chain pairs exist in this fragment",
        found=found,
        wanted=pairs,
        partial=SupportChain(tuple(best[0]), best[1]) if best else None,
    )


@dataclass(frozen=True)
class BooleanCombo:
    """Which members must contain a point (positives) or miss it (negatives)."""

    positives: frozenset[int]
    negatives: frozenset[int]
    extra: RealSet | None = None

    def __init__(self, positives: Iterable[int], negatives: Iterable[int], extra=None):
        object.__setattr__(self, "positives", frozenset(positives))
        object.__setattr__(self, "negatives", frozenset(negatives))
        object.__setattr__(self, "extra", extra)
        overlap = self.positives & self.negatives
        if overlap:
            raise ValueError(f"indices {sorted(overlap)} both positive and negative")


def combo_witnesses(family: FamilyFragment, combo: BooleanCombo) -> RealSet:
    """Ground points inside every positive member and outside every negative."""
    n_members = len(family.members)
    for idx in combo.positives | combo.negatives:
        if not 0 <= idx < n_members:
            raise ValueError(f"member index {idx} outside [0, {n_members})")
    bits = family.universe.full_mask
    for idx in combo.positives:
        bits &= family.members[idx].bits
    for idx in combo.negatives:
        bits &= ~family.members[idx].bits
    if combo.extra is not None:
        if combo.extra.universe != family.universe:
            raise UniverseMismatch("extra set lives in a different universe")
        bits &= combo.extra.bits
    return RealSet(family.universe, bits & family.universe.full_mask)


def density_witnesses(
    family: FamilyFragment,
    inside: Iterable[int],
    outside: Iterable[int],
    want: int,
) -> tuple[int, ...]:
    """Up to want member indices containing all of inside, none of outside.

    Ground points, not member indices, parameterize the query.  The result
    may be shorter than want; callers see the shortfall in its length.
    """
    inside = frozenset(inside)
    outside = frozenset(outside)
    overlap = inside & outside
    if overlap:
        raise ValueError(f"points {sorted(overlap)} both inside and outside")
    for p in inside | outside:
        family.universe.check_point(p)
    if want < 0:
        raise ValueError("want must be nonnegative")
    in_mask = mask_of(inside)
    out_mask = mask_of(outside)
    hits = []
    for idx, m in enumerate(family.members):
        if m.bits & in_mask == in_mask and not m.bits & out_mask:
            hits.append(idx)
            if len(hits) == want:
                break
    return tuple(hits)


class OrbitRuleResult(NamedTuple):
    rule: Rule
    points: tuple[int, ...]
    ground: RealSet
    chains: tuple[tuple[int, ...], ...]


def orbit_rule(
    family: FamilyFragment,
    combo: BooleanCombo,
    sigmas: Sequence[FinSuppPermutation],
    positive_count: int,
    blocks_wanted: int,
) -> OrbitRuleResult:
    """Blocks forcing a follower's permutation orbit through a combo.

    For each pair k < l of the given permutations, the mismatch map
    sigma_k o sigma_l^-1 must move something, and a support-chain pair
    (C, image) is reserved for it; the ground set E keeps the combo's
    witnesses that are inside every reserved C and outside every image.
    Each emitted block takes a fresh point j in E: its window is the
    sigma-preimages of j, its committed part the preimages under the
    first positive_count permutations.  A real X matching the block puts
    j inside sigma_k[X] exactly for k < positive_count, while j in E ties
    the block to the family's large sets.  Blocks and points never reuse
    ground points; FragmentShortfall if fewer than blocks_wanted fit.
    """
    m = len(sigmas)
    if m < 1:
        raise ValueError("need at least one permutation")
    if len(set(sigmas)) != m:
        raise ValueError("permutations must be pairwise distinct")
    if not 0 <= positive_count <= m:
        raise ValueError(f"positive_count {positive_count} outside [0, {m}]")
    if blocks_wanted < 1:
        raise ValueError("blocks_wanted must be >= 1")
    universe = family.universe
    for sig in sigmas:
        rep = is_automorphism(sig, family)
        if not rep.ok:
            raise ValueError(
                f"permutation is not an automorphism "
                f"(member {rep.counterexample} maps outside the family)"
            )
    taus = []
    for k, l in combinations(range(m), 2):
        tau = sigmas[k].compose(sigmas[l].inverse())
        if tau.is_identity:
            raise ValueError(f"permutations {k} and {l} agree; mismatch map is identity")
        taus.append(tau)
    ground_bits = combo_witnesses(family, combo).bits
    banned = set(combo.positives) | set(combo.negatives)
    chains = []
    for tau in taus:
        pair = None
        for k_star in sorted(tau.support_set):
            got = _chain_pairs(family, tau, 1, k_star, banned)
            if got is not None:
                pair = got
                break
        if pair is None:
            raise FragmentShortfall(
                "no support-chain pair for a mismatch map in this fragment",
                found=len(chains),
                wanted=len(taus),
                partial=tuple(chains),
            )
        banned.update(pair)
        chains.append(tuple(pair))
        ci, di = pair
        ground_bits &= family.members[ci].bits
        ground_bits &= ~family.members[di].bits
    ground = RealSet(universe, ground_bits)
    inverses = [sig.inverse() for sig in sigmas]
    blocks = []
    points = []
    reserved = 0
    for j in iter_bits(ground_bits):
        if (reserved >> j) & 1:
            continue
        pre = [inv.apply(j) for inv in inverses]
        want: dict[int, bool] = {}
        ok = True
        for k, p in enumerate(pre):
            committed = k < positive_count
            if want.setdefault(p, committed) != committed:
                ok = False
                break
        if not ok:
            continue
        window = mask_of(pre)
        if window & reserved:
            continue
        blocks.append(
            Block({p for p, c in want.items() if c}, want.keys())
        )
        points.append(j)
        reserved |= window | (1 << j)
        if len(blocks) == blocks_wanted:
            break
    if len(blocks) < blocks_wanted:
        raise FragmentShortfall(
            f"only {len(blocks)} of {blocks_wanted} blocks fit in the ground set",
            found=len(blocks),
            wanted=blocks_wanted,
            partial=None,
        )
    rule = Rule(universe, blocks)
    report = validate_rule(rule, Constant(m))
    if not report:
        raise GuaranteeViolation(
            "emitted rule invalid: " + "; ".join(report.violations)
        )
    return OrbitRuleResult(rule, tuple(points), ground, tuple(chains))


class ComboReport(NamedTuple):
    witnesses: RealSet
    count: int
    degenerate: bool


def extend_check(
    family: FamilyFragment,
    group: Sequence[FinSuppPermutation],
    x: RealSet,
    combos: Sequence[BooleanCombo],
) -> tuple[ComboReport, ...]:
    """Adjoin the orbit of x to the family and evaluate combos there.

    The extended list is the family's members followed by sigma[x] for
    each group element, in order; combo indices address that list.  A
    combo is degenerate when some positive and negative index name equal
    sets, making emptiness structural rather than informative.
    """
    if x.universe != family.universe:
        raise UniverseMismatch("real lives in a different universe")
    for sig in group:
        rep = is_automorphism(sig, family)
        if not rep.ok:
            raise ValueError(
                f"group element is not an automorphism "
                f"(member {rep.counterexample} maps outside the family)"
            )
    extended = list(family.members) + [sig.image(x) for sig in group]
    reports = []
    for combo in combos:
        for idx in combo.positives | combo.negatives:
            if not 0 <= idx < len(extended):
                raise ValueError(
                    f"combo index {idx} outside the extended list [0, {len(extended)})"
                )
        bits = family.universe.full_mask
        for idx in combo.positives:
            bits &= extended[idx].bits
        for idx in combo.negatives:
            bits &= ~extended[idx].bits
        if combo.extra is not None:
            if combo.extra.universe != family.universe:
                raise UniverseMismatch("extra set lives in a different universe")
            bits &= combo.extra.bits
        witnesses = RealSet(family.universe, bits & family.universe.full_mask)
        degenerate = any(
            extended[p].bits == extended[q].bits
            for p in combo.positives
            for q in combo.negatives
        )
        reports.append(ComboReport(witnesses, len(witnesses), degenerate))
    return tuple(reports)
