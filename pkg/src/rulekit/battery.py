"""The acceptance battery: randomized and exhaustive stress for every guarantee.

Each criterion function builds adversarial instances from a seeded
generator, runs the public operations, and re-checks their certificates
with independent oracles (brute-force scans, exhaustive enumeration,
direct membership evaluation).  Outcomes are plain data: deterministic
for a fixed seed, safe to serialize byte-for-byte.

Two scales: "small" is a fast smoke profile, "full" the reference sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .constructions import (
    SpliceFunction,
    TreeOracle,
    diagonal_follower,
    majority_combine,
    splice,
    splice_certify,
    tree_to_rule,
)
from .core import (
    Block,
    Constant,
    RealSet,
    Rule,
    Universe,
    match_set,
    one_rule_witness,
    validate_rule,
)
from .families import (
    BooleanCombo,
    FamilyFragment,
    FinSuppPermutation,
    combo_witnesses,
    enumerate_polynomials,
    orbit_rule,
    polynomial_member,
    support_chain,
)
from .laver import (
    BlockSlalom,
    avoiding_rule,
    block_encode,
    capture_check,
    coincident_pair,
    interval_ladder,
)
from .prediction import evades_set, evasion_transfer, rule_to_predictor
from .stochastic import exact_avoid_probability, mc_follow_estimate

__all__ = ["CriterionOutcome", "SCALES", "run_battery", "CRITERIA"]


@dataclass(frozen=True)
class CriterionOutcome:
    name: str
    ok: bool
    details: dict


SCALES = {
    "small": dict(
        majority_trials=20,
        majority_universe=4000,
        majority_blocks=100,
        majority_shared=12,
        pigeonhole_random=10_000,
        slalom_reals=20,
        transfer_rules=10,
        one_rule_trials=20,
        tree_reals=200,
        mc_samples=2_000,
        mc_seeds=50,
        splice_blocks=16,
        chain_pairs=6,
        orbit_universe_2=512,
        orbit_strips_2=(32, 288),
        orbit_universe_3=2048,
        orbit_strips_3=(64, 1984),
        orbit_blocks=8,
    ),
    "full": dict(
        majority_trials=200,
        majority_universe=20_000,
        majority_blocks=500,
        majority_shared=50,
        pigeonhole_random=100_000,
        slalom_reals=100,
        transfer_rules=50,
        one_rule_trials=100,
        tree_reals=1000,
        mc_samples=100_000,
        mc_seeds=50,
        splice_blocks=30,
        chain_pairs=6,
        orbit_universe_2=1024,
        orbit_strips_2=(64, 576),
        orbit_universe_3=4096,
        orbit_strips_3=(256, 3840),
        orbit_blocks=20,
    ),
}


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def _random_bits(rng: np.random.Generator, n_bits: int) -> int:
    return int.from_bytes(rng.bytes((n_bits + 7) // 8), "little") & ((1 << n_bits) - 1)


# criteria 1 + 2: majority certificates and the counting dichotomy


def crit_majority(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 1)
    n_size = params["majority_universe"]
    n_blocks = params["majority_blocks"]
    n_shared = params["majority_shared"]
    universe = Universe(n_size)
    cert_failures = 0
    dichotomy_failures = 0
    min_certified = None
    for trial in range(params["majority_trials"]):
        k = 2 + trial % 4
        size = k + 1
        rows = rng.permutation(n_size)[: n_blocks * size].reshape(n_blocks, size)
        rows.sort(axis=1)
        a_flags = rng.integers(0, 2, size=(n_blocks, size))
        blocks = []
        for row, flags in zip(rows, a_flags):
            b = [int(p) for p in row]
            a = [int(p) for p, f in zip(row, flags) if f]
            blocks.append(Block(a, b))
        rule = Rule(universe, blocks)
        shared = sorted(int(v) for v in rng.choice(n_blocks, n_shared, replace=False))
        reals = []
        for i in range(size):
            bits = _random_bits(rng, n_size)
            for n in shared:
                drop = 1 << int(rows[n][i])
                bm = rule.b_masks[n] ^ drop
                am = rule.a_masks[n] & ~drop
                bits = (bits & ~bm) | am
            reals.append(RealSet(universe, bits))
        combined, certified = majority_combine(rule, reals)
        if not set(shared) <= certified:
            cert_failures += 1
        for n in certified:
            if combined.bits & rule.b_masks[n] != rule.a_masks[n]:
                cert_failures += 1
            blk = rule.blocks[n]
            for p in blk.B:
                count = sum(1 for x in reals if (x.bits >> p) & 1)
                if count not in (0, 1, k, k + 1):
                    dichotomy_failures += 1
                if (count >= k) != (p in blk.A):
                    dichotomy_failures += 1
        if min_certified is None or len(certified) < min_certified:
            min_certified = len(certified)
    shared_detail = dict(
        trials=params["majority_trials"],
        blocks=n_blocks,
        shared=n_shared,
        min_certified=min_certified,
    )
    return [
        CriterionOutcome(
            "majority_certificates",
            cert_failures == 0,
            dict(shared_detail, failures=cert_failures),
        ),
        CriterionOutcome(
            "majority_counting_dichotomy",
            dichotomy_failures == 0,
            dict(shared_detail, failures=dichotomy_failures),
        ),
    ]


# criterion 3: pigeonhole pairs, exhaustive then randomized


def _brute_least_pair(words: Sequence[str]):
    if not words:
        return (0, 1)
    k = len(words[0])
    for i in range(k):
        for j in range(i + 1, k):
            if all(w[i] == w[j] for w in words):
                return (i, j)
    return None


def _check_pair_case(words: list[str], n: int) -> bool:
    pair = coincident_pair(words, n)
    if not all(w[pair.i] == w[pair.j] for w in words):
        return False
    if _brute_least_pair(sorted(set(words))) != (pair.i, pair.j):
        return False
    if len(words[0]) > (1 << n) and not pair.guaranteed:
        return False
    return True


def crit_pigeonhole(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 3)
    failures = 0
    cases = 0
    for v in range(8):
        cases += 1
        if not _check_pair_case([format(v, "03b")], 1):
            failures += 1
    words5 = [format(v, "05b") for v in range(32)]
    for a, b in combinations(words5, 2):
        cases += 1
        if not _check_pair_case([a, b], 2):
            failures += 1
    count = params["pigeonhole_random"]
    triples = rng.integers(0, 512, size=(count, 3))
    while True:
        dup = (
            (triples[:, 0] == triples[:, 1])
            | (triples[:, 0] == triples[:, 2])
            | (triples[:, 1] == triples[:, 2])
        )
        bad = int(dup.sum())
        if not bad:
            break
        triples[dup] = rng.integers(0, 512, size=(bad, 3))
    for row in triples:
        cases += 1
        words = [format(int(v), "09b") for v in row]
        if not _check_pair_case(words, 3):
            failures += 1
    return [
        CriterionOutcome(
            "pigeonhole_pairs",
            failures == 0,
            dict(cases=cases, failures=failures),
        )
    ]


# criterion 4: slalom capture vs avoidance


def crit_slalom(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 4)
    universe = Universe(4110)
    ladder = interval_ladder(12, universe)
    top = ladder.values[-1]
    failures = 0
    for _ in range(params["slalom_reals"]):
        x = RealSet(universe, _random_bits(rng, top))
        words = block_encode(x, ladder)
        sets = []
        for n in range(1, ladder.count):
            length = (1 << n) + 1
            chosen = {words[n]}
            while len(chosen) < n:
                chosen.add(format(_random_bits(rng, length), f"0{length}b"))
            sets.append(chosen)
        slalom = BlockSlalom(ladder, sets)
        rule = avoiding_rule(slalom, universe)
        if not validate_rule(rule, Constant(2)):
            failures += 1
        captured = capture_check(slalom, x)
        if captured != frozenset(range(1, ladder.count)):
            failures += 1
        if match_set(x, rule):
            failures += 1
    return [
        CriterionOutcome(
            "slalom_avoidance",
            failures == 0,
            dict(reals=params["slalom_reals"], intervals=ladder.count, failures=failures),
        )
    ]


# criterion 5: evasion transfer, exhaustive over reals


def crit_transfer(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 5)
    universe = Universe(12)
    failures = 0
    evasions_total = 0
    for _ in range(params["transfer_rules"]):
        points = np.sort(rng.permutation(12)[:6].reshape(3, 2), axis=1)
        a_flags = rng.integers(0, 2, size=(3, 2))
        blocks = [
            Block([int(p) for p, f in zip(row, flags) if f], [int(p) for p in row])
            for row, flags in zip(points, a_flags)
        ]
        rule = Rule(universe, blocks)
        predictor, _ = rule_to_predictor(rule)
        full = universe.full_mask
        for xb in range(1 << 12):
            x = RealSet(universe, xb)
            entries = evasion_transfer(x, rule)
            if {e.position for e in entries} != evades_set(x, predictor):
                failures += 1
                continue
            evasions_total += len(entries)
            for e in entries:
                blk = rule.blocks[e.block]
                trace = xb & rule.b_masks[e.block]
                comp_trace = (full ^ xb) & rule.b_masks[e.block]
                am = rule.a_masks[e.block]
                if len(blk.A) == 1:
                    allowed = (am, rule.b_masks[e.block] ^ am)
                else:
                    allowed = (0, rule.b_masks[e.block])
                if trace not in allowed:
                    failures += 1
                if (e.matched_by == "real") != (trace == am):
                    failures += 1
                if (e.matched_by == "complement") != (comp_trace == am):
                    failures += 1
    return [
        CriterionOutcome(
            "evasion_transfer_sweep",
            failures == 0,
            dict(
                rules=params["transfer_rules"],
                reals=1 << 12,
                evasions=evasions_total,
                failures=failures,
            ),
        )
    ]


# criterion 6: the empty/full witness margin for 1-rules


def crit_one_rule(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 6)
    universe = Universe(300)
    failures = 0
    for _ in range(params["one_rule_trials"]):
        points = rng.choice(300, 101, replace=False)
        flags = rng.integers(0, 2, size=101)
        blocks = [
            Block([int(p)] if f else [], [int(p)])
            for p, f in zip(points, flags)
        ]
        rule = Rule(universe, blocks)
        witness = one_rule_witness(rule)
        by_empty = len(match_set(RealSet.empty(universe), rule))
        by_full = len(match_set(RealSet.full(universe), rule))
        if by_empty + by_full != 101:
            failures += 1
        if witness.matches != max(by_empty, by_full) or witness.matches < 51:
            failures += 1
        if len(match_set(witness.winner, rule)) != witness.matches:
            failures += 1
    return [
        CriterionOutcome(
            "one_rule_witness_margin",
            failures == 0,
            dict(trials=params["one_rule_trials"], failures=failures),
        )
    ]


# criterion 7: tree escape


TREES = [
    ("avoid-11", lambda: TreeOracle.avoid_substring("11", 18)),
    ("avoid-000", lambda: TreeOracle.avoid_substring("000", 18)),
    ("avoid-0110", lambda: TreeOracle.avoid_substring("0110", 16)),
    ("avoid-10101", lambda: TreeOracle.avoid_substring("10101", 15)),
    (
        "antichain",
        lambda: TreeOracle.finite_antichain(
            ["01101001", "111001", "0001011", "110", "00100"], 14
        ),
    ),
]


def crit_tree(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 7)
    failures = 0
    blocks_built = {}
    for label, make in TREES:
        tree = make()
        universe = Universe(tree.max_depth)
        rule = tree_to_rule(tree, universe)
        blocks_built[label] = len(rule.blocks)
        widths = max(len(b.B) for b in rule.blocks)
        if not validate_rule(rule, Constant(widths)):
            failures += 1
        ends = [max(b.B) + 1 for b in rule.blocks]
        for _ in range(params["tree_reals"]):
            bits = _random_bits(rng, universe.size)
            forced = int(rng.integers(0, len(rule.blocks)))
            bits = (bits & ~rule.b_masks[forced]) | rule.a_masks[forced]
            x = RealSet(universe, bits)
            matched = match_set(x, rule)
            if forced not in matched:
                failures += 1
            for n in matched:
                prefix = "".join(
                    "1" if (bits >> t) & 1 else "0" for t in range(ends[n])
                )
                if tree.contains(prefix):
                    failures += 1
    return [
        CriterionOutcome(
            "tree_escape",
            failures == 0,
            dict(trees=len(TREES), reals=params["tree_reals"], blocks=blocks_built, failures=failures),
        )
    ]


# criterion 8: exact measure vs enumeration, Monte-Carlo calibration


MEASURE_FIXTURES = [
    [(0, 2), (2, 2)],
    [(5, 1)],
    [(0, 3), (4, 2), (9, 1)],
    [(3 * i, 2) for i in range(8)],
    [(5 * i + 1, 4) for i in range(4)],
    [(6 * i, 5) for i in range(3)],
    [(i * 2, 1) for i in range(18)],
    [(i * 9 + 4, 2) for i in range(10)],
    [(0, 3), (4, 3), (8, 2), (11, 2), (14, 1), (16, 1), (18, 4)],
]


def _fixture_rule(spec: list[tuple[int, int]], rng: np.random.Generator) -> Rule:
    blocks = []
    top = 0
    for start, width in spec:
        pts = list(range(start, start + width))
        top = max(top, start + width)
        keep = [p for p in pts if rng.integers(0, 2)]
        blocks.append(Block(keep, pts))
    return Rule(Universe(max(top, 1)), blocks)


def _enumeration_avoid(rule: Rule) -> Fraction:
    positions = sorted({p for blk in rule.blocks for p in blk.B})
    col = {p: i for i, p in enumerate(positions)}
    width = len(positions)
    vals = np.arange(1 << width, dtype=np.uint32)
    avoid = np.ones(1 << width, dtype=bool)
    for blk in rule.blocks:
        bm = np.uint32(sum(1 << col[p] for p in blk.B))
        am = np.uint32(sum(1 << col[p] for p in blk.A))
        avoid &= (vals & bm) != am
    return Fraction(int(avoid.sum()), 1 << width)


def crit_measure(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 8)
    failures = 0
    for spec in MEASURE_FIXTURES:
        rule = _fixture_rule(spec, rng)
        exact = exact_avoid_probability(rule, len(rule.blocks))
        if exact.exact != _enumeration_avoid(rule):
            failures += 1
        trajectory = Fraction(1)
        for t in range(len(rule.blocks) + 1):
            if exact_avoid_probability(rule, t).exact != trajectory:
                failures += 1
            if t < len(rule.blocks):
                trajectory *= exact.per_block[t]
    mc_rule = Rule(
        Universe(120),
        [Block([7 * i + 1], [7 * i + 1, 7 * i + 3]) for i in range(16)],
    )
    exact_follow = Fraction(1) - Fraction(3, 4) ** 16
    if Fraction(1) - exact_avoid_probability(mc_rule, 16).exact != exact_follow:
        failures += 1
    within = 0
    for s in range(params["mc_seeds"]):
        rep = mc_follow_estimate(mc_rule, 16, params["mc_samples"], seed * 1000 + s)
        if rep.stderr == 0:
            within += int(rep.estimate == exact_follow)
        elif abs(float(rep.estimate - exact_follow)) <= 3 * rep.stderr:
            within += 1
    ok = failures == 0 and within >= 47
    return [
        CriterionOutcome(
            "avoid_probability_measure",
            ok,
            dict(
                fixtures=len(MEASURE_FIXTURES),
                exact_failures=failures,
                mc_within=within,
                mc_seeds=params["mc_seeds"],
                mc_samples=params["mc_samples"],
            ),
        )
    ]


# criterion 9: splice certification


def crit_splice(params: dict, seed: int) -> list[CriterionOutcome]:
    rng = _rng(seed, 9)
    universe = Universe(600)
    failures = 0
    certified_total = 0
    for k in (2, 3, 4):
        cuts = [20 * (i + 1) for i in range(k + 1)] + [350, 450]
        f = SpliceFunction(cuts)
        j = k + 2
        floor = cuts[k]
        n_blocks = params["splice_blocks"]
        pts = rng.permutation(np.arange(floor + 1, 600))[: n_blocks * k]
        rows = np.sort(pts.reshape(n_blocks, k), axis=1)
        flags = rng.integers(0, 2, size=(n_blocks, k))
        blocks = [
            Block([int(p) for p, fl in zip(row, frow) if fl], [int(p) for p in row])
            for row, frow in zip(rows, flags)
        ]
        rule = Rule(universe, blocks)
        mults = [n_blocks, max(n_blocks // 2, 1), max(n_blocks // 3, 1)]
        reals = [diagonal_follower([rule], m).real for m in mults]
        chains = []
        for x in reals:
            matched = match_set(x, rule)
            chains.append(matched if not chains else chains[-1] & matched)
        certified = splice_certify(rule, k, f, reals, chains)
        glued = splice(f, [RealSet.empty(universe)] * k + list(reals))
        glued_matches = match_set(glued, rule)
        for n in certified:
            if n not in glued_matches:
                failures += 1
        expect = {n for n in chains[-1] if max(rule.blocks[n].B) < cuts[j]}
        if certified != expect:
            failures += 1
        certified_total += len(certified)
    return [
        CriterionOutcome(
            "splice_certification",
            failures == 0,
            dict(widths=[2, 3, 4], certified=certified_total, failures=failures),
        )
    ]


# criterion 10: support chains on sigma-closed polynomial fragments


CHAIN_POOL = [
    Fraction(v)
    for v in (-3, -2, -1, 1, 2, 3)
] + [
    Fraction(n, d)
    for d in (2, 3, 4)
    for n in range(-3 * d + 1, 3 * d)
    if n % d and abs(Fraction(n, d).denominator) == d
]


def _closed_fragment(
    polys_count: int, rationals: Sequence[Fraction], group: Sequence[FinSuppPermutation]
) -> FamilyFragment:
    polys = enumerate_polynomials(polys_count)
    universe = Universe(polys_count)
    base = []
    seen = set()
    for r in rationals:
        m = polynomial_member(r, polys)
        if m.bits not in seen:
            seen.add(m.bits)
            base.append(m)
    frontier = list(base)
    while frontier:
        nxt = []
        for m in frontier:
            for sig in group:
                im = sig.image(m)
                if im.bits not in seen:
                    seen.add(im.bits)
                    base.append(im)
                    nxt.append(im)
        frontier = nxt
    return FamilyFragment(universe, tuple(base))


def crit_chains(params: dict, seed: int) -> list[CriterionOutcome]:
    failures = 0
    sizes = []
    sigma_a = FinSuppPermutation.from_cycles((5, 6))
    sigma_b = FinSuppPermutation.from_mapping({1: 2, 2: 1, 3: 4, 4: 3, 5: 6, 6: 5, 7: 8, 8: 7})
    configs = [
        (512, sigma_a),
        (512, sigma_b),
    ]
    for polys_count, sigma in configs:
        family = _closed_fragment(polys_count, CHAIN_POOL, [sigma])
        sizes.append(len(family))
        if len(family) < 64:
            failures += 1
            continue
        chain = support_chain(family, sigma, params["chain_pairs"])
        idx = chain.indices
        if len(set(idx)) != 2 * params["chain_pairs"]:
            failures += 1
        supp = sigma.support_set
        for t in range(0, len(idx), 2):
            c_even = family.members[idx[t]]
            c_odd = family.members[idx[t + 1]]
            if c_odd.bits != sigma.image(c_even).bits:
                failures += 1
            diff = {p for p in c_even.members() if p not in c_odd}
            if not diff or chain.k_star not in diff or not diff <= supp:
                failures += 1
    return [
        CriterionOutcome(
            "support_chains",
            failures == 0,
            dict(fragments=len(configs), sizes=sizes, pairs=params["chain_pairs"], failures=failures),
        )
    ]


# criterion 11: orbit rules and certificate replay


def _strip_involutions(lo: int, hi: int) -> tuple[FinSuppPermutation, FinSuppPermutation]:
    """Two commuting involutions acting on 4-point strips [4i, 4i+4)."""
    first = {}
    second = {}
    for i in range(lo, hi):
        b = 4 * i
        first[b] = b + 1
        first[b + 1] = b
        first[b + 2] = b + 3
        first[b + 3] = b + 2
        second[b] = b + 2
        second[b + 2] = b
        second[b + 1] = b + 3
        second[b + 3] = b + 1
    return (
        FinSuppPermutation.from_mapping(first),
        FinSuppPermutation.from_mapping(second),
    )


def _orbit_case(
    universe_size: int,
    strips: tuple[int, int],
    m: int,
    combo: BooleanCombo | None,
    positive_count: int,
    blocks_wanted: int,
    pool: Sequence[Fraction],
):
    sig1, sig2 = _strip_involutions(strips[0] // 4, strips[1] // 4)
    if m == 2:
        sigmas = [FinSuppPermutation.identity(), sig1]
        group = [FinSuppPermutation.identity(), sig1]
    else:
        sigmas = [FinSuppPermutation.identity(), sig1, sig2]
        group = [
            FinSuppPermutation.identity(),
            sig1,
            sig2,
            sig1.compose(sig2),
        ]
    family = _closed_fragment(universe_size, pool, group)
    if combo is None:
        combo = BooleanCombo((), ())
    result = orbit_rule(family, combo, sigmas, positive_count, blocks_wanted)
    return family, sigmas, combo, result


def crit_orbit(params: dict, seed: int) -> list[CriterionOutcome]:
    failures = 0
    built = []
    pool = CHAIN_POOL
    cases = [
        (
            params["orbit_universe_2"],
            params["orbit_strips_2"],
            2,
            BooleanCombo((0,), ()),
            1,
        ),
        (
            params["orbit_universe_3"],
            params["orbit_strips_3"],
            3,
            None,
            2,
        ),
    ]
    for universe_size, strips, m, combo, pc in cases:
        family, sigmas, combo, result = _orbit_case(
            universe_size, strips, m, combo, pc, params["orbit_blocks"], pool
        )
        rule = result.rule
        built.append(len(rule.blocks))
        if len(rule.blocks) < params["orbit_blocks"]:
            failures += 1
        if not validate_rule(rule, Constant(m)):
            failures += 1
        witness = combo_witnesses(family, combo)
        follower = diagonal_follower([rule], len(rule.blocks))
        x = follower.real
        followed = match_set(x, rule)
        if not followed:
            failures += 1
        for n in followed:
            j = result.points[n]
            if j not in witness:
                failures += 1
            if j not in result.ground:
                failures += 1
            for ell, sig in enumerate(sigmas):
                in_image = sig.apply_inverse(j) in x
                if in_image != (ell < pc):
                    failures += 1
    return [
        CriterionOutcome(
            "orbit_rules",
            failures == 0,
            dict(blocks=built, wanted=params["orbit_blocks"], failures=failures),
        )
    ]


CRITERIA: list[tuple[str, Callable[[dict, int], list[CriterionOutcome]]]] = [
    ("majority", crit_majority),
    ("pigeonhole", crit_pigeonhole),
    ("slalom", crit_slalom),
    ("transfer", crit_transfer),
    ("one_rule", crit_one_rule),
    ("tree", crit_tree),
    ("measure", crit_measure),
    ("splice", crit_splice),
    ("chains", crit_chains),
    ("orbit", crit_orbit),
]


def run_battery(scale: str, seed: int) -> list[CriterionOutcome]:
    """Run every criterion at the chosen scale; outcomes in fixed order."""
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}; choose from {sorted(SCALES)}")
    params = SCALES[scale]
    outcomes: list[CriterionOutcome] = []
    for name, fn in CRITERIA:
        try:
            outcomes.extend(fn(params, seed))
        except Exception as exc:  # pragma: no cover - battery must keep going
            outcomes.append(
                CriterionOutcome(name, False, dict(error=f"{type(exc).__name__}: {exc}"))
            )
    return outcomes
