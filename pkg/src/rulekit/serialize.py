"""JSON encodings shared by the CLI and any file-based workflow.

Every codec is a pair to_json/from_json; encoders emit plain dicts with
sorted member lists so serialization is deterministic, decoders validate
shape and raise ValueError with the offending field named.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping, Sequence

from .core import Block, Constant, PerIndex, RealSet, Rule, Universe, WidthBound
from .families import (
    BooleanCombo,
    FamilyFragment,
    FinSuppPermutation,
    Polynomial,
)
from .laver import BlockSlalom, IntervalLadder
from .prediction import FlippedProjection, Predictor, PredictorFn, Projection, TableFn

__all__ = [
    "real_set_to_json",
    "real_set_from_json",
    "rule_to_json",
    "rule_from_json",
    "bound_to_json",
    "bound_from_json",
    "predictor_to_json",
    "predictor_from_json",
    "slalom_to_json",
    "slalom_from_json",
    "family_to_json",
    "family_from_json",
    "permutation_to_json",
    "permutation_from_json",
    "polynomial_to_json",
    "polynomial_from_json",
    "combo_to_json",
    "combo_from_json",
    "fraction_to_json",
    "fraction_from_json",
]


def _want(obj: Any, key: str, kind, what: str):
    if not isinstance(obj, Mapping):
        raise ValueError(f"{what}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ValueError(f"{what}: missing field {key!r}")
    val = obj[key]
    if kind is int and isinstance(val, bool):
        raise ValueError(f"{what}.{key}: expected int, got bool")
    if not isinstance(val, kind):
        raise ValueError(
            f"{what}.{key}: expected {getattr(kind, '__name__', kind)}, "
            f"got {type(val).__name__}"
        )
    return val


def _int_list(val: Any, what: str) -> list[int]:
    if not isinstance(val, Sequence) or isinstance(val, (str, bytes)):
        raise ValueError(f"{what}: expected a list of ints")
    for v in val:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValueError(f"{what}: expected ints, found {v!r}")
    return list(val)


def real_set_to_json(x: RealSet) -> dict:
    return {"n": x.universe.size, "members": list(x.members())}


def real_set_from_json(obj: Any) -> RealSet:
    n = _want(obj, "n", int, "real")
    members = _int_list(_want(obj, "members", Sequence, "real"), "real.members")
    return RealSet.from_members(Universe(n), members)


def rule_to_json(rule: Rule) -> dict:
    return {
        "n": rule.universe.size,
        "blocks": [
            {"A": sorted(blk.A), "B": sorted(blk.B)} for blk in rule.blocks
        ],
    }


def rule_from_json(obj: Any) -> Rule:
    n = _want(obj, "n", int, "rule")
    raw = _want(obj, "blocks", Sequence, "rule")
    blocks = []
    for i, b in enumerate(raw):
        a = _int_list(_want(b, "A", Sequence, f"rule.blocks[{i}]"), f"rule.blocks[{i}].A")
        bb = _int_list(_want(b, "B", Sequence, f"rule.blocks[{i}]"), f"rule.blocks[{i}].B")
        blocks.append(Block(a, bb))
    return Rule(Universe(n), blocks)


def bound_to_json(bound: WidthBound) -> dict:
    if isinstance(bound, Constant):
        return {"k": bound.k}
    return {"f": list(bound.values)}


def bound_from_json(obj: Any) -> WidthBound:
    if isinstance(obj, Mapping) and "k" in obj:
        return Constant(_want(obj, "k", int, "bound"))
    if isinstance(obj, Mapping) and "f" in obj:
        return PerIndex(_int_list(obj["f"], "bound.f"))
    raise ValueError("bound: expected {'k': int} or {'f': [ints]}")


def _fn_to_json(fn: PredictorFn) -> dict:
    if isinstance(fn, Projection):
        return {"proj": fn.index}
    if isinstance(fn, FlippedProjection):
        return {"flip": fn.index}
    return {"table": dict(fn.table)}


def _fn_from_json(obj: Any, what: str) -> PredictorFn:
    if isinstance(obj, Mapping) and "proj" in obj:
        return Projection(_want(obj, "proj", int, what))
    if isinstance(obj, Mapping) and "flip" in obj:
        return FlippedProjection(_want(obj, "flip", int, what))
    if isinstance(obj, Mapping) and "table" in obj:
        table = obj["table"]
        if not isinstance(table, Mapping):
            raise ValueError(f"{what}.table: expected an object")
        return TableFn({str(k): v for k, v in table.items()})
    raise ValueError(f"{what}: expected 'proj', 'flip', or 'table'")


def predictor_to_json(predictor: Predictor) -> dict:
    return {
        "D": sorted(predictor.fns),
        "fns": {str(ell): _fn_to_json(fn) for ell, fn in sorted(predictor.fns.items())},
    }


def predictor_from_json(obj: Any) -> Predictor:
    domain = _int_list(_want(obj, "D", Sequence, "predictor"), "predictor.D")
    raw = _want(obj, "fns", Mapping, "predictor")
    fns = {}
    for key, fn in raw.items():
        try:
            ell = int(key)
        except ValueError:
            raise ValueError(f"predictor.fns: non-integer position {key!r}") from None
        fns[ell] = _fn_from_json(fn, f"predictor.fns[{key}]")
    if sorted(fns) != sorted(domain):
        raise ValueError("predictor: D and fns keys disagree")
    return Predictor(fns)


def slalom_to_json(slalom: BlockSlalom) -> dict:
    return {
        "ladder": slalom.ladder.count,
        "sets": [sorted(words) for words in slalom.sets],
    }


def slalom_from_json(obj: Any) -> BlockSlalom:
    count = _want(obj, "ladder", int, "slalom")
    raw = _want(obj, "sets", Sequence, "slalom")
    if count < 1:
        raise ValueError("slalom.ladder: must be >= 1")
    vals = [0]
    for n in range(count):
        vals.append(vals[-1] + (1 << n) + 1)
    ladder = IntervalLadder(tuple(vals))
    sets = []
    for i, words in enumerate(raw):
        if not isinstance(words, Sequence) or isinstance(words, (str, bytes)):
            raise ValueError(f"slalom.sets[{i}]: expected a list of words")
        sets.append([str(w) for w in words])
    return BlockSlalom(ladder, sets)


def family_to_json(family: FamilyFragment) -> dict:
    return {
        "n": family.universe.size,
        "members": [list(m.members()) for m in family.members],
    }


def family_from_json(obj: Any) -> FamilyFragment:
    n = _want(obj, "n", int, "family")
    raw = _want(obj, "members", Sequence, "family")
    universe = Universe(n)
    members = []
    for i, mem in enumerate(raw):
        members.append(
            RealSet.from_members(
                universe, _int_list(mem, f"family.members[{i}]")
            )
        )
    return FamilyFragment(universe, tuple(members))


def permutation_to_json(sigma: FinSuppPermutation) -> dict:
    return {"pairs": [list(p) for p in sigma.pairs]}


def permutation_from_json(obj: Any) -> FinSuppPermutation:
    raw = _want(obj, "pairs", Sequence, "permutation")
    mapping = {}
    for i, pair in enumerate(raw):
        pts = _int_list(pair, f"permutation.pairs[{i}]")
        if len(pts) != 2:
            raise ValueError(f"permutation.pairs[{i}]: expected [from, to]")
        if pts[0] in mapping:
            raise ValueError(f"permutation.pairs[{i}]: source {pts[0]} listed twice")
        mapping[pts[0]] = pts[1]
    return FinSuppPermutation.from_mapping(mapping)


def polynomial_to_json(p: Polynomial) -> dict:
    return {"coeffs": list(p.coeffs)}


def polynomial_from_json(obj: Any) -> Polynomial:
    return Polynomial(_int_list(_want(obj, "coeffs", Sequence, "polynomial"), "polynomial.coeffs"))


def combo_to_json(combo: BooleanCombo) -> dict:
    out = {
        "positives": sorted(combo.positives),
        "negatives": sorted(combo.negatives),
    }
    if combo.extra is not None:
        out["extra"] = real_set_to_json(combo.extra)
    return out


def combo_from_json(obj: Any) -> BooleanCombo:
    pos = _int_list(_want(obj, "positives", Sequence, "combo"), "combo.positives")
    neg = _int_list(_want(obj, "negatives", Sequence, "combo"), "combo.negatives")
    extra = None
    if isinstance(obj, Mapping) and obj.get("extra") is not None:
        extra = real_set_from_json(obj["extra"])
    return BooleanCombo(pos, neg, extra)


def fraction_to_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


def fraction_from_json(obj: Any) -> Fraction:
    if isinstance(obj, bool):
        raise ValueError("fraction: got bool")
    if isinstance(obj, int):
        return Fraction(obj)
    num = _want(obj, "num", int, "fraction")
    den = _want(obj, "den", int, "fraction")
    if den == 0:
        raise ValueError("fraction: zero denominator")
    return Fraction(num, den)
