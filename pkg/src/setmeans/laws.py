"""Property harness for the mean axioms over generated corpora.

Each law is instantiated with corpus elements and deterministic shifts;
inputs outside a law's hypotheses count as skipped, never as violations.
The harness never claims a law holds, only that no violation turned up in
the trials it ran, and every recorded violation replays from its rendered
inputs.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction as Q
from .blocks import Cantor, Finite, GeomSeq, Interval, Tower
from .dsl import render
from .errors import EmptyResult, IntersectionNotRepresentable
from .means import (
    DEFAULT_CONFIG,
    LadderConfig,
    MeanKind,
    MeanValue,
    mean_of,
)
from .sets import (
    BlockSet,
    CutAbove,
    CutBelow,
    Leaf,
    SetExpr,
    Translate,
    Union,
    bounds,
    diameter,
    intersect,
    normalize,
    translate_set,
    union_sets,
)


class LawKind(str, Enum):
    INTERNAL = "internal"
    STRONG_INTERNAL = "strong-internal"
    MONOTONE = "monotone"
    STRONG_MONOTONE = "strong-monotone"
    DISJOINT_MONOTONE = "disjoint-monotone"
    UNION_MONOTONE = "union-monotone"
    D_MONOTONE = "d-monotone"
    SHIFT_INVARIANT = "shift-invariant"
    SELF_SHIFT_INVARIANT = "self-shift-invariant"
    PART_SHIFT_INVARIANT = "part-shift-invariant"


@dataclass(frozen=True)
class Violation:
    inputs: tuple[str, ...]
    observed: str


@dataclass(frozen=True)
class LawReport:
    law: LawKind
    mean: MeanKind
    trials: int
    violations: tuple[Violation, ...]
    skipped: int


PROFILES = ("finite", "sequences", "towers", "intervals", "cantor", "mixed")


def _rq(rng: random.Random, lo: int, hi: int, dens=(1, 2, 3, 4, 8, 16)) -> Q:
    d = rng.choice(dens)
    return Q(rng.randint(lo * d, hi * d), d)


def _gen_finite(rng) -> Finite:
    n = rng.randint(1, 8)
    pts = {_rq(rng, -10, 10) for _ in range(n)}
    return Finite(tuple(pts))


def _gen_seq(rng) -> GeomSeq:
    a = _rq(rng, -8, 8)
    w = rng.choice([Q(1), Q(-1), Q(2), Q(1, 2), Q(-1, 2)])
    r = rng.choice([Q(1, 2), Q(1, 3), Q(1, 4), Q(1, 5)])
    return GeomSeq(a, w, r)


def _gen_tower(rng) -> Tower:
    lvl = 2 if rng.random() < 0.9 else 3
    a = _rq(rng, -8, 8)
    w = rng.choice([Q(1), Q(-1), Q(1, 2)])
    r = rng.choice([Q(1, 4), Q(1, 5), Q(1, 6)])
    return Tower(lvl, a, w, r)


def _gen_interval(rng) -> Interval:
    a = _rq(rng, -10, 8)
    length = _rq(rng, 1, 6, dens=(1, 2, 4))
    return Interval(a, a + abs(length))


def _gen_cantor(rng) -> Cantor:
    m = rng.choice([2, 3])
    r = rng.choice([Q(1, 3), Q(1, 4)]) if m == 2 else rng.choice([Q(1, 4), Q(1, 5)])
    a = _rq(rng, -10, 8, dens=(1, 2, 4))
    length = Q(rng.randint(1, 5))
    return Cantor(a, a + length, m, r)


def _profile_block(rng, profile: str):
    if profile == "finite":
        return _gen_finite(rng)
    if profile == "sequences":
        return _gen_seq(rng)
    if profile == "towers":
        return _gen_tower(rng)
    if profile == "intervals":
        return _gen_interval(rng)
    if profile == "cantor":
        return _gen_cantor(rng)
    pick = rng.random()
    if pick < 0.3:
        return _gen_finite(rng)
    if pick < 0.55:
        return _gen_seq(rng)
    if pick < 0.65:
        return _gen_tower(rng)
    if pick < 0.85:
        return _gen_interval(rng)
    return _gen_cantor(rng)


def _gen_expr(rng, profile: str) -> SetExpr:
    parts: list[SetExpr] = [Leaf(_profile_block(rng, profile))]
    extra = rng.randint(0, 2) if profile == "mixed" else rng.randint(0, 1)
    for _ in range(extra):
        parts.append(Leaf(_profile_block(rng, profile)))
    if profile == "towers":
        # keep the profile contract: a tower must be present
        if not any(isinstance(p.block, Tower) for p in parts):
            parts[0] = Leaf(_gen_tower(rng))
    e: SetExpr = parts[0] if len(parts) == 1 else Union(tuple(parts))
    roll = rng.random()
    if roll < 0.25:
        e = Translate(e, _rq(rng, -20, 20))
    elif roll < 0.35 and profile != "cantor":
        # cuts stay on blocks that always support exact surgery
        if not any(isinstance(p, Leaf) and isinstance(p.block, Cantor)
                   for p in (parts if isinstance(e, Union) else [e])):
            cut_at = _rq(rng, -15, 15)
            e = CutBelow(e, cut_at) if rng.random() < 0.5 else CutAbove(e, cut_at)
    return e


def gen_corpus(seed: int, count: int, profile: str = "mixed") -> list[SetExpr]:
    """Deterministic corpus of normalizable expressions for one profile."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    rng = random.Random(seed * 1_000_003 + zlib.crc32(profile.encode()) % 999_983)
    out: list[SetExpr] = []
    while len(out) < count:
        e = _gen_expr(rng, profile)
        try:
            normalize(e)
        except EmptyResult:
            continue  # a cut emptied the set; draw again
        out.append(e)
    return out


# ---------------------------------------------------------------------------
# law checking


def _le(a: MeanValue, b: MeanValue, tol: float):
    """a <= b up to ladder tolerance; None when either side is undefined."""
    if not (a.is_defined and b.is_defined):
        return None
    if a.is_exact and b.is_exact:
        return a.value <= b.value
    return a.as_float() <= b.as_float() + 2 * tol


def _eq(a: MeanValue, b: MeanValue, tol: float):
    if not (a.is_defined and b.is_defined):
        return None
    if a.is_exact and b.is_exact:
        return a.value == b.value
    return abs(a.as_float() - b.as_float()) <= 2 * tol


def _lt_strict(a: MeanValue, b: MeanValue):
    """Strict comparison, only trusted for exact values."""
    if a.is_exact and b.is_exact:
        return a.value < b.value
    return None


def _disjoint(h1: BlockSet, h2: BlockSet):
    try:
        return intersect(h1, h2).is_empty
    except IntersectionNotRepresentable:
        return None


class _Run:
    def __init__(self, law, mean):
        self.law = law
        self.mean = mean
        self.trials = 0
        self.skipped = 0
        self.violations: list[Violation] = []

    def skip(self):
        self.trials += 1
        self.skipped += 1

    def ok(self):
        self.trials += 1

    def violate(self, inputs, observed):
        self.trials += 1
        self.violations.append(Violation(tuple(inputs), observed))

    def check(self, condition, inputs, observed):
        if condition is None:
            self.skip()
        elif condition:
            self.ok()
        else:
            self.violate(inputs, observed)

    def report(self) -> LawReport:
        return LawReport(self.law, self.mean, self.trials,
                         tuple(self.violations), self.skipped)


def _shifts(h: BlockSet) -> list[Q]:
    d = diameter(h)
    base = d if d > 0 else Q(1)
    return [base + 1, 10 * base + 3, Q(1, 3), -(base + 1)]


def check_law(mean: MeanKind, law: LawKind, corpus: list[SetExpr],
              cfg: LadderConfig = DEFAULT_CONFIG) -> LawReport:
    """Instantiate one law for one mean over the corpus."""
    mean, law = MeanKind(mean), LawKind(law)
    sets = [normalize(e) for e in corpus]
    texts = [render(e) for e in corpus]
    run = _Run(law, mean)
    n = len(sets)

    def kv(h):
        return mean_of(h, mean, cfg)

    def pair(i):
        j = (i * 7 + 3) % n
        if j == i:
            j = (j + 1) % n
        return (i, j)

    def triple(i):
        _, j = pair(i)
        k = (i * 13 + 5) % n
        if k in (i, j):
            k = (k + 1) % n
        if k in (i, j):
            k = (k + 1) % n
        return (i, j, k)

    if law is LawKind.INTERNAL:
        for i, h in enumerate(sets):
            v = kv(h)
            if not v.is_defined:
                run.skip()
                continue
            bd = bounds(h)
            lo = MeanValue.exact(bd.inf)
            hi = MeanValue.exact(bd.sup)
            run.check(_le(lo, v, cfg.tol) and _le(v, hi, cfg.tol),
                      (texts[i],), f"K={v} outside [{bd.inf}, {bd.sup}]")
    elif law is LawKind.STRONG_INTERNAL:
        for i, h in enumerate(sets):
            v = kv(h)
            bd = bounds(h)
            if not v.is_defined or bd.acc_inf is None:
                run.skip()
                continue
            lo = MeanValue.exact(bd.acc_inf)
            hi = MeanValue.exact(bd.acc_sup)
            run.check(_le(lo, v, cfg.tol) and _le(v, hi, cfg.tol),
                      (texts[i],), f"K={v} outside [{bd.acc_inf}, {bd.acc_sup}]")
    elif law in (LawKind.MONOTONE, LawKind.STRONG_MONOTONE):
        strong = law is LawKind.STRONG_MONOTONE
        for i in range(n):
            a, b = pair(i)
            h1, h2 = sets[a], sets[b]
            b1, b2 = bounds(h1), bounds(h2)
            if strong and (b1.acc_sup is None or b2.acc_inf is None):
                run.skip()
                continue
            top1 = b1.acc_sup if strong else b1.sup
            low2 = b2.acc_inf if strong else b2.inf
            gap = Q(i % 3)
            h2s = translate_set(h2, top1 - low2 + gap)
            v1, v2 = kv(h1), kv(h2s)
            vu = kv(union_sets(h1, h2s))
            cond_lo = _le(v1, vu, cfg.tol)
            cond_hi = _le(vu, v2, cfg.tol)
            cond = None if cond_lo is None or cond_hi is None else (cond_lo and cond_hi)
            run.check(cond, (texts[a], texts[b], f"shift={top1 - low2 + gap}"),
                      f"K1={v1} Ku={vu} K2={v2}")
    elif law is LawKind.DISJOINT_MONOTONE:
        for i in range(n):
            a, b = pair(i)
            h1, h2 = sets[a], sets[b]
            dis = _disjoint(h1, h2)
            if dis is not True:
                run.skip()
                continue
            v1, v2 = kv(h1), kv(h2)
            if not (v1.is_defined and v2.is_defined):
                run.skip()
                continue
            if _le(v2, v1, cfg.tol) and not _le(v1, v2, cfg.tol):
                h1, h2, v1, v2 = h2, h1, v2, v1
            vu = kv(union_sets(h1, h2))
            cond_lo = _le(v1, vu, cfg.tol)
            cond_hi = _le(vu, v2, cfg.tol)
            cond = None if cond_lo is None or cond_hi is None else (cond_lo and cond_hi)
            run.check(cond, (texts[a], texts[b]), f"K1={v1} Ku={vu} K2={v2}")
    elif law is LawKind.UNION_MONOTONE:
        for i in range(n):
            ia, ib, ic = triple(i)
            a, b, c = sets[ia], sets[ib], sets[ic]
            if _disjoint(b, c) is not True:
                run.skip()
                continue
            va = kv(a)
            vab = kv(union_sets(a, b))
            vac = kv(union_sets(a, c))
            vabc = kv(union_sets(a, b, c))
            if not all(v.is_defined for v in (va, vab, vac, vabc)):
                run.skip()
                continue
            checked = False
            bad = False
            if _le(va, vab, cfg.tol) and _le(va, vac, cfg.tol):
                checked = True
                if not _le(va, vabc, cfg.tol):
                    bad = True
                strict = _lt_strict(va, vab) or _lt_strict(va, vac)
                if strict and _lt_strict(va, vabc) is False:
                    bad = True
            if _le(vab, va, cfg.tol) and _le(vac, va, cfg.tol):
                checked = True
                if not _le(vabc, va, cfg.tol):
                    bad = True
                strict = _lt_strict(vab, va) or _lt_strict(vac, va)
                if strict and _lt_strict(vabc, va) is False:
                    bad = True
            if not checked:
                run.skip()
            else:
                run.check(not bad, (texts[ia], texts[ib], texts[ic]),
                          f"Ka={va} Kab={vab} Kac={vac} Kabc={vabc}")
    elif law is LawKind.D_MONOTONE:
        for i in range(n):
            a, b = pair(i)
            L, B = sets[a], sets[b]
            if _disjoint(L, B) is not True:
                run.skip()
                continue
            lb = union_sets(L, B)
            vl, vlb = kv(L), kv(lb)
            if not (vl.is_defined and vlb.is_defined):
                run.skip()
                continue
            for x in _shifts(lb):
                bx = translate_set(B, x)
                if _disjoint(lb, bx) is not True:
                    run.skip()
                    continue
                vfull = kv(union_sets(lb, bx))
                if not vfull.is_defined:
                    run.skip()
                    continue
                if x > 0 and _lt_strict(vl, vlb):
                    run.check(_lt_strict(vlb, vfull),
                              (texts[a], texts[b], f"x={x}"),
                              f"KL={vl} KLB={vlb} Kfull={vfull}")
                elif x < 0 and _lt_strict(vlb, vl):
                    run.check(_lt_strict(vfull, vlb),
                              (texts[a], texts[b], f"x={x}"),
                              f"KL={vl} KLB={vlb} Kfull={vfull}")
                else:
                    run.skip()
    elif law is LawKind.SHIFT_INVARIANT:
        for i, h in enumerate(sets):
            v = kv(h)
            if not v.is_defined:
                run.skip()
                continue
            for x in _shifts(h):
                vs = kv(translate_set(h, x))
                run.check(_eq(vs, v.shifted(x), cfg.tol),
                          (texts[i], f"x={x}"), f"K(H+x)={vs} vs K(H)+x={v.shifted(x)}")
    elif law is LawKind.SELF_SHIFT_INVARIANT:
        for i, h in enumerate(sets):
            v = kv(h)
            if not v.is_defined:
                run.skip()
                continue
            d = diameter(h)
            for mult in (1, 2, 7):
                x = d + mult  # strict separation keeps the union overlap-free
                u = union_sets(h, translate_set(h, x))
                vu = kv(u)
                run.check(_eq(vu, v.shifted(x / 2), cfg.tol),
                          (texts[i], f"x={x}"),
                          f"K(H u H+x)={vu} vs K(H)+x/2={v.shifted(x / 2)}")
    elif law is LawKind.PART_SHIFT_INVARIANT:
        for i in range(n):
            a, b = pair(i)
            h1, h2 = sets[a], sets[b]
            if _disjoint(h1, h2) is not True:
                run.skip()
                continue
            v0 = kv(union_sets(h1, h2))
            if not v0.is_defined:
                run.skip()
                continue
            for x in _shifts(h2):
                h2x = translate_set(h2, x)
                if _disjoint(h1, h2x) is not True:
                    run.skip()
                    continue
                vx = kv(union_sets(h1, h2x))
                if not vx.is_defined:
                    run.skip()
                    continue
                if vx.is_exact and v0.is_exact:
                    diff = vx.value - v0.value
                    sign_ok = (diff > 0) == (x > 0) and (diff < 0) == (x < 0)
                    mag_ok = abs(diff) <= abs(x)
                    run.check(sign_ok and mag_ok,
                              (texts[a], texts[b], f"x={x}"),
                              f"K(H1 u H2+x)-K(H1 u H2)={diff} vs x={x}")
                else:
                    diff = vx.as_float() - v0.as_float()
                    if abs(diff) <= 2 * cfg.tol:
                        run.skip()  # sign not resolvable at ladder tolerance
                    else:
                        sign_ok = (diff > 0) == (x > 0)
                        mag_ok = abs(diff) <= abs(x) + 2 * cfg.tol
                        run.check(sign_ok and mag_ok,
                                  (texts[a], texts[b], f"x={x}"),
                                  f"difference {diff:.6g} vs x={x}")
    else:
        raise ValueError(f"unhandled law {law}")
    return run.report()


def replay_violation(mean: MeanKind, violation: Violation,
                     cfg: LadderConfig = DEFAULT_CONFIG):
    """Re-normalize the recorded inputs; the caller re-runs the check.

    Expression items come back as BlockSets, recorded parameters
    (``x=...``, ``shift=...``) as rationals.
    """
    from .dsl import parse

    out = []
    for item in violation.inputs:
        name, sep, rhs = item.partition("=")
        if sep and name in ("x", "shift"):
            out.append(Q(rhs))
        else:
            out.append(normalize(parse(item)))
    return out
