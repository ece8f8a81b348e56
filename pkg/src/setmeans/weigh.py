"""Equal-weight relations: when two sets behave like equal point masses.

The defining quantity is the defect K(H1 u (H2+x)) - (K(H1) + K(H2+x))/2.
Two sets have equal weight in bound when the defect stays bounded over all
translates, in limit when it vanishes as x grows, and in equality when it
is exactly zero once the sets are separated relative to the mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction as Q
from typing import Optional

import mpmath

from .classify import Answer, Method, Verdict, iso_growth, iso_coeff_compare
from .errors import DomainViolation
from .means import (
    DEFAULT_CONFIG,
    LadderConfig,
    MeanKind,
    MeanValue,
    compare_dims,
    dimension_of,
    iso_eligible,
    k_bounds,
    mean_of,
    measure_weight,
    _mp_log_q,
)
from .sets import (
    BlockSet,
    bounds,
    derived_set,
    diameter,
    level,
    translate_set,
    union_sets,
)


class WeightKind(str, Enum):
    IN_BOUND = "bound"
    IN_LIMIT = "limit"
    IN_EQUALITY = "equality"


class Trend(str, Enum):
    BOUNDED = "BOUNDED"
    LINEAR_GROWTH = "LINEAR_GROWTH"
    TO_ZERO = "TO_ZERO"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class DefectCurve:
    samples: tuple[tuple[Q, MeanValue], ...]
    trend: Trend
    slope_estimate: Optional[float] = None


def weight_defect(h1: BlockSet, h2: BlockSet, kind: MeanKind, x: Q,
                  cfg: LadderConfig = DEFAULT_CONFIG) -> MeanValue:
    """K(H1 u (H2+x)) - (K(H1) + K(H2+x))/2, exact for the exact means."""
    kind = MeanKind(kind)
    shifted = translate_set(h2, x)
    union = union_sets(h1, shifted)
    k_union = mean_of(union, kind, cfg)
    k1 = mean_of(h1, kind, cfg)
    k2 = mean_of(shifted, kind, cfg)
    if not (k_union.is_defined and k1.is_defined and k2.is_defined):
        reason = next(v.reason for v in (k_union, k1, k2) if not v.is_defined)
        return MeanValue.undefined(reason)
    if k_union.is_exact and k1.is_exact and k2.is_exact:
        return MeanValue.exact(k_union.value - (k1.value + k2.value) / 2)
    tol = cfg.tol
    return MeanValue.approximate(
        k_union.as_float() - (k1.as_float() + k2.as_float()) / 2, 2 * tol
    )


def _grid(h1: BlockSet, h2: BlockSet, xmax: int):
    d = max(diameter(h1), diameter(h2))
    base = d if d > 0 else Q(1)
    xs = [base * 10**j for j in range(xmax + 1)]
    return sorted(xs + [-x for x in xs])


def classify_trend(samples, tol: float) -> tuple[Trend, Optional[float]]:
    """Trend of the defect over the positive tail of the grid.

    Linear growth is declared when the last three samples fit an affine
    model with a significant slope; vanishing when they decrease below
    tolerance; bounded when they are level.
    """
    pos = [(x, v) for x, v in samples if x > 0 and v.is_defined]
    if len(pos) < 3:
        return Trend.INCONCLUSIVE, None
    (x1, v1), (x2, v2), (x3, v3) = pos[-3:]
    f1, f2, f3 = (Q(v.as_float()) if not v.is_exact else v.value for v in (v1, v2, v3))
    qtol = Q(tol)
    if max(abs(f1), abs(f2), abs(f3)) <= qtol:
        return Trend.TO_ZERO, 0.0
    s1 = (f2 - f1) / (x2 - x1)
    s2 = (f3 - f2) / (x3 - x2)
    slope = float(s2)
    if abs(s2 - s1) <= max(qtol, abs(s2) / 1000) and abs(s2) > 10 * qtol:
        return Trend.LINEAR_GROWTH, slope
    if abs(f1) > abs(f2) > abs(f3) and abs(f3) < qtol:
        return Trend.TO_ZERO, slope
    if max(f1, f2, f3) - min(f1, f2, f3) <= 10 * qtol:
        return Trend.BOUNDED, slope
    return Trend.INCONCLUSIVE, slope


def defect_curve(h1: BlockSet, h2: BlockSet, kind: MeanKind,
                 cfg: LadderConfig = DEFAULT_CONFIG, xmax: int = 4) -> DefectCurve:
    samples = tuple(
        (x, weight_defect(h1, h2, kind, x, cfg)) for x in _grid(h1, h2, xmax)
    )
    trend, slope = classify_trend(samples, cfg.tol)
    return DefectCurve(samples, trend, slope)


# ---------------------------------------------------------------------------
# closed-form relation testers


def _closed(answer: Answer, *evidence: str) -> Verdict:
    return Verdict(answer, Method.CLOSED_FORM, tuple(evidence))


def equal_weight(h1: BlockSet, h2: BlockSet, kind: MeanKind, wkind: WeightKind,
                 cfg: LadderConfig = DEFAULT_CONFIG) -> Verdict:
    """Per-mean characterizations of the three equal-weight relations."""
    kind, wkind = MeanKind(kind), WeightKind(wkind)
    if kind is MeanKind.ARITH:
        _require_defined(h1, h2, kind, cfg)
        n, m = len(h1.finite_points()), len(h2.finite_points())
        if n == m:
            return _closed(Answer.YES, f"|H1| = |H2| = {n}")
        return _closed(Answer.NO, f"|H1| = {n} != |H2| = {m}")
    if kind is MeanKind.AVG:
        _require_defined(h1, h2, kind, cfg)
        d1, d2 = dimension_of(h1), dimension_of(h2)
        if compare_dims(d1, d2) != 0:
            return _closed(Answer.NO, "different Hausdorff dimensions")
        return _measures_equal(h1, h2, d1)
    if kind is MeanKind.ACC:
        _require_defined(h1, h2, kind, cfg)
        l1, l2 = level(h1), level(h2)
        if l1 != l2:
            return _closed(Answer.NO, f"levels differ: {l1} vs {l2}")
        c1 = len(_top_level(h1, l1).finite_points())
        c2 = len(_top_level(h2, l2).finite_points())
        if c1 == c2:
            return _closed(Answer.YES, f"equal level {l1}, equal top count {c1}")
        return _closed(Answer.NO, f"top-level counts differ: {c1} vs {c2}")
    if kind is MeanKind.LIS:
        b1, b2 = bounds(h1), bounds(h2)
        if b1.acc_inf is None or b2.acc_inf is None:
            raise DomainViolation("equal weight under lis needs infinite sets")
        if wkind is WeightKind.IN_BOUND:
            return _closed(Answer.YES, "any two sets have equal weight in bound under lis")
        diam1 = b1.acc_sup - b1.acc_inf
        diam2 = b2.acc_sup - b2.acc_inf
        if diam1 == diam2:
            return _closed(Answer.YES, f"equal accumulation diameter {diam1}")
        return _closed(Answer.NO, f"accumulation diameters differ: {diam1} vs {diam2}")
    # ISO: the count ratio must tend to one
    if not (iso_eligible(h1) and iso_eligible(h2)):
        raise DomainViolation("equal weight under iso needs isolated-point sets")
    d1, r1 = iso_growth(h1)
    d2, r2 = iso_growth(h2)
    if d1 != d2:
        return _closed(Answer.NO, f"count degrees differ: {d1} vs {d2}")
    cmp = iso_coeff_compare(r1, r2, d1)
    if cmp == 0:
        return _closed(Answer.YES, f"equal count degree {d1} and leading coefficient")
    if cmp is not None:
        return _closed(Answer.NO, "leading count coefficients differ")
    return _sampler_fallback(h1, h2, kind, wkind, cfg,
                             note="count coefficients numerically inseparable")


def _require_defined(h1, h2, kind, cfg):
    for h in (h1, h2):
        mv = mean_of(h, kind, cfg)
        if not mv.is_defined:
            raise DomainViolation(f"operand outside Dom({kind.value}): {mv.reason}")


def _top_level(h: BlockSet, lev) -> BlockSet:
    cur = h
    for _ in range(int(lev)):
        cur = derived_set(cur)
    return cur


def _measures_equal(h1: BlockSet, h2: BlockSet, dim) -> Verdict:
    k1, w1 = measure_weight(h1, dim)
    k2, w2 = measure_weight(h2, dim)
    if k1 == "exact" and k2 == "exact":
        if w1 == w2:
            return _closed(Answer.YES, f"equal measure {w1} at the shared dimension")
        return _closed(Answer.NO, f"measures differ: {w1} vs {w2}")
    if k1 == "terms" and k2 == "terms":
        if w1 == w2:
            return _closed(Answer.YES, "identical weight terms at the shared dimension")
        with mpmath.workprec(240):
            def total(terms):
                return mpmath.fsum(
                    mpmath.exp((mpmath.log(m) / _mp_log_q(invr)) * _mp_log_q(d))
                    for d, m, invr in terms
                )
            gap = abs(total(w1) - total(w2))
            if gap > mpmath.mpf(2) ** -180:
                return _closed(Answer.NO, "measures separated numerically")
        return Verdict(Answer.INCONCLUSIVE, Method.SAMPLER,
                       ("measures numerically inseparable",))
    return _closed(Answer.NO, "measures of different character at the shared dimension")


def _sampler_fallback(h1, h2, kind, wkind, cfg, note: str) -> Verdict:
    curve = defect_curve(h1, h2, kind, cfg)
    ev = (note, f"defect trend {curve.trend.value}")
    if wkind is WeightKind.IN_BOUND:
        if curve.trend is Trend.LINEAR_GROWTH:
            return Verdict(Answer.NO, Method.SAMPLER, ev)
        return Verdict(Answer.INCONCLUSIVE, Method.SAMPLER, ev)
    if wkind is WeightKind.IN_LIMIT:
        if curve.trend in (Trend.LINEAR_GROWTH, Trend.BOUNDED):
            return Verdict(Answer.NO, Method.SAMPLER, ev)
        return Verdict(Answer.INCONCLUSIVE, Method.SAMPLER, ev)
    # equality: exact zero beyond the mean-relative separation threshold
    try:
        kb1 = k_bounds(h1, kind, cfg)
        kb2 = k_bounds(h2, kind, cfg)
        if kb1.k_limsup.is_exact and kb2.k_liminf.is_exact:
            threshold = kb1.k_limsup.value - kb2.k_liminf.value
        else:
            threshold = diameter(h1) + diameter(h2)
    except DomainViolation:
        threshold = diameter(h1) + diameter(h2)
    for mult in (2, 10, 100):
        x = threshold * mult + mult
        d = weight_defect(h1, h2, kind, x, cfg)
        if d.is_exact and d.value != 0:
            return Verdict(Answer.NO, Method.SAMPLER,
                           ev + (f"nonzero defect {d.value} at x={x}",))
        if not d.is_exact and d.is_defined and abs(d.as_float()) > 2 * cfg.tol:
            return Verdict(Answer.NO, Method.SAMPLER,
                           ev + (f"defect {d} beyond tolerance at x={x}",))
    return Verdict(Answer.INCONCLUSIVE, Method.SAMPLER,
                   ev + ("no nonzero defect found beyond the separation threshold",))


def transitivity_probe(h1: BlockSet, h2: BlockSet, h3: BlockSet, kind: MeanKind,
                       cfg: LadderConfig = DEFAULT_CONFIG, xmax: int = 4) -> DefectCurve:
    """Sample the four-term combination whose collapse makes the relation transitive."""
    kind = MeanKind(kind)
    d = max(diameter(h1), diameter(h2), diameter(h3))
    base = d if d > 0 else Q(1)
    samples = []
    for j in range(xmax + 1):
        for sign in (1, -1):
            x = sign * base * 10**j
            h2x = translate_set(h2, x)
            h3xx = translate_set(h3, 2 * x)
            u12 = mean_of(union_sets(h1, h2x), kind, cfg)
            u23 = mean_of(union_sets(h2x, h3xx), kind, cfg)
            u13 = mean_of(union_sets(h1, h3xx), kind, cfg)
            m2 = mean_of(h2x, kind, cfg)
            if all(v.is_defined for v in (u12, u23, u13, m2)):
                if all(v.is_exact for v in (u12, u23, u13, m2)):
                    val = MeanValue.exact(u12.value + u23.value - u13.value - m2.value)
                else:
                    val = MeanValue.approximate(
                        u12.as_float() + u23.as_float() - u13.as_float() - m2.as_float(),
                        2 * cfg.tol,
                    )
            else:
                val = MeanValue.undefined("a term left the domain")
            samples.append((x, val))
    samples.sort(key=lambda s: s[0])
    trend, slope = classify_trend(samples, cfg.tol)
    return DefectCurve(tuple(samples), trend, slope)
