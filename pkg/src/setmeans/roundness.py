"""Roundness of a set with respect to a mean.

A set is round when its mean value cuts it into a lower and an upper part
whose means average back to the whole mean.  Each mean has an equivalent
witness predicate (cardinality split, measure split, top-level counts,
accumulation-bound midpoint, or isolated-count ratio), evaluated here
independently of the defect computation so the two routes can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Optional

from .classify import Answer, Method, Verdict, iso_coeff_compare, iso_growth
from .errors import DomainViolation
from .means import (
    DEFAULT_CONFIG,
    LadderConfig,
    MeanKind,
    MeanValue,
    dimension_of,
    mean_iso,
    mean_of,
    measure_weight,
)
from .sets import BlockSet, bounds, cut_set, derived_set, level


@dataclass(frozen=True)
class RoundReport:
    k: MeanValue
    k1: MeanValue
    k2: MeanValue
    defect: MeanValue
    verdict: Verdict
    witness: dict = field(default_factory=dict)


def _cut_point(k: MeanValue) -> Q:
    return k.value if k.is_exact else Q(k.approx)


def round_defect(h: BlockSet, kind: MeanKind,
                 cfg: LadderConfig = DEFAULT_CONFIG) -> RoundReport:
    """Compute k, the two halves' means, and their averaging defect.

    The halves keep the cut value itself on both sides, matching the
    closed-halfline intersections.  For the ladder mean non-convergent
    halves yield an inconclusive verdict instead of a refutation.
    """
    kind = MeanKind(kind)
    k = mean_of(h, kind, cfg)
    if not k.is_defined:
        raise DomainViolation(f"set outside Dom({kind.value}): {k.reason}")
    kq = _cut_point(k)
    low = cut_set(h, kq, keep_low=True)
    high = cut_set(h, kq, keep_low=False)
    if low.is_empty or high.is_empty:
        raise DomainViolation("the mean value cuts off an empty half")
    k1 = mean_of(low, kind, cfg)
    k2 = mean_of(high, kind, cfg)
    if not (k1.is_defined and k2.is_defined):
        reason = k1.reason if not k1.is_defined else k2.reason
        if kind is MeanKind.ISO:
            verdict = Verdict(Answer.INCONCLUSIVE, Method.SAMPLER,
                              (f"a half did not converge: {reason}",))
            return RoundReport(k, k1, k2, MeanValue.undefined(reason), verdict)
        raise DomainViolation(f"a half lies outside Dom({kind.value}): {reason}")
    if k.is_exact and k1.is_exact and k2.is_exact:
        defect = MeanValue.exact((k1.value + k2.value) / 2 - k.value)
        answer = Answer.YES if defect.value == 0 else Answer.NO
        verdict = Verdict(answer, Method.CLOSED_FORM, (f"defect {defect.value}",))
    else:
        d = (k1.as_float() + k2.as_float()) / 2 - k.as_float()
        defect = MeanValue.approximate(d, 2 * cfg.tol)
        answer = Answer.YES if abs(d) < 2 * cfg.tol else Answer.NO
        verdict = Verdict(answer, Method.CLOSED_FORM, (f"defect {d:.3g}",))
    return RoundReport(k, k1, k2, defect, verdict, _witness_payload(h, kind, low, high, cfg))


def _witness_payload(h, kind, low, high, cfg) -> dict:
    if kind is MeanKind.ARITH:
        return {"split": [len(low.finite_points()), len(high.finite_points())]}
    if kind is MeanKind.AVG:
        dim = dimension_of(h)
        return {
            "measures": [str(measure_weight(low, dim)[1]), str(measure_weight(high, dim)[1])]
        }
    if kind is MeanKind.ACC:
        l1, l2 = level(low), level(high)
        return {
            "levels": [int(l1), int(l2)],
            "counts": [
                len(_iterate_derived(low, l1).finite_points()),
                len(_iterate_derived(high, l2).finite_points()),
            ],
        }
    if kind is MeanKind.LIS:
        b1, b2 = bounds(low), bounds(high)
        if b1.acc_sup is None or b2.acc_inf is None:
            return {}
        return {"half_mid": str((b1.acc_sup + b2.acc_inf) / 2)}
    return {}


def _iterate_derived(h: BlockSet, lev) -> BlockSet:
    cur = h
    for _ in range(int(lev)):
        cur = derived_set(cur)
    return cur


def round_witness(h: BlockSet, kind: MeanKind,
                  cfg: LadderConfig = DEFAULT_CONFIG) -> Verdict:
    """Evaluate the per-mean roundness characterization directly."""
    kind = MeanKind(kind)
    k = mean_of(h, kind, cfg)
    if not k.is_defined:
        raise DomainViolation(f"set outside Dom({kind.value}): {k.reason}")
    kq = _cut_point(k)
    low = cut_set(h, kq, keep_low=True)
    high = cut_set(h, kq, keep_low=False)
    if low.is_empty or high.is_empty:
        raise DomainViolation("the mean value cuts off an empty half")

    if kind is MeanKind.ARITH:
        m1, m2 = len(low.finite_points()), len(high.finite_points())
        answer = Answer.YES if m1 == m2 else Answer.NO
        return Verdict(answer, Method.CLOSED_FORM, (f"split {m1}|{m2} at k={kq}",))

    if kind is MeanKind.AVG:
        dim = dimension_of(h)
        kind1, w1 = measure_weight(low, dim)
        kind2, w2 = measure_weight(high, dim)
        if kind1 == "exact" and kind2 == "exact":
            answer = Answer.YES if w1 == w2 else Answer.NO
            return Verdict(answer, Method.CLOSED_FORM, (f"measures {w1} vs {w2}",))
        if w1 == w2:
            return Verdict(Answer.YES, Method.CLOSED_FORM, ("identical weight terms",))
        cmp = _terms_compare(w1, w2)
        if cmp is None:
            return Verdict(Answer.INCONCLUSIVE, Method.SAMPLER,
                           ("half measures numerically inseparable",))
        answer = Answer.YES if cmp == 0 else Answer.NO
        return Verdict(answer, Method.CLOSED_FORM, ("measures separated numerically",))

    if kind is MeanKind.ACC:
        l1, l2 = level(low), level(high)
        if l1 != l2:
            return Verdict(Answer.NO, Method.CLOSED_FORM, (f"half levels differ: {l1} vs {l2}",))
        c1 = len(_iterate_derived(low, l1).finite_points())
        c2 = len(_iterate_derived(high, l2).finite_points())
        answer = Answer.YES if c1 == c2 else Answer.NO
        return Verdict(answer, Method.CLOSED_FORM,
                       (f"level {l1} top counts {c1}|{c2}",))

    if kind is MeanKind.LIS:
        b1, b2 = bounds(low), bounds(high)
        if b1.acc_sup is None or b2.acc_inf is None:
            raise DomainViolation("a half is finite, outside Dom(lis)")
        mid = (b1.acc_sup + b2.acc_inf) / 2
        answer = Answer.YES if mid == kq else Answer.NO
        return Verdict(answer, Method.CLOSED_FORM,
                       (f"(limsup H- + liminf H+)/2 = {mid} vs k = {kq}",))

    # ISO: half means back at k, or the top/bottom count ratio tends to one
    ev = []
    k1 = mean_iso_or_none(low, cfg)
    k2 = mean_iso_or_none(high, cfg)
    clause1 = None
    if k1 is not None and k2 is not None:
        close1 = abs(k1 - k.as_float()) <= 2 * cfg.tol
        close2 = abs(k2 - k.as_float()) <= 2 * cfg.tol
        clause1 = close1 and close2
        ev.append(f"half means {k1:.6g}, {k2:.6g} vs k={k.as_float():.6g}")
        if clause1:
            return Verdict(Answer.YES, Method.CLOSED_FORM, tuple(ev))
    else:
        ev.append("a half mean did not converge")
    d1, r1 = iso_growth(low)
    d2, r2 = iso_growth(high)
    if d1 != d2:
        ev.append(f"side count degrees differ: {d1} vs {d2}")
        return Verdict(Answer.NO, Method.CLOSED_FORM, tuple(ev))
    cmp = iso_coeff_compare(r2, r1, d1)
    if cmp == 0:
        ev.append(f"count ratio |P|/|S| -> 1 (equal degree {d1} and coefficient)")
        return Verdict(Answer.YES, Method.CLOSED_FORM, tuple(ev))
    if cmp is not None:
        ev.append("count ratio limit differs from 1")
        return Verdict(Answer.NO, Method.CLOSED_FORM, tuple(ev))
    ev.append("count coefficients numerically inseparable")
    return Verdict(Answer.INCONCLUSIVE, Method.SAMPLER, tuple(ev))


def mean_iso_or_none(h: BlockSet, cfg: LadderConfig) -> Optional[float]:
    try:
        mv = mean_iso(h, cfg)
    except DomainViolation:
        return None
    return mv.as_float() if mv.is_defined else None


def _terms_compare(w1, w2):
    import mpmath

    from .means import _mp_log_q

    with mpmath.workprec(240):
        def total(terms):
            return mpmath.fsum(
                mpmath.exp((mpmath.log(m) / _mp_log_q(invr)) * _mp_log_q(d))
                for d, m, invr in terms
            )
        t1, t2 = total(w1), total(w2)
        gap = abs(t1 - t2)
        if gap > mpmath.mpf(2) ** -180:
            return -1 if t1 < t2 else 1
    return None
