"""Primitive blocks: the exactly-representable pieces of a bounded set.

Every coordinate is a Fraction, so membership, distances, bounds and cuts
are exact.  Five block kinds exist:

* ``Finite``   -- a sorted tuple of distinct points.
* ``GeomSeq``  -- ``{a + w*r**n : n >= 1}``, a geometric sequence
  accumulating at its (excluded) anchor ``a``.
* ``Tower``    -- ``{a + w*(r**n1 + ... + r**nj) : 1 <= j <= k, n1 < ... < nj}``,
  the canonical set whose j-th derived set drops the top layer.  ``r < 1/3``
  keeps the index clusters separated so the layering is exact.
* ``Interval`` -- the closed interval ``[lo, hi]``.
* ``Cantor``   -- the attractor of ``m`` equally spaced affine maps with
  contraction ``r < 1/m`` on ``[lo, hi]`` (strong separation holds).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import CutNotRepresentable, MembershipUndecided, ValidationError

Q = Fraction

#: descent budget for Cantor membership orbits that neither cycle nor exit
CANTOR_DEPTH = 512


def as_q(value) -> Q:
    if isinstance(value, Q):
        return value
    if isinstance(value, int):
        return Q(value)
    raise ValidationError(f"expected a rational, got {value!r}")


@dataclass(frozen=True)
class Finite:
    points: tuple[Q, ...]

    def __post_init__(self):
        pts = tuple(sorted(set(as_q(p) for p in self.points)))
        if not pts:
            raise ValidationError("finite block needs at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def inf(self) -> Q:
        return self.points[0]

    @property
    def sup(self) -> Q:
        return self.points[-1]

    def translate(self, x: Q) -> "Finite":
        return Finite(tuple(p + x for p in self.points))

    def reflect(self, c: Q) -> "Finite":
        return Finite(tuple(2 * c - p for p in self.points))


@dataclass(frozen=True)
class GeomSeq:
    anchor: Q
    scale: Q
    ratio: Q

    def __post_init__(self):
        object.__setattr__(self, "anchor", as_q(self.anchor))
        object.__setattr__(self, "scale", as_q(self.scale))
        object.__setattr__(self, "ratio", as_q(self.ratio))
        if self.scale == 0:
            raise ValidationError("geometric sequence scale must be nonzero")
        if not (0 < self.ratio < 1):
            raise ValidationError("geometric sequence ratio must be in (0, 1)")

    @property
    def inf(self) -> Q:
        # anchor side is an infimum, not attained
        return self.anchor if self.scale > 0 else self.anchor + self.scale * self.ratio

    @property
    def sup(self) -> Q:
        return self.anchor + self.scale * self.ratio if self.scale > 0 else self.anchor

    def translate(self, x: Q) -> "GeomSeq":
        return GeomSeq(self.anchor + x, self.scale, self.ratio)

    def reflect(self, c: Q) -> "GeomSeq":
        return GeomSeq(2 * c - self.anchor, -self.scale, self.ratio)

    def point(self, n: int) -> Q:
        return self.anchor + self.scale * self.ratio**n


@dataclass(frozen=True)
class Tower:
    level: int
    anchor: Q
    scale: Q
    ratio: Q

    def __post_init__(self):
        object.__setattr__(self, "anchor", as_q(self.anchor))
        object.__setattr__(self, "scale", as_q(self.scale))
        object.__setattr__(self, "ratio", as_q(self.ratio))
        if not isinstance(self.level, int) or self.level < 1:
            raise ValidationError("tower level must be an integer >= 1")
        if self.scale == 0:
            raise ValidationError("tower scale must be nonzero")
        if not (0 < self.ratio < Q(1, 3)):
            raise ValidationError("tower ratio must be in (0, 1/3)")

    @property
    def max_sum(self) -> Q:
        # r + r^2 + ... + r^k, attained by the indices (1, .., k)
        r = self.ratio
        return r * (1 - r**self.level) / (1 - r)

    @property
    def inf(self) -> Q:
        return self.anchor if self.scale > 0 else self.anchor + self.scale * self.max_sum

    @property
    def sup(self) -> Q:
        return self.anchor + self.scale * self.max_sum if self.scale > 0 else self.anchor

    def translate(self, x: Q) -> "Tower":
        return Tower(self.level, self.anchor + x, self.scale, self.ratio)

    def reflect(self, c: Q) -> "Tower":
        return Tower(self.level, 2 * c - self.anchor, -self.scale, self.ratio)


@dataclass(frozen=True)
class Interval:
    lo: Q
    hi: Q

    def __post_init__(self):
        object.__setattr__(self, "lo", as_q(self.lo))
        object.__setattr__(self, "hi", as_q(self.hi))
        if not self.lo < self.hi:
            raise ValidationError("interval needs lo < hi")

    @property
    def inf(self) -> Q:
        return self.lo

    @property
    def sup(self) -> Q:
        return self.hi

    def translate(self, x: Q) -> "Interval":
        return Interval(self.lo + x, self.hi + x)

    def reflect(self, c: Q) -> "Interval":
        return Interval(2 * c - self.hi, 2 * c - self.lo)


@dataclass(frozen=True)
class Cantor:
    lo: Q
    hi: Q
    pieces: int
    ratio: Q

    def __post_init__(self):
        object.__setattr__(self, "lo", as_q(self.lo))
        object.__setattr__(self, "hi", as_q(self.hi))
        object.__setattr__(self, "ratio", as_q(self.ratio))
        if not self.lo < self.hi:
            raise ValidationError("cantor block needs lo < hi")
        if not isinstance(self.pieces, int) or self.pieces < 2:
            raise ValidationError("cantor block needs at least 2 pieces")
        if not (0 < self.ratio < Q(1, self.pieces)):
            raise ValidationError("cantor ratio must be in (0, 1/pieces)")

    @property
    def inf(self) -> Q:
        return self.lo

    @property
    def sup(self) -> Q:
        return self.hi

    @property
    def gap_step(self) -> Q:
        # spacing between consecutive piece left endpoints, in absolute units
        return (self.hi - self.lo) * (1 - self.ratio) / (self.pieces - 1)

    def piece(self, i: int) -> "Cantor":
        lo = self.lo + i * self.gap_step
        return Cantor(lo, lo + self.ratio * (self.hi - self.lo), self.pieces, self.ratio)

    def translate(self, x: Q) -> "Cantor":
        return Cantor(self.lo + x, self.hi + x, self.pieces, self.ratio)

    def reflect(self, c: Q) -> "Cantor":
        # the equally spaced map family is symmetric, so reflection stays in class
        return Cantor(2 * c - self.hi, 2 * c - self.lo, self.pieces, self.ratio)


Block = Union[Finite, GeomSeq, Tower, Interval, Cantor]

_RANK = {Finite: 0, GeomSeq: 1, Tower: 2, Interval: 3, Cantor: 4}


def block_rank(b: Block) -> int:
    return _RANK[type(b)]


def block_sort_key(b: Block):
    params: tuple
    if isinstance(b, Finite):
        params = b.points
    elif isinstance(b, GeomSeq):
        params = (b.anchor, b.scale, b.ratio)
    elif isinstance(b, Tower):
        params = (b.level, b.anchor, b.scale, b.ratio)
    elif isinstance(b, Interval):
        params = (b.lo, b.hi)
    else:
        params = (b.lo, b.hi, b.pieces, b.ratio)
    return (block_rank(b), b.inf, b.sup, params)


def is_infinite_block(b: Block) -> bool:
    return not isinstance(b, Finite)


def translate_block(b: Block, x: Q) -> Block:
    return b.translate(x)


def reflect_block(b: Block, c: Q) -> Block:
    return b.reflect(c)


# ---------------------------------------------------------------------------
# membership


def block_contains(b: Block, x: Q) -> bool:
    """Exact membership; MembershipUndecided only for deep Cantor orbits."""
    x = as_q(x)
    if isinstance(b, Finite):
        return x in b.points
    if isinstance(b, Interval):
        return b.lo <= x <= b.hi
    if isinstance(b, GeomSeq):
        return _geom_index_of(b, x) is not None
    if isinstance(b, Tower):
        return _tower_contains_t((x - b.anchor) / b.scale, b.level, b.ratio)
    return _cantor_contains(b, x)


def _geom_index_of(b: GeomSeq, x: Q):
    """Return n >= 1 with x == anchor + scale*r**n, else None."""
    t = (x - b.anchor) / b.scale
    if t <= 0:
        return None
    r = b.ratio
    if t > r:
        return None
    n, p = 1, r
    while p > t:
        p *= r
        n += 1
    return n if p == t else None


def _tower_contains_t(t: Q, k: int, r: Q) -> bool:
    """Is t a sum r**n1 + .. + r**nj with 1 <= j <= k, increasing indices?"""
    while True:
        if t <= 0:
            return False
        max_sum = r * (1 - r**k) / (1 - r)
        if t > max_sum:
            return False
        # locate the first-index cluster: r**n1 <= t < r**(n1-1)
        p = r
        while p > t:
            p *= r
        if t == p:
            return True
        if k == 1:
            return False
        # strip the leading term and recurse with indices shifted down
        t = (t - p) / p
        k -= 1


def _cantor_contains(b: Cantor, x: Q) -> bool:
    if x < b.lo or x > b.hi:
        return False
    t = (x - b.lo) / (b.hi - b.lo)
    r = b.ratio
    u = (1 - r) / (b.pieces - 1)  # normalized piece spacing
    seen = set()
    for _ in range(CANTOR_DEPTH):
        if t == 0 or t == 1:
            return True
        if t in seen:
            # orbit cycles without ever falling in a gap: x is in the attractor
            return True
        seen.add(t)
        i = int(t / u)
        if i > b.pieces - 1:
            i = b.pieces - 1
        # piece i spans [i*u, i*u + r]; anything between pieces is a gap
        if t < i * u:
            i -= 1
        if t > i * u + r:
            return False
        t = (t - i * u) / r
    raise MembershipUndecided(f"cantor membership of {x} unresolved at depth {CANTOR_DEPTH}")


# ---------------------------------------------------------------------------
# distances


def block_min_dist(b: Block, x: Q) -> Q:
    """Exact infimum distance from x to the block (Cantor not supported here)."""
    x = as_q(x)
    if isinstance(b, Finite):
        return min(abs(x - p) for p in b.points)
    if isinstance(b, Interval):
        if x < b.lo:
            return b.lo - x
        if x > b.hi:
            return x - b.hi
        return Q(0)
    if isinstance(b, GeomSeq):
        t = (x - b.anchor) / b.scale
        return abs(b.scale) * _geom_dist_t(t, b.ratio)
    if isinstance(b, Tower):
        t = (x - b.anchor) / b.scale
        return abs(b.scale) * _tower_dist_t(t, b.level, b.ratio)
    raise TypeError("use block_dist_at_least for Cantor blocks")


def _geom_dist_t(t: Q, r: Q) -> Q:
    # point set {r**n : n >= 1} in (0, r]
    if t <= 0:
        return -t
    if t >= r:
        return t - r
    n, p = 1, r
    while p > t:
        p *= r
        n += 1
    # r**n = p <= t < r**(n-1)
    return min(t - p, p / r - t)


def _tower_dist_t(t: Q, k: int, r: Q) -> Q:
    """Distance from t to {r**n1 + ... + r**nj : 1 <= j <= k, increasing}."""
    if t <= 0:
        return -t
    max_sum = r * (1 - r**k) / (1 - r)
    if t >= max_sum:
        return t - max_sum
    sub_max = r * (1 - r ** (k - 1)) / (1 - r) if k >= 2 else Q(0)
    p = r
    while p > t:
        p *= r
    # cluster with first index at p = r**n1: occupies [p, p*(1+sub_max)]
    cands = []
    if p < r:
        cands.append(p / r - t)  # nearest point of the cluster above
    box_max = p * (1 + sub_max)
    if t <= box_max:
        cands.append(abs(t - p))
        if k >= 2:
            cands.append(p * _tower_dist_t((t - p) / p, k - 1, r))
    else:
        cands.append(t - box_max)  # box_max is the attained cluster maximum
    return min(cands)


def block_dist_at_least(b: Block, x: Q, eps: Q) -> bool:
    """Decide dist(x, block) >= eps exactly.

    For Cantor blocks this descends the piece tree; each level shrinks the
    bounding box by the contraction ratio so the test always terminates.
    """
    if not isinstance(b, Cantor):
        return block_min_dist(b, x) >= eps
    lo, hi = b.lo, b.hi
    r, m = b.ratio, b.pieces
    while True:
        if x <= lo:
            return lo - x >= eps
        if x >= hi:
            return x - hi >= eps
        d = hi - lo
        if d < eps:
            # endpoints of this box are in the set, so dist < d < eps
            return False
        step = d * (1 - r) / (m - 1)
        i = int((x - lo) / step)
        if i > m - 1:
            i = m - 1
        if x < lo + i * step:
            i -= 1
        p_lo = lo + i * step
        p_hi = p_lo + r * d
        if x > p_hi:
            # in the gap between piece i and piece i+1
            return min(x - p_hi, (p_lo + step) - x) >= eps
        lo, hi = p_lo, p_hi


# ---------------------------------------------------------------------------
# cuts


def cut_block(b: Block, y: Q, keep_low: bool) -> list[Block]:
    """Exact surgery for the part of the block <= y (or >= y).

    The cut point itself stays on both sides when it belongs to the set,
    matching K^{-y} = K /\\ (-inf, y] and K^{+y} = K /\\ [y, +inf).
    """
    y = as_q(y)
    if isinstance(b, Finite):
        pts = [p for p in b.points if (p <= y if keep_low else p >= y)]
        return [Finite(tuple(pts))] if pts else []
    if isinstance(b, Interval):
        if keep_low:
            if y <= b.lo:
                return [Finite((b.lo,))] if y == b.lo else []
            return [Interval(b.lo, min(b.hi, y))] if y < b.hi else [b]
        if y >= b.hi:
            return [Finite((b.hi,))] if y == b.hi else []
        return [Interval(max(b.lo, y), b.hi)] if y > b.lo else [b]
    if isinstance(b, GeomSeq):
        return _cut_geomseq(b, y, keep_low)
    if isinstance(b, Tower):
        return _cut_tower(b, y, keep_low)
    return _cut_cantor(b, y, keep_low)


def _cut_geomseq(b: GeomSeq, y: Q, keep_low: bool) -> list[Block]:
    # work in t-space where points sit at r**n; scale sign flips the side
    t = (y - b.anchor) / b.scale
    keep_small_t = keep_low if b.scale > 0 else not keep_low
    r = b.ratio
    if keep_small_t:
        if t >= r:
            return [b]
        if t <= 0:
            return []
        n, p = 1, r
        while p > t:
            p *= r
            n += 1
        # tail from index n onward is again geometric with scale*r**(n-1)
        return [GeomSeq(b.anchor, b.scale * r ** (n - 1), r)]
    if t <= 0:
        return [b]
    if t > r:
        return []
    pts, n, p = [], 1, r
    while p >= t:
        pts.append(b.anchor + b.scale * p)
        p *= r
        n += 1
    return [Finite(tuple(pts))]


def _cut_tower(b: Tower, y: Q, keep_low: bool) -> list[Block]:
    t = (y - b.anchor) / b.scale
    keep_small_t = keep_low if b.scale > 0 else not keep_low
    parts = _cut_tower_t(t, b.level, b.ratio, keep_small_t)
    out: list[Block] = []
    for kind, payload in parts:
        if kind == "point":
            out.append(Finite((b.anchor + b.scale * payload,)))
        else:
            lvl, offset, scl = payload
            if lvl == 1:
                out.append(GeomSeq(b.anchor + b.scale * offset, b.scale * scl, b.ratio))
            else:
                out.append(Tower(lvl, b.anchor + b.scale * offset, b.scale * scl, b.ratio))
    return out


def _cut_tower_t(t: Q, k: int, r: Q, keep_small: bool):
    """Cut the normalized tower point set at t.

    Returns a list of ("point", value) and ("tower", (level, offset, scale))
    parts, where the tower part denotes offset + scale * P_level.
    """
    max_sum = r * (1 - r**k) / (1 - r)
    if t <= 0:
        return [] if keep_small else [("tower", (k, Q(0), Q(1)))]
    if t >= max_sum:
        return [("tower", (k, Q(0), Q(1)))] if keep_small else (
            [("point", max_sum)] if t == max_sum else []
        )
    sub_max = r * (1 - r ** (k - 1)) / (1 - r) if k >= 2 else Q(0)
    n, p = 1, r
    while p > t:
        p *= r
        n += 1
    # clusters with first index > n form the tail p*P_k; clusters with first
    # index < n are, each, an anchor point plus a scaled (k-1)-tower
    box_max = p * (1 + sub_max)
    parts = []
    if keep_small:
        parts.append(("tower", (k, Q(0), p)))  # tail: indices >= n+1 scaled by r**n
        if t >= p:
            parts.append(("point", p))
        if k >= 2 and t > p:
            for kind, payload in _cut_tower_t((t - p) / p, k - 1, r, True):
                if kind == "point":
                    parts.append(("point", p + p * payload))
                else:
                    lvl, off, scl = payload
                    parts.append(("tower", (lvl, p + p * off, p * scl)))
    else:
        for m in range(1, n):
            q = r**m
            parts.append(("point", q))
            if k >= 2:
                parts.append(("tower", (k - 1, q, q)))
        if t <= p:
            parts.append(("point", p))
            if k >= 2:
                parts.append(("tower", (k - 1, p, p)))
        elif k >= 2 and t <= box_max:
            for kind, payload in _cut_tower_t((t - p) / p, k - 1, r, False):
                if kind == "point":
                    parts.append(("point", p + p * payload))
                else:
                    lvl, off, scl = payload
                    parts.append(("tower", (lvl, p + p * off, p * scl)))
    return parts


def _cut_cantor(b: Cantor, y: Q, keep_low: bool) -> list[Block]:
    """Split a Cantor block at a gap point or an attained endpoint orbit."""
    low: list[Block] = []
    high: list[Block] = []
    box = b
    for _ in range(CANTOR_DEPTH):
        if y <= box.lo:
            high.append(box)
            if y == box.lo:
                low.append(Finite((y,)))
            return low if keep_low else high
        if y >= box.hi:
            low.append(box)
            if y == box.hi:
                high.append(Finite((y,)))
            return low if keep_low else high
        m, r = box.pieces, box.ratio
        d = box.hi - box.lo
        step = d * (1 - r) / (m - 1)
        i = int((y - box.lo) / step)
        if i > m - 1:
            i = m - 1
        if y < box.lo + i * step:
            i -= 1
        p_lo = box.lo + i * step
        p_hi = p_lo + r * d
        for j in range(0, i):
            low.append(box.piece(j))
        for j in range(i + 1, m):
            high.append(box.piece(j))
        if y > p_hi:
            # gap point: piece i is entirely below the cut
            low.append(box.piece(i))
            return low if keep_low else high
        box = box.piece(i)
    raise CutNotRepresentable(f"cut at {y} lands inside a cantor block at a non-gap point")


# ---------------------------------------------------------------------------
# enumeration helpers


def geomseq_outer_points(b: GeomSeq, eps: Q, below: Q | None = None) -> list[Q]:
    """Points of the sequence at distance >= eps (and < below) from their anchor."""
    out = []
    p = abs(b.scale) * b.ratio
    n = 1
    while p >= eps:
        if below is None or p < below:
            out.append(b.point(n))
        p *= b.ratio
        n += 1
    return out


def tower_outer_points(b: Tower, eps: Q, below: Q | None = None) -> list[Q]:
    """Top-layer tower points whose last term lies in [eps, below).

    Only full-length index tuples are isolated in the tower; shorter sums
    are accumulation points.  The last term r**nk is the distance to the
    nearest accumulation point inside the block, which bounds the search;
    the optional upper bound lets ladder callers enumerate one band at a
    time instead of re-walking the whole prefix tree every step.
    """
    r = b.ratio
    k = b.level
    limit = eps / abs(b.scale)
    limit_hi = None if below is None else below / abs(b.scale)
    ns = []
    p = r
    n = 1
    while p >= limit:
        ns.append((n, p))
        p *= r
        n += 1
    if len(ns) < k:
        return []
    out = []
    for last_idx in range(k - 1, len(ns)):
        n_last, p_last = ns[last_idx]
        if limit_hi is not None and p_last >= limit_hi:
            continue
        for combo in itertools.combinations(ns[:last_idx], k - 1):
            total = sum(p for _, p in combo) + p_last
            out.append(b.anchor + b.scale * total)
    return out


def points_in_box(b: Block, u: Q, v: Q):
    """Exact list of the block's points inside [u, v], or None when infinite.

    The result is infinite exactly when the closed box reaches an
    accumulation point with approach room on the accumulation side.
    Cantor and Interval blocks are never enumerable (None unless disjoint).
    """
    if v < u:
        return []
    if isinstance(b, Finite):
        return [p for p in b.points if u <= p <= v]
    if isinstance(b, (Interval, Cantor)):
        if v < b.inf or u > b.sup:
            return []
        return None
    if isinstance(b, GeomSeq):
        if b.scale > 0:
            # points in (anchor, anchor + scale*r], decreasing to the anchor
            if v <= b.anchor:
                return []
            if u <= b.anchor:
                return None
            out = []
            n = 1
            while True:
                p = b.point(n)
                if p < u:
                    return out
                if p <= v:
                    out.append(p)
                n += 1
        else:
            if u >= b.anchor:
                return []
            if v >= b.anchor:
                return None
            out = []
            n = 1
            while True:
                p = b.point(n)
                if p > v:
                    return out
                if p >= u:
                    out.append(p)
                n += 1
    # Tower: enumerate in normalized coordinates
    if b.scale > 0:
        tmin = (u - b.anchor) / b.scale
        tmax = (v - b.anchor) / b.scale
    else:
        tmin = (v - b.anchor) / b.scale
        tmax = (u - b.anchor) / b.scale
    ts = _tower_pts_in_t(b.level, b.ratio, tmin, tmax)
    if ts is None:
        return None
    return sorted(b.anchor + b.scale * t for t in ts)


def _tower_pts_in_t(k: int, r: Q, tmin: Q, tmax: Q):
    """Points of the normalized tower set inside [tmin, tmax], or None."""
    max_sum = r * (1 - r**k) / (1 - r)
    if tmax <= 0 or tmin > max_sum:
        return []
    if tmin <= 0:
        # the set accumulates at 0 from above, so any room above 0 is infinite
        return None
    sub_max = r * (1 - r ** (k - 1)) / (1 - r) if k >= 2 else Q(0)
    out = []
    p = r
    while p * (1 + sub_max) >= tmin:
        # the first-index cluster at p = r**n spans [p, p*(1+sub_max)];
        # every point of it is >= p, so clusters above tmax contribute nothing
        if p <= tmax:
            if tmin <= p:
                out.append(p)
            if k >= 2:
                sub = _tower_pts_in_t(k - 1, r, (tmin - p) / p, (tmax - p) / p)
                if sub is None:
                    return None
                out.extend(p + p * s for s in sub)
        p *= r
    return out
