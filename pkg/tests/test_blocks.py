"""Block-level primitives against brute-force oracles."""

import itertools
import random
from fractions import Fraction as Q

import pytest

from setmeans import (
    Cantor,
    CutNotRepresentable,
    Finite,
    GeomSeq,
    Interval,
    Tower,
    ValidationError,
)
from setmeans.blocks import (
    block_contains,
    block_dist_at_least,
    block_min_dist,
    cut_block,
    geomseq_outer_points,
    points_in_box,
    tower_outer_points,
)


def tower_points_brute(k, a, w, r, max_index):
    """Oracle: enumerate every index tuple up to a depth cap."""
    pts = set()
    for j in range(1, k + 1):
        for combo in itertools.combinations(range(1, max_index + 1), j):
            pts.add(a + w * sum(r**n for n in combo))
    return pts


def test_validation_ranges():
    with pytest.raises(ValidationError):
        Finite(())
    with pytest.raises(ValidationError):
        GeomSeq(Q(0), Q(0), Q(1, 2))
    with pytest.raises(ValidationError):
        GeomSeq(Q(0), Q(1), Q(1))
    with pytest.raises(ValidationError):
        Tower(2, Q(0), Q(1), Q(1, 2))  # ratio must stay below 1/3
    with pytest.raises(ValidationError):
        Tower(0, Q(0), Q(1), Q(1, 4))
    with pytest.raises(ValidationError):
        Interval(Q(1), Q(1))
    with pytest.raises(ValidationError):
        Cantor(Q(0), Q(1), 2, Q(1, 2))  # ratio must stay below 1/pieces
    with pytest.raises(ValidationError):
        Cantor(Q(0), Q(1), 1, Q(1, 4))


def test_finite_points_sorted_deduped():
    f = Finite((Q(3), Q(1), Q(3), Q(2)))
    assert f.points == (Q(1), Q(2), Q(3))


def test_geomseq_bounds():
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    assert (b.inf, b.sup) == (Q(0), Q(1, 2))
    b = GeomSeq(Q(1), Q(-1), Q(1, 2))
    assert (b.inf, b.sup) == (Q(1, 2), Q(1))


def test_tower_bounds():
    b = Tower(2, Q(0), Q(1), Q(1, 4))
    assert b.inf == 0
    assert b.sup == Q(1, 4) + Q(1, 16)


def test_geomseq_membership():
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    assert block_contains(b, Q(1, 8))
    assert not block_contains(b, Q(0))  # the anchor is a limit, not a member
    assert not block_contains(b, Q(3, 8))
    assert not block_contains(b, Q(1))  # powers start at n = 1


def test_tower_membership_against_brute_force():
    rng = random.Random(2)
    for k, r in [(1, Q(1, 5)), (2, Q(1, 4)), (3, Q(1, 5))]:
        t = Tower(k, Q(0), Q(1), r)
        brute = tower_points_brute(k, Q(0), Q(1), r, 30)
        for p in tower_points_brute(k, Q(0), Q(1), r, 8):
            assert block_contains(t, p)
        for _ in range(100):
            x = Q(rng.randint(0, 80), rng.choice([64, 128, 243]))
            assert block_contains(t, x) == (x in brute)


def test_interval_and_cantor_membership():
    assert block_contains(Interval(Q(0), Q(1)), Q(1, 2))
    assert not block_contains(Interval(Q(0), Q(1)), Q(2))
    c = Cantor(Q(0), Q(1), 2, Q(1, 3))
    assert not block_contains(c, Q(1, 2))  # first removed middle third
    assert block_contains(c, Q(1, 3))
    assert block_contains(c, Q(1, 4))  # orbit 1/4 -> 3/4 -> 1/4 cycles inside
    assert block_contains(c, Q(3, 10))
    assert not block_contains(c, Q(2, 5))


def test_min_dist_matches_brute_force():
    rng = random.Random(3)
    t = Tower(2, Q(0), Q(1), Q(1, 4))
    deep = tower_points_brute(2, Q(0), Q(1), Q(1, 4), 26)
    for _ in range(200):
        x = Q(rng.randint(-20, 90), rng.choice([16, 64, 256]))
        claimed = block_min_dist(t, x)
        brute = min(abs(x - p) for p in deep)
        assert claimed <= brute
        if x <= 0:
            # below the anchor the infimum distance is |x|, never attained
            assert claimed == -x
        elif x >= Q(1, 4) ** 10:
            # the nearest point is shallow, so the brute list attains it
            assert claimed == brute


def test_geomseq_min_dist():
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    assert block_min_dist(b, Q(3, 8)) == Q(1, 8)
    assert block_min_dist(b, Q(-1, 4)) == Q(1, 4)
    assert block_min_dist(b, Q(2)) == Q(3, 2)
    assert block_min_dist(b, Q(1, 16)) == 0


def test_cantor_dist_at_least():
    c = Cantor(Q(0), Q(1), 2, Q(1, 3))
    assert block_dist_at_least(c, Q(1, 2), Q(1, 6))
    assert not block_dist_at_least(c, Q(1, 2), Q(1, 5))
    assert block_dist_at_least(c, Q(2), Q(1))
    assert not block_dist_at_least(c, Q(1, 4), Q(1, 100))  # member: distance 0


@pytest.mark.parametrize("keep_low", [True, False])
def test_cut_geomseq(keep_low):
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    parts = cut_block(b, Q(1, 8), keep_low)
    if keep_low:
        # the part at or below 1/8 is the tail, again a geometric sequence
        assert parts == [GeomSeq(Q(0), Q(1, 4), Q(1, 2))]
    else:
        assert parts == [Finite((Q(1, 8), Q(1, 4), Q(1, 2)))]


def test_cut_geomseq_between_points():
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    low = cut_block(b, Q(3, 16), True)
    assert low == [GeomSeq(Q(0), Q(1, 4), Q(1, 2))]
    high = cut_block(b, Q(3, 16), False)
    assert high == [Finite((Q(1, 4), Q(1, 2)))]


def test_cut_interval():
    iv = Interval(Q(0), Q(2))
    assert cut_block(iv, Q(1), False) == [Interval(Q(1), Q(2))]
    assert cut_block(iv, Q(1), True) == [Interval(Q(0), Q(1))]
    assert cut_block(iv, Q(0), True) == [Finite((Q(0),))]
    assert cut_block(iv, Q(-1), True) == []


def test_cut_tower_against_membership_oracle():
    rng = random.Random(7)
    for _ in range(40):
        k = rng.choice([1, 2, 3])
        r = Q(1, rng.choice([4, 5, 6]))
        w = rng.choice([Q(1), Q(-1), Q(2), Q(1, 2)])
        a = Q(rng.randint(-4, 4))
        t = Tower(k, a, w, r)
        brute = tower_points_brute(k, a, w, r, 11)
        y = Q(rng.randint(-40, 40), rng.choice([8, 16, 13, 64]))
        for keep_low in (True, False):
            parts = cut_block(t, y, keep_low)
            want = {p for p in brute if (p <= y if keep_low else p >= y)}
            got = {
                p
                for b in parts
                for p in brute
                if b.inf <= p <= b.sup and block_contains(b, p)
            }
            assert got == want


def test_cut_cantor_gap_and_endpoint():
    c = Cantor(Q(0), Q(1), 2, Q(1, 3))
    assert cut_block(c, Q(1, 2), True) == [Cantor(Q(0), Q(1, 3), 2, Q(1, 3))]
    assert cut_block(c, Q(1, 2), False) == [Cantor(Q(2, 3), Q(1), 2, Q(1, 3))]
    low = cut_block(c, Q(1, 3), True)
    assert low == [Cantor(Q(0), Q(1, 3), 2, Q(1, 3))]
    high = cut_block(c, Q(1, 3), False)
    # 1/3 itself stays on both sides of the cut
    assert Finite((Q(1, 3),)) in high
    with pytest.raises(CutNotRepresentable):
        cut_block(c, Q(1, 4), True)  # attractor point with a cycling orbit


def test_outer_point_enumeration():
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    assert geomseq_outer_points(b, Q(1, 8)) == [Q(1, 2), Q(1, 4), Q(1, 8)]
    assert geomseq_outer_points(b, Q(1, 8), below=Q(1, 4)) == [Q(1, 8)]
    t = Tower(2, Q(0), Q(1), Q(1, 4))
    pts = tower_outer_points(t, Q(1, 64))
    brute = {
        p
        for p in tower_points_brute(2, Q(0), Q(1), Q(1, 4), 12)
        if min(abs(p - q) for q in tower_points_brute(1, Q(0), Q(1), Q(1, 4), 14) | {Q(0)})
        >= Q(1, 64)
    }
    assert set(pts) == brute


def test_points_in_box():
    b = GeomSeq(Q(0), Q(1), Q(1, 2))
    assert points_in_box(b, Q(1, 8), Q(1, 2)) == [Q(1, 2), Q(1, 4), Q(1, 8)]
    assert points_in_box(b, Q(0), Q(1, 2)) is None  # the box reaches the anchor
    assert points_in_box(b, Q(3, 4), Q(2)) == []
    t = Tower(2, Q(0), Q(1), Q(1, 4))
    # [1/5, 1/2] straddles the accumulation point 1/4, hence infinite
    assert points_in_box(t, Q(1, 5), Q(1, 2)) is None
    # [13/48, 1/2] avoids every accumulation point, hence exactly {5/16}
    got = points_in_box(t, Q(13, 48), Q(1, 2))
    brute = sorted(
        p
        for p in tower_points_brute(2, Q(0), Q(1), Q(1, 4), 30)
        if Q(13, 48) <= p <= Q(1, 2)
    )
    assert got == brute == [Q(5, 16)]


def test_reflect_blocks():
    assert GeomSeq(Q(0), Q(1), Q(1, 2)).reflect(Q(0)) == GeomSeq(Q(0), Q(-1), Q(1, 2))
    assert Interval(Q(1), Q(2)).reflect(Q(0)) == Interval(Q(-2), Q(-1))
    t = Tower(2, Q(0), Q(1), Q(1, 4)).reflect(Q(1))
    assert t == Tower(2, Q(2), Q(-1), Q(1, 4))
    c = Cantor(Q(0), Q(1), 3, Q(1, 4)).reflect(Q(1, 2))
    assert c == Cantor(Q(0), Q(1), 3, Q(1, 4))
