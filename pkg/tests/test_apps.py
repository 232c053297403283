from fractions import Fraction as F

import pytest
import sympy

from okcaps.algcap import PolarizedSurface
from okcaps.apps import (
    NO_OBSTRUCTION,
    OBSTRUCTED,
    accumulation_point,
    discriminant,
    eef_lower,
    embed_verdict,
    staircase_verdict,
    unit_threshold,
)
from okcaps.exactgeom import GeometryError, sqrt_bounds
from okcaps.moment import MomentDomain, WeightNode, WeightTree
from okcaps.picard import DivisorClass

DP5 = PolarizedSurface.delpezzo(4)


def units(c, k):
    return WeightTree(F(c), tuple(WeightNode(1) for _ in range(k)))


def test_small_ball_fits_dp5():
    v = embed_verdict(MomentDomain.ellipsoid(1, 1), DP5, 50)
    assert v.status == NO_OBSTRUCTION and v.kmax == 50
    assert v.sharp


def test_big_ball_is_obstructed_at_k1():
    v = embed_verdict(MomentDomain.triangle(3), DP5, 50)
    assert v.status == OBSTRUCTED and v.k == 1
    assert (v.src_cap, v.tgt_cap) == (3, 2)


def test_triangle_into_its_own_plane():
    v = embed_verdict(MomentDomain.triangle(4), WeightTree.from_flat(4, []), 60)
    assert v.status == NO_OBSTRUCTION and v.sharp


def test_volume_obstruction_beyond_kmax():
    v = embed_verdict(MomentDomain.ellipsoid(1, 20), WeightTree.from_flat(2, []), 2)
    assert v.status == OBSTRUCTED and v.k is None and v.reason == "volume"


def test_convex_source_rejected():
    with pytest.raises(GeometryError):
        embed_verdict(MomentDomain.rectangle(1, 2), DP5, 5)


def test_obstruction_stable_in_kmax():
    src = MomentDomain.concave([(0, 3), (1, 1), (3, 0)])
    first = embed_verdict(src, DP5, 10)
    assert first.obstructed
    for kmax in (20, 40):
        assert embed_verdict(src, DP5, kmax).k == first.k


@pytest.mark.parametrize("lam", [F(1, 2), 3])
def test_scaling_invariance(lam):
    src = MomentDomain.concave([(0, 2), (1, 1), (3, 0)])
    a = embed_verdict(src, DP5, 30)
    b = embed_verdict(src.scaled(lam), DP5.scaled(lam), 30)
    assert (a.status, a.k) == (b.status, b.k)


def test_sharpness_needs_matching_body():
    # equal weights at the criteria boundary: body weights differ from the tower
    s = PolarizedSurface.delpezzo(5, DivisorClass(4, (1,) * 5))
    assert not embed_verdict(MomentDomain.triangle(1), s, 5).sharp


def test_eef_examples():
    plane = WeightTree.from_flat(1, [])
    assert eef_lower(plane, 1, 20).value.exact == 1
    e = eef_lower(DP5, 1, 20)
    assert e.value.exact == F(1, 2) and e.argmax_k == 1
    with pytest.raises(ValueError):
        eef_lower(DP5, F(1, 2))


def test_eef_monotone_and_above_volume():
    zs = [1 + F(i, 4) for i in range(13)]
    vals = [eef_lower(DP5, z, 60) for z in zs]
    for a, b in zip(vals, vals[1:]):
        assert float(a.value) <= float(b.value) + 1e-12
    for r in vals:
        assert r.value.hi >= r.volume_bound.lo


def test_eef_approaches_volume_at_the_accumulation_point():
    acc = accumulation_point(WeightTree.from_flat(3, [1, 1, 1, 1]))
    z = (acc.lo + acc.hi) / 2
    vol = float(eef_lower(DP5, z, 10).volume_bound)
    gaps = [float(eef_lower(DP5, z, k).value) - vol for k in (10, 100, 400)]
    assert gaps[0] >= gaps[1] >= gaps[2] >= 0


def test_accumulation_points():
    a = accumulation_point(WeightTree.from_flat(3, [1, 1, 1, 1]))
    assert a.lo <= (3 + sympy.sqrt(5)) / 2 <= a.hi
    assert a.hi - a.lo <= F(1, 10**12)
    ball = accumulation_point(WeightTree.from_flat(1, []))
    assert ball.lo <= (7 + 3 * sympy.sqrt(5)) / 2 <= ball.hi
    assert accumulation_point(units(4, 6)) is None
    assert discriminant(units(4, 6)) == F(8, 5) ** 2 - 4
    # (5;1): b = 196/24 - 2 = 37/6 and b^2 - 4 = (35/6)^2
    exact = accumulation_point(WeightTree.from_flat(5, [1]))
    assert exact.exact == 6 and exact.lo == exact.hi == 6


@pytest.mark.parametrize("n,expected", [(6, "(18+sqrt(24))/5"), (8, "(24+sqrt(96))/5")])
def test_unit_weight_thresholds(n, expected):
    p, D, q = unit_threshold(n)
    c = sympy.symbols("c")
    target = sympy.sympify(expected)
    assert sympy.simplify((p + sympy.sqrt(D)) / q - target) == 0
    # b(c) = 2 exactly there
    b = (3 * c - n) ** 2 / (c**2 - n) - 2
    assert sympy.simplify(b.subs(c, target) - 2) == 0
    lo, hi = sqrt_bounds(D, F(1, 10**12))
    below, above = (p + lo) / q - F(1, 10**9), (p + hi) / q + F(1, 10**9)
    assert discriminant(units(below, n)) < 0
    assert discriminant(units(above, n)) > 0
    assert discriminant(units((p + lo) / q, n)) < 0 < discriminant(units((p + hi) / q, n))


def test_staircase_verdicts():
    assert staircase_verdict(units(F(9, 2), 6), 7).no_staircase
    assert staircase_verdict(units(F(13, 2), 8), 9).no_staircase
    v = staircase_verdict(WeightTree.from_flat(3, [1, 1, 1, 1]), 5)
    assert not v.no_staircase and v.accumulation is not None
    # below the criteria bound nothing is claimed
    assert not staircase_verdict(units(F(39, 10), 6), 7).no_staircase
    # above the threshold an accumulation point appears
    assert not staircase_verdict(units(5, 6), 7).no_staircase
