import random
from fractions import Fraction as F

import pytest

from okcaps.algcap import PolarizedSurface
from okcaps.moment import WeightNode, WeightTree
from okcaps.okounkov import (
    IrrationalEndpoint,
    NOBodyError,
    admits,
    corner_placements,
    dp_criteria,
    high_rank_condition,
    no_body,
    no_wt,
)
from okcaps.picard import DivisorClass, E, H, SurfaceModel, intersect, zariski

DP5 = PolarizedSurface.delpezzo(4)


def _pts(poly):
    return {(x, y) for x, y in poly.vertices}


def test_dp5_body():
    b = no_body(DP5, 3)
    assert b.mu == 2
    assert b.beta_breaks == ((0, 1), (1, 2), (2, 0))
    assert _pts(b.polygon()) == {(0, 0), (0, 1), (1, 2), (2, 0)}
    assert [b.beta(F(k, 4)) for k in range(9)] == [1 + F(k, 4) for k in range(5)] + [
        4 - 2 * F(k, 4) for k in range(5, 9)
    ]
    t, curves = b.trace[0]
    assert t == 1
    assert set(curves) == {H(4) - E(i, 4) - E(4, 4) for i in range(1, 4)}
    assert b.alpha(1) == 0


def test_dp5_body_weights():
    assert no_wt(no_body(DP5, 3)).sequence() == (3, (1, 1, 1, 1))


def test_line_flag_gives_the_same_body():
    line = DivisorClass(1, (1, 0, 0, 1))
    assert _pts(no_body(DP5, line).polygon()) == _pts(no_body(DP5, 3).polygon())


def test_one_point_blowup():
    s = PolarizedSurface.delpezzo(1, DivisorClass(5, (2,)))
    b = no_body(s, 0)
    assert _pts(b.polygon()) == {(0, 0), (3, 0), (3, 5), (0, 2)}
    assert b.area() == F(21, 2)


def test_chamber_supports_along_the_sweep():
    b = no_body(DP5, 3)
    F4 = E(4, 4)
    seen = set()
    pts = [t for t, _ in b.beta_breaks]
    entering = dict(b.trace)
    for t0, t1 in zip(pts, pts[1:]):
        seen |= set(entering.get(t0, ()))
        Z = zariski(DP5.A - F4 * ((t0 + t1) / 2), DP5.model)
        assert Z.support() == seen


def test_volume_identity_on_random_runs():
    rng = random.Random(17)
    runs = 0
    while runs < 30:
        n = rng.randint(1, 6)
        c = rng.randint(3, 8)
        A = DivisorClass(c, tuple(rng.randint(1, max(1, c // 2)) for _ in range(n)))
        s = PolarizedSurface.delpezzo(n, A)
        if not s.is_polarized():
            continue
        flag = rng.randrange(len(s.model.neg_curves))
        b = no_body(s, flag)
        assert 2 * b.area() == intersect(A, A)
        assert b.beta(0) == intersect(A, s.model.neg_curves[flag])
        runs += 1


def test_irrational_end_point():
    model = SurfaceModel.custom(2, [E(1, 2), E(2, 2)])
    s = PolarizedSurface(model, DivisorClass(3, (1, 1)))
    with pytest.raises(IrrationalEndpoint) as info:
        no_body(s, 0)
    lo, hi = info.value.lo, info.value.hi
    # mu = sqrt(8) - 1
    assert (lo + 1) ** 2 <= 8 <= (hi + 1) ** 2 and hi - lo < F(1, 10**11)
    b = no_body(s, 0, allow_approximate=True)
    assert not b.exact
    with pytest.raises(NOBodyError):
        no_wt(b)


def test_rejections():
    with pytest.raises(NOBodyError, match="A-generic"):
        no_body(PolarizedSurface.delpezzo(1, H(1)), 0)
    with pytest.raises(NOBodyError):
        no_body(PolarizedSurface.delpezzo(2, DivisorClass(1, (1, 1))), 0)
    with pytest.raises(NOBodyError):
        no_body(DP5, 99)


def test_corner_placements_of_fig2():
    heads = sorted(w.head for _, w in corner_placements(no_body(DP5, 3).polygon()))
    assert heads[0] == 3


def test_admits():
    assert admits(DP5, WeightTree.from_flat(3, [1, 1, 1, 1]))
    assert not admits(DP5, WeightTree.from_flat(3, [1, 1, 1]))
    s = PolarizedSurface.delpezzo(3, DivisorClass(6, (1, 3, 2)))
    assert admits(s, WeightTree.from_flat(6, [3, 2, 1]))


def _units(c, k):
    """(c; 1 x k) as a tree, whether or not the cuts fit."""
    return WeightTree(c, tuple(WeightNode(1) for _ in range(k)))


def test_dp_criteria_examples():
    assert dp_criteria(_units(3, 4), 5) == (True, 1)
    assert dp_criteria(_units(4, 6), 7) == (True, 2)
    assert dp_criteria(_units(3, 6), 7) == (False, 2)
    assert dp_criteria(_units(6, 7), 8) == (True, 3)
    assert dp_criteria(_units(6, 8), 9) == (True, 4)
    assert dp_criteria(_units(5, 8), 9)[0] is False
    with pytest.raises(ValueError):
        dp_criteria(_units(9, 9), 10)


def test_high_rank_condition():
    assert high_rank_condition(WeightTree.from_flat(10, [1] * 5), 4)
    assert not high_rank_condition(WeightTree.from_flat(4, [1] * 5), 4)
    assert high_rank_condition(WeightTree.from_flat(2, [1] * 4), 3)


# Equal weights make every line through E_1 enter at the same time, and the
# merged slices are not corner cuts of the body.  Recorded, not hidden.
_KNOWN_MISMATCH = {(4, 5), (4, 6), (5, 6)}


def _unit_cases():
    for c in (3, 4, 5):
        for n in range(1, 7):
            s = PolarizedSurface.delpezzo(n, DivisorClass(c, (1,) * n))
            if not s.is_polarized():
                continue
            try:
                w = WeightTree.from_flat(c, [1] * n)
            except ValueError:
                continue
            if dp_criteria(w, n + 1)[0]:
                marks = [pytest.mark.xfail(strict=True)] if (c, n) in _KNOWN_MISMATCH else []
                yield pytest.param(c, n, marks=marks, id=f"c{c}-n{n}")


@pytest.mark.parametrize("c,n", list(_unit_cases()))
def test_criteria_consistency(c, n):
    s = PolarizedSurface.delpezzo(n, DivisorClass(c, (1,) * n))
    assert admits(s, no_wt(no_body(s, 0)))


@pytest.mark.parametrize("n,c", [(3, 3), (4, 5), (5, 9), (6, 14), (7, 20)])
def test_wall_filter_under_high_rank_condition(n, c):
    N = n + 1
    w = WeightTree.from_flat(c, [1] * N)
    assert high_rank_condition(w, n)
    s = PolarizedSurface.delpezzo(N, DivisorClass(c, (1,) * N))
    b = no_body(s, 0)
    star = s.model.neg_curves[0]
    for _, curves in b.trace:
        for C in curves:
            # only lines through the flag's point, H - E_* - E_j
            assert C.d == 1 and intersect(C, star) == 1
    assert admits(s, no_wt(b))
