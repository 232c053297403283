from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from okcaps.exactgeom import GeometryError
from okcaps.moment import (
    MomentDomain,
    MomentKind,
    PolytopalityError,
    WeightNode,
    WeightTree,
    classify,
    minkowski,
    nodewise_sum,
    reconstruct,
    wt,
    wt_concave,
    wt_convex,
)

FIG2 = [(0, 0), (2, 0), (1, 2), (0, 1)]


def test_fig2_weights():
    w = wt_convex(MomentDomain.convex(FIG2))
    assert w.head == 3
    assert w.positive_weights() == [1, 1, 1, 1]
    assert str(w) == "(3;1,1,1,1)"


def test_rectangle_weights():
    w = wt(MomentDomain.rectangle(3, 2))
    assert w.sequence() == (5, (3, 2))


def test_triangle_has_no_cuts():
    assert wt(MomentDomain.triangle(4)).sequence() == (4, ())


def test_concave_staircase():
    # corners of the staircase lie on x + y = 3, leaving two unit corners
    d = MomentDomain.concave([(0, 4), (1, 2), (2, 1), (4, 0)])
    w = wt_concave(d)
    assert sorted(w.weights()) == [1, 1, 3]
    assert 2 * d.area() == sum(a * a for a in w.weights())


def test_ellipsoid_weights():
    assert sorted(wt(MomentDomain.ellipsoid(2, 1)).weights()) == [1, 1]
    assert sorted(wt(MomentDomain.ellipsoid(3, 1)).weights()) == [1, 1, 1]


def test_classify():
    assert classify(FIG2) is MomentKind.CONVEX
    assert classify([(0, 0), (2, 0), (0, 2)]) is MomentKind.CONVEX
    assert classify([(0, 0), (3, 0), (1, 1), (0, 3)]) is MomentKind.CONCAVE
    assert classify([(1, 0), (2, 0), (1, 2)]) is MomentKind.NEITHER
    with pytest.raises(GeometryError):
        MomentDomain.convex([(0, 0), (3, 0), (1, 1), (0, 3)])


def test_non_polytopal_sequence():
    with pytest.raises(PolytopalityError):
        reconstruct(WeightTree.from_flat(1, [1, 1]))


def test_reconstruct_fig2():
    d = reconstruct(WeightTree.from_flat(3, [1, 1, 1, 1]))
    assert d.area() == F(5, 2)
    assert wt(d).sequence() == (3, (1, 1, 1, 1))


def test_minkowski_doubles_fig2():
    w = wt(MomentDomain.convex(FIG2))
    assert wt(minkowski(w, w)).sequence() == (6, (2, 2, 2, 2))
    assert nodewise_sum(w, w).same_tree(w.scaled(2))


def test_tree_key_ignores_child_order_and_zeros():
    a = WeightNode(2, (WeightNode(1), None))
    b = WeightNode(2, (None, WeightNode(1)))
    c = WeightNode(2, (WeightNode(1), WeightNode(0)))
    assert a.key() == b.key() == c.key()


# ---------------------------------------------------------------- properties


@st.composite
def concave_boundaries(draw):
    n = draw(st.integers(1, 4))
    edges = draw(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4)), min_size=n, max_size=n))
    # a convex decreasing polyline: slopes -dy/dx increase along the way
    edges = sorted(set(edges), key=lambda e: F(-e[1], e[0]))
    y = sum(dy for _, dy in edges)
    pts, x = [(0, y)], 0
    for dx, dy in edges:
        x, y = x + dx, y - dy
        pts.append((x, y))
    return pts


@given(concave_boundaries())
def test_concave_area_identity(pts):
    d = MomentDomain.concave(pts)
    w = wt_concave(d)
    assert 2 * d.area() == w.volume2()


@given(st.integers(2, 8), st.lists(st.integers(1, 3), max_size=5))
def test_convex_area_identity_and_roundtrip(c, ws):
    try:
        w = WeightTree.from_flat(c, ws)
        d = reconstruct(w)
    except PolytopalityError:
        assume(False)
    assert 2 * d.area() == c * c - sum(a * a for a in ws)
    back = wt(d)
    assert back.same_sequence(w)
    # canonical trees survive a second round trip node for node
    assert wt(reconstruct(back)).same_tree(back)
