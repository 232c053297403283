"""Moment domains and their weight sequences.

A convex domain is stored as a :class:`Polygon`; a concave one by its outer
boundary, a convex decreasing polyline running from the y-axis to the x-axis.
Weight sequences are binary trees: each node is a triangle cut at a smooth
corner, and its two children sit at the two vertices the cut creates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exactgeom import (
    GeometryError,
    LatticeVec,
    Point,
    Polygon,
    cross,
    minkowski_sum,
    rat,
)

MAX_NODES = 100_000


class PolytopalityError(ValueError):
    """A weight tree cannot be realized by corner cuts of its head triangle."""

    def __init__(self, message: str, node: Optional[WeightNode] = None):
        super().__init__(message)
        self.node = node


class MomentKind(str, Enum):
    CONVEX = "convex"
    CONCAVE = "concave"
    NEITHER = "neither"


# ---------------------------------------------------------------- weight trees


@dataclass(frozen=True)
class WeightNode:
    w: Fraction
    # (x-side child, y-side child) in the local frame of the corner
    children: tuple[Optional[WeightNode], Optional[WeightNode]] = (None, None)

    def __post_init__(self):
        object.__setattr__(self, "w", rat(self.w))
        if self.w < 0:
            raise ValueError("weights are nonnegative")
        kids = tuple(self.children) + (None,) * (2 - len(self.children))
        object.__setattr__(self, "children", kids[:2])

    def weights(self) -> list[Fraction]:
        out = [self.w]
        for ch in self.children:
            if ch is not None:
                out.extend(ch.weights())
        return out

    def is_zero(self) -> bool:
        return all(w == 0 for w in self.weights())

    def key(self):
        """Canonical form: zero subtrees dropped, children unordered."""
        kids = sorted(
            (ch.key() for ch in self.children if ch is not None and not ch.is_zero()),
        )
        return (self.w, tuple(kids))

    def scaled(self, lam: Fraction) -> WeightNode:
        return WeightNode(
            self.w * lam,
            tuple(None if ch is None else ch.scaled(lam) for ch in self.children),
        )


@dataclass(frozen=True)
class WeightTree:
    """Weight sequence indexed by a rooted binary tree.

    ``head`` is the side of the circumscribing triangle (convex case only).
    For convex trees ``cuts`` is the pair of roots hanging at the corners
    (head, 0) and (0, head); for concave trees it holds the single root.
    """

    head: Optional[Fraction]
    cuts: tuple[Optional[WeightNode], ...] = ()
    flat: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.head is not None:
            object.__setattr__(self, "head", rat(self.head))
            if self.head <= 0:
                raise ValueError("head must be positive")
        object.__setattr__(self, "cuts", tuple(self.cuts))

    @classmethod
    def from_flat(cls, head, weights: Iterable) -> WeightTree:
        """Interpret (c; a_1, ..., a_n) as a tree by greedy corner placement.

        Concave lists (head None) carry no geometry and become a forest of
        leaves.
        """
        ws = [rat(w) for w in weights]
        if head is None:
            return cls(None, tuple(WeightNode(w) for w in ws), flat=True)
        tree, _ = _greedy_place(rat(head), ws)
        return tree

    @property
    def is_convex(self) -> bool:
        return self.head is not None

    def weights(self) -> list[Fraction]:
        out: list[Fraction] = []
        for root in self.cuts:
            if root is not None:
                out.extend(root.weights())
        return out

    def positive_weights(self) -> list[Fraction]:
        return sorted((w for w in self.weights() if w > 0), reverse=True)

    def sequence(self) -> tuple[Optional[Fraction], tuple[Fraction, ...]]:
        return self.head, tuple(self.positive_weights())

    def key(self):
        roots = sorted(r.key() for r in self.cuts if r is not None and not r.is_zero())
        return (self.head, tuple(roots))

    def same_tree(self, other: WeightTree) -> bool:
        return self.key() == other.key()

    def same_sequence(self, other: WeightTree) -> bool:
        return self.sequence() == other.sequence()

    def scaled(self, lam) -> WeightTree:
        lam = rat(lam)
        return WeightTree(
            None if self.head is None else self.head * lam,
            tuple(None if r is None else r.scaled(lam) for r in self.cuts),
            flat=self.flat,
        )

    def volume2(self) -> Fraction:
        """c^2 - sum a_i^2 (convex) or sum a_i^2 (concave): twice the area."""
        sq = sum((w * w for w in self.weights()), Fraction(0))
        return self.head * self.head - sq if self.is_convex else sq

    def __str__(self) -> str:
        ws = ",".join(str(w) for w in self.positive_weights())
        return f"({self.head};{ws})" if self.is_convex else f"({ws})"


# ---------------------------------------------------------------- domains


@dataclass(frozen=True)
class MomentDomain:
    kind: MomentKind
    polygon: Optional[Polygon] = None
    # concave only: convex decreasing polyline from (0, b) to (a, 0)
    boundary: tuple[Point, ...] = ()

    @classmethod
    def convex(cls, points: Iterable) -> MomentDomain:
        kind, region = _classify(list(points))
        if kind is not MomentKind.CONVEX:
            raise GeometryError("not a convex moment domain")
        return cls(MomentKind.CONVEX, polygon=Polygon.from_points(region))

    @classmethod
    def concave(cls, points: Iterable) -> MomentDomain:
        kind, region = _classify(list(points), prefer_concave=True)
        if kind is not MomentKind.CONCAVE:
            raise GeometryError("not a concave moment domain")
        return cls(MomentKind.CONCAVE, boundary=_outer_boundary(region))

    @classmethod
    def triangle(cls, a) -> MomentDomain:
        return cls(MomentKind.CONVEX, polygon=Polygon.triangle(a))

    @classmethod
    def ellipsoid(cls, a, b) -> MomentDomain:
        """The concave triangle with legs a (x-axis) and b (y-axis)."""
        return cls.concave([(0, rat(b)), (rat(a), 0)])

    @classmethod
    def rectangle(cls, a, b) -> MomentDomain:
        return cls(MomentKind.CONVEX, polygon=Polygon.rectangle(rat(a), rat(b)))

    @classmethod
    def from_points(cls, points: Iterable) -> MomentDomain:
        kind, region = _classify(list(points))
        if kind is MomentKind.CONVEX:
            return cls(kind, polygon=Polygon.from_points(region))
        if kind is MomentKind.CONCAVE:
            return cls(kind, boundary=_outer_boundary(region))
        raise GeometryError("not a moment domain")

    def region_vertices(self) -> list[Point]:
        """Counterclockwise vertices of the closed region, origin first."""
        if self.kind is MomentKind.CONVEX:
            return list(self.polygon.vertices)
        return [(Fraction(0), Fraction(0))] + list(reversed(self.boundary))

    def area(self) -> Fraction:
        v = self.region_vertices()
        s = sum(
            (cross(v[i][0], v[i][1], v[(i + 1) % len(v)][0], v[(i + 1) % len(v)][1])
             for i in range(len(v))),
            Fraction(0),
        )
        return s / 2

    def contains(self, p) -> bool:
        x, y = rat(p[0]), rat(p[1])
        if x < 0 or y < 0:
            return False
        if self.kind is MomentKind.CONVEX:
            return self.polygon.contains((x, y))
        b = self.boundary
        if x > b[-1][0]:
            return False
        for (ax, ay), (bx, by) in zip(b, b[1:]):
            if ax <= x <= bx:
                if bx == ax:
                    return y <= max(ay, by)
                return y <= ay + (by - ay) * (x - ax) / (bx - ax)
        return False

    def scaled(self, lam) -> MomentDomain:
        lam = rat(lam)
        if self.kind is MomentKind.CONVEX:
            return MomentDomain(self.kind, polygon=self.polygon.scale(lam))
        return MomentDomain(
            self.kind, boundary=tuple((lam * x, lam * y) for x, y in self.boundary)
        )

    def width(self) -> Fraction:
        return max(x for x, _ in self.region_vertices())

    def height(self) -> Fraction:
        return max(y for _, y in self.region_vertices())


def _to_points(points) -> list[Point]:
    out = []
    for p in points:
        x, y = rat(p[0]), rat(p[1])
        if not out or out[-1] != (x, y):
            out.append((x, y))
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _signed_area2(v: Sequence[Point]) -> Fraction:
    return sum(
        (cross(v[i][0], v[i][1], v[(i + 1) % len(v)][0], v[(i + 1) % len(v)][1])
         for i in range(len(v))),
        Fraction(0),
    )


def _drop_collinear(v: list[Point], closed: bool) -> list[Point]:
    changed = True
    while changed and len(v) > 2:
        changed = False
        n = len(v)
        rng = range(n) if closed else range(1, n - 1)
        for i in rng:
            a, b, c = v[i - 1], v[i], v[(i + 1) % n]
            if cross(b[0] - a[0], b[1] - a[1], c[0] - b[0], c[1] - b[1]) == 0:
                # only drop true pass-through points, not spikes
                if (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) > 0:
                    del v[i]
                    changed = True
                    break
    return v


def _classify(points, prefer_concave: bool = False) -> tuple[MomentKind, list[Point]]:
    pts = _to_points(points)
    if not pts:
        raise GeometryError("empty input")
    if any(x < 0 or y < 0 for x, y in pts):
        return MomentKind.NEITHER, pts
    origin = (Fraction(0), Fraction(0))
    if origin not in pts:
        first, last = pts[0], pts[-1]
        if first[0] == 0 and last[1] == 0:
            pts = [origin] + list(reversed(pts))
        elif first[1] == 0 and last[0] == 0:
            pts = [origin] + pts
        else:
            return MomentKind.NEITHER, pts
    if len(pts) < 3:
        return MomentKind.NEITHER, pts
    i = pts.index(origin)
    pts = pts[i:] + pts[:i]
    if _signed_area2(pts) < 0:
        pts = [pts[0]] + list(reversed(pts[1:]))
    if _signed_area2(pts) == 0:
        return MomentKind.NEITHER, pts
    pts = _drop_collinear(pts, closed=True)
    if pts[0] != origin:
        return MomentKind.NEITHER, pts
    # origin neighbourhood: edges leaving the origin run along the axes
    nxt, prv = pts[1], pts[-1]
    if not (nxt[1] == 0 and nxt[0] > 0 and prv[0] == 0 and prv[1] > 0):
        return MomentKind.NEITHER, pts
    outer = pts[1:]  # from (a, 0) counterclockwise to (0, b)
    turns = [
        cross(outer[j][0] - outer[j - 1][0], outer[j][1] - outer[j - 1][1],
              outer[j + 1][0] - outer[j][0], outer[j + 1][1] - outer[j][1])
        for j in range(1, len(outer) - 1)
    ]
    # turns at the axis points as well
    convex_region = all(t >= 0 for t in turns) and _is_convex_polygon(pts)
    concave_region = (
        all(t <= 0 for t in turns)
        and all(outer[j + 1][0] <= outer[j][0] and outer[j + 1][1] >= outer[j][1]
                for j in range(len(outer) - 1))
    )
    if convex_region and (not prefer_concave or not concave_region):
        return MomentKind.CONVEX, pts
    if concave_region:
        return MomentKind.CONCAVE, pts
    return MomentKind.NEITHER, pts


def _is_convex_polygon(v: Sequence[Point]) -> bool:
    n = len(v)
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        if cross(b[0] - a[0], b[1] - a[1], c[0] - b[0], c[1] - b[1]) < 0:
            return False
    return True


def _outer_boundary(region: list[Point]) -> tuple[Point, ...]:
    return tuple(reversed(region[1:]))


def classify(points: Iterable) -> MomentKind:
    """Convex, concave or neither; triangles report as convex."""
    kind, _ = _classify(list(points))
    return kind


# ---------------------------------------------------------------- decomposition


def _concave_tree(boundary: Sequence[Point], budget: list[int]) -> Optional[WeightNode]:
    if len(boundary) < 2:
        return None
    b0, bn = boundary[0], boundary[-1]
    if b0[1] <= 0 or bn[0] <= 0:
        return None
    budget[0] -= 1
    if budget[0] < 0:
        raise GeometryError("weight expansion did not terminate (irrational slope?)")
    sums = [x + y for x, y in boundary]
    lam = min(sums)
    i1 = sums.index(lam)
    i2 = len(sums) - 1 - sums[::-1].index(lam)
    # piece along the x-axis, straightened by (x, y) -> (x + y - lam, y)
    xs = [(x + y - lam, y) for x, y in boundary[i2:]]
    # piece along the y-axis, straightened by (x, y) -> (x, x + y - lam)
    ys = [(x, x + y - lam) for x, y in boundary[: i1 + 1]]
    return WeightNode(lam, (_concave_tree(xs, budget), _concave_tree(ys, budget)))


def wt_concave(d: MomentDomain) -> WeightTree:
    if d.kind is not MomentKind.CONCAVE:
        raise GeometryError("wt_concave needs a concave moment domain")
    root = _concave_tree(list(d.boundary), [MAX_NODES])
    return WeightTree(None, (root,))


def _convex_components(P: Polygon):
    """Head c and the two concave boundaries of Delta(c) minus P."""
    v = list(P.vertices)  # counterclockwise from the origin
    c = max(x + y for x, y in v)
    outer = v[1:]  # (a, 0) ... (0, b)
    sums = [x + y for x, y in outer]
    j1 = sums.index(c)
    j2 = len(sums) - 1 - sums[::-1].index(c)
    # corner (c, 0): (x, y) -> (c - x - y, y)
    right = [(c - x - y, y) for x, y in reversed(outer[: j1 + 1])]
    # corner (0, c): (x, y) -> (x, c - x - y)
    top = [(x, c - x - y) for x, y in reversed(outer[j2:])]
    return c, right, top


def wt_convex(d: MomentDomain) -> WeightTree:
    if d.kind is not MomentKind.CONVEX:
        raise GeometryError("wt_convex needs a convex moment domain")
    c, right, top = _convex_components(d.polygon)
    budget = [MAX_NODES]
    return WeightTree(c, (_concave_tree(right, budget), _concave_tree(top, budget)))


# ---------------------------------------------------------------- reconstruction

_RIGHT_FRAME = (LatticeVec(-1, 0), LatticeVec(-1, 1))
_TOP_FRAME = (LatticeVec(1, -1), LatticeVec(0, -1))


class _Cutter:
    """Corner cutting on a mutable counterclockwise vertex list."""

    def __init__(self, c: Fraction):
        self.c = c
        z = Fraction(0)
        self.verts: list[Point] = [(z, z), (c, z), (z, c)]

    def _edge_len(self, p: Point, q: Point, e: LatticeVec) -> Optional[Fraction]:
        dx, dy = q[0] - p[0], q[1] - p[1]
        if cross(dx, dy, e.x, e.y) != 0:
            return None
        t = dx / e.x if e.x else dy / e.y
        return t if t > 0 else None

    def fits(self, p: Point, frame, a: Fraction) -> bool:
        if p not in self.verts:
            return False
        i = self.verts.index(p)
        n = len(self.verts)
        prv, nxt = self.verts[i - 1], self.verts[(i + 1) % n]
        ex, ey = frame
        lp = self._edge_len(p, prv, ex)
        ln = self._edge_len(p, nxt, ey)
        return lp is not None and ln is not None and lp >= a and ln >= a

    def cut(self, p: Point, frame, a: Fraction) -> tuple[Point, Point]:
        ex, ey = frame
        i = self.verts.index(p)
        q1 = (p[0] + a * ex.x, p[1] + a * ex.y)
        q2 = (p[0] + a * ey.x, p[1] + a * ey.y)
        new = [q for q in (q1, q2) if q not in self.verts]
        self.verts[i:i + 1] = new
        return q1, q2

    def polygon(self) -> Polygon:
        return Polygon.from_points(self.verts)


def _child_frames(frame):
    ex, ey = frame
    return (ex, ey - ex), (ex - ey, ey)


def _cut_subtree(cutter: _Cutter, node: Optional[WeightNode], p: Point, frame) -> None:
    if node is None or node.is_zero():
        return
    if node.w == 0:
        raise PolytopalityError("zero cut with nonzero descendants", node)
    if not cutter.fits(p, frame, node.w):
        raise PolytopalityError(f"cut of size {node.w} does not fit at {p}", node)
    q1, q2 = cutter.cut(p, frame, node.w)
    f1, f2 = _child_frames(frame)
    _cut_subtree(cutter, node.children[0], q1, f1)
    _cut_subtree(cutter, node.children[1], q2, f2)


def _corner_points(c: Fraction):
    z = Fraction(0)
    return [((c, z), _RIGHT_FRAME), ((z, c), _TOP_FRAME)]


def _finish(poly: Polygon, culprit=None) -> MomentDomain:
    if poly.area() <= 0:
        raise PolytopalityError("cuts consume the whole triangle", culprit)
    kind, region = _classify(list(poly.vertices))
    if kind is not MomentKind.CONVEX:
        raise PolytopalityError("cuts do not leave a convex moment domain", culprit)
    return MomentDomain(MomentKind.CONVEX, polygon=Polygon.from_points(region))


def _greedy_place(c: Fraction, weights: Sequence[Fraction]):
    cutter = _Cutter(c)
    corners = [[p, f, None, None] for p, f in _corner_points(c)]  # point, frame, parent, side
    roots: list[Optional[dict]] = [None, None]
    for a in weights:
        if a == 0:
            continue
        if a < 0:
            raise ValueError("weights are nonnegative")
        for idx, (p, frame, parent, side) in enumerate(corners):
            if cutter.fits(p, frame, a):
                break
        else:
            raise PolytopalityError(f"no corner fits a cut of size {a}")
        corners.pop(idx)
        q1, q2 = cutter.cut(p, frame, a)
        node = {"w": a, "children": [None, None]}
        if parent is None:
            roots[side if side is not None else _root_slot(p, c)] = node
        else:
            parent["children"][side] = node
        f1, f2 = _child_frames(frame)
        corners.append([q1, f1, node, 0])
        corners.append([q2, f2, node, 1])

    def freeze(nd):
        if nd is None:
            return None
        return WeightNode(nd["w"], tuple(freeze(ch) for ch in nd["children"]))

    tree = WeightTree(c, (freeze(roots[0]), freeze(roots[1])), flat=True)
    return tree, cutter.polygon()


def _root_slot(p: Point, c: Fraction) -> int:
    return 0 if p == (c, Fraction(0)) else 1


def reconstruct(w: WeightTree) -> MomentDomain:
    """Realize a convex weight tree by cutting corners off Delta(head)."""
    if w.head is None:
        raise PolytopalityError("only convex (headed) trees can be reconstructed")
    if w.flat:
        _, poly = _greedy_place(w.head, w.weights())
        dom = _finish(poly)
        if not wt_convex(dom).same_sequence(w):
            raise PolytopalityError("greedy placement does not realize the sequence")
        return dom
    cutter = _Cutter(w.head)
    roots = list(w.cuts) + [None] * (2 - len(w.cuts))
    if len(roots) > 2:
        raise PolytopalityError("a convex tree has at most two roots")
    for root in roots[:2]:
        if root is not None and root.w > w.head:
            raise PolytopalityError("root weight exceeds head", root)
    for root, (p, frame) in zip(roots, _corner_points(w.head)):
        _cut_subtree(cutter, root, p, frame)
    dom = _finish(cutter.polygon())
    if not wt_convex(dom).same_tree(w):
        raise PolytopalityError("tree is not the weight expansion of its realization")
    return dom


def _pad(a: Optional[WeightNode], b: Optional[WeightNode]):
    if a is None and b is None:
        return None, None
    a = a or WeightNode(0)
    b = b or WeightNode(0)
    pairs = [_pad(x, y) for x, y in zip(a.children, b.children)]
    return (
        WeightNode(a.w, tuple(p[0] for p in pairs)),
        WeightNode(b.w, tuple(p[1] for p in pairs)),
    )


def pad_trees(w1: WeightTree, w2: WeightTree) -> tuple[WeightTree, WeightTree]:
    r1 = list(w1.cuts) + [None] * (2 - len(w1.cuts))
    r2 = list(w2.cuts) + [None] * (2 - len(w2.cuts))
    pairs = [_pad(x, y) for x, y in zip(r1, r2)]
    return (
        WeightTree(w1.head, tuple(p[0] for p in pairs)),
        WeightTree(w2.head, tuple(p[1] for p in pairs)),
    )


def nodewise_sum(w1: WeightTree, w2: WeightTree) -> WeightTree:
    def add(a, b):
        if a is None:
            return None
        return WeightNode(a.w + b.w, tuple(add(x, y) for x, y in zip(a.children, b.children)))

    p1, p2 = pad_trees(_as_tree(w1), _as_tree(w2))
    return WeightTree(p1.head + p2.head, tuple(add(a, b) for a, b in zip(p1.cuts, p2.cuts)))


def _as_tree(w: WeightTree) -> WeightTree:
    if not w.flat:
        return w
    tree, _ = _greedy_place(w.head, w.weights())
    return WeightTree(tree.head, tree.cuts)


def minkowski(w1: WeightTree, w2: WeightTree) -> MomentDomain:
    """Minkowski sum of the two realizations; its tree is the nodewise sum."""
    if w1.head is None or w2.head is None:
        raise PolytopalityError("Minkowski sums need convex trees")
    t1, t2 = pad_trees(_as_tree(w1), _as_tree(w2))
    d1, d2 = reconstruct(t1), reconstruct(t2)
    return MomentDomain(MomentKind.CONVEX, polygon=minkowski_sum(d1.polygon, d2.polygon))


def wt(d: MomentDomain) -> WeightTree:
    return wt_convex(d) if d.kind is MomentKind.CONVEX else wt_concave(d)
