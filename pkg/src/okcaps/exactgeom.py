"""Exact rational scalars and convex lattice-polygon primitives.

Every scalar in the package is a :class:`fractions.Fraction`.  Polygons are
closed convex sets stored by their minimal counterclockwise vertex list.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
Point = tuple[Fraction, Fraction]
Matrix2 = tuple[tuple[int, int], tuple[int, int]]


class GeometryError(ValueError):
    pass


def rat(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are refused: they would silently smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def rat_str(q: Fraction) -> str:
    return str(Fraction(q))


def floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


@dataclass(frozen=True)
class LatticeVec:
    x: int
    y: int

    def __post_init__(self):
        if not (isinstance(self.x, int) and isinstance(self.y, int)):
            raise TypeError("lattice vectors have integer coordinates")

    def __add__(self, other: LatticeVec) -> LatticeVec:
        return LatticeVec(self.x + other.x, self.y + other.y)

    def __sub__(self, other: LatticeVec) -> LatticeVec:
        return LatticeVec(self.x - other.x, self.y - other.y)

    def __neg__(self) -> LatticeVec:
        return LatticeVec(-self.x, -self.y)

    def __mul__(self, k: int) -> LatticeVec:
        return LatticeVec(self.x * k, self.y * k)

    __rmul__ = __mul__

    def cross(self, other: LatticeVec) -> int:
        return self.x * other.y - self.y * other.x

    def primitive(self) -> LatticeVec:
        g = math.gcd(self.x, self.y)
        if g == 0:
            raise GeometryError("zero vector has no primitive direction")
        return LatticeVec(self.x // g, self.y // g)

    def lattice_length(self) -> int:
        return math.gcd(self.x, self.y)

    def __iter__(self):
        yield self.x
        yield self.y


def _pt(p) -> Point:
    x, y = p
    return (rat(x), rat(y))


def convex_hull(points: Iterable) -> list[Point]:
    """Andrew's monotone chain; counterclockwise, collinear points dropped."""
    pts = sorted(set(_pt(p) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and cross(
                out[-1][0] - out[-2][0], out[-1][1] - out[-2][1],
                p[0] - out[-2][0], p[1] - out[-2][1],
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return hull


def _canonical_start(vertices: list[Point]) -> list[Point]:
    if not vertices:
        return vertices
    i = min(range(len(vertices)), key=lambda j: (vertices[j][1], vertices[j][0]))
    return vertices[i:] + vertices[:i]


@dataclass(frozen=True)
class Polygon:
    """Closed convex polygon, vertices counterclockwise from the lowest-leftmost one.

    Degenerate polygons (a point or a segment) are representable; the empty
    polygon has no vertices.
    """

    vertices: tuple[Point, ...]

    @classmethod
    def from_points(cls, points: Iterable) -> Polygon:
        return cls(tuple(_canonical_start(convex_hull(points))))

    @classmethod
    def triangle(cls, a) -> Polygon:
        a = rat(a)
        return cls.from_points([(0, 0), (a, 0), (0, a)])

    @classmethod
    def rectangle(cls, a, b) -> Polygon:
        return cls.from_points([(0, 0), (a, 0), (a, b), (0, b)])

    def __len__(self) -> int:
        return len(self.vertices)

    def is_empty(self) -> bool:
        return not self.vertices

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        if len(v) < 2:
            return []
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def area(self) -> Fraction:
        v = self.vertices
        if len(v) < 3:
            return Fraction(0)
        s = sum((cross(p[0], p[1], q[0], q[1]) for p, q in self.edges()), Fraction(0))
        return s / 2

    def is_integral(self) -> bool:
        return all(x.denominator == 1 and y.denominator == 1 for x, y in self.vertices)

    def boundary_count(self) -> int:
        """Lattice points on the boundary of an integral polygon."""
        if not self.is_integral():
            raise GeometryError("boundary_count needs lattice vertices")
        v = self.vertices
        if len(v) == 1:
            return 1
        total = sum(
            math.gcd(int(q[0] - p[0]), int(q[1] - p[1])) for p, q in self.edges()
        )
        # a segment's two "edges" trace it twice
        return total // 2 + 1 if len(v) == 2 else total

    def width(self) -> Fraction:
        return max(x for x, _ in self.vertices)

    def height(self) -> Fraction:
        return max(y for _, y in self.vertices)

    def contains(self, p) -> bool:
        x, y = _pt(p)
        v = self.vertices
        if not v:
            return False
        if len(v) == 1:
            return v[0] == (x, y)
        if len(v) == 2:
            (ax, ay), (bx, by) = v
            if cross(bx - ax, by - ay, x - ax, y - ay) != 0:
                return False
            return min(ax, bx) <= x <= max(ax, bx) and min(ay, by) <= y <= max(ay, by)
        return all(
            cross(q[0] - p0[0], q[1] - p0[1], x - p0[0], y - p0[1]) >= 0
            for p0, q in self.edges()
        )

    def scale(self, lam) -> Polygon:
        lam = rat(lam)
        return Polygon.from_points([(lam * x, lam * y) for x, y in self.vertices])

    def translate(self, t) -> Polygon:
        tx, ty = _pt(t)
        return Polygon.from_points([(x + tx, y + ty) for x, y in self.vertices])


def support_eval(P: Polygon, v) -> Fraction:
    """max over p in P of v.x * p.y - v.y * p.x."""
    if P.is_empty():
        raise GeometryError("degenerate polygon")
    vx, vy = v
    return max(vx * y - vy * x for x, y in P.vertices)


def _row_interval(P: Polygon, y: Fraction):
    """x-extent of the horizontal slice of P at height y, or None."""
    xs = []
    v = P.vertices
    if len(v) == 1:
        return (v[0][0], v[0][0]) if v[0][1] == y else None
    segs = [(v[0], v[1])] if len(v) == 2 else P.edges()
    for (ax, ay), (bx, by) in segs:
        if ay == by:
            if ay == y:
                xs += [ax, bx]
            continue
        if min(ay, by) <= y <= max(ay, by):
            xs.append(ax + (bx - ax) * (y - ay) / (by - ay))
    if not xs:
        return None
    return min(xs), max(xs)


def lattice_count(P: Polygon) -> int:
    """Number of integer points in the closed polygon (row-by-row)."""
    if P.is_empty():
        return 0
    ys = [y for _, y in P.vertices]
    total = 0
    for yi in range(ceil(min(ys)), floor(max(ys)) + 1):
        iv = _row_interval(P, Fraction(yi))
        if iv is None:
            continue
        lo, hi = ceil(iv[0]), floor(iv[1])
        if hi >= lo:
            total += hi - lo + 1
    return total


def det2(M: Matrix2) -> int:
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def apply_affine(M: Matrix2, t, p) -> Point:
    x, y = _pt(p)
    tx, ty = _pt(t)
    return (M[0][0] * x + M[0][1] * y + tx, M[1][0] * x + M[1][1] * y + ty)


def unimodular_apply(P: Polygon, M: Matrix2, t=(0, 0)) -> Polygon:
    if not all(isinstance(e, int) for row in M for e in row):
        raise GeometryError("matrix entries must be integers")
    if abs(det2(M)) != 1:
        raise GeometryError(f"matrix {M} is not unimodular")
    return Polygon.from_points(apply_affine(M, t, p) for p in P.vertices)


def minkowski_sum(P: Polygon, Q: Polygon) -> Polygon:
    if P.is_empty() or Q.is_empty():
        return Polygon(())
    return Polygon.from_points(
        (p[0] + q[0], p[1] + q[1]) for p in P.vertices for q in Q.vertices
    )


def solve_linear(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve the square system A x = b exactly; raises on singular A."""
    n = len(A)
    M = [[Fraction(e) for e in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [e * inv for e in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def is_negative_definite(G: Sequence[Sequence[Fraction]]) -> bool:
    """Exact test via leading principal minors of -G (symmetric elimination)."""
    n = len(G)
    M = [[-Fraction(e) for e in row] for row in G]
    for k in range(n):
        if M[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            for j in range(k, n):
                M[i][j] -= f * M[k][j]
    return True


def sqrt_bounds(q, eps=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(q) <= hi with hi - lo <= eps."""
    q = rat(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    if q == 0:
        return Fraction(0), Fraction(0)
    scale = 1
    while Fraction(1, scale) > eps / 2:
        scale *= 10
    # sqrt(p/r) = sqrt(p*r)/r
    p, r = q.numerator, q.denominator
    s = math.isqrt(p * r * scale * scale)
    lo = Fraction(s, r * scale)
    hi = Fraction(s + 1, r * scale)
    if lo * lo == q:
        return lo, lo
    return lo, hi


def sqrt_approx(q, eps=Fraction(1, 10**12)) -> Fraction:
    lo, hi = sqrt_bounds(q, eps)
    return (lo + hi) / 2


def exact_sqrt(q) -> Fraction | None:
    """sqrt(q) when q is the square of a rational, else None."""
    q = rat(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None
