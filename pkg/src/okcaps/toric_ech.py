"""ECH capacities of balls, ellipsoids, unions and toric domains.

For a convex domain the k-th capacity is the least length of a convex
lattice polygon P with at least k + 1 lattice points, where the length sums,
over the edges e of P, the support value of the domain against e.  When P
has a right-angle corner at the origin this is the usual lattice-path count.
"""
from __future__ import annotations

import heapq
import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .exactgeom import GeometryError, Polygon, floor, lattice_count, rat, support_eval
from .moment import MomentDomain, MomentKind, wt_concave


@dataclass
class CapacitySeq:
    """A capacity sequence k -> c_k with a memo table."""

    source: str
    fn: Callable[[int], Fraction]
    _memo: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __call__(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError("k must be nonnegative")
        with self._lock:
            if k in self._memo:
                return self._memo[k]
        v = self.fn(k)
        with self._lock:
            self._memo[k] = v
        return v

    def table(self, kmax: int) -> list[Fraction]:
        return [self(k) for k in range(kmax + 1)]


def _positive(*xs) -> list[Fraction]:
    out = [rat(x) for x in xs]
    if any(x <= 0 for x in out):
        raise ValueError("radii must be positive")
    return out


def ball_degree(k: int) -> int:
    """Smallest d >= 0 with d(d+3)/2 >= k."""
    d = max(0, (math.isqrt(8 * k + 9) - 3) // 2)
    while d * (d + 3) // 2 < k:
        d += 1
    while d > 0 and (d - 1) * (d + 2) // 2 >= k:
        d -= 1
    return d


def ball_cap(a, k: int) -> Fraction:
    (a,) = _positive(a)
    if k < 0:
        raise ValueError("k must be nonnegative")
    return a * ball_degree(k)


def ellipsoid_table(a, b, kmax: int) -> list[Fraction]:
    """The kmax+1 smallest values of m*a + n*b (with multiplicity)."""
    a, b = _positive(a, b)
    def row(m):
        return (m * a + n * b for n in itertools.count())

    rows = [row(m) for m in range(kmax + 1)]
    return list(itertools.islice(heapq.merge(*rows), kmax + 1))


def ellipsoid_cap(a, b, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return ellipsoid_table(a, b, k)[k]


def ball_seq(a) -> CapacitySeq:
    (a,) = _positive(a)
    return CapacitySeq(f"B({a})", lambda k: ball_cap(a, k))


def ellipsoid_seq(a, b) -> CapacitySeq:
    a, b = _positive(a, b)
    return CapacitySeq(f"E({a},{b})", lambda k: ellipsoid_cap(a, b, k))


def union_table(seqs: Sequence[CapacitySeq], kmax: int) -> list[Fraction]:
    """max over k = sum k_i of sum c_{k_i}(seq_i), for every k <= kmax."""
    best = [Fraction(0)] * (kmax + 1)
    for i, s in enumerate(seqs):
        vals = s.table(kmax)
        if i == 0:
            best = list(vals)
            continue
        # only indices where the summand jumps matter: using the first index
        # of each plateau leaves the most room for the other summands
        jumps = [j for j in range(kmax + 1) if j == 0 or vals[j] != vals[j - 1]]
        best = [
            max(best[k - j] + vals[j] for j in jumps if j <= k) for k in range(kmax + 1)
        ]
    return best


def union_cap(seqs: Sequence[CapacitySeq], k: int) -> Fraction:
    if not seqs:
        return Fraction(0)
    return union_table(seqs, k)[k]


def _ball_union_table(weights: Sequence[Fraction], kmax: int) -> list[Fraction]:
    ws = sorted((w for w in weights if w > 0), reverse=True)
    if not ws:
        return [Fraction(0)] * (kmax + 1)
    # degree d is first reached at index (d - 1)(d + 2)/2 + 1
    jumps = [(0, 0)]
    d = 1
    while (d - 1) * (d + 2) // 2 + 1 <= kmax:
        jumps.append(((d - 1) * (d + 2) // 2 + 1, d))
        d += 1
    best = [ws[0] * ball_degree(k) for k in range(kmax + 1)]
    for w in ws[1:]:
        best = [max(best[k - j] + w * dd for j, dd in jumps if j <= k) for k in range(kmax + 1)]
    return best


def concave_table(d: MomentDomain, kmax: int) -> list[Fraction]:
    if d.kind is not MomentKind.CONCAVE:
        raise GeometryError("concave_cap needs a concave moment domain")
    return _ball_union_table(wt_concave(d).weights(), kmax)


def concave_cap(d: MomentDomain, k: int) -> Fraction:
    return concave_table(d, k)[k]


# ---------------------------------------------------------------- convex domains


def _primitive(x: int, y: int) -> tuple[int, int]:
    g = math.gcd(x, y)
    return x // g, y // g


def _angle_key(e: tuple[int, int]):
    """Sort key for the counterclockwise angle of e in [0, 2pi)."""
    x, y = e
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    # within a half plane, cotangent decreases with the angle
    return (half, -Fraction(x, abs(x) + abs(y)) if half == 0 else Fraction(x, abs(x) + abs(y)))


def _hilbert_basis(u: tuple[int, int], v: tuple[int, int]) -> list[tuple[int, int]]:
    """Hilbert basis of the cone spanned by primitive u, v with det(u, v) > 0."""
    det = u[0] * v[1] - u[1] * v[0]
    if det <= 0:
        raise GeometryError("cone must be strictly convex and counterclockwise")
    if det == 1:
        return [u, v]
    xs = [0, u[0], v[0], u[0] + v[0]]
    ys = [0, u[1], v[1], u[1] + v[1]]

    def coords(p):
        # det times the coefficients of u and v
        return p[0] * v[1] - p[1] * v[0], u[0] * p[1] - u[1] * p[0]

    pts = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            a, b = coords((x, y))
            if (x, y) != (0, 0) and 0 <= a <= det and 0 <= b <= det:
                pts.append((x, y))

    def in_cone(p):
        a, b = coords(p)
        return p != (0, 0) and a >= 0 and b >= 0

    return [
        p for p in pts
        if not any(q != p and in_cone((p[0] - q[0], p[1] - q[1])) for q in pts)
    ]


def edge_directions(P: Polygon) -> list[tuple[int, int]]:
    """Primitive edge vectors an optimal lattice polygon needs, by angle.

    The length of an edge e is linear in e on each cone between consecutive
    edge directions of P.  Any other edge splits into Hilbert-basis vectors
    of its cone: the length is unchanged and the polygon only grows.
    """
    rays = []
    for (ax, ay), (bx, by) in P.edges():
        dx, dy = bx - ax, by - ay
        den = math.lcm(dx.denominator, dy.denominator)
        rays.append(_primitive(int(dx * den), int(dy * den)))
    rays = sorted(set(rays), key=_angle_key)
    dirs: set[tuple[int, int]] = set()
    for u, v in zip(rays, rays[1:] + rays[:1]):
        dirs.update(_hilbert_basis(u, v))
    return sorted(dirs, key=_angle_key)


def edge_length(P: Polygon, e) -> Fraction:
    """Length contribution of a counterclockwise edge e: h_P(outer normal)."""
    return support_eval(P, (-e[0], -e[1]))


def _staircase_degree(k: int) -> int:
    d = 0
    while (d + 1) * (d + 2) // 2 < k + 1:
        d += 1
    return d


def _incumbent(P: Polygon, kmax: int) -> Fraction:
    """Length of a cheap polygon with >= kmax + 1 points: a triangle or a box."""
    W, H = P.width(), P.height()
    dk = _staircase_degree(kmax)
    best = dk * (edge_length(P, (1, 0)) + edge_length(P, (-1, 1)) + edge_length(P, (0, -1)))
    for a in range(kmax + 1):
        b = max(0, -(-(kmax + 1) // (a + 1)) - 1)
        best = min(best, a * H + b * W)
    return best


def _pareto(items: dict) -> list[tuple[Fraction, int]]:
    out: list[tuple[Fraction, int]] = []
    for ell, q in sorted(items.items()):
        if not out or q > out[-1][1]:
            out.append((ell, q))
    return out


def _chain_dp(P: Polygon, dirs, bound: Fraction):
    """endpoint -> Pareto list of (length, Q) over chains using dirs in order.

    Q = 2 * (area swept from the start point) + (lattice points on the chain),
    so that a closed polygon has L = Q / 2 + 1 by Pick's theorem.
    """
    W, H = P.width(), P.height()
    states: dict[tuple[int, int, Fraction], int] = {(0, 0, Fraction(0)): 0}
    for ex, ey in dirs:
        he = edge_length(P, (ex, ey))
        new: dict[tuple[int, int, Fraction], int] = {}
        for (x, y, ell), q in states.items():
            n = 0
            while True:
                xx, yy, ll = x + n * ex, y + n * ey, ell + n * he
                # a polygon of x-extent w has length >= w * H, likewise in y
                if ll > bound or abs(xx) * H > bound or abs(yy) * W > bound:
                    break
                qq = q + n * (x * ey - y * ex) + n
                key = (xx, yy, ll)
                if new.get(key, -1) < qq:
                    new[key] = qq
                n += 1
        states = new
    grouped: dict[tuple[int, int], dict[Fraction, int]] = {}
    for (x, y, ell), q in states.items():
        grouped.setdefault((x, y), {})[ell] = q
    return {p: _pareto(v) for p, v in grouped.items()}


def _polygon_dp(P: Polygon, bound: Fraction) -> list[tuple[Fraction, int]]:
    """Pareto list (length, max lattice points) over lattice polygons."""
    dirs = edge_directions(P)
    first = [e for e in dirs if _angle_key(e)[0] == 0]
    second = [e for e in dirs if _angle_key(e)[0] == 1]
    # the area swept by the second half about its own start equals the area
    # about the polygon's start: the shift term cross(X, -X) vanishes
    A = _chain_dp(P, first, bound)
    B = _chain_dp(P, second, bound)
    best: dict[Fraction, int] = {}
    for (x, y), la in A.items():
        lb = B.get((-x, -y))
        if not lb:
            continue
        for l1, q1 in la:
            for l2, q2 in lb:
                ell = l1 + l2
                if ell > bound:
                    break
                q = q1 + q2
                if best.get(ell, -1) < q:
                    best[ell] = q
    return [(ell, q // 2 + 1) for ell, q in _pareto(best)]


_cache_lock = threading.Lock()
_convex_cache: dict[tuple, list[Fraction]] = {}


def convex_table(d: MomentDomain, kmax: int) -> list[Fraction]:
    """c_0 .. c_kmax of the convex toric domain of d."""
    if d.kind is not MomentKind.CONVEX:
        raise GeometryError("convex_cap needs a convex moment domain")
    P = d.polygon
    with _cache_lock:
        tab = _convex_cache.get(P.vertices)
        if tab is not None and len(tab) > kmax:
            return tab[: kmax + 1]
    bound = _incumbent(P, kmax)
    front = _polygon_dp(P, bound)
    out = []
    j = 0
    for k in range(kmax + 1):
        while front[j][1] < k + 1:
            j += 1
            if j == len(front):
                raise AssertionError("incumbent polygon not reached by the search")
        out.append(front[j][0])
    with _cache_lock:
        _convex_cache[P.vertices] = out
    return out


def convex_cap(d: MomentDomain, k: int) -> Fraction:
    return convex_table(d, k)[k]


def polygon_length(P: Polygon, Q: Polygon) -> Fraction:
    """Length of the lattice polygon Q measured by the domain P."""
    if len(Q) == 1:
        return Fraction(0)
    total = Fraction(0)
    for (ax, ay), (bx, by) in Q.edges():
        total += edge_length(P, (bx - ax, by - ay))
    return total


def _count_rows(pts: list[tuple[int, int]]) -> int:
    """Lattice points of the convex hull of pts (a closed edge walk), by rows."""
    if len(pts) <= 2:
        (ax, ay), (bx, by) = pts[0], pts[-1]
        return math.gcd(bx - ax, by - ay) + 1
    edges = list(zip(pts, pts[1:] + pts[:1]))
    ys = [y for _, y in pts]
    total = 0
    for y in range(min(ys), max(ys) + 1):
        lo = hi = None
        for (ax, ay), (bx, by) in edges:
            if min(ay, by) <= y <= max(ay, by):
                if ay == by:
                    cands = [Fraction(ax), Fraction(bx)]
                else:
                    cands = [ax + Fraction((bx - ax) * (y - ay), by - ay)]
                for c in cands:
                    lo = c if lo is None or c < lo else lo
                    hi = c if hi is None or c > hi else hi
        total += math.floor(hi) - math.ceil(lo) + 1
    return total


def brute_convex_table(d: MomentDomain, kmax: int, box: int) -> list[Fraction]:
    """Exhaustive oracle over lattice polygons of extent at most box.

    Polygons are enumerated as closed edge walks over every primitive
    direction of size <= box (not just the Hilbert-basis directions), and
    lattice points are counted row by row rather than by Pick's theorem.
    Every polygon with length <= a triangle-or-box incumbent is visited, so the
    result is certified unless that forces an extent beyond box.
    """
    if d.kind is not MomentKind.CONVEX:
        raise GeometryError("brute_convex_cap needs a convex moment domain")
    P = d.polygon
    W, H = P.width(), P.height()
    bound = _incumbent(P, kmax)
    # extent w costs at least w * H, extent h at least h * W
    xbox, ybox = floor(bound / H), floor(bound / W)
    if max(xbox, ybox) > box:
        raise GeometryError(f"box {box} too small to certify the optimum")
    dirs = sorted(
        {_primitive(x, y) for x in range(-xbox, xbox + 1) for y in range(-ybox, ybox + 1)
         if (x, y) != (0, 0)},
        key=_angle_key,
    )
    den = math.lcm(*(c.denominator for v in P.vertices for c in v))
    verts = [(int(px * den), int(py * den)) for px, py in P.vertices]

    def h(ex, ey):  # den * edge_length(P, (ex, ey))
        return max(ey * px - ex * py for px, py in verts)

    lengths = [h(*e) for e in dirs]
    ibound = int(bound * den)
    best: list[Optional[int]] = [None] * (kmax + 1)

    def record(pts, ell):
        n = _count_rows(pts)
        for k in range(min(n, kmax + 1)):
            if best[k] is None or ell < best[k]:
                best[k] = ell

    # the walk starts at the lowest-leftmost vertex, so it stays in y >= 0
    def visit(i, x, y, lo, hi, ell, pts):
        for j in range(i, len(dirs)):
            ex, ey = dirs[j]
            n = 1
            while True:
                xx, yy = x + n * ex, y + n * ey
                ll = ell + n * lengths[j]
                lo2, hi2 = min(lo, xx), max(hi, xx)
                if ll > ibound or yy < 0 or yy > ybox or hi2 - lo2 > xbox:
                    break
                # h is subadditive, so closing the walk costs at least h(-position)
                if ll + h(-xx, -yy) > ibound:
                    n += 1
                    continue
                if yy == 0 and xx < 0:
                    break
                if (xx, yy) == (0, 0):
                    record(pts, ll)
                    break
                pts.append((xx, yy))
                visit(j + 1, xx, yy, lo2, hi2, ll, pts)
                pts.pop()
                n += 1

    best[0] = 0
    visit(0, 0, 0, 0, 0, 0, [(0, 0)])
    if any(b is None for b in best):
        raise AssertionError("incumbent missing from the enumeration")
    return [Fraction(b, den) for b in best]


def brute_convex_cap(d: MomentDomain, k: int, box: int) -> Fraction:
    return brute_convex_table(d, k, box)[k]


def capacity_seq(d: MomentDomain) -> CapacitySeq:
    if d.kind is MomentKind.CONCAVE:
        return CapacitySeq("concave", lambda k: concave_cap(d, k))
    return CapacitySeq("convex", lambda k: convex_cap(d, k))
