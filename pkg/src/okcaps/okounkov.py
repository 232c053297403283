"""Newton-Okounkov bodies for flags y in E* on a negative curve, by sweeping
A_t = A - t E* through the Zariski chambers.

On a chamber with negative support S the positive part P_t is affine in t,
so the upper boundary beta(t) = P_t . E* is piecewise linear.  The flag
point is taken general, so the lower boundary is identically zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exactgeom import GeometryError, Polygon, apply_affine, exact_sqrt, solve_linear, sqrt_bounds
from .moment import MomentDomain, MomentKind, WeightTree, wt_convex
from .picard import (
    DivisorClass,
    H,
    NotPseudoEffective,
    PicardError,
    intersect,
    is_nef,
    zariski,
    zero,
)


class NOBodyError(ValueError):
    pass


class IrrationalEndpoint(NOBodyError):
    def __init__(self, lo: Fraction, hi: Fraction, what: str = "mu"):
        super().__init__(f"irrational endpoint: {what} lies in [{lo}, {hi}]")
        self.lo, self.hi, self.what = lo, hi, what


@dataclass(frozen=True)
class NOBody:
    mu: Fraction
    beta_breaks: tuple[tuple[Fraction, Fraction], ...]
    trace: tuple[tuple[Fraction, tuple[DivisorClass, ...]], ...]
    exact: bool = True
    mu_interval: Optional[tuple[Fraction, Fraction]] = None

    def beta(self, t) -> Fraction:
        t = Fraction(t)
        pts = self.beta_breaks
        if not pts[0][0] <= t <= pts[-1][0]:
            raise ValueError("t outside [0, mu]")
        for (t0, b0), (t1, b1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                return b0 + (b1 - b0) * (t - t0) / (t1 - t0)
        return pts[0][1]

    def alpha(self, t) -> Fraction:
        return Fraction(0)

    def polygon(self) -> Polygon:
        pts = [(Fraction(0), Fraction(0))] + [(t, b) for t, b in self.beta_breaks]
        pts.append((self.mu, Fraction(0)))
        return Polygon.from_points(pts)

    def area(self) -> Fraction:
        return self.polygon().area()


# ---------------------------------------------------------------- chamber math


def _affine_positive_part(A: DivisorClass, F: DivisorClass, S: Sequence[DivisorClass]):
    """P_t = P0 + t V and N-coefficients x(t) = x0 + t xv on the chamber of S."""
    n = A.n
    if not S:
        return A, -F, [], []
    G = [[intersect(a, b) for b in S] for a in S]
    x0 = solve_linear(G, [intersect(A, C) for C in S])
    xv = solve_linear(G, [-intersect(F, C) for C in S])
    P0, V = A, -F
    for C, a, b in zip(S, x0, xv):
        P0 = P0 - C * a
        V = V - C * b
    return P0, V, x0, xv


def _validity_interval(model, A, F, S, probe):
    """Largest interval around probe on which S is the negative support.

    Returns (lo, hi, hi_kind) with hi_kind "wall", "leave" or "volume";
    the volume end may be irrational, reported as (lo_bound, hi_bound).
    """
    P0, V, x0, xv = _affine_positive_part(A, F, S)
    lo, hi = Fraction(0), None
    hi_kind = None

    def upper(t, kind):
        nonlocal hi, hi_kind
        if hi is None or t < hi:
            hi, hi_kind = t, kind

    def lower(t):
        nonlocal lo
        if t > lo:
            lo = t

    # N coefficients stay positive
    for a, b in zip(x0, xv):
        if b == 0:
            if a <= 0:
                return None
            continue
        r = -a / b
        if b < 0:
            upper(r, "leave")
        else:
            lower(r)
    # P_t . C >= 0 for curves outside S
    Sset = set(S)
    for C in model.neg_curves:
        if C in Sset:
            continue
        a, b = intersect(P0, C), intersect(V, C)
        if b == 0:
            if a < 0:
                return None
            continue
        r = -a / b
        if b < 0:
            upper(r, "wall")
        else:
            lower(r)
    Hn = H(A.n)
    a, b = intersect(P0, Hn), intersect(V, Hn)
    if b < 0:
        upper(-a / b, "volume")
    elif b > 0:
        lower(-a / b)
    # P_t^2 >= 0: quadratic q(t) = c0 + 2 c1 t + c2 t^2
    c0, c1, c2 = intersect(P0, P0), intersect(P0, V), intersect(V, V)
    irrational = None
    for r in _quadratic_roots(c0, c1, c2):
        if isinstance(r, tuple):
            if r[0] > probe:
                if irrational is None or r[0] < irrational[0]:
                    irrational = r
            else:
                lower(r[1])
        elif r > probe:
            upper(r, "volume")
        else:
            lower(r)
    if irrational is not None and (hi is None or irrational[1] < hi):
        hi, hi_kind = irrational, "irrational"
    if hi is None:
        raise NOBodyError("sweep does not leave the big cone")
    return lo, hi, hi_kind, P0, V


def _quadratic_roots(c0, c1, c2):
    """Real roots of c0 + 2 c1 t + c2 t^2; irrational ones as isolating intervals."""
    if c2 == 0:
        return [] if c1 == 0 else [-c0 / (2 * c1)]
    disc = c1 * c1 - c0 * c2
    if disc < 0:
        return []
    s = exact_sqrt(disc)
    if s is not None:
        return sorted({(-c1 - s) / c2, (-c1 + s) / c2})
    lo, hi = sqrt_bounds(disc, Fraction(1, 10**13))
    out = []
    for sign in (-1, 1):
        a, b = (-c1 + sign * lo) / c2, (-c1 + sign * hi) / c2
        out.append((min(a, b), max(a, b)))
    return out


def _support(model, D) -> tuple[DivisorClass, ...]:
    Z = zariski(D, model)
    return tuple(C for C, _ in Z.neg_support)


def _flag_curve(model, flag) -> DivisorClass:
    if isinstance(flag, DivisorClass):
        if flag not in model.neg_curves:
            raise NOBodyError("flag curve must be one of the model's negative curves")
        return flag
    if not 0 <= flag < len(model.neg_curves):
        raise NOBodyError(f"no negative curve with index {flag}")
    return model.neg_curves[flag]


def no_body(s, flag: Union[int, DivisorClass], allow_approximate: bool = False) -> NOBody:
    """Sweep A_t = A - t E* from t = 0 until A_t leaves the big cone."""
    model, A = s.model, s.A
    F = _flag_curve(model, flag)
    if intersect(A, F) <= 0:
        raise NOBodyError("not A-generic")
    if not (is_nef(A, model) and intersect(A, A) > 0):
        raise NOBodyError("the polarization must be big and nef")

    t0 = Fraction(0)
    breaks = [(t0, intersect(A, F))]
    trace: list[tuple[Fraction, tuple[DivisorClass, ...]]] = []
    prev_S: tuple[DivisorClass, ...] = ()
    for _ in range(10 * len(model.neg_curves) + 10):
        step = Fraction(1)
        while True:
            probe = t0 + step
            try:
                S = _support(model, A - F * probe)
                got = _validity_interval(model, A, F, S, probe)
            except (NotPseudoEffective, NOBodyError, ZeroDivisionError):
                got = None
            if got is not None:
                lo, hi, kind, P0, V = got
                if lo <= t0 and (isinstance(hi, tuple) or hi > t0):
                    break
            step /= 2
            if step < Fraction(1, 2**60):
                raise NOBodyError("could not resolve the chamber after t = %s" % t0)
        entering = tuple(C for C in S if C not in prev_S)
        if entering:
            trace.append((t0, entering))
        if isinstance(hi, tuple):
            if not allow_approximate:
                raise IrrationalEndpoint(hi[0], hi[1])
            t1 = hi[0]
            breaks.append((t1, intersect(P0 + V * t1, F)))
            return _finish(s, breaks, trace, t1, exact=False, interval=hi)
        t1 = hi
        mid = (t0 + t1) / 2
        # the chamber must be the one zariski finds in its interior
        if set(_support(model, A - F * mid)) != set(S):
            raise AssertionError("chamber support mismatch at t = %s" % mid)
        breaks.append((t1, intersect(P0 + V * t1, F)))
        P1 = P0 + V * t1
        if intersect(P1, P1) == 0:
            return _finish(s, breaks, trace, t1)
        t0, prev_S = t1, S
    raise NOBodyError("too many chambers")


def _merge_collinear(pts):
    out = [pts[0]]
    for p in pts[1:]:
        if len(out) >= 2:
            (t0, b0), (t1, b1) = out[-2], out[-1]
            if (b1 - b0) * (p[0] - t1) == (p[1] - b1) * (t1 - t0):
                out[-1] = p
                continue
        if p[0] != out[-1][0]:
            out.append(p)
    return out


def _finish(s, breaks, trace, mu, exact=True, interval=None) -> NOBody:
    body = NOBody(mu, tuple(_merge_collinear(breaks)), tuple(trace), exact, interval)
    if exact:
        A2 = intersect(s.A, s.A)
        if body.area() * 2 != A2:
            raise AssertionError(f"body area {body.area()} differs from A^2/2 = {A2 / 2}")
    return body


def no_wt(b: NOBody) -> WeightTree:
    if not b.exact:
        raise NOBodyError("body is approximate; weights need exact breakpoints")
    cands = [w for _, w in corner_placements(b.polygon())]
    if not cands:
        raise NOBodyError("body is not a convex moment domain")
    return min(cands, key=lambda w: (w.head, w.key()))


def _primitive(v) -> tuple[int, int]:
    x, y = v
    den = x.denominator * y.denominator // math.gcd(x.denominator, y.denominator)
    a, b = int(x * den), int(y * den)
    g = math.gcd(a, b)
    return a // g, b // g


def corner_placements(P: Polygon):
    """Weight sequences of P seen from each smooth corner.

    A corner is smooth when its primitive edge vectors form a lattice basis;
    the integral affine map sending it to the origin and those edges to the
    axes places P as a convex moment domain (when it fits one).
    """
    vs = P.vertices
    out = []
    for i, v in enumerate(vs):
        nxt, prv = vs[(i + 1) % len(vs)], vs[i - 1]
        u1 = _primitive((nxt[0] - v[0], nxt[1] - v[1]))
        u2 = _primitive((prv[0] - v[0], prv[1] - v[1]))
        det = u1[0] * u2[1] - u1[1] * u2[0]
        if abs(det) != 1:
            continue
        # inverse of the matrix with columns u1, u2
        M = ((u2[1] * det, -u2[0] * det), (-u1[1] * det, u1[0] * det))
        pts = [apply_affine(M, (0, 0), (p[0] - v[0], p[1] - v[1])) for p in vs]
        try:
            out.append((v, wt_convex(MomentDomain.convex(pts))))
        except (GeometryError, ValueError):
            continue
    return out


# ---------------------------------------------------------------- criteria


def admits(s, w: WeightTree) -> bool:
    """Does the tower (c; a_1..a_n) of s carry the weight sequence of w?"""
    if w.head is None:
        return False
    tower = sorted((x for x in s.A.m if x > 0), reverse=True)
    return s.A.d == w.head and tuple(tower) == tuple(w.positive_weights())


def _top(ws, j) -> Fraction:
    return sum(ws[:j], Fraction(0))


def dp_criteria(w: WeightTree, r: int) -> tuple[bool, int]:
    """Sufficient conditions for the flag body to carry the tower weights."""
    if r > 9:
        raise ValueError("criteria cover Picard rank at most 9")
    c = w.head
    ws = w.positive_weights()
    if r <= 5:
        return True, 1
    if r <= 7 and c >= _top(ws, 4):
        return True, 2
    if r <= 8 and c >= _top(ws, 6):
        return True, 3
    if r <= 9 and c >= _top(ws, 6) and 3 * c >= 2 * _top(ws, 7):
        return True, 4
    return False, (2 if r <= 7 else 3 if r == 8 else 4)


def high_rank_condition(w: WeightTree, n: int) -> bool:
    return w.head >= Fraction(n - 2, 2) * sum(w.positive_weights(), Fraction(0))
