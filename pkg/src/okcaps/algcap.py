"""Algebraic capacities c_k(Y, A) = min{A.D : D integral nef, I(D) >= 2k}.

The search runs over the degree d of D.  For fixed d it enumerates, per
group of blowups sharing the same A-weight, only the total multiplicity of
the group: the balanced split maximizes the index without changing A.D, and
keeps nefness because the nef cone is convex and invariant under the group.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exactgeom import sqrt_bounds
from .moment import PolytopalityError, WeightTree, reconstruct
from .picard import (
    DivisorClass,
    H,
    K,
    PicardError,
    SurfaceModel,
    intersect,
    index,
    is_nef,
    zariski,
)
from .toric_ech import ball_cap, convex_table


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class PolarizedSurface:
    model: SurfaceModel
    A: DivisorClass

    def __post_init__(self):
        if self.A.n != self.model.n:
            raise PicardError("divisor and model disagree on n")

    @classmethod
    def delpezzo(cls, n: int, A: Optional[DivisorClass] = None) -> PolarizedSurface:
        model = SurfaceModel.delpezzo(n)
        return cls(model, -K(n) if A is None else A)

    @classmethod
    def from_weights(cls, w: WeightTree) -> PolarizedSurface:
        c, ws = w.sequence()
        if c is None:
            raise CapacityError("a tower needs a head")
        return cls.delpezzo(len(ws), DivisorClass(c, ws))

    @property
    def positive_part(self) -> DivisorClass:
        return zariski(self.A, self.model).P

    def volume(self) -> Fraction:
        P = self.positive_part
        return intersect(P, P)

    def is_big(self) -> bool:
        try:
            return self.volume() > 0
        except PicardError:
            return False

    def is_pseudo_polarized(self) -> bool:
        return is_nef(self.A, self.model) and intersect(self.A, self.A) > 0

    def is_polarized(self) -> bool:
        return (
            intersect(self.A, self.A) > 0
            and intersect(self.A, H(self.model.n)) > 0
            and all(intersect(self.A, C) > 0 for C in self.model.neg_curves)
        )

    def half_KA(self) -> Fraction:
        return intersect(K(self.model.n), self.A) / 2

    def scaled(self, lam) -> PolarizedSurface:
        return PolarizedSurface(self.model, self.A * lam)


# ---------------------------------------------------------------- engine


def _symmetric_groups(s: PolarizedSurface) -> list[list[int]]:
    """Indices with equal A-weight whose swaps preserve the curve list."""
    curves = set(s.model.neg_curves)
    by_weight: dict[Fraction, list[int]] = {}
    for i, a in enumerate(s.A.m):
        by_weight.setdefault(a, []).append(i)
    groups: list[list[int]] = []
    for idx in by_weight.values():
        # split further until every transposition inside a group is a symmetry
        parts: list[list[int]] = []
        for i in idx:
            for part in parts:
                j = part[0]
                if all(_swap(C, i, j) in curves for C in curves):
                    part.append(i)
                    break
            else:
                parts.append([i])
        groups.extend(parts)
    return sorted(groups)


def _swap(C: DivisorClass, i: int, j: int) -> DivisorClass:
    m = list(C.m)
    m[i], m[j] = m[j], m[i]
    return DivisorClass(C.d, m)


def _orbit_reps(curves: Sequence[DivisorClass], groups: list[list[int]]):
    """One (d, per-group sorted multiplicities) record per curve orbit."""
    reps = set()
    for C in curves:
        reps.add((C.d, tuple(tuple(sorted((C.m[i] for i in g), reverse=True)) for g in groups)))
    return sorted(reps)


def _balanced(total: int, size: int) -> list[int]:
    q, r = divmod(total, size)
    return [q + 1] * r + [q] * (size - r)


def _epsilon(s: PolarizedSurface) -> Fraction:
    """min P.D over real nef D of degree 1, where P is the positive part of A.

    Since A.D >= P.D for nef D, every candidate of degree d costs >= eps * d.
    """
    from sympy import Matrix, Rational
    from sympy.solvers.simplex import linprog

    n = s.model.n
    P = s.positive_part
    if n == 0:
        return P.d
    gens = s.model.generators()
    # variables m_1..m_n; D.G >= 0 reads sum_i m_i G.m_i <= G.d
    R = lambda q: Rational(q.numerator, q.denominator)  # noqa: E731
    A_ub = Matrix([[R(g.m[i]) for i in range(n)] for g in gens])
    b_ub = Matrix([R(g.d) for g in gens])
    c = Matrix([R(P.m[i]) for i in range(n)])  # P.D = P.d - sum P.m_i m_i
    try:
        # minimize -sum P.m_i m_i
        val, _ = linprog(-c, A_ub, b_ub, bounds=(None, None))
    except Exception as exc:
        raise CapacityError("nef slice is unbounded; A is not big") from exc
    eps = P.d + Fraction(str(val))
    if eps <= 0:
        raise CapacityError("A vanishes on a nef ray; capacities are not bounded below")
    return eps


@dataclass
class _Table:
    kmax: int
    caps: list[Fraction]
    minimizers: list[DivisorClass]


_cache: dict[tuple, _Table] = {}
_cache_lock = threading.Lock()


def _incumbent(s: PolarizedSurface, kmax: int) -> Fraction:
    n = s.model.n
    best = None
    bases = [H(n)]
    if is_nef(-K(n), s.model):
        bases.append(-K(n))
    for B in bases:
        t = 0
        while index(B * t) < 2 * kmax:
            t += 1
        v = intersect(s.A, B * t)
        best = v if best is None else min(best, v)
    return best


def _enumerate(s: PolarizedSurface, kmax: int) -> _Table:
    n = s.model.n
    A = s.A
    if not s.is_big():
        raise CapacityError("A is not big")
    U = _incumbent(s, kmax)
    eps = _epsilon(s)
    groups = _symmetric_groups(s)
    generic = s.model.provenance.startswith("delpezzo")
    reps = _orbit_reps(s.model.neg_curves, groups)
    weights = [A.m[g[0]] for g in groups]
    records: list[tuple[Fraction, int, tuple]] = []  # (A.D, I, key)

    d = 0
    while eps * d <= U:
        ranges = []
        for g, a in zip(groups, weights):
            if generic and a <= 0:
                # raising m there never lowers A.D and only lowers the index
                ranges.append(range(0, 1))
            else:
                lo = 0 if generic else -len(g) * d
                ranges.append(range(lo, len(g) * d + 1))
        for sums in itertools.product(*ranges):
            cost = A.d * d - sum(a * t for a, t in zip(weights, sums))
            if cost > U:
                continue
            parts = [_balanced(t, len(g)) for t, g in zip(sums, groups)]
            # nef against every orbit: the worst pairing sorts both descending
            ok = True
            for cd, cms in reps:
                tot = cd * d
                for p, cm in zip(parts, cms):
                    tot -= sum(x * y for x, y in zip(p, cm))
                if tot < 0:
                    ok = False
                    break
            if not ok:
                continue
            sq = d * d - sum(x * x for p in parts for x in p)
            if sq < 0:
                continue
            ind = sq + 3 * d - sum(sums)
            records.append((cost, ind, (d, tuple(sums))))
        d += 1

    records.sort(key=lambda r: (r[0], -r[1], r[2]))
    caps: list[Fraction] = []
    mins: list[DivisorClass] = []
    best_i = -1
    j = 0
    front: list[tuple[Fraction, int, tuple]] = []
    for r in records:
        if r[1] > best_i:
            front.append(r)
            best_i = r[1]
    for k in range(kmax + 1):
        while front[j][1] < 2 * k:
            j += 1
            if j == len(front):
                raise AssertionError("incumbent class missing from the enumeration")
        cost, _, (dd, sums) = front[j]
        caps.append(cost)
        mins.append(_assemble(dd, sums, groups, n))
    return _Table(kmax, caps, mins)


def _assemble(d: int, sums, groups, n: int) -> DivisorClass:
    m = [0] * n
    for t, g in zip(sums, groups):
        for i, v in zip(g, _balanced(t, len(g))):
            m[i] = v
    return DivisorClass(d, m)


def _table(s: PolarizedSurface, kmax: int) -> _Table:
    key = (s.model.n, s.model.neg_curves, s.A)
    with _cache_lock:
        t = _cache.get(key)
        if t is not None and t.kmax >= kmax:
            return t
    t = _enumerate(s, kmax)
    with _cache_lock:
        _cache[key] = t
    return t


def alg_cap(s: PolarizedSurface, k: int) -> Fraction:
    return alg_cap_with_minimizer(s, k)[0]


def alg_cap_with_minimizer(s: PolarizedSurface, k: int) -> tuple[Fraction, DivisorClass]:
    if k < 0:
        raise ValueError("k must be nonnegative")
    t = _table(s, k)
    return t.caps[k], t.minimizers[k]


def alg_table(s: PolarizedSurface, kmax: int) -> list[Fraction]:
    return _table(s, kmax).caps[: kmax + 1]


def brute_alg_cap(s: PolarizedSurface, k: int, dmax: int) -> Fraction:
    """Oracle: every integral (d; m) with 0 <= m_i <= d <= dmax, nef tested directly."""
    n = s.model.n
    best = None
    for d in range(dmax + 1):
        for m in itertools.product(range(d + 1), repeat=n):
            D = DivisorClass(d, m)
            if index(D) < 2 * k or not is_nef(D, s.model):
                continue
            v = intersect(s.A, D)
            if best is None or v < best:
                best = v
    if best is None:
        raise CapacityError("no feasible class within the degree bound")
    return best


# ---------------------------------------------------------------- weight sequences


def _delpezzo_route(w: WeightTree) -> Optional[PolarizedSurface]:
    c, ws = w.sequence()
    if c is None or len(ws) > 8:
        return None
    s = PolarizedSurface.delpezzo(len(ws), DivisorClass(c, ws))
    return s if s.is_pseudo_polarized() else None


def alg_cap_wt_table(w: WeightTree, kmax: int, route: str = "auto") -> list[Fraction]:
    if w.head is None:
        raise CapacityError("weight sequence not computable: no head")
    if not w.positive_weights() and route != "toric":
        return [ball_cap(w.head, k) for k in range(kmax + 1)]
    if route in ("auto", "picard"):
        s = _delpezzo_route(w)
        if s is not None:
            return alg_table(s, kmax)
        if route == "picard":
            raise CapacityError("weight sequence not computable on the del Pezzo route")
    try:
        dom = reconstruct(w)
    except PolytopalityError as exc:
        raise CapacityError("weight sequence not computable") from exc
    return convex_table(dom, kmax)


def alg_cap_wt(w: WeightTree, k: int, route: str = "auto") -> Fraction:
    return alg_cap_wt_table(w, k, route)[k]


# ---------------------------------------------------------------- asymptotics


def weyl_error(s: PolarizedSurface, k: int, eps=Fraction(1, 10**12)) -> Fraction:
    """c_k - sqrt(2 vol k), the square root known to within eps."""
    c = alg_cap(s, k)
    lo, hi = sqrt_bounds(2 * s.volume() * k, eps)
    return c - (lo + hi) / 2


@dataclass(frozen=True)
class AsymSummary:
    k_lo: int
    k_hi: int
    min_e: Fraction
    max_e: Fraction
    argmin: int
    argmax: int
    vol: Fraction
    half_KA: Fraction
    # an empirical stand-in for the limsup offset, not its defined value
    limsup_estimate: Fraction = field(default=Fraction(0))


def asym_summary(s: PolarizedSurface, k_lo: int, k_hi: int, eps=Fraction(1, 10**9)) -> AsymSummary:
    if not k_lo < k_hi:
        raise ValueError("need k_lo < k_hi")
    caps = alg_table(s, k_hi)
    vol = s.volume()
    es = []
    for k in range(k_lo, k_hi + 1):
        lo, hi = sqrt_bounds(2 * vol * k, eps)
        es.append(caps[k] - (lo + hi) / 2)
    mn = min(es)
    mx = max(es)
    return AsymSummary(
        k_lo, k_hi, mn, mx, k_lo + es.index(mn), k_lo + es.index(mx), vol, s.half_KA(), mx
    )
