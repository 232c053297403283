"""Picard lattices of blowups of the plane in general points.

A class D = dH - sum m_i E_i is stored as (d; m_1, ..., m_n).  The form is
diagonal: H^2 = 1, E_i^2 = -1, and K = (-3; -1, ..., -1).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exactgeom import floor, is_negative_definite, rat, solve_linear


class PicardError(ValueError):
    pass


class NotPseudoEffective(PicardError):
    def __init__(self, message: str = "not pseudo-effective"):
        super().__init__(message)


@dataclass(frozen=True)
class DivisorClass:
    d: Fraction
    m: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", rat(self.d))
        object.__setattr__(self, "m", tuple(rat(x) for x in self.m))

    @property
    def n(self) -> int:
        return len(self.m)

    @classmethod
    def parse(cls, text: str) -> DivisorClass:
        """Compact form "c,a1,...,an" meaning cH - sum a_i E_i."""
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        if not parts:
            raise ValueError("empty divisor")
        vals = [rat(p) for p in parts]
        return cls(vals[0], tuple(vals[1:]))

    def _check(self, other: DivisorClass) -> None:
        if self.n != other.n:
            raise PicardError(f"classes live on different surfaces ({self.n} vs {other.n})")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(self.d + other.d, tuple(a + b for a, b in zip(self.m, other.m)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return self + (-other)

    def __neg__(self) -> DivisorClass:
        return DivisorClass(-self.d, tuple(-a for a in self.m))

    def __mul__(self, lam) -> DivisorClass:
        lam = rat(lam)
        return DivisorClass(lam * self.d, tuple(lam * a for a in self.m))

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in (self.d, *self.m))

    def is_zero(self) -> bool:
        return self.d == 0 and all(x == 0 for x in self.m)

    def compact(self) -> str:
        return ",".join(str(x) for x in (self.d, *self.m))

    def __str__(self) -> str:
        return f"({self.d};{','.join(str(x) for x in self.m)})"


def H(n: int) -> DivisorClass:
    return DivisorClass(1, (0,) * n)


def E(i: int, n: int) -> DivisorClass:
    """The i-th exceptional class, 1-based."""
    if not 1 <= i <= n:
        raise PicardError(f"no exceptional class E_{i} on {n} blowups")
    return DivisorClass(0, tuple(-1 if j == i - 1 else 0 for j in range(n)))


def K(n: int) -> DivisorClass:
    return DivisorClass(-3, (-1,) * n)


def zero(n: int) -> DivisorClass:
    return DivisorClass(0, (0,) * n)


def intersect(D1: DivisorClass, D2: DivisorClass) -> Fraction:
    D1._check(D2)
    return D1.d * D2.d - sum((a * b for a, b in zip(D1.m, D2.m)), Fraction(0))


def index(D: DivisorClass, n: Optional[int] = None) -> Fraction:
    """I(D) = D.(D - K)."""
    if n is not None and n != D.n:
        raise PicardError("index: length mismatch")
    return intersect(D, D - K(D.n))


# ---------------------------------------------------------------- (-1)-classes


def _degree_bound(n: int) -> int:
    # (3d - 1)^2 <= n (d^2 + 1) by Cauchy-Schwarz
    d = 0
    while (3 * (d + 1) - 1) ** 2 <= n * ((d + 1) ** 2 + 1):
        d += 1
    return d


def _multisets(total: int, sq: int, n: int, cap: int):
    """Nonincreasing tuples of n nonnegative ints with given sum and square sum."""
    if n == 0:
        if total == 0 and sq == 0:
            yield ()
        return
    for a in range(min(cap, total), -1, -1):
        if a * a > sq:
            continue
        # the rest has at most n-1 parts each <= a
        if total - a > (n - 1) * a:
            break
        for rest in _multisets(total - a, sq - a * a, n - 1, a):
            yield (a,) + rest


def neg_one_classes(n: int) -> list[DivisorClass]:
    """All classes with C^2 = -1 and -K.C = 1 on the blowup in n general points.

    Listed as E_1..E_n first, then by degree and reverse-lexicographic m.
    """
    if n >= 9:
        raise PicardError("infinitely many (-1)-classes")
    if n < 0:
        raise PicardError("n must be nonnegative")
    out = [E(i, n) for i in range(1, n + 1)]
    for d in range(1, _degree_bound(n) + 1):
        found = set()
        for ms in _multisets(3 * d - 1, d * d + 1, n, d):
            for perm in set(itertools.permutations(ms)):
                found.add(perm)
        for m in sorted(found, reverse=True):
            out.append(DivisorClass(d, m))
    return out


# ---------------------------------------------------------------- models


@dataclass(frozen=True)
class SurfaceModel:
    n: int
    neg_curves: tuple[DivisorClass, ...]
    provenance: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "neg_curves", tuple(self.neg_curves))
        for C in self.neg_curves:
            if C.n != self.n:
                raise PicardError("curve lives on a different surface")
            if intersect(C, C) >= 0:
                raise PicardError(f"curve {C} does not have negative square")

    @classmethod
    def delpezzo(cls, n: int) -> SurfaceModel:
        """The plane blown up in n <= 8 general points."""
        if not 0 <= n <= 8:
            raise PicardError("generic del Pezzo models need 0 <= n <= 8")
        return cls(n, tuple(neg_one_classes(n)), f"delpezzo:{n}")

    @classmethod
    def custom(cls, n: int, curves: Iterable[DivisorClass]) -> SurfaceModel:
        return cls(n, tuple(curves), "custom")

    def generators(self) -> tuple[DivisorClass, ...]:
        """Effective classes testing nefness: curves, then H - E_i, then H."""
        n = self.n
        extra = [H(n) - E(i, n) for i in range(1, n + 1)] + [H(n)]
        seen = set(self.neg_curves)
        return self.neg_curves + tuple(g for g in extra if g not in seen)

    def anticanonical(self) -> DivisorClass:
        return -K(self.n)


def is_nef(D: DivisorClass, model: SurfaceModel) -> bool:
    if intersect(D, H(model.n)) < 0 or intersect(D, D) < 0:
        return False
    return all(intersect(D, C) >= 0 for C in model.neg_curves)


# ---------------------------------------------------------------- Zariski


@dataclass(frozen=True)
class ZariskiDecomp:
    P: DivisorClass
    N: DivisorClass
    neg_support: tuple[tuple[DivisorClass, Fraction], ...]

    def support(self) -> frozenset:
        return frozenset(C for C, _ in self.neg_support)


def _gram(curves: Sequence[DivisorClass]):
    return [[intersect(a, b) for b in curves] for a in curves]


def zariski(D: DivisorClass, model: SurfaceModel, check: bool = True) -> ZariskiDecomp:
    """Positive and negative parts by growing the negative support."""
    if D.n != model.n:
        raise PicardError("divisor and model disagree on n")
    curves = list(model.neg_curves)
    S: list[DivisorClass] = []
    for _ in range(len(curves) + 1):
        if S:
            G = _gram(S)
            if not is_negative_definite(G):
                raise NotPseudoEffective()
            x = solve_linear(G, [intersect(D, C) for C in S])
        else:
            x = []
        N = zero(model.n)
        for C, xc in zip(S, x):
            N = N + C * xc
        P = D - N
        bad = [C for C in curves if C not in S and intersect(P, C) < 0]
        if not bad:
            break
        S.extend(bad)
    else:
        raise NotPseudoEffective()
    if any(xc < 0 for xc in x) or not is_nef(P, model):
        raise NotPseudoEffective()
    support = tuple((C, xc) for C, xc in zip(S, x) if xc != 0)
    Z = ZariskiDecomp(P, N, support)
    if check:
        _assert_invariants(D, Z, model)
    return Z


def _assert_invariants(D: DivisorClass, Z: ZariskiDecomp, model: SurfaceModel) -> None:
    assert Z.P + Z.N == D
    assert is_nef(Z.P, model)
    assert all(c > 0 and intersect(Z.P, C) == 0 for C, c in Z.neg_support)
    if Z.neg_support:
        assert is_negative_definite(_gram([C for C, _ in Z.neg_support]))


def volume(D: DivisorClass, model: SurfaceModel) -> Fraction:
    P = zariski(D, model).P
    return intersect(P, P)


# ---------------------------------------------------------------- rounding


def effective_decomposition(D: DivisorClass, model: SurfaceModel) -> list[tuple[DivisorClass, Fraction]]:
    """Nonnegative combination of generators equal to D with least total weight.

    Solved as an exact LP; the simplex pivots are deterministic, so ties
    between optimal decompositions resolve the same way every time.
    """
    from sympy import Matrix, Rational
    from sympy.solvers.simplex import linprog

    gens = model.generators()
    rows = [[g.d for g in gens]] + [[g.m[i] for g in gens] for i in range(model.n)]
    rhs = [D.d] + list(D.m)
    A_eq = Matrix([[Rational(x.numerator, x.denominator) for x in row] for row in rows])
    b_eq = Matrix([Rational(x.numerator, x.denominator) for x in rhs])
    c = Matrix([1] * len(gens))
    try:
        # sympy wants an inequality block; 0 <= 0 is harmless
        _, sol = linprog(c, A=Matrix([[0] * len(gens)]), b=Matrix([0]), A_eq=A_eq, b_eq=b_eq)
    except Exception as exc:  # sympy signals infeasibility by raising
        raise NotPseudoEffective() from exc
    out = []
    for g, v in zip(gens, sol):
        q = Fraction(str(v))
        if q:
            out.append((g, q))
    return out


def floor_class(D: DivisorClass, model: SurfaceModel) -> DivisorClass:
    """Round down coefficient by coefficient in an effective decomposition."""
    if D.is_integral():
        return D
    out = zero(model.n)
    for g, q in effective_decomposition(D, model):
        out = out + g * floor(q)
    return out


def round_down_nef(P: DivisorClass, model: SurfaceModel, max_iter: int = 1000) -> DivisorClass:
    """Iterate P -> positive part of floor(P) until integral and nef."""
    if not is_nef(P, model):
        raise PicardError("round_down_nef expects a nef class")
    cur = P
    for _ in range(max_iter):
        if cur.is_integral() and is_nef(cur, model):
            return cur
        nxt = zariski(floor_class(cur, model), model).P
        # each step subtracts an effective class, so H-degree cannot grow
        if nxt.d > cur.d:
            raise AssertionError("round-down increased the H-degree")
        cur = nxt
    raise PicardError("round-down iteration did not stabilize")
