"""Embedding verdicts, ellipsoid embedding lower bounds and staircase tests."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .algcap import CapacityError, PolarizedSurface, alg_cap_wt_table, alg_table
from .exactgeom import GeometryError, exact_sqrt, rat, sqrt_bounds
from .moment import MomentDomain, MomentKind, PolytopalityError, WeightTree, reconstruct
from .okounkov import NOBodyError, admits, dp_criteria, no_body, no_wt
from .picard import intersect
from .toric_ech import concave_table, ellipsoid_table

Target = Union[WeightTree, PolarizedSurface]

OBSTRUCTED = "obstructed"
NO_OBSTRUCTION = "no_obstruction_up_to"


@dataclass(frozen=True)
class Verdict:
    status: str
    k: Optional[int]
    kmax: int
    src_cap: Optional[Fraction] = None
    tgt_cap: Optional[Fraction] = None
    src_area: Fraction = Fraction(0)
    tgt_volume: Fraction = Fraction(0)
    reason: str = ""
    # the capacity test is an equivalence for this target, not only necessary
    sharp: bool = False

    @property
    def obstructed(self) -> bool:
        return self.status == OBSTRUCTED

    def as_dict(self) -> dict:
        def s(x):
            return None if x is None else str(x)

        return {
            "status": self.status,
            "k": self.k,
            "kmax": self.kmax,
            "src_cap": s(self.src_cap),
            "tgt_cap": s(self.tgt_cap),
            "src_area": str(self.src_area),
            "tgt_volume": str(self.tgt_volume),
            "reason": self.reason,
            "sharp": self.sharp,
        }


@dataclass(frozen=True)
class RealApprox:
    """A real number known exactly or through rational bounds lo <= x <= hi."""

    lo: Fraction
    hi: Fraction
    exact: Optional[Fraction] = None
    expr: str = ""

    def __float__(self) -> float:
        return float(self.exact) if self.exact is not None else float((self.lo + self.hi) / 2)

    def __str__(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        return self.expr or f"[{self.lo}, {self.hi}]"


# ---------------------------------------------------------------- targets


def _as_concave(src: MomentDomain) -> MomentDomain:
    if src.kind is MomentKind.CONCAVE:
        return src
    vs = src.polygon.vertices if src.polygon is not None else ()
    if len(vs) == 3:
        a, b = src.width(), src.height()
        if a == b and src.area() * 2 == a * b:
            return MomentDomain.ellipsoid(a, a)
    raise GeometryError("the source must be a concave moment domain")


def _target_table(tgt: Target, kmax: int) -> list[Fraction]:
    if isinstance(tgt, PolarizedSurface):
        return alg_table(tgt, kmax)
    return alg_cap_wt_table(tgt, kmax)


def target_volume2(tgt: Target) -> Fraction:
    """A^2, twice the symplectic volume."""
    if isinstance(tgt, PolarizedSurface):
        return tgt.volume()
    return tgt.volume2()


def _sharp(tgt: Target) -> bool:
    if isinstance(tgt, WeightTree):
        try:
            reconstruct(tgt)
        except PolytopalityError:
            return False
        return True
    n = tgt.model.n
    if n == 0:
        return True
    if not tgt.model.provenance.startswith("delpezzo") or not tgt.is_polarized():
        return False
    # the body of a flag on E_1 must carry the tower's own weights
    try:
        w = no_wt(no_body(tgt, 0))
    except (NOBodyError, GeometryError, ValueError):
        return False
    return admits(tgt, w)


def embed_verdict(src: MomentDomain, tgt: Target, kmax: int = 100) -> Verdict:
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    src = _as_concave(src)
    sc = concave_table(src, kmax)
    tc = _target_table(tgt, kmax)
    area = src.area()
    vol2 = target_volume2(tgt)
    sharp = _sharp(tgt)
    for k in range(kmax + 1):
        if sc[k] > tc[k]:
            return Verdict(OBSTRUCTED, k, kmax, sc[k], tc[k], area, vol2 / 2, "capacity", sharp)
    if area > vol2 / 2:
        return Verdict(OBSTRUCTED, None, kmax, None, None, area, vol2 / 2, "volume", sharp)
    return Verdict(NO_OBSTRUCTION, None, kmax, None, None, area, vol2 / 2, "", sharp)


# ---------------------------------------------------------------- ellipsoids


@dataclass(frozen=True)
class EEFBound:
    z: Fraction
    value: RealApprox
    argmax_k: Optional[int]  # None when the volume bound wins
    volume_bound: RealApprox


def _sqrt_approx(q: Fraction, eps=Fraction(1, 10**12)) -> RealApprox:
    r = exact_sqrt(q)
    if r is not None:
        return RealApprox(r, r, r)
    lo, hi = sqrt_bounds(q, eps)
    return RealApprox(lo, hi, None, f"sqrt({q})")


def eef_lower(tgt: Target, z, kmax: int = 100) -> EEFBound:
    z = rat(z)
    if z < 1:
        raise ValueError("eef_lower needs z >= 1")
    vol2 = target_volume2(tgt)
    if vol2 <= 0:
        raise CapacityError("target has zero volume")
    vb = _sqrt_approx(z / vol2)
    ec = ellipsoid_table(1, z, kmax)
    tc = _target_table(tgt, kmax)
    best, arg = None, None
    for k in range(1, kmax + 1):
        if tc[k] == 0:
            continue
        r = ec[k] / tc[k]
        if best is None or r > best:
            best, arg = r, k
    if best is not None and best >= vb.hi:
        return EEFBound(z, RealApprox(best, best, best), arg, vb)
    return EEFBound(z, vb, None, vb)


# ---------------------------------------------------------------- staircases


def _b(w: WeightTree) -> Fraction:
    c = w.head
    ws = w.positive_weights()
    s1 = sum(ws, Fraction(0))
    s2 = sum((a * a for a in ws), Fraction(0))
    if c * c <= s2:
        raise ValueError("weight data has zero volume")
    return (3 * c - s1) ** 2 / (c * c - s2) - 2


def discriminant(w: WeightTree) -> Fraction:
    """b^2 - 4 for the quadratic a^2 - b a + 1 = 0."""
    b = _b(w)
    return b * b - 4


def accumulation_point(w: WeightTree, eps=Fraction(1, 10**12)) -> Optional[RealApprox]:
    if w.head is None:
        raise ValueError("accumulation point needs a head")
    b = _b(w)
    disc = b * b - 4
    # b >= -2 always; the root exceeds 1 only for b > 2
    if disc < 0 or b <= 2:
        return None
    r = exact_sqrt(disc)
    if r is not None:
        x = (b + r) / 2
        return RealApprox(x, x, x)
    lo, hi = sqrt_bounds(disc, eps)
    return RealApprox((b + lo) / 2, (b + hi) / 2, None, f"({b} + sqrt({disc}))/2")


def unit_threshold(n: int) -> tuple[Fraction, Fraction, Fraction]:
    """c* = (3n + sqrt(D))/5 where (c; 1 x n) has zero discriminant; returns (3n, D, 5)."""
    return Fraction(3 * n), Fraction(4 * (n * n - 5 * n)), Fraction(5)


@dataclass(frozen=True)
class StaircaseVerdict:
    no_staircase: bool
    reason: str
    criteria_case: Optional[int]
    accumulation: Optional[RealApprox]

    def as_dict(self) -> dict:
        return {
            "no_staircase": self.no_staircase,
            "reason": self.reason,
            "criteria_case": self.criteria_case,
            "accumulation_point": None if self.accumulation is None else str(self.accumulation),
            "accumulation_float": None if self.accumulation is None else float(self.accumulation),
        }


def staircase_verdict(w: WeightTree, r: int) -> StaircaseVerdict:
    holds, case = dp_criteria(w, r)
    acc = accumulation_point(w)
    if not holds:
        return StaircaseVerdict(False, "inconclusive: body criteria fail", None, acc)
    if acc is not None:
        return StaircaseVerdict(False, "inconclusive: accumulation point exists", case, acc)
    return StaircaseVerdict(True, "criteria hold and no accumulation point", case, None)
