"""Command line front end: okcaps <command> [options]."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .algcap import CapacityError, PolarizedSurface, alg_table, asym_summary
from .apps import eef_lower, embed_verdict, staircase_verdict
from .exactgeom import GeometryError, rat
from .moment import MomentDomain, MomentKind, PolytopalityError, WeightTree, wt
from .okounkov import NOBodyError, no_body, no_wt
from .picard import DivisorClass, PicardError, SurfaceModel, intersect, zariski
from .toric_ech import capacity_seq, ellipsoid_table

DOMAIN_ERRORS = (
    PolytopalityError,
    NOBodyError,
    PicardError,
    GeometryError,
    CapacityError,
    ArithmeticError,
)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# ---------------------------------------------------------------- readers


def _load_json(text: str):
    p = Path(text)
    try:
        if p.exists():
            return json.loads(p.read_text())
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {text!r}: {exc}") from exc


def _points(obj) -> list[tuple[Fraction, Fraction]]:
    if isinstance(obj, dict):
        for key in ("vertices", "points", "polygon"):
            if key in obj:
                return _points(obj[key])
        raise InputError("expected a 'vertices' list")
    try:
        return [(rat(p[0]), rat(p[1])) for p in obj]
    except (TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise InputError(f"bad point list: {exc}") from exc


def parse_weights(text: str) -> WeightTree:
    """'c;a1,...,an' or the JSON emitted by `wt`."""
    s = text.strip()
    if s.startswith("{") or Path(s).exists():
        obj = _load_json(s)
        try:
            head = None if obj.get("head") is None else rat(obj["head"])
            ws = [rat(x) for x in obj.get("weights", [])]
        except (AttributeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad weight JSON: {exc}") from exc
    else:
        head_s, _, rest = s.strip("()").partition(";")
        try:
            head = rat(head_s)
            ws = [rat(x) for x in rest.split(",") if x.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad weight sequence {text!r}") from exc
    if head is None:
        raise InputError("weight sequence needs a head")
    if any(a < 0 for a in ws) or head < 0:
        raise InputError("weights must be nonnegative")
    return WeightTree.from_flat(head, ws)


def parse_divisor(text: str, n: Optional[int] = None) -> DivisorClass:
    try:
        D = DivisorClass.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad divisor {text!r}") from exc
    if n is not None and D.n != n:
        raise InputError(f"divisor {text!r} has {D.n} multiplicities, expected {n}")
    return D


def _frac(text: str) -> Fraction:
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad number {text!r}") from exc


def _threads() -> int:
    raw = os.environ.get("OKCAPS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"OKCAPS_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise InputError("OKCAPS_THREADS must be at least 1")
    return n


# ---------------------------------------------------------------- output


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _weights_json(w: WeightTree) -> dict:
    return {
        "head": None if w.head is None else str(w.head),
        "weights": [str(a) for a in w.positive_weights()],
    }


def _csv(header: str, rows) -> str:
    return "\n".join([header] + [",".join(str(x) for x in r) for r in rows])


def _num(x) -> str:
    s = f"{float(x):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def emit_svg(polygon=None, samples=None, size: int = 400, margin: int = 30) -> str:
    """SVG of a polygon (vertices labelled) or of a polyline through samples."""
    head = f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">'
    pts = list(polygon or samples or [])
    if not pts:
        return head + "</svg>\n"
    xs = [Fraction(p[0]) for p in pts]
    ys = [Fraction(p[1]) for p in pts]
    x0, y0 = min(xs + [Fraction(0)] if polygon else xs), min(ys + [Fraction(0)] if polygon else ys)
    span = max(max(xs) - x0, max(ys) - y0) or Fraction(1)
    scale = Fraction(size - 2 * margin) / span

    def at(x, y):
        return _num(margin + (x - x0) * scale), _num(size - margin - (y - y0) * scale)

    coords = " ".join("%s,%s" % at(x, y) for x, y in zip(xs, ys))
    out = [head]
    if polygon:
        out.append(f'<polygon points="{coords}" fill="#cfe0f3" stroke="#1f4e79" stroke-width="2"/>')
        for x, y in zip(xs, ys):
            px, py = at(x, y)
            out.append(f'<circle cx="{px}" cy="{py}" r="3" fill="#1f4e79"/>')
            out.append(f'<text x="{px}" y="{py}" dx="4" dy="-4" font-size="12">({x},{y})</text>')
    else:
        out.append(f'<polyline points="{coords}" fill="none" stroke="#1f4e79" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- surfaces


def _surface(args) -> PolarizedSurface:
    if args.delpezzo is None:
        raise InputError("--delpezzo is required")
    n = args.delpezzo
    A = None if args.A is None else parse_divisor(args.A, n)
    return PolarizedSurface.delpezzo(n, A)


def _target(args):
    if getattr(args, "weights", None) is not None:
        return parse_weights(args.weights)
    return _surface(args)


def _source(args) -> MomentDomain:
    if args.ball is not None:
        a = _frac(args.ball)
        return MomentDomain.ellipsoid(a, a)
    if args.ellipsoid is not None:
        a, _, b = args.ellipsoid.partition(",")
        return MomentDomain.ellipsoid(_frac(a), _frac(b))
    if args.source is not None:
        return MomentDomain.from_points(_points(_load_json(args.source)))
    raise InputError("give --ball, --ellipsoid or --source")


# ---------------------------------------------------------------- commands


def cmd_wt(args) -> str:
    if args.weights is not None:
        return dumps(_weights_json(parse_weights(args.weights)))
    src = args.convex or args.concave or args.points
    if src is None:
        raise InputError("give --convex, --concave, --points or --weights")
    pts = _points(_load_json(src))
    if args.convex:
        d = MomentDomain.convex(pts)
    elif args.concave:
        d = MomentDomain.concave(pts)
    else:
        d = MomentDomain.from_points(pts)
    if args.fmt == "svg":
        return emit_svg(polygon=d.region_vertices())
    return dumps(_weights_json(wt(d)))


def cmd_ech(args) -> str:
    if args.ball is not None or args.ellipsoid is not None:
        d = _source(args)
    elif args.domain is not None:
        d = MomentDomain.from_points(_points(_load_json(args.domain)))
    elif args.weights is not None:
        from .moment import reconstruct

        d = reconstruct(parse_weights(args.weights))
    else:
        raise InputError("give --domain, --weights, --ball or --ellipsoid")
    tab = capacity_seq(d).table(args.kmax)
    return _table_out(args, tab)


def _table_out(args, tab) -> str:
    if args.fmt == "csv":
        return _csv("k,cap", ((k, v) for k, v in enumerate(tab)))
    if args.fmt == "svg":
        return emit_svg(samples=list(enumerate(tab)))
    return dumps({"kmax": len(tab) - 1, "caps": [str(v) for v in tab]})


def cmd_algcap(args) -> str:
    if args.weights is not None:
        from .algcap import alg_cap_wt_table

        tab = alg_cap_wt_table(parse_weights(args.weights), args.kmax)
    else:
        tab = alg_table(_surface(args), args.kmax)
    return _table_out(args, tab)


def cmd_zariski(args) -> str:
    if args.D is None:
        raise InputError("--D is required")
    n = args.delpezzo
    if n is None:
        raise InputError("--delpezzo is required")
    D = parse_divisor(args.D, n)
    Z = zariski(D, SurfaceModel.delpezzo(n))
    return dumps(
        {
            "D": D.compact(),
            "P": Z.P.compact(),
            "N": Z.N.compact(),
            "support": [{"curve": C.compact(), "coeff": str(x)} for C, x in Z.neg_support],
            "volume": str(intersect(Z.P, Z.P)),
        }
    )


def cmd_nobody(args) -> str:
    s = _surface(args)
    if args.flag < 1:
        raise InputError("--flag is 1-based")
    b = no_body(s, args.flag - 1)
    verts = b.polygon().vertices
    if args.fmt == "svg":
        return emit_svg(polygon=verts)
    try:
        w = _weights_json(no_wt(b))
    except (GeometryError, NOBodyError, ValueError):
        w = None
    return dumps(
        {
            "mu": str(b.mu),
            "beta": [[str(t), str(v)] for t, v in b.beta_breaks],
            "vertices": [[str(x), str(y)] for x, y in verts],
            "area": str(b.area()),
            "flag": s.model.neg_curves[args.flag - 1].compact(),
            "trace": [{"t": str(t), "curves": [C.compact() for C in cs]} for t, cs in b.trace],
            "wt": w,
        }
    )


def cmd_embed(args) -> str:
    v = embed_verdict(_source(args), _target(args), args.kmax)
    return dumps(v.as_dict())


def cmd_staircase(args) -> str:
    if args.weights is None:
        raise InputError("--weights is required")
    w = parse_weights(args.weights)
    r = args.rank if args.rank is not None else len(w.positive_weights()) + 1
    return dumps(staircase_verdict(w, r).as_dict())


def cmd_eef(args) -> str:
    tgt = _target(args)
    zmin, zmax = _frac(args.zmin), _frac(args.zmax)
    if args.zsteps < 1 or zmax < zmin:
        raise InputError("need zsteps >= 1 and zmin <= zmax")
    if args.zsteps == 1:
        zs = [zmin]
    else:
        zs = [zmin + (zmax - zmin) * i / (args.zsteps - 1) for i in range(args.zsteps)]
    # shared capacity tables are filled before fanning out
    ellipsoid_table(1, zs[0], args.kmax)
    if isinstance(tgt, PolarizedSurface):
        alg_table(tgt, args.kmax)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        res = list(pool.map(lambda z: eef_lower(tgt, z, args.kmax), zs))
    if args.fmt == "svg":
        return emit_svg(samples=[(r.z, Fraction(float(r.value)).limit_denominator(10**9)) for r in res])
    rows = [(r.z, _num(float(r.value)), "" if r.argmax_k is None else r.argmax_k) for r in res]
    return _csv("z,lower_bound,argmax_k", rows)


def cmd_asym(args) -> str:
    a = asym_summary(_surface(args), args.klo, args.khi)
    return dumps(
        {
            "k_lo": a.k_lo,
            "k_hi": a.k_hi,
            "min_e": _num(a.min_e),
            "max_e": _num(a.max_e),
            "argmin": a.argmin,
            "argmax": a.argmax,
            "vol": str(a.vol),
            "half_KA": str(a.half_KA),
        }
    )


# ---------------------------------------------------------------- parser


def _fmt_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="fmt", action="store_const", const="json")
    g.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    g.add_argument("--svg", dest="fmt", action="store_const", const="svg")
    p.set_defaults(fmt="json")


def _surface_flags(p):
    p.add_argument("--delpezzo", type=int, help="number of blown-up points")
    p.add_argument("--A", help="polarization c,a1,...,an (default -K)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="okcaps", description="Capacities of toric domains and rational surfaces.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("wt", help="weight sequence of a moment domain")
    p.add_argument("--convex")
    p.add_argument("--concave")
    p.add_argument("--points")
    p.add_argument("--weights")
    _fmt_flags(p)
    p.set_defaults(run=cmd_wt)

    p = sub.add_parser("ech", help="ECH capacities of a toric domain")
    p.add_argument("--domain")
    p.add_argument("--weights")
    p.add_argument("--ball")
    p.add_argument("--ellipsoid")
    p.add_argument("--kmax", type=int, default=20)
    _fmt_flags(p)
    p.set_defaults(run=cmd_ech)

    p = sub.add_parser("algcap", help="algebraic capacities")
    _surface_flags(p)
    p.add_argument("--weights")
    p.add_argument("--kmax", type=int, default=20)
    _fmt_flags(p)
    p.set_defaults(run=cmd_algcap)

    p = sub.add_parser("zariski", help="Zariski decomposition")
    p.add_argument("--delpezzo", type=int)
    p.add_argument("--D")
    _fmt_flags(p)
    p.set_defaults(run=cmd_zariski)

    p = sub.add_parser("nobody", help="Newton-Okounkov body")
    _surface_flags(p)
    p.add_argument("--flag", type=int, default=1, help="1-based index of the flag curve")
    _fmt_flags(p)
    p.set_defaults(run=cmd_nobody)

    p = sub.add_parser("embed", help="embedding verdict for a concave source")
    _surface_flags(p)
    p.add_argument("--weights")
    p.add_argument("--source")
    p.add_argument("--ball")
    p.add_argument("--ellipsoid")
    p.add_argument("--kmax", type=int, default=100)
    _fmt_flags(p)
    p.set_defaults(run=cmd_embed)

    p = sub.add_parser("staircase", help="infinite staircase test")
    p.add_argument("--weights")
    p.add_argument("--rank", type=int)
    _fmt_flags(p)
    p.set_defaults(run=cmd_staircase)

    p = sub.add_parser("eef", help="ellipsoid embedding function lower bound")
    _surface_flags(p)
    p.add_argument("--weights")
    p.add_argument("--zmin", default="1")
    p.add_argument("--zmax", default="4")
    p.add_argument("--zsteps", type=int, default=13)
    p.add_argument("--kmax", type=int, default=100)
    _fmt_flags(p)
    p.set_defaults(run=cmd_eef, fmt="csv")

    p = sub.add_parser("asym", help="Weyl law error terms")
    _surface_flags(p)
    p.add_argument("--klo", type=int, default=100)
    p.add_argument("--khi", type=int, default=500)
    _fmt_flags(p)
    p.set_defaults(run=cmd_asym)
    return ap


def _err(kind: str, exc: BaseException) -> str:
    return dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)})


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if getattr(args, "kmax", 0) < 0:
            raise InputError("--kmax must be nonnegative")
        _threads()
        out = args.run(args)
    except InputError as exc:
        print(_err("input", exc), file=sys.stderr)
        return 1
    except DOMAIN_ERRORS as exc:
        print(_err("domain", exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        # remaining value errors come from the math, not the command line
        print(_err("domain", exc), file=sys.stderr)
        return 2
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
