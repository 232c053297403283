"""One PASS/FAIL line per acceptance criterion; the lines are repeated in the
terminal summary at the end of the run."""
import itertools
import random
import time
from fractions import Fraction as F

from _oracles import cremona_orbit, numeric_neg_one_classes, random_convex_domains, sorted_sums
from okcaps.algcap import PolarizedSurface, alg_cap, alg_table, asym_summary
from okcaps.apps import discriminant, staircase_verdict, unit_threshold
from okcaps.exactgeom import Polygon, is_negative_definite, lattice_count, sqrt_bounds
from okcaps.moment import MomentDomain, PolytopalityError, WeightNode, WeightTree, reconstruct, wt, wt_concave, wt_convex
from okcaps.okounkov import no_body
from okcaps.picard import DivisorClass, E, H, SurfaceModel, intersect, is_nef, neg_one_classes, volume, zariski
from okcaps.toric_ech import ball_cap, brute_convex_table, convex_table, ellipsoid_table

RESULTS = []


def report(num, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {num} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def units(c, k):
    return WeightTree(F(c), tuple(WeightNode(1) for _ in range(k)))


DP5 = PolarizedSurface.delpezzo(4)
FIG2 = [(0, 0), (2, 0), (1, 2), (0, 1)]


def test_1_dp5_body():
    t0 = time.perf_counter()
    b = no_body(DP5, 3)
    dt = time.perf_counter() - t0
    beta_ok = all(b.beta(t) == 1 + t for t in (F(0), F(1, 3), F(1, 2), F(1))) and all(
        b.beta(t) == 4 - 2 * t for t in (F(1), F(3, 2), F(7, 4), F(2))
    )
    verts = set(b.polygon().vertices)
    ok = b.mu == 2 and beta_ok and verts == {(0, 0), (0, 1), (1, 2), (2, 0)} and dt < 1
    report("1", "dP5 Newton-Okounkov body", ok, f"mu={b.mu} vertices={[(str(x), str(y)) for x, y in sorted(verts)]} time={dt:.3f}s")


def test_2_dp5_weights():
    t0 = time.perf_counter()
    w = wt_convex(MomentDomain.convex(FIG2))
    dt = time.perf_counter() - t0
    ok = w.head == 3 and sorted(w.positive_weights()) == [1, 1, 1, 1] and dt < 1
    report("2", "dP5 weight sequence", ok, f"{w} time={dt:.3f}s")


def test_3_cross_route():
    t0 = time.perf_counter()
    alg = [alg_cap(DP5, k) for k in range(21)]
    ech = convex_table(reconstruct(WeightTree.from_flat(3, [1, 1, 1, 1])), 20)
    dt = time.perf_counter() - t0
    ok = alg == ech and dt < 60
    report("3", "algebraic = toric capacities on (3;1,1,1,1), k<=20", ok,
           f"c_20={alg[20]} time={dt:.1f}s")


def test_4_zariski_example():
    n = 8
    t0 = time.perf_counter()
    Z = zariski(H(n) + E(1, n), SurfaceModel.delpezzo(n))
    vol = volume(H(n) + E(1, n), SurfaceModel.delpezzo(n))
    dt = time.perf_counter() - t0
    ok = Z.P == H(n) and Z.N == E(1, n) and vol == 1
    report("4", "Zariski decomposition of H+E_1", ok, f"P={Z.P} N={Z.N} vol={vol} time={dt:.3f}s")


def test_5_staircase_thresholds():
    t0 = time.perf_counter()
    details = []
    ok = True
    for n, shown in ((6, "(18+sqrt24)/5"), (8, "(24+sqrt96)/5")):
        p, D, q = unit_threshold(n)
        ok &= D == {6: 24, 8: 96}[n] and p == 3 * n and q == 5
        lo, hi = sqrt_bounds(D, F(1, 10**12))
        eps = F(1, 10**9)
        below = [(p + lo) / q - eps, (p + lo) / q]
        above = [(p + hi) / q, (p + hi) / q + eps]
        ok &= all(discriminant(units(c, n)) < 0 for c in below)
        ok &= all(discriminant(units(c, n)) > 0 for c in above)
        details.append(f"n={n} c*={shown}")
    v6 = staircase_verdict(units(F(9, 2), 6), 7)
    v8 = staircase_verdict(units(F(13, 2), 8), 9)
    ok &= v6.no_staircase and v8.no_staircase
    dt = time.perf_counter() - t0
    report("5", "staircase thresholds and verdicts", ok,
           f"{'; '.join(details)}; c=9/2 -> {v6.no_staircase}; c=13/2 -> {v8.no_staircase}; time={dt:.3f}s")


def test_6_capacity_oracles():
    t0 = time.perf_counter()
    rng = random.Random(6)
    ok = [ball_cap(1, k) for k in range(501)] == sorted_sums(1, 1, 500)
    for _ in range(10):
        a = F(rng.randint(1, 12), rng.randint(1, 6))
        b = F(rng.randint(1, 12), rng.randint(1, 6))
        ok &= ellipsoid_table(a, b, 500) == sorted_sums(a, b, 500)
    t1 = time.perf_counter()
    agree = 0
    for d in random_convex_domains(20, seed=66):
        agree += convex_table(d, 10) == brute_convex_table(d, 10, box=40)
    dt = time.perf_counter() - t0
    ok &= agree == 20 and dt < 120
    report("6", "capacity oracles", ok,
           f"balls/ellipsoids k<=500 ok; convex vs brute {agree}/20; time={dt:.1f}s (brute part {dt - (t1 - t0):.1f}s)")


def _weyl(s, k=2000):
    c = alg_cap(s, k)
    return float(c * c / (2 * k)) / float(s.volume())


def test_7a_weyl_ratio():
    t0 = time.perf_counter()
    cases = {
        "plane(1)": PolarizedSurface.delpezzo(0, DivisorClass(1, ())),
        "dP5 -K": DP5,
        "H+E_1 on n=8": PolarizedSurface.delpezzo(8, H(8) + E(1, 8)),
    }
    ratios = {name: _weyl(s) for name, s in cases.items()}
    dt = time.perf_counter() - t0
    ok = all(abs(r - 1) <= 0.05 for r in ratios.values()) and dt < 600
    report("7a", "Weyl law c_k^2/2k vs vol at k=2000", ok,
           ", ".join(f"{k}: {v:.4f}" for k, v in ratios.items()) + f"; time={dt:.1f}s")


def test_7b_error_terms_nef():
    cases = {
        "plane(1)": PolarizedSurface.delpezzo(0, DivisorClass(1, ())),
        "dP5 -K": DP5,
    }
    ok, parts = True, []
    for name, s in cases.items():
        a = asym_summary(s, 500, 2000)
        ok &= abs(a.min_e - a.half_KA) <= F(1, 10)
        parts.append(f"{name}: min e_k={float(a.min_e):.4f} vs K.A/2={a.half_KA}")
    report("7b", "error terms, nef polarizations", ok, "; ".join(parts))


def test_7c_error_terms_big_non_nef():
    s = PolarizedSurface.delpezzo(8, H(8) + E(1, 8))
    a = asym_summary(s, 500, 2000)
    P = s.positive_part
    half_KP = intersect(P, DivisorClass(-3, (-1,) * 8)) / 2
    ok = abs(a.min_e - a.half_KA) <= F(1, 10)
    report("7c", "error terms, H+E_1 on n=8", ok,
           f"min e_k={float(a.min_e):.4f} vs K.A/2={a.half_KA} (K.P/2={half_KP}; "
           f"c_k equals the plane's since A.D = d + m_1 is least at D = dH)")


def test_8_property_suites():
    t0 = time.perf_counter()
    notes, ok = [], True
    # Pick
    rng = random.Random(8)
    done = 0
    while done < 100:
        P = Polygon.from_points([(rng.randint(-7, 7), rng.randint(-7, 7)) for _ in range(rng.randint(3, 9))])
        if len(P) < 3:
            continue
        ok &= P.area() == lattice_count(P) - P.boundary_count() + F(P.boundary_count(), 2) - 1
        done += 1
    notes.append("pick 100")
    # area identities on reconstructed trees
    trees = 0
    for c in range(1, 8):
        for k in range(0, 5):
            for ws in itertools.combinations_with_replacement((1, 2, 3), k):
                try:
                    d = reconstruct(WeightTree.from_flat(c, ws))
                except PolytopalityError:
                    continue
                w = wt(d)
                ok &= 2 * d.area() == c * c - sum(a * a for a in ws) == w.volume2()
                trees += 1
    for _ in range(50):
        edges = sorted({(rng.randint(1, 4), rng.randint(1, 4)) for _ in range(rng.randint(1, 4))},
                       key=lambda e: F(-e[1], e[0]))
        y = sum(dy for _, dy in edges)
        pts, x = [(0, y)], 0
        for dx, dy in edges:
            x, y = x + dx, y - dy
            pts.append((x, y))
        d = MomentDomain.concave(pts)
        ok &= 2 * d.area() == sum(a * a for a in wt_concave(d).weights())
        trees += 1
    notes.append(f"area identities {trees}")
    # Zariski invariants
    for _ in range(200):
        n = rng.randint(0, 8)
        model = SurfaceModel.delpezzo(n)
        gens = model.generators()
        D = H(n) * 0
        for g in rng.sample(gens, min(len(gens), rng.randint(1, 4))):
            D = D + g * F(rng.randint(0, 6), rng.randint(1, 3))
        Z = zariski(D, model, check=False)
        curves = [C for C, _ in Z.neg_support]
        ok &= is_nef(Z.P, model) and all(x > 0 for _, x in Z.neg_support)
        ok &= intersect(Z.P, Z.N) == 0 and Z.P + Z.N == D
        if curves:
            ok &= is_negative_definite([[intersect(a, b) for b in curves] for a in curves])
    notes.append("zariski 200")
    # body volume on every sweep
    runs = 0
    for n in range(1, 7):
        for c in range(2, 6):
            s = PolarizedSurface.delpezzo(n, DivisorClass(c, (1,) * n))
            if not s.is_polarized():
                continue
            for flag in range(len(s.model.neg_curves)):
                b = no_body(s, flag)
                ok &= 2 * b.area() == intersect(s.A, s.A)
                runs += 1
    notes.append(f"body area {runs} runs")
    # (-1)-class counts against independent enumerators
    counts = [len(neg_one_classes(n)) for n in range(1, 9)]
    ok &= counts == [1, 3, 6, 10, 16, 27, 56, 240]
    for n in range(1, 8):
        ok &= {(int(C.d), tuple(int(x) for x in C.m)) for C in neg_one_classes(n)} == numeric_neg_one_classes(n, 3)
    ok &= {(int(C.d), tuple(int(x) for x in C.m)) for C in neg_one_classes(8)} == cremona_orbit(8)
    notes.append(f"(-1)-counts {counts}")
    # multiplicity bound
    checked = 0
    for N in range(4, 9):
        for C in neg_one_classes(N):
            if C.d >= 2:
                ok &= max(C.m) <= F(N - 3, N - 1) * C.d
                checked += 1
    notes.append(f"multiplicity bound {checked} classes")
    dt = time.perf_counter() - t0
    report("8", "property suites", ok, "; ".join(notes) + f"; time={dt:.1f}s")
