"""Acceptance gate: one test per criterion, each recording a pass/fail line
that is printed in the terminal summary."""

from __future__ import annotations

import math
import os
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import record
from spreadlab import interval as iv
from spreadlab.bipartite import (
    BipartiteSpec,
    counterexample_gap,
    longest_gap,
    plus_graph,
    spread_Kpq_m,
    upper_bound_mechanism_check,
)
from spreadlab.cubic import CubicCoeffs, claim_limits, hessian_at_origin, optimize_Mz, viete_roots
from spreadlab.feasibility import CASE_NAMES, OPEN_CASES, SPREAD_THRESHOLD, Refuted, get_case, run_case
from spreadlab.feasibility.program import FloatContext
from spreadlab.feasibility.search import (
    SearchBox,
    SearchConfig,
    _bisect,
    eliminate_case,
    evaluate_batch,
    is_feasible,
    seed_boxes,
    summarize,
    verify_all,
)
from spreadlab.graphs import JoinSpec, brute_force_max_spread, build_join
from spreadlab.interval import Interval, IntervalSet
from spreadlab.spectra import graphon_spread_of_graph, spread, stepgraphon_matrix
from spreadlab.stepgraphon import F1, contour_grid, eigen_data, spread_of_weights, theorem_optimum, two_block_spread

R3 = math.sqrt(3.0)


def _check(n: int, cond: bool, detail: str) -> None:
    record(n, cond, detail)
    assert cond, detail


# ---------------------------------------------------------------------------
# 1. interval containment


def _rand_float(rnd: random.Random) -> float:
    kind = rnd.random()
    if kind < 0.1:
        return 0.0
    if kind < 0.2:
        return float(rnd.randint(-4, 4))
    mag = 10.0 ** rnd.uniform(-8, 8)
    return math.copysign(mag, rnd.random() - 0.5)


def _rand_interval(rnd: random.Random) -> Interval:
    a, b = sorted((_rand_float(rnd), _rand_float(rnd)))
    if rnd.random() < 0.05:
        a = -math.inf
    if rnd.random() < 0.05:
        b = math.inf
    return Interval(a, b)


def _sample(rnd: random.Random, x: Interval) -> float:
    lo = x.lo if math.isfinite(x.lo) else -1e9
    hi = x.hi if math.isfinite(x.hi) else 1e9
    lo, hi = min(lo, hi), max(lo, hi)
    r = rnd.random()
    if r < 0.15:
        v = lo
    elif r < 0.3:
        v = hi
    else:
        v = lo + (hi - lo) * rnd.random()
    return min(max(v, x.lo), x.hi)


def _contains(s: IntervalSet, exact: Fraction) -> bool:
    return any(
        (p.lo == -math.inf or Fraction(p.lo) <= exact) and (p.hi == math.inf or exact <= Fraction(p.hi))
        for p in s
    )


def _sqrt_contained(s: IntervalSet, exact_sq: Fraction) -> bool:
    # sqrt(v) in [lo, hi]  <=>  lo^2 <= v <= hi^2 for nonnegative endpoints
    return any(
        Fraction(p.lo) ** 2 <= exact_sq and (p.hi == math.inf or exact_sq <= Fraction(p.hi) ** 2) for p in s
    )


def test_criterion_1_interval_containment():
    t0 = time.time()
    rnd = random.Random(1)
    violations = 0
    trials = 100_000
    ops = ("add", "sub", "mul", "div", "sqrt")
    for _ in range(trials):
        op = ops[rnd.randrange(5)]
        X, Y = _rand_interval(rnd), _rand_interval(rnd)
        x, y = _sample(rnd, X), _sample(rnd, Y)
        fx, fy = Fraction(x), Fraction(y)
        if op == "add":
            ok = _contains(iv.add(X, Y), fx + fy)
        elif op == "sub":
            ok = _contains(iv.sub(X, Y), fx - fy)
        elif op == "mul":
            ok = _contains(iv.mul(X, Y), fx * fy)
        elif op == "div":
            if y == 0.0:
                continue
            ok = _contains(iv.div(X, Y), fx / fy)
        else:
            if x < 0:
                continue
            ok = _sqrt_contained(iv.sqrt(X), fx)
        violations += not ok
    # four-case reciprocal structure
    cases = [
        (Interval(2.0, 4.0), [(0.25, 0.5)]),
        (Interval(0.0, 4.0), [(0.25, math.inf)]),
        (Interval(-4.0, 0.0), [(-math.inf, -0.25)]),
        (Interval(-2.0, 4.0), [(-math.inf, -0.5), (0.25, math.inf)]),
    ]
    structure = all([(p.lo, p.hi) for p in iv.reciprocal(y)] == want for y, want in cases)
    structure &= iv.reciprocal(Interval(0.0, 0.0)).empty
    dt = time.time() - t0
    _check(1, violations == 0 and structure and dt < 30,
           f"{trials} trials, {violations} violations, division cases {'ok' if structure else 'wrong'}, {dt:.1f}s")


# ---------------------------------------------------------------------------
# 2. refutation example


def test_criterion_2_g3_squared_refutation():
    t0 = time.time()
    a = IntervalSet.of(0.7, 0.8)
    mu = IntervalSet.of(0.9, 1.0)
    nu = IntervalSet.of(-0.2, -0.1)
    g3sq = (a + 2 * mu) * nu / F1(a, mu, nu)
    h = iv.hull(g3sq)
    lo_ref, hi_ref = -56 / 9, -25 / 54  # -6.2(2), -0.462(962)
    contained = h.lo >= -6.23 and h.hi <= -0.46
    tight = abs(h.lo - lo_ref) <= 1e-12 and abs(h.hi - hi_ref) <= 1e-12
    disjoint = iv.intersect(g3sq, IntervalSet.of(0.0, math.inf)).empty
    dt = time.time() - t0
    _check(2, contained and tight and disjoint and dt < 1, f"g3^2 in [{h.lo:.6f}, {h.hi:.6f}], {dt * 1e3:.1f}ms")


# ---------------------------------------------------------------------------
# 3. optimum


def test_criterion_3_optimum():
    t0 = time.time()
    s = spread_of_weights([2 / 3, 0, 0, 0, 0, 0, 1 / 3])
    e = eigen_data([2 / 3, 0, 0, 0, 0, 0, 1 / 3])
    opt = theorem_optimum()
    f_ok = all(abs(e.f[k] - opt["f"][k]) <= 1e-10 for k in (1, 7))
    g_ok = all(abs(e.g[k] - opt["g"][k]) <= 1e-10 for k in (1, 7))
    mu_ok = abs(e.mu - (1 + R3) / 3) <= 1e-12 and abs(e.nu - (1 - R3) / 3) <= 1e-12
    step = 1e-3
    grid = np.arange(0, 1 + step / 2, step)
    arg = grid[int(np.argmax([two_block_spread(a) for a in grid]))]
    dt = time.time() - t0
    ok = abs(s - 2 / R3) <= 1e-12 and f_ok and g_ok and mu_ok and abs(arg - 2 / 3) <= step and dt < 1
    _check(3, ok, f"spread {s!r}, |diff| {abs(s - 2 / R3):.1e}, grid argmax {arg:.3f}, {dt:.2f}s")


# ---------------------------------------------------------------------------
# 4. small-n maximizers


def test_criterion_4_small_n_maximizers():
    problems = []
    t0 = time.time()
    for n in range(3, 8):
        res = brute_force_max_spread(n, "full")
        want = build_join(JoinSpec.extremal(n))
        if res.co_maximizers or sorted(res.best.degrees()) != sorted(want.degrees()) or abs(res.best_spread - want.spread()) > 1e-9:
            problems.append(f"full n={n}")
    t_full = time.time() - t0
    t0 = time.time()
    for n in range(3, 21):
        res = brute_force_max_spread(n, "threshold_join")
        want = build_join(JoinSpec.extremal(n))
        if res.co_maximizers or sorted(res.best.degrees()) != sorted(want.degrees()) or abs(res.best_spread - want.spread()) > 1e-9:
            problems.append(f"threshold n={n}")
    t_thr = time.time() - t0
    ok = not problems and t_full < 600 and t_thr < 60
    _check(4, ok, f"full n=3..7 {t_full:.1f}s, threshold n=3..20 {t_thr:.1f}s, mismatches {problems or 'none'}")


# ---------------------------------------------------------------------------
# 5. soundness


def _covering_chain(point, depth, cfg=SearchConfig()):
    a_i, a_j, mu, nu = point
    row = next(
        r for r in seed_boxes(cfg)
        if r[0] <= a_i <= r[1] and r[2] <= a_j <= r[3] and r[4] <= mu <= r[5] and r[6] <= nu <= r[7]
    )
    box = SearchBox.from_bounds(row)
    chain = [box]
    for _ in range(depth):
        left, right = box.children()
        box = left if left.contains(a_i, a_j, mu, nu) else right
        chain.append(box)
    return chain


def test_criterion_5_soundness():
    t0 = time.time()
    case = get_case("1|7")
    point = (2 / 3, 1 / 3, (1 + R3) / 3, (1 - R3) / 3)
    chain = _covering_chain(point, 40)
    chain_ok = all(is_feasible(case, b)[0] for b in chain)
    rows = np.array([b.bounds() for b in chain])
    chain_ok &= bool(evaluate_batch(case, rows, SPREAD_THRESHOLD, exact=True)[0].all())

    # eliminated boxes from the first levels of several searches; a float
    # solution inside any of them would expose an unsound refutation
    rng = np.random.default_rng(5)
    found = sampled = 0
    names = ("1|7", "4|57", "1|4|7", "24|57", "1|57")
    for name in names:
        c = get_case(name)
        boxes = seed_boxes(SearchConfig())
        dead = []
        for depth in range(8):
            alive, _, _ = evaluate_batch(c, boxes, SPREAD_THRESHOLD, exact=False)
            dead.append(boxes[~alive])
            boxes = _bisect(boxes[alive], depth % 4)
        dead = np.concatenate(dead)
        pick = dead[rng.choice(len(dead), size=min(10_000 // len(names), len(dead)), replace=False)]
        for b in pick:
            pt = [b[2 * k] + (b[2 * k + 1] - b[2 * k]) * rng.random() for k in range(4)]
            sampled += 1
            try:
                run_case(c, FloatContext(1e-9), *pt)
                found += 1
            except Refuted:
                pass
    dt = time.time() - t0
    _check(5, chain_ok and found == 0 and sampled == 10_000 and dt < 300,
           f"depth-40 chain {'survives' if chain_ok else 'ELIMINATED'}, {sampled} eliminated samples, "
           f"{found} float solutions inside, {dt:.1f}s")


# ---------------------------------------------------------------------------
# 6. case elimination at depth 20


def test_criterion_6_case_elimination_depth20():
    t0 = time.time()
    eliminated = []
    for name in CASE_NAMES:
        if name in OPEN_CASES:
            continue
        rep = eliminate_case(name, 20)
        if rep.status == "eliminated":
            eliminated.append(name)
    dt = time.time() - t0
    _check(6, len(eliminated) >= 8 and dt < 1800, f"{len(eliminated)}/15 eliminated at depth 20 in {dt:.0f}s")


@pytest.mark.skipif(not os.environ.get("SPREADLAB_LONG"), reason="long mode: set SPREADLAB_LONG=1")
def test_criterion_6_long_mode_depth26():
    reps = verify_all(26)
    s = summarize(reps)
    assert len(s["eliminated"]) == 15
    assert set(s["open"]) == set(OPEN_CASES)


# ---------------------------------------------------------------------------
# 7. contour data


def test_criterion_7_contours():
    t0 = time.time()
    a = contour_grid("A", 1 / 50)
    xa, ya, va = a.argmax()
    b = contour_grid("B", 1 / 50)
    locus = b.maximizers(1e-9)
    on_edge = all(x == 0.0 or y == 0.0 for x, y in locus)
    dt = time.time() - t0
    ok = xa == 0.0 and abs(va - 2 / R3) <= 0.02 and on_edge and dt < 600
    _check(7, ok, f"plot A max at x={xa:.2f} value {va:.6f}; plot B maximizers {locus[:3]}, {dt:.0f}s")


# ---------------------------------------------------------------------------
# 8. cubic suite


def test_criterion_8_cubic():
    t0 = time.time()
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(200):
        roots = np.sort(rng.uniform(-3, 3, 3))
        c = np.poly(roots)
        cc = CubicCoeffs(*c)
        got = np.array(viete_roots(cc))
        comp = np.sort(np.linalg.eigvals(np.array([[-c[1], -c[2], -c[3]], [1, 0, 0], [0, 1, 0]])).real)[::-1]
        worst = max(worst, float(np.max(np.abs(got - comp))))
    lim = claim_limits()
    lim_ok = abs(lim[0] - 0.9107) < 1e-4 and abs(lim[1] + 0.2440) < 1e-4 and abs(lim[2]) < 1e-4
    H = hessian_at_origin()
    ref = (-8.66, -8.66, -11.26)
    got_h = (float(H[0, 0]), float(H[0, 1]), float(H[1, 1]))
    h_ok = all(abs(g - r) <= 0.02 * abs(r) for g, r in zip(got_h, ref))
    det = float(np.linalg.det(H))
    d_ok = abs(det - 22.5) <= 0.05 * 22.5
    z = 1e-3
    e1, e2 = optimize_Mz(z)
    o_ok = abs(e1 - 7 * z / 30) <= 0.1 * 7 * z / 30 and abs(e2 + z / 3) <= 0.1 * z / 3
    dt = time.time() - t0
    ok = worst <= 1e-10 and lim_ok and h_ok and d_ok and o_ok and dt < 60
    _check(8, ok, f"root err {worst:.1e}, limits {tuple(round(float(v), 4) + 0.0 for v in lim)}, "
                  f"hessian {tuple(round(v, 2) for v in got_h)} det {det:.2f}, eps* ({e1:.3e}, {e2:.3e})")


# ---------------------------------------------------------------------------
# 9. bipartite suite


def test_criterion_9_bipartite():
    t0 = time.time()
    gaps_ok = all(longest_gap(n) == 0 for n in range(1, 5)) and longest_gap(5) == 1
    bound_ok = all(longest_gap(n) <= math.ceil(math.sqrt(2 * n - 1) - 1) for n in range(5, 501))
    worst = 0.0
    for p in range(1, 20):
        for q in range(1, p + 1):
            if p + q > 20:
                continue
            for r in range(q):
                spec = BipartiteSpec(p, q, p * q - r)
                worst = max(worst, abs(spread_Kpq_m(spec) - spec.graph().spread()))
    mech = all(upper_bound_mechanism_check(n).ok for n in range(2, 61))
    rec = counterexample_gap(200, 0.5)
    full = plus_graph(200, rec.k).spread()
    full_ok = abs(full - rec.s_lower) <= 1e-8
    target = 0.8 / rec.m**0.75
    dt = time.time() - t0
    structural = gaps_ok and bound_ok and worst <= 1e-10 and mech and full_ok and dt < 300
    record(9, structural and rec.relative_gap >= target,
           f"gaps ok={gaps_ok and bound_ok}, quotient err {worst:.1e}, mechanism ok={mech}, "
           f"K+ full-spectrum err {abs(full - rec.s_lower):.1e}, relative gap {rec.relative_gap:.3e} "
           f"vs 0.8/m^(3/4) = {target:.3e}")
    assert structural


def test_criterion_9_counterexample_gap_constant():
    rec = counterexample_gap(200, 0.5)
    target = 0.8 / rec.m**0.75
    ok = rec.relative_gap >= target
    if not ok:
        record(9, False, f"relative gap {rec.relative_gap:.3e} < 0.8/m^(3/4) = {target:.3e} at n=200")
    assert ok, f"relative gap {rec.relative_gap:.3e} below {target:.3e}"


# ---------------------------------------------------------------------------
# 10. graph/stepgraphon identity


def test_criterion_10_graph_graphon_identity():
    t0 = time.time()
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 11))
        a = np.triu(rng.random((n, n)) < rng.uniform(0.2, 0.8), 1)
        a = (a | a.T).astype(float)
        direct = spread(a) / n
        via = spread(stepgraphon_matrix(np.full(n, 1 / n), a))
        worst = max(worst, abs(direct - via))
        graphon_spread_of_graph(a)
    dt = time.time() - t0
    _check(10, worst <= 1e-9 and dt < 10, f"100 graphs, max |diff| {worst:.1e}, {dt:.2f}s")
