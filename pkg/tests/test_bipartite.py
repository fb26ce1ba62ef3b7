from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from spreadlab.bipartite import (
    BipartiteSpec,
    counterexample_gap,
    gap_sequence,
    longest_gap,
    plus_graph,
    plus_quotient,
    quotient_spread,
    s_b,
    spread_Kpq_m,
    sweep,
    sweep_csv,
    upper_bound_mechanism_check,
)


def brute_bipartite_max(n: int, m: int) -> float:
    """Largest spread over every bipartite graph on n vertices with m edges."""
    best = 0.0
    for p in range((n + 1) // 2, n):
        q = n - p
        cells = [(i, p + j) for i in range(p) for j in range(q)]
        for pick in itertools.combinations(cells, m):
            a = np.zeros((n, n))
            for u, v in pick:
                a[u, v] = a[v, u] = 1.0
            w = np.linalg.eigvalsh(a)
            best = max(best, w[-1] - w[0])
    return best


@pytest.mark.parametrize("n,m", [(8, 14), (8, 13), (7, 11), (6, 7), (8, 11)])
def test_s_b_matches_exhaustive_search(n, m):
    assert s_b(n, m) == pytest.approx(brute_bipartite_max(n, m), abs=1e-10)


def test_s_b_on_complete_bipartite_sizes():
    assert s_b(4, 4) == pytest.approx(4.0, abs=1e-12)
    assert s_b(6, 9) == pytest.approx(6.0, abs=1e-12)
    assert s_b(5, 0) == 0.0
    with pytest.raises(ValueError):
        s_b(4, 5)


def test_spec_validation_and_normalization():
    with pytest.raises(ValueError):
        BipartiteSpec(2, 3, 6)
    with pytest.raises(ValueError):
        BipartiteSpec(3, 2, 3)
    assert BipartiteSpec.make(2, 3, 5) == BipartiteSpec(3, 2, 5)
    assert BipartiteSpec(3, 2, 5).r == 1


@pytest.mark.parametrize("p,q,m", [(3, 2, 5), (5, 5, 24), (7, 4, 26), (9, 6, 50), (4, 4, 16)])
def test_closed_form_matches_quotient_and_graph(p, q, m):
    spec = BipartiteSpec(p, q, m)
    full = spec.graph().spread()
    assert spread_Kpq_m(spec) == pytest.approx(full, abs=1e-10)
    assert quotient_spread(spec) == pytest.approx(full, abs=1e-10)
    assert spec.graph().m == m


def test_known_values():
    assert spread_Kpq_m(BipartiteSpec(3, 2, 5)) == pytest.approx(4.27156, abs=1e-5)
    assert spread_Kpq_m(BipartiteSpec(5, 5, 24)) == pytest.approx(9.65685, abs=1e-5)


def test_gap_lengths():
    assert [longest_gap(n) for n in range(1, 6)] == [0, 0, 0, 0, 1]
    for n in range(5, 200):
        assert longest_gap(n) <= math.ceil(math.sqrt(2 * n - 1) - 1)
    seq = gap_sequence(50)
    assert seq["length"] == 8 and seq["start"] == 601
    with pytest.raises(ValueError):
        longest_gap(0)


def test_plus_family_quotient_matches_graph():
    for n, k in [(20, 2), (40, 3), (60, 4)]:
        ev = np.linalg.eigvals(plus_quotient(n, k)).real
        assert ev.max() - ev.min() == pytest.approx(plus_graph(n, k).spread(), abs=1e-9)
        assert plus_graph(n, k).m == (n // 2 + k) * (n // 2 - k) + 1


def test_counterexample_record():
    rec = counterexample_gap(200, 0.5)
    assert rec.k == 9 and rec.m == 9920
    assert rec.s_lower > rec.s_b
    assert rec.s_lower < rec.s_upper
    assert rec.relative_gap == pytest.approx((rec.s_lower - rec.s_b) / rec.s_lower)
    with pytest.raises(ValueError):
        counterexample_gap(201, 0.5)
    with pytest.raises(ValueError):
        counterexample_gap(200, 1.5)


def test_plus_graph_beats_bipartite_family_for_larger_n():
    # the gap constant improves as n grows
    ratios = [counterexample_gap(n, 0.3) for n in (200, 1000)]
    r = [rec.relative_gap * rec.m**0.75 for rec in ratios]
    assert r[0] < r[1]
    assert all(rec.relative_gap > 0 for rec in ratios)


@pytest.mark.parametrize("n", [2, 10, 30])
def test_mechanism_check(n):
    rep = upper_bound_mechanism_check(n)
    assert rep.ok and rep.checked == n * n // 4
    assert rep.to_dict()["ok"]


def test_mechanism_check_validates():
    with pytest.raises(ValueError):
        upper_bound_mechanism_check(201)


def test_sweep_rows_and_csv():
    rows = sweep(8)
    assert len(rows) == 16
    assert all(r["s_b"] <= r["s_upper"] + 1e-12 for r in rows)
    lines = sweep_csv(8).splitlines()
    assert lines[0].startswith("m,p,q,r,s_b") and len(lines) == 17
