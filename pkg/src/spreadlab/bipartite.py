"""Spreads of near-complete bipartite graphs and the bipartite spread gap.

``K^m_{p,q}`` is ``K_{p,q}`` with ``r = pq - m`` edges removed, all at one
vertex of the side of size ``p >= q``. Its spread is twice the largest
root of ``x^4 - m x^2 + (p-1)(m-(p-1)q)(pq-m)``. ``s_b(n, m)`` is the largest
spread of a bipartite graph of order ``n`` with ``m`` edges, obtained by
maximizing over all admissible ``(p, q)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from .graphs import Graph


@dataclass(frozen=True)
class BipartiteSpec:
    p: int
    q: int
    m: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("sides must be nonempty")
        if self.p < self.q:
            raise ValueError("p must be the larger side")
        if not 0 <= self.r < self.q:
            raise ValueError(f"need 0 <= pq - m < min(p, q), got r = {self.r}")

    @property
    def r(self) -> int:
        return self.p * self.q - self.m

    @classmethod
    def make(cls, p: int, q: int, m: int) -> BipartiteSpec:
        return cls(max(p, q), min(p, q), m)

    def quotient(self) -> np.ndarray:
        """Quotient over the classes (u1), (u2..up), (v1..vr), (v_{r+1}..vq)."""
        p, q, m, r = self.p, self.q, self.m, self.r
        d = m - (p - 1) * q
        return np.array(
            [[0, 0, 0, d], [0, 0, r, d], [0, p - 1, 0, 0], [1, p - 1, 0, 0]],
            dtype=float,
        )

    def graph(self) -> Graph:
        p, q, r = self.p, self.q, self.r
        edges = [(i, p + j) for i in range(p) for j in range(q) if not (i == 0 and j < r)]
        return Graph.from_edges(p + q, edges)


def spread_Kpq_m(spec: BipartiteSpec) -> float:
    """``2 lambda_max`` from the closed-form largest root of the quotient polynomial."""
    p, q, m, r = spec.p, spec.q, spec.m, spec.r
    c = (p - 1) * (m - (p - 1) * q) * r
    disc = m * m - 4 * c
    return 2.0 * math.sqrt((m + math.sqrt(disc)) / 2.0)


def quotient_spread(spec: BipartiteSpec) -> float:
    ev = np.linalg.eigvals(spec.quotient()).real
    return float(ev.max() - ev.min())


def _pairs(n: int, m: int):
    """Admissible ``(p, q)``, p >= q, with p + q <= n and 0 <= pq - m < q."""
    for q in range(1, n // 2 + 1):
        for p in range(q, n - q + 1):
            r = p * q - m
            if 0 <= r < q:
                yield p, q


def s_b(n: int, m: int) -> float:
    if m < 0 or m > n * n // 4:
        raise ValueError("need 0 <= m <= floor(n^2/4)")
    if m == 0:
        return 0.0
    best = None
    for p, q in _pairs(n, m):
        v = spread_Kpq_m(BipartiteSpec(p, q, m))
        best = v if best is None else max(best, v)
    if best is None:
        raise ValueError(f"no admissible (p, q) for n={n}, m={m}")
    return best


def _gap_run(n: int) -> tuple[int, int]:
    top = n * n // 4
    hit = np.zeros(top + 1, dtype=bool)
    hit[0] = True
    for p in range(1, n):
        for q in range(1, n - p + 1):
            if p * q <= top:
                hit[p * q] = True
    best, start, run = 0, 0, 0
    for m in range(top):
        run = 0 if hit[m] else run + 1
        if run > best:
            best, start = run, m - run + 1
    return best, start


def longest_gap(n: int) -> int:
    """Longest run of sizes ``m < floor(n^2/4)`` no complete bipartite graph of order <= n has."""
    if n < 1:
        raise ValueError("n must be positive")
    return _gap_run(n)[0]


def gap_sequence(n: int) -> dict:
    length, start = _gap_run(n)
    return {"n": n, "length": length, "start": start if length else None, "bound": math.sqrt(2 * n - 1) - 1}


@dataclass(frozen=True)
class GapRecord:
    n: int
    m: int
    s_upper: float
    s_lower: float
    s_b: float
    relative_gap: float
    k: int | None = None
    ell: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def plus_quotient(n: int, k: int) -> np.ndarray:
    """Quotient of ``K_{n/2+k, n/2-k}`` plus one edge inside the smaller side."""
    a, b = n // 2 + k, n // 2 - k
    return np.array([[0, 2, b - 2], [a, 1, 0], [a, 0, 0]], dtype=float)


def plus_graph(n: int, k: int) -> Graph:
    a, b = n // 2 + k, n // 2 - k
    edges = [(i, a + j) for i in range(a) for j in range(b)] + [(a, a + 1)]
    return Graph.from_edges(n, edges)


def counterexample_gap(n: int, eps: float) -> GapRecord:
    """Gap between the ``K^+`` family and the best bipartite graph of the same size."""
    if n % 2:
        raise ValueError("n must be even")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    k = next((k for k in range(1, n // 2 - 1) if 1 - 2 * k * k / n < eps / 2), None)
    if k is None:
        raise ValueError(f"no admissible k for n={n}, eps={eps}")
    m = (n // 2 + k) * (n // 2 - k) + 1
    ev = np.linalg.eigvals(plus_quotient(n, k)).real
    s_lower = float(ev.max() - ev.min())
    # every ell < k with an admissible K^m_{n/2+ell, n/2-ell}
    best, ell = -math.inf, None
    for l in range(0, k):
        p, q = n // 2 + l, n // 2 - l
        if 0 <= p * q - m < q:
            v = spread_Kpq_m(BipartiteSpec(p, q, m))
            if v > best:
                best, ell = v, l
    sb = s_b(n, m)
    return GapRecord(n, m, 2 * math.sqrt(m), s_lower, sb, (s_lower - sb) / s_lower, k, ell)


@dataclass
class MechanismReport:
    n: int
    checked: int
    r_violations: list[int]
    gap_violations: list[int]
    max_ratio: float  # largest gap / bound seen

    @property
    def ok(self) -> bool:
        return not self.r_violations and not self.gap_violations

    def to_dict(self) -> dict:
        return asdict(self) | {"ok": self.ok}


def _min_r(n: int, m: int) -> tuple[int, int, int]:
    best = None
    for q in range(1, n // 2 + 1):
        p = max(q, -(-m // q))
        if p + q > n:
            continue
        r = p * q - m
        key = (r, -p)
        if best is None or key < best[0]:
            best = (key, p, q)
    _, p, q = best
    return p, q, p * q - m


def upper_bound_mechanism_check(n: int) -> MechanismReport:
    """For every ``m``: the minimal defect ``r`` is small and ``K^m_{p,q}`` is near ``2 sqrt(m)``."""
    if n > 200:
        raise ValueError("n must be at most 200")
    rv, gv = [], []
    worst = 0.0
    top = n * n // 4
    for m in range(1, top + 1):
        p, q, r = _min_r(n, m)
        if r > 2 * m**0.25 or r >= q:
            rv.append(m)
            continue
        up = 2 * math.sqrt(m)
        gap = (up - spread_Kpq_m(BipartiteSpec(p, q, m))) / up
        bound = m**-0.75 + 16 * m**-1.5
        worst = max(worst, gap / bound)
        if gap > bound:
            gv.append(m)
    return MechanismReport(n, top, rv, gv, worst)


def sweep(n: int) -> list[dict]:
    rows = []
    for m in range(1, n * n // 4 + 1):
        p, q, r = _min_r(n, m)
        sb = s_b(n, m)
        up = 2 * math.sqrt(m)
        rows.append({"m": m, "p": p, "q": q, "r": r, "s_b": sb, "s_upper": up, "relative_gap": (up - sb) / up})
    return rows


def sweep_csv(n: int) -> str:
    buf = io.StringIO()
    rows = sweep(n)
    w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["m"], lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()

