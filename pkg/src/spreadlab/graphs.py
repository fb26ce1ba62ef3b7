"""Graph families, brute-force spread maximization and structural checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .spectra import extreme_eigs

_EIG_CHUNK = 1 << 16


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=bool)
        if a.shape != (self.n, self.n):
            raise ValueError("adjacency shape does not match n")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency is not symmetric")
        if a.diagonal().any():
            raise ValueError("loops are not allowed")
        object.__setattr__(self, "adjacency", a)

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        a = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            a[u, v] = a[v, u] = True
        return cls(n, a)

    @property
    def edges(self) -> list[tuple[int, int]]:
        u, v = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(a), int(b)) for a, b in zip(u, v)]

    @property
    def m(self) -> int:
        return int(self.adjacency.sum()) // 2

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted((int(d) for d in self.adjacency.sum(axis=1)), reverse=True))

    def matrix(self) -> np.ndarray:
        return self.adjacency.astype(float)

    def spread(self) -> float:
        return extreme_eigs(self.matrix()).spread

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in np.nonzero(self.adjacency[u])[0]:
                if int(v) not in seen:
                    seen.add(int(v))
                    stack.append(int(v))
        return len(seen) == self.n


@dataclass(frozen=True)
class JoinSpec:
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        if min(self.n1, self.n2, self.n3) < 0:
            raise ValueError("part sizes must be nonnegative")

    @property
    def n(self) -> int:
        return self.n1 + self.n2 + self.n3

    @classmethod
    def extremal(cls, n: int) -> JoinSpec:
        """The conjectured maximizer: a clique on floor(2n/3) joined to the rest."""
        n1 = (2 * n) // 3
        return cls(n1, 0, n - n1)


def build_join(spec: JoinSpec) -> Graph:
    """``(K_{n1} + independent n2) joined to an independent set of size n3``."""
    n = spec.n
    a = np.zeros((n, n), dtype=bool)
    a[: spec.n1, : spec.n1] = True
    inner = spec.n1 + spec.n2
    a[:inner, inner:] = True
    a[inner:, :inner] = True
    np.fill_diagonal(a, False)
    return Graph(n, a)


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_bipartite(p: int, q: int) -> Graph:
    return build_join(JoinSpec(0, p, q))


def join_spread_formula(n1: int, n2: int, n3: int) -> float:
    """Spread of ``G(n1,n2,n3)`` from its 3x3 quotient (exact eigensolve)."""
    from .spectra import real_eigs_small

    sizes = [s for s in (n1, n2, n3) if s > 0]
    pat = []
    kinds = [k for k, s in zip("cin", (n1, n2, n3)) if s > 0]
    for a in kinds:
        row = []
        for b in kinds:
            adj = (a == "c" and b == "c") or (a != "n") != (b != "n")
            row.append(1.0 if adj else 0.0)
        pat.append(row)
    q = [[pat[i][j] * (sizes[j] - (1 if i == j else 0)) for j in range(len(sizes))] for i in range(len(sizes))]
    ev = real_eigs_small(q)
    lo = min(ev[-1], 0.0)
    if n1 >= 2:
        lo = min(lo, -1.0)
    return max(ev[0], 0.0) - lo


# ---------------------------------------------------------------------------
# brute force


@dataclass
class BruteForceResult:
    n: int
    mode: str
    best: Graph
    best_spread: float
    co_maximizers: list[tuple[int, ...]]
    graphs_scored: int
    bound_violations: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "best_spread": self.best_spread,
            "best_graph_edges": [list(e) for e in self.best.edges],
            "best_degrees": list(self.best.degrees()),
            "co_maximizers": [list(d) for d in self.co_maximizers],
            "graphs_scored": self.graphs_scored,
            "bound_violations": self.bound_violations,
        }


def _bound_violations(lmax: np.ndarray, spreads: np.ndarray, m: np.ndarray, tol: float = 1e-9) -> int:
    # spread <= l1 + sqrt(2m - l1^2) <= 2 sqrt(m)
    mid = lmax + np.sqrt(np.maximum(2.0 * m - lmax * lmax, 0.0))
    bad = (spreads > mid + tol) | (mid > 2.0 * np.sqrt(m) + tol) | (2.0 * m - lmax * lmax < -tol)
    return int(bad.sum())


def _full_search(n: int, tol: float):
    pairs = list(itertools.combinations(range(n), 2))
    e = len(pairs)
    total = 1 << e
    us = np.array([p[0] for p in pairs])
    vs = np.array([p[1] for p in pairs])
    shifts = np.arange(e, dtype=np.int64)
    best = -1.0
    near: list[int] = []
    violations = 0
    for start in range(0, total, _EIG_CHUNK):
        masks = np.arange(start, min(total, start + _EIG_CHUNK), dtype=np.int64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(float)
        a = np.zeros((masks.size, n, n))
        if e:
            a[:, us, vs] = bits
            a[:, vs, us] = bits
        w = np.linalg.eigvalsh(a)
        s = w[:, -1] - w[:, 0]
        violations += _bound_violations(w[:, -1], s, bits.sum(axis=1))
        cmax = float(s.max())
        if cmax > best + tol:
            best = cmax
            near = [int(x) for x in masks[s >= best - tol]]
        elif cmax >= best - tol:
            near.extend(int(x) for x in masks[s >= best - tol])
            best = max(best, cmax)
    graphs = [Graph.from_edges(n, [pairs[k] for k in range(e) if (mk >> k) & 1]) for mk in near]
    return best, graphs, total, violations


def threshold_sequences(k: int) -> list[tuple[int, ...]]:
    """Creation sequences of the 2^(k-1) threshold graphs on k vertices.

    Entry t is 1 when vertex t is added as a dominating vertex and 0 when it
    is added isolated; entry 0 is fixed at 0.
    """
    if k == 0:
        return [()]
    return [(0,) + bits for bits in itertools.product((0, 1), repeat=k - 1)]


def threshold_graph(seq) -> np.ndarray:
    k = len(seq)
    a = np.zeros((k, k), dtype=bool)
    for t in range(1, k):
        if seq[t]:
            a[t, :t] = True
            a[:t, t] = True
    return a


def _runs(seq) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Twin classes of a threshold graph as (sizes, kinds); kind 1 = clique."""
    if not seq:
        return (), ()
    s = list(seq)
    if len(s) > 1:
        s[0] = s[1]
    sizes, kinds = [], []
    for bit in s:
        if kinds and kinds[-1] == bit:
            sizes[-1] += 1
        else:
            sizes.append(1)
            kinds.append(bit)
    return tuple(sizes), tuple(kinds)


def _threshold_quotients(k: int):
    """Group threshold graphs on k vertices by twin-class count."""
    groups: dict[int, list] = {}
    for seq in threshold_sequences(k):
        sizes, kinds = _runs(seq)
        groups.setdefault(len(sizes), []).append((seq, sizes, kinds))
    out = {}
    for r, items in groups.items():
        w = np.array([it[1] for it in items], dtype=float).reshape(len(items), r)
        kind = np.array([it[2] for it in items], dtype=bool).reshape(len(items), r)
        # cell b later than a is adjacent to a iff b is a dominating run
        idx = np.arange(r)
        later = idx[None, :] > idx[:, None]
        adj = np.where(later[None], kind[:, None, :], kind[:, :, None])
        adj = adj & (idx[:, None] != idx[None, :])[None]
        root = np.sqrt(w)
        q = adj * root[:, :, None] * root[:, None, :]
        q[:, idx, idx] = np.where(kind, w - 1.0, 0.0)
        clique2 = (kind & (w >= 2)).any(axis=1)
        edges = np.array([sum(t for t, bit in enumerate(it[0]) if bit) for it in items], dtype=float)
        out[r] = ([it[0] for it in items], q, root, clique2, edges)
    return out


def _threshold_join_search(n: int, tol: float):
    cache = {k: _threshold_quotients(k) for k in range(0, n + 1)}
    # any member of the family is a valid lower bound; pairs whose edge count
    # gives 2 sqrt(m) below it cannot reach the maximum
    floor = build_join(JoinSpec.extremal(n)).spread() if n >= 2 else 0.0
    min_edges = max(0.0, floor - 1e-6) ** 2 / 4.0
    best = -1.0
    near: list[tuple] = []
    scored = 0
    for k1 in range(0, n // 2 + 1):
        k2 = n - k1
        for r1, (seqs1, q1, w1, c1, e1) in cache[k1].items():
            for r2, (seqs2, q2, w2, c2, e2) in cache[k2].items():
                size = r1 + r2
                keep = e1[:, None] + e2[None, :] + k1 * k2 >= min_edges
                i1, i2 = np.nonzero(keep)
                for s0 in range(0, i1.size, _EIG_CHUNK):
                    a = i1[s0 : s0 + _EIG_CHUNK]
                    b = i2[s0 : s0 + _EIG_CHUNK]
                    mat = np.zeros((a.size, size, size))
                    mat[:, :r1, :r1] = q1[a]
                    mat[:, r1:, r1:] = q2[b]
                    cross = w1[a][:, :, None] * w2[b][:, None, :]
                    mat[:, :r1, r1:] = cross
                    mat[:, r1:, :r1] = np.swapaxes(cross, -1, -2)
                    if size:
                        w = np.linalg.eigvalsh(mat)
                        hi = np.maximum(w[:, -1], 0.0)
                        lo = np.minimum(w[:, 0], 0.0)
                    else:
                        hi = lo = np.zeros(a.size)
                    lo = np.where(c1[a] | c2[b], np.minimum(lo, -1.0), lo)
                    s = hi - lo
                    scored += s.size
                    cmax = float(s.max())
                    if cmax > best + tol:
                        best = cmax
                        near = []
                    if cmax >= best - tol:
                        for t in np.nonzero(s >= best - tol)[0]:
                            near.append((seqs1[a[t]], seqs2[b[t]]))
    graphs = []
    for sa, sb in near:
        a = np.zeros((n, n), dtype=bool)
        k1 = len(sa)
        a[:k1, :k1] = threshold_graph(sa)
        a[k1:, k1:] = threshold_graph(sb)
        a[:k1, k1:] = True
        a[k1:, :k1] = True
        graphs.append(Graph(n, a))
    return best, graphs, scored


def brute_force_max_spread(n: int, mode: str = "full", tol: float = 1e-9) -> BruteForceResult:
    """Maximize the spread over all graphs (``full``) or threshold joins."""
    if mode == "full":
        if not 1 <= n <= 7:
            raise ValueError("full mode supports 1 <= n <= 7")
        best, graphs, scored, violations = _full_search(n, tol)
    elif mode == "threshold_join":
        if not 1 <= n <= 24:
            raise ValueError("threshold_join mode supports 1 <= n <= 24")
        best, graphs, scored = _threshold_join_search(n, tol)
        violations = 0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    # recompute exactly on the candidates and group by degree sequence
    scored_graphs = sorted(((g.spread(), g) for g in graphs), key=lambda t: -t[0])
    top = scored_graphs[0][0]
    classes: dict[tuple[int, ...], Graph] = {}
    for s, g in scored_graphs:
        if s >= top - tol:
            classes.setdefault(g.degrees(), g)
    degs = list(classes)
    return BruteForceResult(
        n=n,
        mode=mode,
        best=classes[degs[0]],
        best_spread=top,
        co_maximizers=degs[1:],
        graphs_scored=scored,
        bound_violations=violations,
    )


# ---------------------------------------------------------------------------
# structural checks


@dataclass
class StructureReport:
    adjacent_violations: int
    nonadjacent_violations: int
    positive_side: list[int]
    negative_side: list[int]
    join: bool
    positive_threshold: bool
    negative_threshold: bool


def is_threshold(a: np.ndarray) -> bool:
    """Nesting-neighborhood test: for all u,v one of N(u)-v, N(v)-u contains the other."""
    a = np.asarray(a, dtype=bool)
    k = a.shape[0]
    for u in range(k):
        for v in range(u + 1, k):
            nu = a[u].copy()
            nv = a[v].copy()
            nu[v] = False
            nv[u] = False
            if not ((~nu | nv).all() or (~nv | nu).all()):
                return False
    return True


def check_lemma21(g: Graph, tol: float = 1e-9) -> StructureReport:
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    sp = extreme_eigs(g.matrix())
    k = np.outer(sp.x, sp.x) - np.outer(sp.z, sp.z)
    off = ~np.eye(g.n, dtype=bool)
    adj = g.adjacency
    a_bad = int(np.sum((k < -tol) & adj & off)) // 2
    n_bad = int(np.sum((k > tol) & ~adj & off)) // 2
    pos = [int(u) for u in np.nonzero(sp.z >= 0)[0]]
    neg = [int(u) for u in np.nonzero(sp.z < 0)[0]]
    join = bool(adj[np.ix_(pos, neg)].all()) if pos and neg else False
    return StructureReport(
        adjacent_violations=a_bad,
        nonadjacent_violations=n_bad,
        positive_side=pos,
        negative_side=neg,
        join=join,
        positive_threshold=is_threshold(adj[np.ix_(pos, pos)]),
        negative_threshold=is_threshold(adj[np.ix_(neg, neg)]),
    )


def ellipse_deviation(g: Graph) -> float:
    """Largest difference of ``l1 x_u^2 - ln z_u^2`` across vertices."""
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    sp = extreme_eigs(g.matrix())
    q = sp.lambda_max * sp.x**2 - sp.lambda_min * sp.z**2
    return float(q.max() - q.min())


def kpq_ellipse_deviation(p: int, q: int) -> float:
    """Closed form of :func:`ellipse_deviation` for ``K_{p,q}``."""
    return math.sqrt(p * q) * abs(1.0 / p - 1.0 / q)


def clique_join_spread(n1: int, n2: int) -> float:
    """Closed-form spread of ``K_{n1}`` joined to an independent set of size n2."""
    return math.sqrt(n1 * n1 + 4 * n1 * n2 - 2 * n1 + 1)
