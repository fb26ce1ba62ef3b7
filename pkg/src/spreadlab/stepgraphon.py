"""The 7-block pattern, stepgraphon spreads over block weights, and the
polynomials used by the block-elimination formulas.

Blocks are numbered 1..7 in the public API. Arrays are 0-based, so block
``i`` lives at index ``i - 1``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .spectra import extreme_eigs, stepgraphon_matrix

BLOCKS = (1, 2, 3, 4, 5, 6, 7)
LOOPS = frozenset({1, 2, 5})

NEIGHBORHOODS: dict[int, frozenset[int]] = {}
NEIGHBORHOODS[1] = frozenset(BLOCKS)
NEIGHBORHOODS[2] = NEIGHBORHOODS[1] - {4}
NEIGHBORHOODS[3] = NEIGHBORHOODS[2] - {3}
NEIGHBORHOODS[4] = NEIGHBORHOODS[3] - {2}
NEIGHBORHOODS[5] = NEIGHBORHOODS[1] - {7}
NEIGHBORHOODS[6] = NEIGHBORHOODS[5] - {6}
NEIGHBORHOODS[7] = NEIGHBORHOODS[6] - {5}

PATTERN = np.array([[1.0 if j in NEIGHBORHOODS[i] else 0.0 for j in BLOCKS] for i in BLOCKS])

INF = math.inf

# Ranges of the leading eigenfunction f_i and the bottom eigenfunction g_i
# on each block of an optimal stepgraphon.
F_RANGE = {1: (1.0, INF), 2: (1.0, INF), 3: (0.0, 1.0), 4: (0.0, 1.0), 5: (1.0, INF), 6: (0.0, 1.0), 7: (0.0, 1.0)}
G_RANGE = {1: (0.0, 1.0), 2: (0.0, 1.0), 3: (1.0, INF), 4: (1.0, INF), 5: (-1.0, 0.0), 6: (-INF, -1.0), 7: (-INF, -1.0)}

TWO_OVER_SQRT3 = 2.0 / math.sqrt(3.0)


def adjacent(i: int, j: int) -> bool:
    return j in NEIGHBORHOODS[i]


def validate_weights(alpha: Sequence[float]) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.shape != (7,):
        raise ValueError("expected seven block weights")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("block weights must be finite and nonnegative")
    total = a.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"block weights sum to {total}, not 1")
    return a / total


@dataclass(frozen=True)
class EigenData:
    """Extreme eigenvalues and eigenfunction values on the support blocks."""

    support: tuple[int, ...]
    alpha: dict[int, float]
    mu: float
    nu: float
    f: dict[int, float]
    g: dict[int, float]

    @property
    def spread(self) -> float:
        return max(self.mu, 0.0) - min(self.nu, 0.0)


def eigen_data(alpha: Sequence[float]) -> EigenData:
    """Stepgraphon eigen-data for weights ``alpha`` on the 7-block pattern.

    ``f`` is positive and ``g`` is oriented so that block 1 (or the first
    support block) has ``g >= 0``; both satisfy ``sum alpha f^2 = 1``.
    """
    a = validate_weights(alpha)
    support = tuple(i for i in BLOCKS if a[i - 1] > 0)
    idx = [i - 1 for i in support]
    w = a[idx]
    m = stepgraphon_matrix(w / w.sum(), PATTERN[np.ix_(idx, idx)])
    sp = extreme_eigs(m)
    root = np.sqrt(w)
    f = sp.x / root
    g = sp.z / root
    if f.sum() < 0:
        f = -f
    if g[0] < 0:
        g = -g
    return EigenData(
        support=support,
        alpha={i: float(a[i - 1]) for i in support},
        mu=sp.lambda_max,
        nu=sp.lambda_min,
        f={i: float(v) for i, v in zip(support, f)},
        g={i: float(v) for i, v in zip(support, g)},
    )


def spread_of_weights(alpha: Sequence[float]) -> float:
    a = validate_weights(alpha)
    idx = [k for k in range(7) if a[k] > 0]
    m = stepgraphon_matrix(a[idx], PATTERN[np.ix_(idx, idx)])
    sp = extreme_eigs(m)
    # the integral operator always has 0 in its spectrum
    return max(sp.lambda_max, 0.0) - min(sp.lambda_min, 0.0)


def two_block_spread(a1: float) -> float:
    """Spread with mass ``a1`` on block 1 and ``1 - a1`` on block 7."""
    if not 0.0 <= a1 <= 1.0:
        raise ValueError("a1 must lie in [0, 1]")
    return math.sqrt(a1 * (4.0 - 3.0 * a1))


def theorem_optimum() -> dict:
    """Closed-form optimum: weights, extreme eigenvalues and eigenfunctions."""
    r3 = math.sqrt(3.0)
    f = (np.array([3 + r3, 2 * r3]) / (2 * math.sqrt(3 + r3))).tolist()
    g = (np.array([3 - r3, -2 * r3]) / (2 * math.sqrt(3 - r3))).tolist()
    return {
        "alpha": {1: 2.0 / 3.0, 7: 1.0 / 3.0},
        "mu": (1 + r3) / 3,
        "nu": (1 - r3) / 3,
        "f": {1: f[0], 7: f[1]},
        "g": {1: g[0], 7: g[1]},
    }


# ---------------------------------------------------------------------------
# elimination polynomials; generic over floats, IntervalSet and IntervalBatch


def F1(x, mu, nu):
    return (mu + nu) * x + 2 * mu * nu


def F2(x, mu, nu):
    s = mu + nu
    p = mu * nu
    t = p + s * x
    return 2 * (t * t) + s * (x * x * x)


def F3(x, mu, nu):
    s = mu + nu
    p = mu * nu
    x2 = x * x
    x3 = x2 * x
    t = p + s * x
    return (
        4 * (p * p) * (t * t)
        - 2 * s * x3 * (s * x + p) * (s * x + 3 * p)
        - s * (x3 * x2) * (2 * p + s * x)
    )


def F4(x, mu, nu):
    s = mu + nu
    p = mu * nu
    x2 = x * x
    x4 = x2 * x2
    u = s * x + p
    return (
        4 * (p * p) * x * ((3 * s * x + p) * (2 * s * x + p) - p * s * x)
        + 4 * s * x4 * (u * u + (s * s) * (s * x + 4 * p))
        + (s * s) * (x4 * x2 * x)
    )


# ---------------------------------------------------------------------------
# contour data


def _spread_fast(alpha: np.ndarray) -> float:
    r = np.sqrt(np.maximum(alpha, 0.0))
    w = np.linalg.eigvalsh(r[:, None] * PATTERN * r[None, :])
    return float(max(w[-1], 0.0) - min(w[0], 0.0))


def _coordinate_search(fun, x0: np.ndarray, lo: np.ndarray, hi: np.ndarray, tol: float = 1e-7):
    x = np.clip(x0, lo, hi)
    fx = fun(x)
    step = 0.25 * (hi - lo)
    while np.max(step) > tol:
        improved = False
        for k in range(x.size):
            if step[k] <= tol:
                continue
            for d in (1.0, -1.0):
                y = x.copy()
                y[k] = min(hi[k], max(lo[k], y[k] + d * step[k]))
                fy = fun(y)
                if fy > fx + 1e-15:
                    x, fx, improved = y, fy, True
                    break
        if not improved:
            step = step * 0.5
    return x, fx


def _plot_a_cell(x: float, y: float, rng: np.random.Generator, restarts: int) -> float:
    # coordinates: split of x between blocks 3/4, split of y between 6/7,
    # and two coordinates placing the remaining mass on blocks 1, 2, 5
    rest = 1.0 - x - y

    def weights(v):
        t, u, s1, s2 = v
        # (alpha1, alpha2, alpha5) from a point of the unit square folded on the simplex
        a1 = rest * s1 * (1 - s2)
        a2 = rest * s1 * s2
        a5 = rest * (1 - s1)
        return np.array([a1, a2, x * t, x * (1 - t), a5, y * u, y * (1 - u)])

    def fun(v):
        return _spread_fast(weights(v))

    lo = np.zeros(4)
    hi = np.ones(4)
    best = -INF
    starts = [np.full(4, 0.5)] + [rng.random(4) for _ in range(restarts - 1)]
    for s in starts:
        _, fx = _coordinate_search(fun, s, lo, hi)
        best = max(best, fx)
    return best


def _plot_b_cell(x: float, y: float) -> float:
    rest = 1.0 - x - y
    if rest <= 0.0:
        return _spread_fast(np.array([0, 0, 0, 0, y, 0, x], dtype=float))

    def neg(t):
        return -_spread_fast(np.array([rest * t, 0, 0, 0, y, rest * (1 - t), x]))

    grid = np.linspace(0.0, 1.0, 21)
    vals = [neg(t) for t in grid]
    k = int(np.argmin(vals))
    a, b = grid[max(0, k - 1)], grid[min(len(grid) - 1, k + 1)]
    res = minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": 1e-9})
    return max(-res.fun, -vals[k])


@dataclass
class ContourGrid:
    plot: str
    step: float
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # NaN marks infeasible cells

    def argmax(self) -> tuple[float, float, float]:
        k = np.nanargmax(self.values)
        i, j = np.unravel_index(k, self.values.shape)
        return float(self.xs[i]), float(self.ys[j]), float(self.values[i, j])

    def maximizers(self, tol: float = 1e-9) -> list[tuple[float, float]]:
        top = np.nanmax(self.values)
        i, j = np.nonzero(self.values >= top - tol)
        return [(float(self.xs[a]), float(self.ys[b])) for a, b in zip(i, j)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "spread"])
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                v = self.values[i, j]
                w.writerow([f"{x:.6f}", f"{y:.6f}", "." if math.isnan(v) else f"{v:.12f}"])
        return buf.getvalue()


def contour_grid(plot: str, step: float, restarts: int = 3, seed: int = 0) -> ContourGrid:
    """Spread values on a grid of the two displayed coordinates.

    Plot ``A``: ``x = alpha3 + alpha4``, ``y = alpha6 + alpha7`` with the rest
    of the mass maximized over. Plot ``B``: ``alpha5 = y``, ``alpha7 = x``,
    blocks 2-4 empty and the remaining mass split optimally between blocks
    1 and 6.
    """
    if plot not in ("A", "B"):
        raise ValueError("plot must be 'A' or 'B'")
    if not 1 / 200 - 1e-12 <= step <= 1 / 20 + 1e-12:
        raise ValueError("step must lie in [1/200, 1/20]")
    n = int(round(1.0 / step))
    xs = np.arange(n + 1) / n
    ys = np.arange(n + 1) / n
    values = np.full((n + 1, n + 1), np.nan)
    for i in range(n + 1):
        for j in range(n + 1 - i):
            x, y = xs[i], ys[j]
            if plot == "A":
                # per-cell generator keeps cells independent of evaluation order
                rng = np.random.default_rng([seed, i, j])
                values[i, j] = _plot_a_cell(x, y, rng, restarts)
            else:
                values[i, j] = _plot_b_cell(x, y)
    return ContourGrid(plot, step, xs, ys, values)
