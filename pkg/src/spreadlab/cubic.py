"""Trigonometric roots of real-rooted cubics and the spread of two 3x3
quotient families.

``M(eps)`` is the quotient of the three-block configuration with weights
``(2/3 - eps1, eps1 + eps2, 1/3 - eps2)``; ``M_z`` additionally shifts the
(1, 1) entry by ``-z``. Both have real spectra, and the spread is read off
the trigonometric root formula. Everything here is plain floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

CLAMP_TOL = 1e-12
TWO_OVER_SQRT3 = 2.0 / math.sqrt(3.0)

# rational common zeros of the critical-point system known to lie off T
PUBLISHED_ROOTS = ((2 / 3, -2 / 3), (-1 / 3, 1 / 3), (0.0, 0.0), (2 / 3, 1 / 3), (2 / 3, -1 / 6))


@dataclass(frozen=True)
class CubicCoeffs:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def p(self) -> float:
        return (3 * self.a * self.c - self.b**2) / (3 * self.a**2)

    @property
    def q(self) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        return (2 * b**3 - 9 * a * b * c + 27 * a**2 * d) / (27 * a**3)

    @property
    def A(self) -> float:
        return 2.0 * math.sqrt(max(-self.p / 3.0, 0.0))

    @property
    def B(self) -> float:
        return -self.b / (3 * self.a)

    @property
    def phi(self) -> float:
        p, q, A = self.p, self.q, self.A
        if p > CLAMP_TOL * max(1.0, self.B**2):
            raise ValueError("cubic has complex roots")
        if A == 0.0:
            if abs(q) > CLAMP_TOL:
                raise ValueError("cubic has complex roots")
            return 0.0
        t = 3 * q / (A * p)
        if abs(t) > 1 + CLAMP_TOL:
            raise ValueError("cubic has complex roots")
        return math.acos(min(1.0, max(-1.0, t)))

    def __call__(self, x: float) -> float:
        return ((self.a * x + self.b) * x + self.c) * x + self.d

    @classmethod
    def charpoly(cls, m) -> CubicCoeffs:
        """Monic characteristic polynomial ``det(xI - m)`` of a 3x3 matrix."""
        m = np.asarray(m, dtype=float)
        tr = np.trace(m)
        minors = (
            m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
            + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
        )
        return cls(1.0, -tr, minors, -np.linalg.det(m))


@dataclass(frozen=True)
class EpsilonPoint:
    eps1: float
    eps2: float
    z: float = 0.0


def viete_roots(c: CubicCoeffs) -> tuple[float, float, float]:
    """The three real roots, largest first."""
    A, B, phi = c.A, c.B, c.phi
    roots = sorted((A * math.cos((phi + 2 * math.pi * k) / 3) + B for k in range(3)), reverse=True)
    scale = max(abs(c.a), abs(c.b), abs(c.c), abs(c.d)) * max(1.0, max(abs(r) for r in roots)) ** 3
    for r in roots:
        if abs(c(r)) > 1e-9 * scale:
            raise ArithmeticError(f"root {r} leaves residual {c(r)}")
    return tuple(roots)


def root_gap(k: int, l: int, x: float) -> float:
    """``cos(x + 2 pi k / 3) - cos(x + 2 pi l / 3)``: normalized root differences."""
    return math.cos(x + 2 * math.pi * k / 3) - math.cos(x + 2 * math.pi * l / 3)


def in_T(eps1: float, eps2: float, closed: bool = False) -> bool:
    if closed:
        return -1 / 3 <= eps1 <= 2 / 3 and -2 / 3 <= eps2 <= 1 / 3 and 0 <= eps1 + eps2 <= 1
    return -1 / 3 < eps1 < 2 / 3 and -2 / 3 < eps2 < 1 / 3 and 0 < eps1 + eps2 < 1


def matrix_M(eps1: float, eps2: float, z: float = 0.0) -> np.ndarray:
    a5 = 2 / 3 - eps1
    a4 = 1 / 3 - eps2
    a7 = eps1 + eps2
    return np.array([[a5 - z, 0.0, a4], [0.0, 0.0, a4], [a5, a7, 0.0]])


def spread_S(e: EpsilonPoint, family: str = "B2") -> float:
    """Spread ``sqrt(3) A cos((2 phi - pi)/6)`` of ``M(eps)`` or ``M_z(eps)``.

    ``B2`` requires eps in the closure of T and ignores ``z``; ``B3`` takes
    any point with a real spectrum.
    """
    if family == "B2":
        if not in_T(e.eps1, e.eps2, closed=True):
            raise ValueError(f"({e.eps1}, {e.eps2}) lies outside T")
        m = matrix_M(e.eps1, e.eps2)
    elif family == "B3":
        m = matrix_M(e.eps1, e.eps2, e.z)
    else:
        raise ValueError("family must be 'B2' or 'B3'")
    c = CubicCoeffs.charpoly(m)
    return math.sqrt(3.0) * c.A * math.cos((2 * c.phi - math.pi) / 6)


def spread_grid(e1: np.ndarray, e2: np.ndarray, z: float = 0.0) -> np.ndarray:
    """Vectorized ``spread_S`` for the B3 family (B2 when ``z = 0``)."""
    a5 = 2 / 3 - e1
    a4 = 1 / 3 - e2
    a7 = e1 + e2
    # det(xI - M) = x^3 - (a5 - z) x^2 - a4 (a5 + a7) x + a4 a7 (a5 - z)
    b = -(a5 - z)
    c = -a4 * (a5 + a7)
    d = a4 * a7 * (a5 - z)
    p = (3 * c - b**2) / 3
    q = (2 * b**3 - 9 * b * c + 27 * d) / 27
    A = 2 * np.sqrt(np.maximum(-p / 3, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(3 * q / (A * p), -1.0, 1.0)
    phi = np.arccos(t)
    return math.sqrt(3.0) * A * np.cos((2 * phi - math.pi) / 6)


def gradient(fun, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def hessian(fun, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian."""
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.zeros((n, n))
    I = np.eye(n) * h
    f0 = fun(x)
    for i in range(n):
        H[i, i] = (fun(x + I[i]) - 2 * f0 + fun(x - I[i])) / h**2
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (
                fun(x + I[i] + I[j]) - fun(x + I[i] - I[j]) - fun(x - I[i] + I[j]) + fun(x - I[i] - I[j])
            ) / (4 * h * h)
    return H


def hessian_at_origin(z: float = 0.0) -> np.ndarray:
    return hessian(lambda v: spread_S(EpsilonPoint(v[0], v[1], z), "B3"), np.zeros(2))


@dataclass(frozen=True)
class CriticalCell:
    eps1: float
    eps2: float
    spread: float
    grad_norm: float


@dataclass
class CriticalScan:
    grid: float
    threshold: float
    points: int
    candidates: list[CriticalCell]
    excluded: list[CriticalCell]
    max_interior_spread: float

    def violations(self, tol: float = 1e-3) -> list[CriticalCell]:
        """Near-critical interior cells whose spread reaches ``2/sqrt(3) - tol``."""
        return [c for c in self.candidates if c.spread >= TWO_OVER_SQRT3 - tol]


def scan_critical_points(family: str = "B2", grid: float = 1 / 400, gain: float = 20.0) -> CriticalScan:
    """Grid search of T for near-zeros of the gradient of S.

    A cell is near-critical when ``|grad S| < gain * grid``: with Hessian
    entries bounded by ``gain``, any critical point within a cell diagonal
    produces such a cell. Cells inside the basin of a published root that
    lies outside T are set aside as ``excluded``. This is a numerical
    corroboration, not a proof.
    """
    if family != "B2":
        raise ValueError("only the B2 family is scanned")
    if not 0 < grid <= 1e-2:
        raise ValueError("grid must lie in (0, 1e-2]")
    n = int(round(1.0 / grid))
    e1 = -1 / 3 + np.arange(1, n) / n
    e2 = -2 / 3 + np.arange(1, n) / n
    E1, E2 = np.meshgrid(e1, e2, indexing="ij")
    s = E1 + E2
    inside = (s > 0.5 / n) & (s < 1 - 0.5 / n)
    E1, E2 = E1[inside], E2[inside]
    h = 1e-6
    S = spread_grid(E1, E2)
    g1 = (spread_grid(E1 + h, E2) - spread_grid(E1 - h, E2)) / (2 * h)
    g2 = (spread_grid(E1, E2 + h) - spread_grid(E1, E2 - h)) / (2 * h)
    gn = np.hypot(g1, g2)
    thr = gain * grid
    radius = {}
    for r in PUBLISHED_ROOTS:
        if not in_T(*r, closed=True):
            continue
        # a nondegenerate critical point attracts cells within 2 thr / sigma_min
        with np.errstate(all="ignore"):
            H = hessian(lambda v: float(spread_grid(v[0], v[1])), np.array(r))
        if np.all(np.isfinite(H)):
            sig = float(np.min(np.abs(np.linalg.eigvalsh(H))))
            if sig > 0:
                radius[r] = 2 * thr / sig
    cand, excl = [], []
    for k in np.nonzero(gn < thr)[0]:
        cell = CriticalCell(float(E1[k]), float(E2[k]), float(S[k]), float(gn[k]))
        near = any(math.hypot(cell.eps1 - r[0], cell.eps2 - r[1]) <= rad for r, rad in radius.items())
        (excl if near else cand).append(cell)
    return CriticalScan(grid, thr, int(E1.size), cand, excl, float(S.max()))


def optimize_Mz(z: float, c0: float = 0.05) -> tuple[float, float]:
    """Maximizer of ``S_z`` over ``[-c0, c0]^2``: Nelder-Mead from the origin, then Newton polish."""
    if abs(z) > 1e-2:
        raise ValueError("|z| must be at most 1e-2")

    def neg(v):
        if np.any(np.abs(v) > c0):
            return math.inf
        return -float(spread_grid(np.array(v[0]), np.array(v[1]), z))

    # initial simplex scaled to z so the optimum is resolved relative to its size
    step = max(abs(z), 1e-6)
    simplex = np.array([[0.0, 0.0], [step, 0.0], [0.0, step]])
    res = minimize(
        neg,
        np.zeros(2),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-16, "initial_simplex": simplex, "maxiter": 20000, "maxfev": 40000},
    )
    x = res.x
    # the objective is flat to rounding near its peak; finish with Newton
    # steps on the central-difference gradient, which resolves it linearly
    fun = lambda v: -neg(v)
    for _ in range(3):
        dx = np.linalg.solve(hessian(fun, x), gradient(fun, x, 1e-5))
        if not np.all(np.isfinite(dx)) or np.max(np.abs(x - dx)) > c0:
            break
        x = x - dx
    return float(x[0]), float(x[1])


def claim_limits() -> tuple[float, float, float]:
    """Eigenvalues of ``M(0, 0)``: (largest, smallest, middle)."""
    r = viete_roots(CubicCoeffs.charpoly(matrix_M(0.0, 0.0)))
    return r[0], r[2], r[1]
