"""Extreme eigenpairs and spreads of symmetric and small quotient matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

JACOBI_MAX_N = 64


@dataclass(frozen=True)
class SpectralPair:
    lambda_max: float
    lambda_min: float
    x: np.ndarray
    z: np.ndarray

    @property
    def spread(self) -> float:
        return self.lambda_max - self.lambda_min


def _as_symmetric(m) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    return a


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns eigenvalues in ascending order and the matrix whose columns are
    the corresponding orthonormal eigenvectors.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = max(np.abs(a).max(), 1e-300)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if a.shape[0] <= JACOBI_MAX_N:
        return jacobi_eigh(a)
    return np.linalg.eigh(a)


def _orient_max(x: np.ndarray) -> np.ndarray:
    return -x if x.sum() < 0 else x


def _orient_min(z: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(z)))
    return -z if z[k] > 0 else z


def extreme_eigs(m) -> SpectralPair:
    """Largest and smallest eigenvalue with unit eigenvectors.

    ``x`` has nonnegative coordinate sum and the largest-magnitude entry of
    ``z`` is negative.
    """
    a = _as_symmetric(m)
    w, v = eigh(a)
    x = _orient_max(v[:, -1] / np.linalg.norm(v[:, -1]))
    z = _orient_min(v[:, 0] / np.linalg.norm(v[:, 0]))
    return SpectralPair(float(w[-1]), float(w[0]), x, z)


def spread(m) -> float:
    return extreme_eigs(m).spread


def _charpoly(q: np.ndarray) -> np.ndarray:
    # Faddeev-LeVerrier; coefficients of det(tI - q), leading 1
    k = q.shape[0]
    coeffs = [1.0]
    mk = np.zeros_like(q)
    ident = np.eye(k)
    for i in range(1, k + 1):
        mk = q @ mk + coeffs[-1] * ident
        coeffs.append(-np.trace(q @ mk) / i)
    return np.array(coeffs)


def real_eigs_small(q, imag_tol: float = 1e-8) -> list[float]:
    """All eigenvalues of a small matrix with real spectrum, descending."""
    a = np.array(q, dtype=float)
    k = a.shape[0]
    if a.ndim != 2 or k != a.shape[1] or k > 8:
        raise ValueError("expected a square matrix of size at most 8")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if k <= 4:
        c = _charpoly(a)
        roots = np.roots(c)
        dc = np.polyder(c)
        polished = []
        for r in roots:
            for _ in range(3):
                d = np.polyval(dc, r)
                if d == 0:
                    break
                r = r - np.polyval(c, r) / d
            polished.append(r)
        roots = np.array(polished, dtype=complex)
    else:
        roots = np.linalg.eigvals(a)
    scale = max(1.0, float(np.max(np.abs(roots))) if len(roots) else 1.0)
    if np.any(np.abs(roots.imag) > imag_tol * scale):
        raise ValueError("quotient matrix has a complex eigenvalue pair")
    return sorted((float(r.real) for r in roots), reverse=True)


def stepgraphon_matrix(alpha, pattern) -> np.ndarray:
    """``D^{1/2} B D^{1/2}`` for block measures ``alpha`` and 0/1 pattern ``B``."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(pattern, dtype=float)
    if np.any(a < 0):
        raise ValueError("negative block weight")
    if abs(a.sum() - 1.0) > 1e-9:
        raise ValueError(f"block weights sum to {a.sum()}, not 1")
    if b.shape != (a.size, a.size):
        raise ValueError("pattern shape does not match weights")
    r = np.sqrt(a)
    m = r[:, None] * b * r[None, :]
    return 0.5 * (m + m.T)


def graphon_spread_of_graph(g) -> float:
    """``spread(G)/n``, cross-checked against the uniform n-block stepgraphon."""
    a = _as_symmetric(g)
    n = a.shape[0]
    direct = spread(a) / n
    via_graphon = spread(stepgraphon_matrix(np.full(n, 1.0 / n), a))
    if abs(direct - via_graphon) > 1e-9:
        raise RuntimeError(f"graph and stepgraphon spreads disagree: {direct} vs {via_graphon}")
    return direct
