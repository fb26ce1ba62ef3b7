"""Evaluation of one support case on a box (or a point).

The same chain code runs in three arithmetics, selected by the context:

* :class:`IntervalContext` -- :class:`IntervalSet` values; a violated
  constraint raises :class:`Refuted` carrying its name.
* :class:`BatchContext` -- :class:`IntervalBatch` values for many boxes at
  once; violated constraints mark lanes dead and record the reason.
* :class:`FloatContext` -- plain floats with a tolerance, used to check
  candidate solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import interval as iv
from ..interval import IntervalBatch, IntervalSet
from ..stepgraphon import F1, F2, F3, F_RANGE, G_RANGE, adjacent
from .cases import CaseSpec

INF = math.inf

# lower end of a tight enclosure of 2/sqrt(3)
SPREAD_THRESHOLD = iv.sqrt(IntervalSet.enclose(Fraction(4, 3))).lo

# default hypercube for (mu, nu)
MU_RANGE = (0.65, 1.0)
NU_RANGE = (-0.5, -0.15)


class Refuted(Exception):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


def _sq_range(r: tuple[float, float]) -> tuple[float, float]:
    lo, hi = r
    if lo >= 0:
        return lo * lo, hi * hi
    return hi * hi, lo * lo


# ---------------------------------------------------------------------------
# contexts


class IntervalContext:
    def sqrt(self, x):
        return iv.sqrt(x)

    def square(self, x):
        return iv.square(x)

    def require(self, name: str, x, lo: float, hi: float):
        r = iv.intersect(x, IntervalSet.of(lo, hi))
        if r.empty:
            raise Refuted(name)
        return r

    def meet(self, name: str, x, y):
        r = iv.intersect(x, y)
        if r.empty:
            raise Refuted(name)
        return r

    def narrow_gap(self, mu, nu, t: float):
        ray = IntervalSet.of(t, INF)
        mu = self.meet("threshold", mu, nu + ray)
        nu = self.meet("threshold", nu, mu - ray)
        return mu, nu


class FloatContext:
    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def sqrt(self, x):
        return math.sqrt(max(x, 0.0))

    def square(self, x):
        return x * x

    def require(self, name: str, x, lo: float, hi: float):
        if not math.isfinite(x):
            raise Refuted(name)
        t = self.tol * max(1.0, abs(x))
        if x < lo - t or x > hi + t:
            raise Refuted(name)
        return x

    def meet(self, name: str, x, y):
        if abs(x - y) > self.tol * max(1.0, abs(x), abs(y)):
            raise Refuted(name)
        return x

    def narrow_gap(self, mu, nu, t: float):
        self.require("threshold", mu - nu, t, INF)
        return mu, nu


class BatchContext:
    def __init__(self, size: int):
        self.alive = np.ones(size, dtype=bool)
        self.reason = np.full(size, -1, dtype=np.int32)
        self.flags = np.zeros(size, dtype=bool)
        self.names: list[str] = []
        self._codes: dict[str, int] = {}

    def batch(self, lo, hi) -> IntervalBatch:
        return IntervalBatch(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float), self.flags)

    def _kill(self, name: str, x: IntervalBatch) -> None:
        dead = self.alive & x.empty_mask()
        if dead.any():
            code = self._codes.setdefault(name, len(self.names))
            if code == len(self.names):
                self.names.append(name)
            self.reason[dead] = code
            self.alive &= ~dead

    def sqrt(self, x):
        return x.sqrt()

    def square(self, x):
        return x.square()

    def require(self, name: str, x, lo: float, hi: float):
        r = x.intersect((lo, hi))
        self._kill(name, r)
        return r

    def meet(self, name: str, x, y):
        r = x.intersect(y)
        self._kill(name, r)
        return r

    def narrow_gap(self, mu, nu, t: float):
        mu = self.meet("threshold", mu, nu + (t, INF))
        nu = self.meet("threshold", nu, mu - (t, INF))
        return mu, nu


# ---------------------------------------------------------------------------
# chain evaluation


@dataclass
class CaseState:
    """Derived quantities for one case on one box, point or batch."""

    mu: object
    nu: object
    alpha: dict[int, object] = field(default_factory=dict)
    f: dict[int, object] = field(default_factory=dict)
    g: dict[int, object] = field(default_factory=dict)


class _Chain:
    def __init__(self, case: CaseSpec, ctx, state: CaseState):
        self.case = case
        self.ctx = ctx
        self.st = state

    # assignment with membership and merging of repeated derivations
    def set_alpha(self, k: int, v) -> None:
        v = self.ctx.require(f"range:alpha{k}", v, 0.0, 1.0)
        if k in self.st.alpha:
            v = self.ctx.meet(f"merge:alpha{k}", self.st.alpha[k], v)
        self.st.alpha[k] = v

    def set_f(self, k: int, v) -> None:
        v = self.ctx.require(f"range:f{k}", v, *F_RANGE[k])
        if k in self.st.f:
            v = self.ctx.meet(f"merge:f{k}", self.st.f[k], v)
        self.st.f[k] = v

    def set_g(self, k: int, v) -> None:
        v = self.ctx.require(f"range:g{k}", v, *G_RANGE[k])
        if k in self.st.g:
            v = self.ctx.meet(f"merge:g{k}", self.st.g[k], v)
        self.st.g[k] = v

    def root_f(self, k: int, sq):
        sq = self.ctx.require(f"range:f{k}^2", sq, *_sq_range(F_RANGE[k]))
        return self.ctx.sqrt(sq)

    def root_g(self, k: int, sq):
        sq = self.ctx.require(f"range:g{k}^2", sq, *_sq_range(G_RANGE[k]))
        r = self.ctx.sqrt(sq)
        return r if G_RANGE[k][0] >= 0 else -r

    # formula steps
    def C1(self, i: int, j: int) -> None:
        ctx, mu, nu = self.ctx, self.st.mu, self.st.nu
        x = self.st.alpha[j]
        d = ctx.require(f"C1({i},{j}):F1<0", F1(x, mu, nu), -INF, 0.0)
        xn = ctx.require(f"C1({i},{j}):alpha+2nu<0", x + 2 * nu, -INF, 0.0)
        fj = self.root_f(j, xn * mu / d)
        gj = self.root_g(j, (x + 2 * mu) * nu / d)
        self.set_f(j, fj)
        self.set_g(j, gj)
        self.set_f(i, (1 + x / mu) * self.st.f[j])
        self.set_g(i, (1 + x / nu) * self.st.g[j])

    def C2(self, i: int, j: int) -> None:
        ctx, mu, nu = self.ctx, self.st.mu, self.st.nu
        y = self.st.alpha[i]
        d = ctx.require(f"C2({i},{j}):-F1(-a)>0", 0 - F1(0 - y, mu, nu), 0.0, INF)
        ym = ctx.require(f"C2({i},{j}):alpha-2mu<0", y - 2 * mu, -INF, 0.0)
        fi = self.root_f(i, (y - 2 * nu) * mu / d)
        gi = self.root_g(i, ym * nu / d)
        self.set_f(i, fi)
        self.set_g(i, gi)
        self.set_f(j, (1 - y / mu) * self.st.f[i])
        self.set_g(j, (1 - y / nu) * self.st.g[i])

    def C3(self, i: int, j: int, k: int) -> None:
        mu, nu = self.st.mu, self.st.nu
        x = self.st.alpha[j]
        p = mu * nu
        self.set_alpha(i, 2 * (p * p) * x / F2(x, mu, nu))
        ai = self.st.alpha[i]
        self.set_f(k, self.st.f[j] - ai * self.st.f[i] / mu)
        self.set_g(k, self.st.g[j] - ai * self.st.g[i] / nu)

    def C4(self, i: int, j: int, k: int) -> None:
        mu, nu = self.st.mu, self.st.nu
        x = self.st.alpha[j]
        f2 = F2(x, mu, nu)
        self.set_alpha(k, x * (f2 * f2) / F3(x, mu, nu))
        self._block_one(i, k)

    def C5(self, i: int, k: int) -> None:
        mu, nu = self.st.mu, self.st.nu
        y = self.st.alpha[i]
        p = mu * nu
        self.set_alpha(k, 2 * y * (p * p) / F2(0 - y, mu, nu))
        self._block_one(i, k)

    def _block_one(self, i: int, k: int) -> None:
        mu, nu = self.st.mu, self.st.nu
        ak = self.st.alpha[k]
        self.set_f(1, self.st.f[i] + ak * self.st.f[k] / mu)
        self.set_g(1, self.st.g[i] + ak * self.st.g[k] / nu)

    def C6(self, i: int, j: int, k: int, l: int) -> None:
        mu, nu = self.st.mu, self.st.nu
        x = self.st.alpha[j]
        a = self.st.alpha[k]
        p = mu * nu
        s = mu + nu
        f2 = F2(x, mu, nu)
        lin = 8 * p * x * (mu + x) * (2 * mu + x) * (nu + x) * (2 * nu + x) * (p + s * x)
        const = F1(x, mu, nu) * f2 * (f2 + 2 * (x * x) * (x + 2 * mu) * (x + 2 * nu))
        res = 2 * F3(x, mu, nu) * self.ctx.square(a) + lin * a + const
        self.ctx.require(f"C6({i},{j},{k},{l})", res, 0.0, 0.0)

    def C7(self) -> None:
        mu, nu = self.st.mu, self.st.nu
        f, g = self.st.f, self.st.g
        rest = 1
        for k in self.case.blocks:
            if k not in (4, 7):
                rest = rest - self.st.alpha[k]
        df = f[2] - f[5]
        dg = g[2] - g[5]
        self.set_alpha(4, (rest * f[7] - mu * df) / (f[4] + f[7]))
        self.set_alpha(7, (rest * f[4] + mu * df) / (f[4] + f[7]))
        self.set_alpha(4, (rest * g[7] - nu * dg) / (g[4] + g[7]))
        self.set_alpha(7, (rest * g[4] + nu * dg) / (g[4] + g[7]))

    def SUM(self, k: int) -> None:
        rest = 1
        for b in self.case.blocks:
            if b != k:
                rest = rest - self.st.alpha[b]
        self.set_alpha(k, rest)

    def EIG(self, k: int) -> None:
        mu, nu = self.st.mu, self.st.nu
        sf = sg = 0
        for b in sorted(self.case.neighbors(k)):
            sf = sf + self.st.alpha[b] * self.st.f[b]
            sg = sg + self.st.alpha[b] * self.st.g[b]
        self.set_f(k, sf / mu)
        self.set_g(k, sg / nu)

    # constraints on the completed state
    def check_all(self) -> None:
        ctx, st = self.ctx, self.st
        mu, nu = st.mu, st.nu
        blocks = self.case.blocks
        missing = [k for k in blocks if k not in st.alpha or k not in st.f or k not in st.g]
        if missing:
            raise RuntimeError(f"derivation for {self.case.name} leaves blocks {missing} undetermined")
        # sign rule, cheapest first
        for a_idx, i in enumerate(blocks):
            for j in blocks[a_idx + 1:]:
                k = st.f[i] * st.f[j] - st.g[i] * st.g[j]
                if adjacent(i, j):
                    ctx.require(f"sign:{i}{j}", k, 0.0, INF)
                else:
                    ctx.require(f"sign:{i}{j}", k, -INF, 0.0)
        # propagate the ellipse identity into f and g before the norm sums
        for k in blocks:
            g2 = 1 + mu * (ctx.square(st.f[k]) - 1) / nu
            self.set_g(k, self.root_g(k, g2))
            f2 = 1 + nu * (ctx.square(st.g[k]) - 1) / mu
            self.set_f(k, self.root_f(k, f2))
        total = 0
        nf = 0
        ng = 0
        for k in blocks:
            total = total + st.alpha[k]
            nf = nf + st.alpha[k] * ctx.square(st.f[k])
            ng = ng + st.alpha[k] * ctx.square(st.g[k])
        ctx.require("norm:alpha", total, 1.0, 1.0)
        ctx.require("norm:f", nf, 1.0, 1.0)
        ctx.require("norm:g", ng, 1.0, 1.0)
        for k in blocks:
            e = mu * (ctx.square(st.f[k]) - 1) - nu * (ctx.square(st.g[k]) - 1)
            ctx.require(f"ellipse:{k}", e, 0.0, 0.0)
        for k in blocks:
            sf = 0 - mu * st.f[k]
            sg = 0 - nu * st.g[k]
            for b in sorted(self.case.neighbors(k)):
                sf = sf + st.alpha[b] * st.f[b]
                sg = sg + st.alpha[b] * st.g[b]
            ctx.require(f"eigen:f{k}", sf, 0.0, 0.0)
            ctx.require(f"eigen:g{k}", sg, 0.0, 0.0)


def run_case(case: CaseSpec, ctx, a_i, a_j, mu, nu, threshold: float | None = SPREAD_THRESHOLD) -> CaseState:
    """Run the derivation chain and every constraint for one case.

    ``threshold`` imposes ``mu - nu >= threshold`` (and narrows mu and nu
    accordingly); pass ``None`` to drop that assumption.
    """
    i, j = case.ij
    if threshold is not None:
        mu, nu = ctx.narrow_gap(mu, nu, threshold)
    st = CaseState(mu=mu, nu=nu)
    chain = _Chain(case, ctx, st)
    chain.set_alpha(i, a_i)
    chain.set_alpha(j, a_j)
    for step in case.derivation:
        getattr(chain, step[0])(*step[1:])
    chain.check_all()
    return st
