"""Interval arithmetic over the extended reals with outward rounding.

Scalar values are :class:`IntervalSet` objects, finite unions of disjoint
closed intervals. Endpoints are binary64 floats or infinities. Results of
``+ - * /`` and ``sqrt`` are rounded outward using error-free transforms, so
operations whose exact result is representable stay exact (``[1,2]+[3,4]``
is ``[4,6]``) and all other endpoints move by at most one ulp.

:class:`IntervalBatch` is a vectorized single-interval variant used by the
box search. It rounds by unconditional one-ulp stepping and flags divisions
by zero-containing intervals instead of splitting them.
"""

from __future__ import annotations

import json
import logging
import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

log = logging.getLogger(__name__)

INF = math.inf
MAX_PARTS = 8

# Dekker splitting constant and the safe range for exact error terms.
_SPLIT = 134217729.0
_BIG = 2.0**995
_TINY = 2.0**-960

Number = Union[int, float, Fraction]


# ---------------------------------------------------------------------------
# directed rounding primitives


def _down(x: float) -> float:
    return math.nextafter(x, -INF)


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _safe(*xs: float) -> bool:
    for x in xs:
        ax = abs(x)
        if ax > _BIG or (ax < _TINY and ax != 0.0):
            return False
    return True


def add_rd(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s):
        return _down(s) if not (math.isinf(a) or math.isinf(b)) else s
    e = _two_sum_err(a, b, s)
    return _down(s) if e < 0 else s


def add_ru(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s):
        return _up(s) if not (math.isinf(a) or math.isinf(b)) else s
    e = _two_sum_err(a, b, s)
    return _up(s) if e > 0 else s


def mul_rd(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(a) or math.isinf(b):
        return p
    if math.isinf(p):
        return _down(p)
    if p == 0.0 or not _safe(a, b, p):
        # underflow: the error-free product is no longer exact
        return _down(p)
    e = _two_prod_err(a, b, p)
    return _down(p) if e < 0 else p


def mul_ru(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(a) or math.isinf(b):
        return p
    if math.isinf(p):
        return _up(p)
    if p == 0.0 or not _safe(a, b, p):
        # underflow: the error-free product is no longer exact
        return _up(p)
    e = _two_prod_err(a, b, p)
    return _up(p) if e > 0 else p


def _div_residual_sign(a: float, b: float, q: float) -> int:
    """Sign of the exact quotient minus ``q``, or 2 when unknown."""
    if not _safe(a, b, q) or q == 0.0:
        return 2
    p = q * b
    e = _two_prod_err(q, b, p)
    r = (a - p) - e
    if r == 0.0:
        return 0
    return 1 if (r > 0) == (b > 0) else -1


def _div_inf(a: float, b: float, upward: bool) -> float:
    # at least one infinite operand; limits of u/v toward the corner
    same = (a > 0) == (b > 0)
    if math.isinf(a) and math.isinf(b):
        if upward:
            return INF if same else 0.0
        return 0.0 if same else -INF
    if math.isinf(a):
        return a / b
    return 0.0


def div_rd(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return _div_inf(a, b, False)
    q = a / b
    if math.isinf(q):
        return _down(q)
    sgn = _div_residual_sign(a, b, q)
    return q if sgn in (0, 1) else _down(q)


def div_ru(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return _div_inf(a, b, True)
    q = a / b
    if math.isinf(q):
        return _up(q)
    sgn = _div_residual_sign(a, b, q)
    return q if sgn in (0, -1) else _up(q)


def sqrt_rd(a: float) -> float:
    if a <= 0.0:
        return 0.0
    if math.isinf(a):
        return a
    s = math.sqrt(a)
    if not _safe(a, s):
        return _down(s)
    p = s * s
    r = (a - p) - _two_prod_err(s, s, p)
    return _down(s) if r < 0 else s


def sqrt_ru(a: float) -> float:
    if a <= 0.0:
        return 0.0
    if math.isinf(a):
        return a
    s = math.sqrt(a)
    if not _safe(a, s):
        return _up(s)
    p = s * s
    r = (a - p) - _two_prod_err(s, s, p)
    return _up(s) if r > 0 else s


# ---------------------------------------------------------------------------
# scalar intervals


class _EmptyType:
    """The empty interval. Produced by hull() of an empty set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Empty"

    def __bool__(self) -> bool:
        return False


Empty = _EmptyType()


class Interval:
    """Closed interval ``[lo, hi]`` of extended reals, ``lo <= hi``."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("NaN endpoint")
        if lo > hi:
            raise ValueError(f"lo > hi: [{lo}, {hi}]")
        if lo == INF or hi == -INF:
            raise ValueError("interval must contain a real number")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"

    def __eq__(self, other) -> bool:
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if math.isinf(self.lo) or math.isinf(self.hi):
            if math.isinf(self.lo) and math.isinf(self.hi):
                return 0.0
            return self.hi if math.isinf(self.lo) else self.lo
        return 0.5 * self.lo + 0.5 * self.hi

    def subset_of(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi


def _enclose_fraction(x: Fraction) -> tuple[float, float]:
    f = float(x)
    fx = Fraction(f)
    if fx == x:
        return f, f
    if fx < x:
        return f, _up(f)
    return _down(f), f


class IntervalSet:
    """Finite union of disjoint, non-adjacent closed intervals, sorted by lo."""

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[Interval] = ()):
        object.__setattr__(self, "parts", _normalize(list(parts)))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalSet is immutable")

    @classmethod
    def _raw(cls, parts: tuple[Interval, ...]) -> IntervalSet:
        s = object.__new__(cls)
        object.__setattr__(s, "parts", parts)
        return s

    @classmethod
    def of(cls, lo: float, hi: float | None = None) -> IntervalSet:
        return cls._raw((Interval(lo, hi),))

    @classmethod
    def enclose(cls, x: Number) -> IntervalSet:
        """Tightest enclosure of an exact real (int, float or Fraction)."""
        if isinstance(x, float):
            return cls.of(x)
        lo, hi = _enclose_fraction(Fraction(x))
        return cls.of(lo, hi)

    @property
    def empty(self) -> bool:
        return not self.parts

    @property
    def lo(self) -> float:
        return self.parts[0].lo

    @property
    def hi(self) -> float:
        return self.parts[-1].hi

    def __repr__(self) -> str:
        if not self.parts:
            return "IntervalSet(Empty)"
        return "IntervalSet(" + " u ".join(map(repr, self.parts)) + ")"

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __contains__(self, x) -> bool:
        return any(p.lo <= x <= p.hi for p in self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def subset_of(self, other: IntervalSet) -> bool:
        other = _coerce(other)
        return all(any(p.subset_of(q) for q in other.parts) for p in self.parts)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return IntervalSet._raw(tuple(Interval(-p.hi, -p.lo) for p in reversed(self.parts)))

    def __and__(self, other):
        return intersect(self, other)

    def sqrt(self) -> IntervalSet:
        return sqrt(self)

    def to_json(self) -> str:
        return json.dumps(to_jsonable(self))


IntervalLike = Union[IntervalSet, Interval, int, float, Fraction]


def _coerce(x: IntervalLike) -> IntervalSet:
    if isinstance(x, IntervalSet):
        return x
    if isinstance(x, Interval):
        return IntervalSet._raw((x,))
    if isinstance(x, _EmptyType):
        return EMPTY
    if isinstance(x, (int, float, Fraction)) and not isinstance(x, bool):
        return IntervalSet.enclose(x)
    raise TypeError(f"cannot convert {type(x).__name__} to IntervalSet")


def _normalize(parts: list[Interval]) -> tuple[Interval, ...]:
    if len(parts) <= 1:
        return tuple(parts)
    parts.sort(key=lambda p: p.lo)
    out = [parts[0]]
    for p in parts[1:]:
        last = out[-1]
        if p.lo <= last.hi:
            if p.hi > last.hi:
                out[-1] = Interval(last.lo, p.hi)
        else:
            out.append(p)
    if len(out) > MAX_PARTS:
        return (Interval(out[0].lo, out[-1].hi),)
    return tuple(out)


def normalize(s: IntervalSet) -> IntervalSet:
    return IntervalSet(s.parts)


EMPTY = IntervalSet._raw(())


def _pairwise(x: IntervalLike, y: IntervalLike, f) -> IntervalSet:
    x = _coerce(x)
    y = _coerce(y)
    if not x.parts or not y.parts:
        return EMPTY
    if len(x.parts) == 1 and len(y.parts) == 1:
        return IntervalSet._raw((f(x.parts[0], y.parts[0]),))
    return IntervalSet([f(a, b) for a in x.parts for b in y.parts])


def _add1(a: Interval, b: Interval) -> Interval:
    return Interval(add_rd(a.lo, b.lo), add_ru(a.hi, b.hi))


def _sub1(a: Interval, b: Interval) -> Interval:
    return Interval(add_rd(a.lo, -b.hi), add_ru(a.hi, -b.lo))


def _mul1(a: Interval, b: Interval) -> Interval:
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if al >= 0.0 and bl >= 0.0:
        return Interval(mul_rd(al, bl), mul_ru(ah, bh))
    lo = min(mul_rd(al, bl), mul_rd(al, bh), mul_rd(ah, bl), mul_rd(ah, bh))
    hi = max(mul_ru(al, bl), mul_ru(al, bh), mul_ru(ah, bl), mul_ru(ah, bh))
    return Interval(lo, hi)


def _div1(a: Interval, b: Interval) -> Interval:
    # b does not contain zero
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    lo = min(div_rd(al, bl), div_rd(al, bh), div_rd(ah, bl), div_rd(ah, bh))
    hi = max(div_ru(al, bl), div_ru(al, bh), div_ru(ah, bl), div_ru(ah, bh))
    return Interval(lo, hi)


def reciprocal(y: Interval) -> IntervalSet:
    """``1/[c,d]`` following the four cases for the position of zero."""
    c, d = y.lo, y.hi
    if c == 0.0 and d == 0.0:
        log.debug("division by the point interval [0,0]")
        return EMPTY
    if c > 0.0 or d < 0.0:
        return IntervalSet._raw((Interval(div_rd(1.0, d), div_ru(1.0, c)),))
    if c == 0.0:
        return IntervalSet._raw((Interval(div_rd(1.0, d), INF),))
    if d == 0.0:
        return IntervalSet._raw((Interval(-INF, div_ru(1.0, c)),))
    return IntervalSet._raw((Interval(-INF, div_ru(1.0, c)), Interval(div_rd(1.0, d), INF)))


def add(x: IntervalLike, y: IntervalLike) -> IntervalSet:
    return _pairwise(x, y, _add1)


def sub(x: IntervalLike, y: IntervalLike) -> IntervalSet:
    return _pairwise(x, y, _sub1)


def mul(x: IntervalLike, y: IntervalLike) -> IntervalSet:
    return _pairwise(x, y, _mul1)


def div(x: IntervalLike, y: IntervalLike) -> IntervalSet:
    x = _coerce(x)
    y = _coerce(y)
    if not x.parts or not y.parts:
        return EMPTY
    out: list[Interval] = []
    for b in y.parts:
        if b.lo > 0.0 or b.hi < 0.0:
            out.extend(_div1(a, b) for a in x.parts)
        else:
            r = reciprocal(b)
            out.extend(_mul1(a, rb) for a in x.parts for rb in r.parts)
    return IntervalSet(out)


def sqrt(x: IntervalLike) -> IntervalSet:
    x = _coerce(x)
    out = [Interval(sqrt_rd(max(0.0, p.lo)), sqrt_ru(p.hi)) for p in x.parts if p.hi >= 0.0]
    if len(out) == 1:
        return IntervalSet._raw((out[0],))
    return IntervalSet(out)


def square(x: IntervalLike) -> IntervalSet:
    """Tight enclosure of ``{u*u : u in x}`` (tighter than ``x*x``)."""
    x = _coerce(x)
    out = []
    for p in x.parts:
        if p.lo >= 0.0:
            out.append(Interval(mul_rd(p.lo, p.lo), mul_ru(p.hi, p.hi)))
        elif p.hi <= 0.0:
            out.append(Interval(mul_rd(p.hi, p.hi), mul_ru(p.lo, p.lo)))
        else:
            m = max(-p.lo, p.hi)
            out.append(Interval(0.0, mul_ru(m, m)))
    return IntervalSet(out)


def intersect(x: IntervalLike, y: IntervalLike) -> IntervalSet:
    x = _coerce(x)
    y = _coerce(y)
    out = []
    for a in x.parts:
        for b in y.parts:
            lo = max(a.lo, b.lo)
            hi = min(a.hi, b.hi)
            if lo <= hi and lo != INF and hi != -INF:
                out.append(Interval(lo, hi))
    if len(out) == 1:
        return IntervalSet._raw((out[0],))
    return IntervalSet(out)


def hull(x: IntervalLike) -> Interval | _EmptyType:
    x = _coerce(x)
    if not x.parts:
        return Empty
    return Interval(x.parts[0].lo, x.parts[-1].hi)


def _endpoint_json(v: float):
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return v


def to_jsonable(x: IntervalLike) -> list:
    return [[_endpoint_json(p.lo), _endpoint_json(p.hi)] for p in _coerce(x).parts]


def from_jsonable(data: Sequence) -> IntervalSet:
    def conv(v):
        if v == "inf":
            return INF
        if v == "-inf":
            return -INF
        return float(v)

    return IntervalSet(Interval(conv(a), conv(b)) for a, b in data)


# ---------------------------------------------------------------------------
# vectorized single intervals


def _nd(x):
    return np.nextafter(x, -np.inf)


def _nu(x):
    return np.nextafter(x, np.inf)


class IntervalBatch:
    """Arrays of closed intervals ``[lo[k], hi[k]]`` evaluated elementwise.

    Rounding is by one-ulp outward stepping after every operation. Division
    by an interval containing zero yields ``[-inf, inf]`` and sets the
    corresponding entries of ``flags``, a boolean array shared by every
    batch derived from the same inputs; callers re-evaluate flagged entries
    with :class:`IntervalSet` when the hull is too coarse.
    """

    __slots__ = ("lo", "hi", "flags")

    def __init__(self, lo, hi, flags=None):
        self.lo = lo
        self.hi = hi
        self.flags = flags

    def _wrap(self, lo, hi, other=None):
        flags = self.flags
        if flags is None and isinstance(other, IntervalBatch):
            flags = other.flags
        return IntervalBatch(lo, hi, flags)

    @staticmethod
    def _parts(y):
        if isinstance(y, IntervalBatch):
            return y.lo, y.hi
        if isinstance(y, tuple):
            return y
        y = float(y)
        return y, y

    def __add__(self, other):
        bl, bh = self._parts(other)
        return self._wrap(_nd(self.lo + bl), _nu(self.hi + bh), other)

    __radd__ = __add__

    def __sub__(self, other):
        bl, bh = self._parts(other)
        return self._wrap(_nd(self.lo - bh), _nu(self.hi - bl), other)

    def __rsub__(self, other):
        bl, bh = self._parts(other)
        return self._wrap(_nd(bl - self.hi), _nu(bh - self.lo), other)

    def __neg__(self):
        return self._wrap(-self.hi, -self.lo)

    def __mul__(self, other):
        bl, bh = self._parts(other)
        al, ah = self.lo, self.hi
        p1, p2, p3, p4 = al * bl, al * bh, ah * bl, ah * bh
        ps = np.stack(np.broadcast_arrays(p1, p2, p3, p4))
        ps = np.nan_to_num(ps, nan=0.0, posinf=np.inf, neginf=-np.inf)
        return self._wrap(_nd(ps.min(axis=0)), _nu(ps.max(axis=0)), other)

    __rmul__ = __mul__

    def square(self):
        al, ah = self.lo, self.hi
        a2, b2 = al * al, ah * ah
        lo = np.where(al >= 0, a2, np.where(ah <= 0, b2, 0.0))
        hi = np.maximum(a2, b2)
        return self._wrap(np.maximum(_nd(lo), 0.0), _nu(hi))

    def _recip(self):
        c, d = self.lo, self.hi
        bad = (c <= 0) & (d >= 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = np.where(bad, -np.inf, _nd(1.0 / d))
            hi = np.where(bad, np.inf, _nu(1.0 / c))
        return lo, hi, bad

    def __truediv__(self, other):
        if not isinstance(other, IntervalBatch):
            other = IntervalBatch(*self._parts(other))
        rl, rh, bad = other._recip()
        flags = self.flags if self.flags is not None else other.flags
        if flags is not None:
            np.logical_or(flags, np.broadcast_to(bad, flags.shape), out=flags)
        al, ah = self.lo, self.hi
        with np.errstate(invalid="ignore", divide="ignore"):
            # direct quotients are tighter than multiplying by the reciprocal
            bl, bh = other.lo, other.hi
            q = np.stack(np.broadcast_arrays(al / bl, al / bh, ah / bl, ah / bh))
        q = np.nan_to_num(q, nan=0.0, posinf=np.inf, neginf=-np.inf)
        lo = np.where(bad, -np.inf, _nd(q.min(axis=0)))
        hi = np.where(bad, np.inf, _nu(q.max(axis=0)))
        return self._wrap(lo, hi, other)

    def __rtruediv__(self, other):
        return IntervalBatch(*self._parts(other), self.flags) / self

    def sqrt(self):
        with np.errstate(invalid="ignore"):
            lo = np.maximum(_nd(np.sqrt(np.maximum(self.lo, 0.0))), 0.0)
            hi = _nu(np.sqrt(np.maximum(self.hi, 0.0)))
        return self._wrap(lo, hi)

    def intersect(self, other):
        bl, bh = self._parts(other)
        return self._wrap(np.maximum(self.lo, bl), np.minimum(self.hi, bh), other)

    def empty_mask(self):
        return ~(self.lo <= self.hi)
