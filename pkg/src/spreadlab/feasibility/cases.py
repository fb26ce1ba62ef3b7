"""The 17 support sets and their derivation chains.

Each chain lists, in order, the formula steps that turn the two searched
weights ``(alpha_i, alpha_j)`` and the eigenvalues ``(mu, nu)`` into every
weight and eigenfunction value on the support. Step kinds:

``C1 i j``
    ``N_i & S = (N_j & S) + {j}``: f_j^2, g_j^2 from alpha_j; then f_i, g_i.
``C2 i j``
    ``N_i & S = (N_j & S) + {i}``: f_i^2, g_i^2 from alpha_i; then f_j, g_j.
``C3 i j k``
    ``(i,j,k)`` in {(2,3,4), (5,6,7)}: alpha_i from alpha_j; f_k, g_k.
``C4 i j k``
    block 1 in S as well: alpha_k from alpha_j; f_1, g_1 from block i and k.
``C5 i k``
    block 1 in S, middle block absent: alpha_k from alpha_i; f_1, g_1.
``C6 i j k l``
    block 1 absent: the quadratic relation between alpha_j and alpha_k that
    the ellipse equation on block l imposes (a check, not an assignment).
``C7``
    blocks 2, 4, 5, 7 in S: alpha_4 and alpha_7 from the remaining mass.
``SUM k``
    alpha_k is the mass left over by the other blocks.
``EIG k``
    f_k, g_k from the eigenvector equations on block k.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..stepgraphon import NEIGHBORHOODS


@dataclass(frozen=True)
class CaseSpec:
    name: str
    support: frozenset[int]
    ij: tuple[int, int]
    derivation: tuple[tuple, ...]

    @property
    def blocks(self) -> tuple[int, ...]:
        return tuple(sorted(self.support))

    def neighbors(self, k: int) -> frozenset[int]:
        return NEIGHBORHOODS[k] & self.support


def _support(name: str) -> frozenset[int]:
    return frozenset(int(c) for c in name if c.isdigit())


_TABLE = [
    ("1|234|567", (3, 6), (
        ("C1", 2, 3), ("C3", 2, 3, 4), ("C4", 2, 3, 4),
        ("C1", 5, 6), ("C3", 5, 6, 7), ("C4", 5, 6, 7),
        ("SUM", 1), ("C7",),
    )),
    ("1|24|567", (2, 6), (
        ("C2", 2, 4), ("C5", 2, 4),
        ("C1", 5, 6), ("C3", 5, 6, 7), ("C4", 5, 6, 7),
        ("SUM", 1), ("C7",),
    )),
    ("1|234|57", (3, 5), (
        ("C1", 2, 3), ("C3", 2, 3, 4), ("C4", 2, 3, 4),
        ("C2", 5, 7), ("C5", 5, 7),
        ("SUM", 1), ("C7",),
    )),
    ("1|4|567", (4, 6), (
        ("C1", 5, 6), ("C3", 5, 6, 7), ("C4", 5, 6, 7),
        ("C1", 1, 4), ("SUM", 1),
    )),
    ("1|24|57", (2, 5), (
        ("C2", 2, 4), ("C5", 2, 4), ("C2", 5, 7), ("C5", 5, 7),
        ("SUM", 1), ("C7",),
    )),
    ("1|234|7", (3, 7), (
        ("C1", 2, 3), ("C3", 2, 3, 4), ("C4", 2, 3, 4),
        ("C1", 1, 7), ("SUM", 1),
    )),
    ("234|567", (3, 6), (
        ("C1", 2, 3), ("C3", 2, 3, 4), ("C1", 5, 6), ("C3", 5, 6, 7),
        ("C7",), ("C6", 2, 3, 4, 7), ("C6", 5, 6, 7, 4),
    )),
    ("24|567", (2, 6), (
        ("C2", 2, 4), ("C1", 5, 6), ("C3", 5, 6, 7),
        ("C7",), ("C6", 5, 6, 7, 4),
    )),
    ("4|567", (4, 6), (
        ("C1", 5, 6), ("C3", 5, 6, 7), ("SUM", 7), ("EIG", 4),
        ("C6", 5, 6, 7, 4),
    )),
    ("24|57", (2, 5), (
        ("C2", 2, 4), ("C2", 5, 7), ("C7",),
    )),
    ("1|567", (1, 6), (
        ("C1", 5, 6), ("C3", 5, 6, 7), ("C4", 5, 6, 7),
    )),
    ("1|4|57", (4, 5), (
        ("C1", 1, 4), ("C2", 5, 7), ("C5", 5, 7), ("SUM", 1),
    )),
    ("1|24|7", (2, 7), (
        ("C2", 2, 4), ("C5", 2, 4), ("C1", 1, 7), ("SUM", 1),
    )),
    ("1|57", (1, 5), (
        ("C2", 5, 7), ("C5", 5, 7),
    )),
    ("4|57", (4, 5), (
        ("C2", 5, 7), ("SUM", 7), ("EIG", 4),
    )),
    ("1|4|7", (4, 7), (
        ("C1", 1, 4), ("C1", 1, 7), ("SUM", 1),
    )),
    ("1|7", (1, 7), (
        ("C1", 1, 7),
    )),
]

CASES: dict[str, CaseSpec] = {
    name: CaseSpec(name, _support(name), ij, steps) for name, ij, steps in _TABLE
}

CASE_NAMES = tuple(CASES)

# cases the box search is expected to leave open
OPEN_CASES = frozenset({"1|7", "4|57"})


def get_case(name: str) -> CaseSpec:
    key = name.strip()
    if key in CASES:
        return CASES[key]
    # accept the bare digit form, e.g. "1457"
    digits = frozenset(int(c) for c in key if c.isdigit())
    for spec in CASES.values():
        if spec.support == digits and len(digits) == sum(c.isdigit() for c in key):
            return spec
    raise KeyError(f"unknown case {name!r}")


def step_hypothesis_holds(case: CaseSpec, step: tuple) -> bool:
    """Whether the structural hypothesis of a derivation step holds in ``case``."""
    s = case.support
    kind = step[0]
    nb = case.neighbors
    if kind == "C1":
        _, i, j = step
        return i in s and j in s and i in (1, 2, 5) and j in (3, 4, 6, 7) and nb(i) == nb(j) | {j} and j not in nb(j)
    if kind == "C2":
        _, i, j = step
        return i in s and j in s and i in (1, 2, 5) and j in (3, 4, 6, 7) and nb(i) == nb(j) | {i} and i not in nb(j)
    if kind == "C3":
        _, i, j, k = step
        return (i, j, k) in ((2, 3, 4), (5, 6, 7)) and {i, j, k} <= s
    if kind == "C4":
        _, i, j, k = step
        return (i, j, k) in ((2, 3, 4), (5, 6, 7)) and {1, i, j, k} <= s
    if kind == "C5":
        _, i, k = step
        j = {2: 3, 5: 6}.get(i)
        return j is not None and k == j + 1 and {1, i, k} <= s and j not in s
    if kind == "C6":
        _, i, j, k, l = step
        return (i, j, k, l) in ((2, 3, 4, 7), (5, 6, 7, 4)) and 1 not in s and {i, j, k, l} <= s
    if kind == "C7":
        return {2, 4, 5, 7} <= s
    if kind in ("SUM", "EIG"):
        return step[1] in s
    return False
