"""Divide-and-conquer box elimination over ``(alpha_i, alpha_j, mu, nu)``.

Boxes are tested in large vectorized batches. A batch lane that divides by
an interval containing zero is re-tested with exact interval unions before
it is allowed to survive. Survivors are bisected along ``alpha_i``,
``alpha_j``, ``mu``, ``nu`` in turn. The result does not depend on batch
sizes or on the number of worker processes.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..interval import Interval, IntervalSet
from .cases import CASE_NAMES, OPEN_CASES, CaseSpec, get_case
from .program import MU_RANGE, NU_RANGE, SPREAD_THRESHOLD, BatchContext, IntervalContext, Refuted, run_case

log = logging.getLogger(__name__)

DIMS = ("a_i", "a_j", "mu", "nu")
DEFAULT_GRID = (20, 20, 10, 10)  # reciprocal seed-cell sizes for (mu, nu, a_i, a_j)
BATCH = 1 << 14


@dataclass(frozen=True)
class SearchBox:
    a_i: Interval
    a_j: Interval
    mu: Interval
    nu: Interval
    depth: int = 0

    @property
    def split_dim(self) -> int:
        return self.depth % 4

    def bounds(self) -> list[float]:
        return [self.a_i.lo, self.a_i.hi, self.a_j.lo, self.a_j.hi, self.mu.lo, self.mu.hi, self.nu.lo, self.nu.hi]

    @classmethod
    def from_bounds(cls, b, depth: int = 0) -> SearchBox:
        return cls(Interval(b[0], b[1]), Interval(b[2], b[3]), Interval(b[4], b[5]), Interval(b[6], b[7]), depth)

    def contains(self, a_i: float, a_j: float, mu: float, nu: float) -> bool:
        return a_i in self.a_i and a_j in self.a_j and mu in self.mu and nu in self.nu

    def children(self) -> tuple[SearchBox, SearchBox]:
        b = self.bounds()
        k = self.split_dim
        lo, hi = b[2 * k], b[2 * k + 1]
        mid = 0.5 * (lo + hi)
        left = list(b)
        right = list(b)
        left[2 * k + 1] = mid
        right[2 * k] = mid
        return SearchBox.from_bounds(left, self.depth + 1), SearchBox.from_bounds(right, self.depth + 1)

    def to_dict(self) -> dict:
        return {"depth": self.depth, "bounds": self.bounds()}


@dataclass
class EliminationReport:
    case: str
    status: str  # eliminated | survived | depth_exhausted
    boxes_processed: int
    max_depth_reached: int
    surviving_boxes: list[SearchBox]
    wall_time: float
    refutations: dict[str, int] = field(default_factory=dict)
    exact_rechecks: int = 0

    def to_dict(self, deterministic: bool = False) -> dict:
        d = {
            "case": self.case,
            "status": self.status,
            "boxes_processed": self.boxes_processed,
            "max_depth_reached": self.max_depth_reached,
            "surviving_count": len(self.surviving_boxes),
            "surviving_boxes": [b.to_dict() for b in self.surviving_boxes],
            "refutations": dict(sorted(self.refutations.items())),
            "exact_rechecks": self.exact_rechecks,
        }
        if not deterministic:
            d["wall_time"] = self.wall_time
        return d


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 26
    grid: tuple[int, int, int, int] = DEFAULT_GRID
    mu_range: tuple[float, float] = MU_RANGE
    nu_range: tuple[float, float] = NU_RANGE
    threshold: float | None = SPREAD_THRESHOLD
    max_boxes: int | None = None


# ---------------------------------------------------------------------------
# single-box test


def is_feasible(case: CaseSpec | str, box: SearchBox, threshold: float | None = SPREAD_THRESHOLD) -> tuple[bool, str | None]:
    """Exact-union interval test of one box; returns (feasible, refuting constraint)."""
    if isinstance(case, str):
        case = get_case(case)
    try:
        run_case(
            case,
            IntervalContext(),
            IntervalSet._raw((box.a_i,)),
            IntervalSet._raw((box.a_j,)),
            IntervalSet._raw((box.mu,)),
            IntervalSet._raw((box.nu,)),
            threshold,
        )
    except Refuted as r:
        return False, r.name
    return True, None


def evaluate_batch(
    case: CaseSpec, b: np.ndarray, threshold: float | None, exact: bool = True
) -> tuple[np.ndarray, list[str | None], int]:
    """Test boxes given as rows of bounds; returns (alive, reasons, exact rechecks).

    With ``exact`` set, surviving lanes whose evaluation divided by an
    interval containing zero are re-tested with interval unions.
    """
    ctx = BatchContext(b.shape[0])
    with np.errstate(all="ignore"):
        run_case(
            case,
            ctx,
            ctx.batch(b[:, 0], b[:, 1]),
            ctx.batch(b[:, 2], b[:, 3]),
            ctx.batch(b[:, 4], b[:, 5]),
            ctx.batch(b[:, 6], b[:, 7]),
            threshold,
        )
    alive = ctx.alive.copy()
    reasons: list[str | None] = [ctx.names[c] if c >= 0 else None for c in ctx.reason]
    recheck = np.nonzero(alive & ctx.flags)[0] if exact else np.zeros(0, dtype=int)
    for k in recheck:
        ok, why = is_feasible(case, SearchBox.from_bounds(b[k]), threshold)
        if not ok:
            alive[k] = False
            reasons[k] = why
    return alive, reasons, int(recheck.size)


# ---------------------------------------------------------------------------
# search


def seed_boxes(cfg: SearchConfig) -> np.ndarray:
    gmu, gnu, gi, gj = cfg.grid

    def cuts(lo, hi, per_unit):
        n = max(1, int(math.ceil((hi - lo) * per_unit - 1e-9)))
        return [(lo + (hi - lo) * k / n, lo + (hi - lo) * (k + 1) / n) for k in range(n)]

    rows = []
    for m in cuts(*cfg.mu_range, gmu):
        for v in cuts(*cfg.nu_range, gnu):
            for a in cuts(0.0, 1.0, gi):
                for c in cuts(0.0, 1.0, gj):
                    rows.append([a[0], a[1], c[0], c[1], m[0], m[1], v[0], v[1]])
    return np.array(rows, dtype=float)


def _bisect(b: np.ndarray, dim: int) -> np.ndarray:
    lo = b[:, 2 * dim]
    hi = b[:, 2 * dim + 1]
    mid = 0.5 * (lo + hi)
    left = b.copy()
    right = b.copy()
    left[:, 2 * dim + 1] = mid
    right[:, 2 * dim] = mid
    # interleave so children keep the parent order
    out = np.empty((2 * b.shape[0], 8))
    out[0::2] = left
    out[1::2] = right
    return out


@dataclass
class _Partial:
    processed: int = 0
    max_depth: int = 0
    rechecks: int = 0
    survivors: list[tuple[int, np.ndarray]] = field(default_factory=list)
    refutations: Counter = field(default_factory=Counter)
    budget_hit: bool = False


def _search_seeds(case_name: str, seeds: np.ndarray, cfg: SearchConfig) -> _Partial:
    case = get_case(case_name)
    part = _Partial()
    # stack of (depth, boxes); depth-first over large batches
    stack = [(0, seeds[k : k + BATCH]) for k in range(0, seeds.shape[0], BATCH)][::-1]
    while stack:
        depth, boxes = stack.pop()
        # hull division is sound; unions only pay off before a box is final
        alive, reasons, rechecks = evaluate_batch(case, boxes, cfg.threshold, exact=depth >= cfg.max_depth)
        part.processed += boxes.shape[0]
        part.rechecks += rechecks
        part.max_depth = max(part.max_depth, depth)
        part.refutations.update(r for r in reasons if r is not None)
        surv = boxes[alive]
        if not surv.shape[0]:
            continue
        if depth >= cfg.max_depth:
            part.survivors.append((depth, surv))
            continue
        if cfg.max_boxes is not None and part.processed >= cfg.max_boxes:
            part.budget_hit = True
            part.survivors.append((depth, surv))
            continue
        kids = _bisect(surv, depth % 4)
        chunks = [kids[k : k + BATCH] for k in range(0, kids.shape[0], BATCH)]
        stack.extend((depth + 1, c) for c in reversed(chunks))
    return part


def _merge(case: CaseSpec, parts: list[_Partial], t0: float) -> EliminationReport:
    processed = sum(p.processed for p in parts)
    refs: Counter = Counter()
    survivors: list[SearchBox] = []
    budget = False
    for p in parts:
        refs.update(p.refutations)
        budget = budget or p.budget_hit
        for depth, rows in p.survivors:
            survivors.extend(SearchBox.from_bounds(r, depth) for r in rows)
    if not survivors:
        status = "eliminated"
    elif budget:
        status = "survived"
    else:
        status = "depth_exhausted"
    return EliminationReport(
        case=case.name,
        status=status,
        boxes_processed=processed,
        max_depth_reached=max((p.max_depth for p in parts), default=0),
        surviving_boxes=survivors,
        wall_time=time.time() - t0,
        refutations=dict(refs),
        exact_rechecks=sum(p.rechecks for p in parts),
    )


def eliminate_case(
    case: CaseSpec | str,
    max_depth: int = 26,
    initial_grid: tuple[int, int, int, int] = DEFAULT_GRID,
    jobs: int = 1,
    config: SearchConfig | None = None,
    checkpoint: str | os.PathLike | None = None,
) -> EliminationReport:
    """Seed the grid, test every box and bisect survivors up to ``max_depth``."""
    if isinstance(case, str):
        case = get_case(case)
    if not 0 <= max_depth <= 64:
        raise ValueError("max_depth must lie in [0, 64]")
    cfg = config or SearchConfig()
    cfg = SearchConfig(max_depth, tuple(initial_grid), cfg.mu_range, cfg.nu_range, cfg.threshold, cfg.max_boxes)
    t0 = time.time()
    seeds = seed_boxes(cfg)
    groups = [seeds[k : k + 256] for k in range(0, seeds.shape[0], 256)]
    done: dict[int, _Partial] = _load_checkpoint(checkpoint, case.name, cfg) if checkpoint else {}
    todo = [k for k in range(len(groups)) if k not in done]
    last_save = time.time()
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {k: pool.submit(_search_seeds, case.name, groups[k], cfg) for k in todo}
            for k in todo:
                done[k] = futs[k].result()
                if checkpoint and time.time() - last_save > 60:
                    _save_checkpoint(checkpoint, case.name, cfg, done)
                    last_save = time.time()
    else:
        for k in todo:
            done[k] = _search_seeds(case.name, groups[k], cfg)
            if checkpoint and time.time() - last_save > 60:
                _save_checkpoint(checkpoint, case.name, cfg, done)
                last_save = time.time()
    if checkpoint:
        _save_checkpoint(checkpoint, case.name, cfg, done)
    report = _merge(case, [done[k] for k in range(len(groups))], t0)
    log.info("case %s: %s after %d boxes", case.name, report.status, report.boxes_processed)
    return report


def verify_all(depth: int = 26, parallelism: int = 1, grid=DEFAULT_GRID, cases=None, config=None) -> list[EliminationReport]:
    names = list(cases) if cases else list(CASE_NAMES)
    return [eliminate_case(n, depth, grid, jobs=parallelism, config=config) for n in names]


def summarize(reports: list[EliminationReport]) -> dict:
    eliminated = [r.case for r in reports if r.status == "eliminated"]
    open_ = [r.case for r in reports if r.status != "eliminated"]
    return {
        "eliminated": eliminated,
        "open": open_,
        "boxes_processed": sum(r.boxes_processed for r in reports),
        "matches_expected": set(open_) == set(OPEN_CASES) and len(reports) == len(CASE_NAMES),
    }


# ---------------------------------------------------------------------------
# checkpoints: completed seed groups with their partial results


def _cfg_key(case_name: str, cfg: SearchConfig) -> dict:
    return {
        "case": case_name,
        "max_depth": cfg.max_depth,
        "grid": list(cfg.grid),
        "mu_range": list(cfg.mu_range),
        "nu_range": list(cfg.nu_range),
        "threshold": cfg.threshold,
    }


def _save_checkpoint(path, case_name: str, cfg: SearchConfig, done: dict[int, _Partial]) -> None:
    data = {
        "config": _cfg_key(case_name, cfg),
        "groups": {
            str(k): {
                "processed": p.processed,
                "max_depth": p.max_depth,
                "rechecks": p.rechecks,
                "budget_hit": p.budget_hit,
                "refutations": dict(p.refutations),
                "survivors": [SearchBox.from_bounds(r, d).to_dict() for d, rows in p.survivors for r in rows],
            }
            for k, p in sorted(done.items())
        },
    }
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(data))
    os.replace(tmp, path)


def _load_checkpoint(path, case_name: str, cfg: SearchConfig) -> dict[int, _Partial]:
    p = Path(path)
    if not p.exists():
        return {}
    data = json.loads(p.read_text())
    if data.get("config") != _cfg_key(case_name, cfg):
        log.warning("checkpoint %s does not match this run; ignoring it", p)
        return {}
    out = {}
    for k, g in data["groups"].items():
        part = _Partial(g["processed"], g["max_depth"], g["rechecks"], budget_hit=g["budget_hit"])
        part.refutations = Counter(g["refutations"])
        part.survivors = [(b["depth"], np.array([b["bounds"]])) for b in g["survivors"]]
        out[int(k)] = part
    return out
