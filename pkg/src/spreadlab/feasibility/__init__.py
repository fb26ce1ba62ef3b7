"""Interval elimination of the support cases of the 7-block program."""

from .cases import CASE_NAMES, CASES, OPEN_CASES, CaseSpec, get_case
from .program import SPREAD_THRESHOLD, CaseState, Refuted, run_case

__all__ = [
    "CASE_NAMES",
    "CASES",
    "OPEN_CASES",
    "CaseSpec",
    "CaseState",
    "Refuted",
    "SPREAD_THRESHOLD",
    "get_case",
    "run_case",
]
