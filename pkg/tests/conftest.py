from __future__ import annotations

import pytest

# outcome lines collected by the acceptance suite
CRITERIA: dict[int, tuple[str, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    prev = CRITERIA.get(n)
    if prev is not None and prev[0] == "FAIL":
        return
    CRITERIA[n] = ("PASS" if ok else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        status, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
