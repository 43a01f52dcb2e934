"""Shared fixtures, helpers and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from setblend.raster import Raster, align

settings.register_profile(
    "setblend",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("setblend")


def R(text: str, cell: float = 1.0, origin=(0.0, 0.0)) -> Raster:
    """Build a raster from rows of '#' (set) and '.' (empty)."""
    rows = [row.strip() for row in text.strip().splitlines()]
    bits = np.array([[ch == "#" for ch in row] for row in rows], dtype=bool)
    return Raster(bits, cell, origin)


def bit_same(a: Raster, b: Raster) -> bool:
    """Equality of content after aligning the two grids."""
    ua, ub = align(a, b)
    return bool(np.array_equal(ua.bits, ub.bits))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20230817)


# -- acceptance criterion reporting ---------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def record_criterion(num: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[num] = (title, bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[num]
        word = "pass" if passed else "FAIL"
        line = f"criterion {num} {word}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
