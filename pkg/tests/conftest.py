import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_piecewise(rng: np.random.Generator, n: int, noise: float = 0.5) -> np.ndarray:
    """Noisy piecewise-constant signal with a handful of shared levels."""
    n_cuts = int(rng.integers(0, max(1, n // 4) + 1))
    cuts = np.sort(rng.choice(np.arange(1, n), size=min(n_cuts, n - 1), replace=False))
    bounds = np.concatenate(([0], cuts, [n]))
    pool = rng.normal(0.0, 3.0, size=int(rng.integers(1, 4)))
    y = np.empty(n)
    for lo, hi in zip(bounds, bounds[1:]):
        y[lo:hi] = rng.choice(pool)
    return y + noise * rng.standard_normal(n)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
