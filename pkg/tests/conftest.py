import numpy as np
import pytest

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


def random_spd(rng: np.random.Generator, m: int, shift: float = 0.5) -> np.ndarray:
    a = rng.standard_normal((m, m))
    return a @ a.T + shift * m * np.eye(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the summary table."""

    def record(number: int, name: str, passed: bool, detail: str = "") -> None:
        prev = _CRITERIA.get(number)
        if prev is not None:
            passed = passed and prev[1]
            detail = f"{prev[2]}; {detail}" if detail else prev[2]
        _CRITERIA[number] = (name, bool(passed), detail)
        print(f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {name}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        name, passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"{number:2d} {'PASS' if passed else 'FAIL'}  {name}  ({detail})")
