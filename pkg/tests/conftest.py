import random
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def rand_fraction(rng: random.Random, lo: int = -6, hi: int = 6, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


@pytest.fixture
def rng():
    return random.Random(20261018)


ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    def info(text: str):
        ACCEPTANCE_LINES.append(f"INFO {text}")
        print(f"INFO {text}")

    record.info = info
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
