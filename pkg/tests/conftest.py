import numpy as np
import pytest
from hypothesis import settings

from sentcomp import ngram
from sentcomp.bench import random_suite

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def toy_lm():
    corpus = [
        "the man saw the dog",
        "the dog saw the man",
        "a man saw a telescope",
        "the dog ate",
    ]
    return ngram.train(s.split() for s in corpus)


@pytest.fixture(scope="session")
def oracle_suite():
    """100 seeded binary programs with at most 14 variables and 8 rows."""
    return random_suite(100, 14, 8, seed=2024, vary=True)


def subsequences(n, low, up):
    from itertools import combinations
    return [s for L in range(low, up + 1) for s in combinations(range(1, n + 1), L)]


@pytest.fixture
def rng():
    return np.random.default_rng(7)


ACCEPTANCE: list[str] = []


def record(number, title, ok, detail):
    """Log one acceptance line, shown again in the terminal summary, then assert it."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
