import os
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import settings

from coneflex.discrete_cone import ALL_SELECTORS, BranchSelector, InfeasibleError, synthesize_config

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")

SEED_FREE = (F(1, 2), F(1, 3), F(2, 5), F(3, 4))


def random_free(rng):
    """Random rational (m, s1, s3, t1) with small numerators/denominators."""
    out = []
    for _ in range(4):
        num = int(rng.integers(-9, 10))
        den = int(rng.integers(1, 8))
        out.append(F(num if num else 1, den))
    return out


def synth_many(count, rng, selectors=ALL_SELECTORS, exact=True):
    """Up to `count` synthesized configs, skipping infeasible seeds."""
    got = []
    tries = 0
    while len(got) < count and tries < 20 * count:
        tries += 1
        sel = selectors[tries % len(selectors)]
        free = random_free(rng)
        if not exact:
            free = [float(x) for x in free]
        try:
            got.append((sel, synthesize_config(sel, *free)))
        except InfeasibleError:
            continue
    return got


@pytest.fixture(scope="session")
def n_config():
    sel = BranchSelector(1, 1, "N")
    return sel, synthesize_config(sel, *SEED_FREE)


@pytest.fixture(scope="session")
def m_config():
    sel = BranchSelector(1, 1, "M")
    return sel, synthesize_config(sel, *SEED_FREE)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record (and print) one pass/fail line per acceptance criterion."""
    def record(number, title, ok, detail):
        line = "criterion %d %-28s %s  %s" % (number, title, "PASS" if ok else "FAIL", detail)
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
