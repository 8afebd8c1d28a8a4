from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from nilflow import catalog
from nilflow.algebra import BracketSpec, root_system

ALGEBRA_ENTRIES = ["h3", "l4", "h5", "p5", "heisenberg(3)", "r6"]


@pytest.fixture(params=ALGEBRA_ENTRIES)
def entry(request):
    return catalog.get(request.param)


@pytest.fixture
def p5():
    return catalog.get("p5")


@pytest.fixture
def h3():
    return catalog.get("h3")


@pytest.fixture
def p5_roots(p5):
    return root_system(p5.spec)


@pytest.fixture
def nonstable_spec():
    return BracketSpec.from_relations(5, {(1, 2, 5): 1, (1, 3, 5): 1})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def frac(*xs):
    return tuple(Fraction(x) for x in xs)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod and getattr(mod, "RESULTS", None):
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
