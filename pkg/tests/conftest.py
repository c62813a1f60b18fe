import os
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from aaut.element import Element
from aaut.randgen import random_element, random_leaf_count, random_torsion
from aaut.tree import Shape

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
SHAPES = [Shape(2, 2), Shape(3, 2), Shape(2, 3), Shape(3, 3)]
S22 = Shape(2, 2)


def el(text, shape=S22):
    return Element.parse(text, shape)


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def load_fixture(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return Element.parse(fh.read())


@pytest.fixture
def x0():
    return el("map 0.0 -> 0; map 0.1 -> 1.0; map 1 -> 1.1")


@pytest.fixture
def x1():
    return load_fixture("x1.aaut")


@pytest.fixture
def r():
    return el("map 0 -> 1.0; map 1.0 -> 1.1; map 1.1 -> 0")


@pytest.fixture
def sigma():
    return el("map 0 -> 1; map 1 -> 0")


@pytest.fixture
def s2swap():
    return el("map 0.0 -> 0.1; map 0.1 -> 0.0; map 1 -> 1")


shapes = st.sampled_from(SHAPES)
seeds = st.integers(0, 2**32 - 1)


def _element(shape, seed, max_leaves, torsion=False):
    rng = random.Random(seed)
    n = random_leaf_count(shape, max_leaves, rng)
    return (random_torsion if torsion else random_element)(shape, n, rng)


@st.composite
def elements(draw, count=1, max_leaves=8, torsion=False):
    """``count`` random elements on one common random shape."""
    shape = draw(shapes)
    out = [_element(shape, draw(seeds), max_leaves, torsion) for _ in range(count)]
    return out[0] if count == 1 else tuple(out)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
