import random

import pytest

import tripoly as tp
from tripoly import trisys


@pytest.fixture
def f5():
    return tp.Field(5)


@pytest.fixture
def f7():
    return tp.Field(7)


@pytest.fixture
def demo_m1_p5(f5):
    """f0 = X0*X1 + 1, f1 = X1 + 1 over F_5."""
    r = tp.PolyRing(f5, 2)
    return tp.build_system(f5, 1, [r.from_string("X1")], [r.from_string("1")], 1, 1)


@pytest.fixture
def demo_m1_p3():
    """Same shape over F_3; the hand-simulated golden orbit lives here."""
    f = tp.Field(3)
    r = tp.PolyRing(f, 2)
    return tp.build_system(f, 1, [r.from_string("X1")], [r.from_string("1")], 1, 1)


@pytest.fixture
def demo_m2_all_ones(f5):
    """m=2 with every exponent-matrix entry 1: g0 = X1*X2, g1 = X2, h = 1."""
    r = tp.PolyRing(f5, 3)
    g = [r.from_string("X1*X2"), r.from_string("X2")]
    h = [r.from_string("1"), r.from_string("1")]
    return tp.build_system(f5, 2, g, h, 1, 1)


def make_random_system(seed, field, m, **kw):
    return trisys.random_system(random.Random(seed), field, m, **kw)
