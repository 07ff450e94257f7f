import pytest

from hybridfp.dsl import parse_multi, parse_single
from hybridfp.pairs import HybridPair

RAMP_F = "piecewise{ [0,2]: 3 - x ; (2,3]: 3 }"
RAMP_T = "piecewise{ [0,2]: [1,2] ; (2,3]: [0, 1/2] }"
TRIAD_F = "piecewise{ [1,1]: 1 ; [2,2]: 3 ; [3,3]: 2 }"
TRIAD_T = "piecewise{ [1,1]: {1} ; [2,2]: {1,3} ; [3,3]: {1,3} }"
KINK_F = "piecewise{ [0,1): 2 - x ; [1,2]: 9/5 }"
KINK_G = "piecewise{ [0,1]: 2 - x ; (1,2]: 9/5 }"
KINK_T = "piecewise{ [0,1]: [1/2, 3/2] ; (1,2]: [1/4, 1/2] }"


@pytest.fixture(scope="session")
def ramp():
    return parse_single(RAMP_F), parse_multi(RAMP_T)


@pytest.fixture(scope="session")
def ramp_pair(ramp):
    return HybridPair(*ramp, name="section-3")


@pytest.fixture(scope="session")
def triad_pair():
    return HybridPair(parse_single(TRIAD_F), parse_multi(TRIAD_T), name="example-1.3")


@pytest.fixture(scope="session")
def kink_pairs():
    T = parse_multi(KINK_T)
    return HybridPair(parse_single(KINK_F), T, "f"), HybridPair(parse_single(KINK_G), T, "g")


@pytest.fixture(scope="session")
def identity_pair():
    return HybridPair(parse_single("piecewise{ [0,1]: x }"), parse_multi("piecewise{ [0,1]: {x} }"), "id")
