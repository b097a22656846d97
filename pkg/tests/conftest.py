import numpy as np
import pytest
from hypothesis import strategies as st

from dnorm.oracles import random_generator

CORPUS_SEED = 20240611


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def corpus():
    """Random discrete generators with d <= 4 and K <= 10."""
    r = np.random.default_rng(CORPUS_SEED)
    out = []
    for _ in range(500):
        d = int(r.integers(1, 5))
        out.append(random_generator(r, d, int(r.integers(1, 11))))
    return out


@st.composite
def generators(draw, d=None, max_atoms=6):
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    dim = d if d is not None else int(r.integers(1, 5))
    return random_generator(r, dim, int(r.integers(1, max_atoms + 1)))


def points(d, lo=-10.0, hi=10.0):
    return st.lists(st.floats(lo, hi, allow_nan=False, width=32), min_size=d, max_size=d)
