import numpy as np
import pytest
from hypothesis import strategies as st

from normcheck.graphon import StepGraphon
from normcheck.graphs import Graph

HALVES = np.array([0.5, 0.5])


@pytest.fixture
def p4_kernel():
    # hand witness: outer edge deletions 0.3125, middle 0.25
    return StepGraphon(HALVES, np.array([[1.0, 0.5], [0.5, 0.0]]))


@pytest.fixture
def bip_kernel():
    return StepGraphon(HALVES, np.array([[0.0, 1.0], [1.0, 0.0]]))


@st.composite
def graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, tuple(p for p, keep in zip(pairs, mask) if keep))


@st.composite
def permutations_of(draw, n):
    return draw(st.permutations(list(range(n))))
