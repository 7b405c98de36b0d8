import numpy as np
import pytest

from tightpaths.params import derive_params


@pytest.fixture
def path16():
    """The 4-tight path of length 4 on x1..x16 in a 7-uniform hypergraph."""
    from tightpaths.structures import TightPath
    return TightPath(tuple(range(1, 17)), 7, 4)


def edge_rows(edges):
    return np.array([sorted(e) for e in edges], dtype=np.int64)


@pytest.fixture
def p32():
    return derive_params(50, 3, 2)
