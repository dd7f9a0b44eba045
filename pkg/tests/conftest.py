import numpy as np
import pytest

from geocanon.graph import GeometricGraph, complete_graph


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_dense_graph(seed, n, feature_levels=3):
    """Generic fully-connected graph with small integer features."""
    r = np.random.default_rng(seed)
    h = r.integers(0, feature_levels, size=(n, 1)).astype(float)
    x = r.normal(size=(n, 3)) * 2.0
    return complete_graph(h, x)


def regular_tetrahedron_graph():
    x = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                  [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    return GeometricGraph(np.ones((4, 1)), x,
                          *np.nonzero(~np.eye(4, dtype=bool)), directed=False)
