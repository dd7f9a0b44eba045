import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocanon.graph import (
    EuclideanTransform,
    GeometricGraph,
    Permutation,
    apply_transform,
    complete_graph,
    decenter,
    kabsch_align,
    mirror,
    random_permutation,
    random_transform,
)

from conftest import random_dense_graph


def test_transform_group_laws():
    t1 = random_transform(1, allow_reflection=True)
    t2 = random_transform(2)
    x = np.random.default_rng(0).normal(size=(5, 3))
    assert np.allclose(t1.compose(t2).apply(x), t1.apply(t2.apply(x)))
    assert np.allclose(t1.inverse().apply(t1.apply(x)), x, atol=1e-12)
    ident = EuclideanTransform.identity()
    assert np.allclose(ident.apply(x), x)


def test_transform_rejects_nonorthogonal():
    with pytest.raises(ValueError):
        EuclideanTransform(np.eye(3) * 2.0, np.zeros(3))


def test_random_transform_determinism_and_det():
    a = random_transform(7)
    b = random_transform(7)
    assert np.array_equal(a.linear, b.linear)
    assert np.isclose(np.linalg.det(a.linear), 1.0)
    assert not a.is_reflection


def test_reflection_frequency_balanced():
    refl = sum(random_transform(s, allow_reflection=True).is_reflection
               for s in range(1000))
    assert 400 <= refl <= 600


def test_permutation_inverse():
    p = random_permutation(3, 6)
    assert np.array_equal(p.inverse().mapping[p.mapping], np.arange(6))
    with pytest.raises(ValueError):
        Permutation(np.array([0, 0, 1]))


def test_apply_transform_preserves_structure():
    g = random_dense_graph(0, 6)
    t = random_transform(1, allow_reflection=True)
    p = random_permutation(2, 6)
    gt = apply_transform(g, t, p)
    # distances invariant, features follow the relabeling
    assert np.allclose(np.sort(gt.distance_matrix(), axis=None),
                       np.sort(g.distance_matrix(), axis=None))
    assert np.allclose(gt.node_features, g.node_features[p.mapping])
    # result node k carries source node mapping[k]
    assert np.allclose(gt.positions, t.apply(g.positions)[p.mapping])


def test_json_roundtrip():
    g = random_dense_graph(5, 4)
    g2 = GeometricGraph.from_dict(json.loads(g.to_json()))
    assert np.array_equal(g2.positions, g.positions)
    assert np.array_equal(g2.node_features, g.node_features)
    assert g2.edge_set() == g.edge_set()
    assert g2.directed == g.directed


def test_from_dict_rejects_empty():
    with pytest.raises(ValueError):
        GeometricGraph.from_dict({"nodes": []})


def test_edge_bounds_checked():
    with pytest.raises(ValueError):
        GeometricGraph(np.ones((2, 1)), np.zeros((2, 3)),
                       np.array([0]), np.array([5]))


def test_decenter_and_mirror():
    g = random_dense_graph(1, 5)
    g0, c = decenter(g)
    assert np.allclose(g0.centroid(), 0.0, atol=1e-14)
    assert np.allclose(c, g.centroid())
    gm = mirror(g, axis=1)
    assert np.allclose(gm.positions[:, 1], -g.positions[:, 1])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_kabsch_recovers_random_isometry(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(6, 3))
    t = random_transform(seed, allow_reflection=True)
    rec, rmsd = kabsch_align(t.apply(x), x)
    assert rmsd < 1e-10
    assert np.allclose(rec.linear, t.linear, atol=1e-9)


def test_kabsch_finds_reflection():
    x = np.random.default_rng(4).normal(size=(5, 3))
    y = x @ np.diag([-1.0, 1.0, 1.0])
    t, rmsd = kabsch_align(x, y)
    assert rmsd < 1e-12
    assert t.is_reflection


def test_complete_graph_edge_count():
    g = complete_graph(np.ones((5, 1)), np.random.default_rng(0).normal(size=(5, 3)))
    assert g.n_edges == 20
    assert not any(i == j for i, j in g.edge_set())
