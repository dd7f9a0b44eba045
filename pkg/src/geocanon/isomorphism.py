"""Geometric isomorphism tests via four-point positioning.

Every 3D point is pinned down by its distances to four non-coplanar
reference points, so matching one reference quadruple across two graphs
determines the full alignment. The point-cloud test ignores features and
topology; the graph test additionally requires node features, edge sets,
and edge features to match under the recovered relabeling.
"""

from itertools import combinations, permutations

import numpy as np

from .graph import (
    EuclideanTransform,
    GeometricGraph,
    IsomorphismCertificate,
    Permutation,
    apply_transform,
    decenter,
    kabsch_align,
)

BRUTE_FORCE_MAX = 8


class DegenerateGraphError(ValueError):
    """All points coplanar: four-point positioning is undefined."""


def find_noncoplanar_quadruple(positions, tol=1e-8):
    """First index quadruple (lexicographic) spanning a 3D volume, or None.

    The determinant of the three edge vectors must exceed tol * diameter^3.
    """
    x = np.asarray(positions, dtype=float).reshape(-1, 3)
    n = len(x)
    if n < 4:
        return None
    diam = _diameter(x)
    if diam == 0.0:
        return None
    thresh = tol * diam**3
    for quad in combinations(range(n), 4):
        v = x[list(quad[1:])] - x[quad[0]]
        if abs(np.linalg.det(v)) > thresh:
            return quad
    return None


def _diameter(x):
    if len(x) < 2:
        return 0.0
    d = x[:, None] - x[None, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def _pairdist(x, quad):
    """Ordered pairwise distances within a quadruple (6-vector)."""
    q = x[list(quad)]
    idx = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    return np.array([np.linalg.norm(q[i] - q[j]) for i, j in idx])


def _match_positions(xg, xh_t, atol):
    """Bijection mapping each G node to its unique nearest transformed H node.

    Returns (mapping, residual) or None if no within-tolerance bijection.
    """
    d = np.sqrt(((xg[:, None] - xh_t[None, :]) ** 2).sum(-1))
    mapping = d.argmin(axis=1)
    resid = d[np.arange(len(xg)), mapping]
    if resid.max() > atol or len(set(mapping.tolist())) != len(xg):
        return None
    return mapping, float(resid.max())


def _features_match(fg, fh, mapping, atol=1e-8):
    return fg.shape == fh[mapping].shape and np.allclose(fg, fh[mapping], atol=atol)


def _edges_match(g, h, mapping, atol=1e-8):
    """Edge sets (with features) equal after relabeling H by the mapping.

    mapping[k] is the H index of G node k, so H edge (i, j) appears in G as
    (inv[i], inv[j]).
    """
    if g.n_edges != h.n_edges:
        return False
    inv = np.empty(len(mapping), dtype=np.intp)
    inv[mapping] = np.arange(len(mapping))
    key_g = {}
    for i, j, e in zip(g.edge_src, g.edge_dst, g.edge_features):
        key_g.setdefault((int(i), int(j)), []).append(e)
    for i, j, e in zip(inv[h.edge_src], inv[h.edge_dst], h.edge_features):
        bucket = key_g.get((int(i), int(j)))
        if not bucket:
            return False
        for k, eg in enumerate(bucket):
            if eg.shape == e.shape and np.allclose(eg, e, atol=atol):
                bucket.pop(k)
                break
        else:
            return False
    return all(not b for b in key_g.values())


def _quadruple_search(g, h, tol, check_features, check_edges):
    """Core search: match one reference quadruple of G against all ordered
    quadruples of H, verify the induced alignment on the whole graph."""
    xg, xh = g.positions, h.positions
    n = g.n_nodes
    diam = _diameter(xg)
    atol = max(tol * diam, 1e-12)
    quad_g = find_noncoplanar_quadruple(xg)
    if quad_g is None:
        raise DegenerateGraphError("no non-coplanar quadruple")
    ref_d = _pairdist(xg, quad_g)
    base_g = xg[list(quad_g)]
    # cheap necessary condition: full sorted distance multisets agree
    dg = np.sort(np.sqrt(((xg[:, None] - xg[None, :]) ** 2).sum(-1)), axis=None)
    dh = np.sort(np.sqrt(((xh[:, None] - xh[None, :]) ** 2).sum(-1)), axis=None)
    if not np.allclose(dg, dh, atol=atol):
        return None
    for cand in permutations(range(n), 4):
        if not np.allclose(_pairdist(xh, cand), ref_d, atol=atol):
            continue
        t, _ = kabsch_align(base_g, xh[list(cand)])
        match = _match_positions(xg, t.apply(xh), atol)
        if match is None:
            continue
        mapping, resid = match
        if check_features and not _features_match(g.node_features,
                                                  h.node_features, mapping):
            continue
        if check_edges and not _edges_match(g, h, mapping):
            continue
        # refit on the full correspondence for a tighter residual
        t, _ = kabsch_align(xg, xh[mapping])
        resid = float(np.sqrt(((t.apply(xh[mapping]) - xg) ** 2).sum(-1)).max())
        return IsomorphismCertificate(Permutation(mapping), t, resid)
    return None


def point_cloud_isomorphic(x, y, tol=1e-8):
    """Alignment test for bare point clouds (features/edges ignored)."""
    x = np.asarray(x, dtype=float).reshape(-1, 3)
    y = np.asarray(y, dtype=float).reshape(-1, 3)
    if len(x) != len(y):
        return None
    gx = GeometricGraph(np.zeros((len(x), 0)), x)
    gy = GeometricGraph(np.zeros((len(y), 0)), y)
    try:
        return _quadruple_search(gx, gy, tol, check_features=False,
                                 check_edges=False)
    except DegenerateGraphError:
        if len(x) > BRUTE_FORCE_MAX:
            raise
        return _brute_force_certificate(gx, gy, tol, check_features=False,
                                        check_edges=False)


def geometric_graph_isomorphic(g, h, tol=1e-8):
    """Full geometric-graph isomorphism: positions, features, and edges."""
    if g.n_nodes != h.n_nodes or g.n_edges != h.n_edges:
        return None
    try:
        return _quadruple_search(g, h, tol, check_features=True,
                                 check_edges=True)
    except DegenerateGraphError:
        if g.n_nodes > BRUTE_FORCE_MAX:
            raise
        return _brute_force_certificate(g, h, tol, check_features=True,
                                        check_edges=True)


def _brute_force_certificate(g, h, tol, check_features=True, check_edges=True):
    xg, xh = g.positions, h.positions
    n = g.n_nodes
    diam = _diameter(xg)
    atol = max(tol * diam, 1e-12)
    for mapping in permutations(range(n)):
        mapping = np.array(mapping, dtype=np.intp)
        if check_features and not _features_match(g.node_features,
                                                  h.node_features, mapping):
            continue
        t, rmsd = kabsch_align(xg, xh[mapping])
        if rmsd > atol:
            continue
        if check_edges and not _edges_match(g, h, mapping):
            continue
        resid = float(np.sqrt(((t.apply(xh[mapping]) - xg) ** 2).sum(-1)).max())
        return IsomorphismCertificate(Permutation(mapping), t, resid)
    return None


def brute_force_isomorphic(g, h, tol=1e-8):
    """Ground-truth oracle over all N! permutations; N <= 8 only."""
    if g.n_nodes > BRUTE_FORCE_MAX or h.n_nodes > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to N <= {BRUTE_FORCE_MAX}")
    if g.n_nodes != h.n_nodes or g.n_edges != h.n_edges:
        return False
    return _brute_force_certificate(g, h, tol) is not None


class SymmetryGroup:
    """All (orthogonal transform, permutation) pairs fixing a graph."""

    def __init__(self, elements, closed):
        self.elements = elements
        self.closed = closed

    @property
    def order(self):
        return len(self.elements)


def symmetry_group(g, tol=1e-8):
    """Self-matches of the decentered graph under O(3) x S_N."""
    g0, _ = decenter(g)
    x = g0.positions
    n = g0.n_nodes
    diam = _diameter(x)
    atol = max(tol * diam, 1e-12)
    quad = find_noncoplanar_quadruple(x)
    if quad is None:
        raise DegenerateGraphError("symmetry_group needs a non-degenerate graph")
    ref_d = _pairdist(x, quad)
    base = x[list(quad)]
    seen = {}
    for cand in permutations(range(n), 4):
        if not np.allclose(_pairdist(x, cand), ref_d, atol=atol):
            continue
        t, _ = kabsch_align(x[list(cand)], base)
        match = _match_positions(x, t.apply(x), atol)
        if match is None:
            continue
        mapping, _ = match
        # x[k] ~ O x[mapping[k]], matching the certificate convention
        if not _features_match(g0.node_features, g0.node_features, mapping):
            continue
        if not _edges_match(g0, g0, mapping):
            continue
        # exact orthogonal refit about the origin (no translation)
        u, _, vt = np.linalg.svd(x.T @ x[mapping])
        ortho = u @ vt
        resid = np.abs(x[mapping] @ ortho.T - x).max()
        if resid > atol:
            continue
        key = tuple(mapping.tolist())
        if key not in seen:
            seen[key] = (EuclideanTransform(ortho, np.zeros(3)),
                         Permutation(mapping))
    elements = list(seen.values())
    closed = _is_closed(seen, atol)
    return SymmetryGroup(elements, closed)


def _is_closed(seen, atol):
    perms = {k: np.array(k, dtype=np.intp) for k in seen}
    for k1 in perms:
        for k2 in perms:
            prod = tuple(perms[k1][perms[k2]].tolist())
            if prod not in perms:
                return False
    return True
