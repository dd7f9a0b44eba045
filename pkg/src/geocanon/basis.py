"""Steerable bases and the dynamic (least-squares) method.

Any degree-l equivariant graph-level output can be written as scalar
weights times a full-rank steerable basis built from the graph itself.
For symmetric graphs the reachable outputs shrink to the fixed subspace
of the group-averaged representation; bases are projected onto it so
their span never overshoots what symmetry allows.
"""

from dataclasses import dataclass

import numpy as np

from .canonical import Coloring, color_nodes
from .graph import decenter
from .isomorphism import symmetry_group
from .steerable import (
    SteerableVector,
    cg_product,
    real_sph_harm_values,
    rep_matrix,
)

RANK_CUTOFF = 1e-9


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of the degree-l outputs allowed by symmetry."""

    degree: int
    columns: np.ndarray  # (2l+1, k), possibly k = 0

    @property
    def dim(self):
        return self.columns.shape[1]

    def projector(self):
        return self.columns @ self.columns.T


@dataclass(frozen=True)
class BasisMatrix:
    degree: int
    columns: np.ndarray  # (2l+1, C)
    provenance: tuple  # one tag per column

    @property
    def rank(self):
        if self.columns.size == 0:
            return 0
        s = np.linalg.svd(self.columns, compute_uv=False)
        return int(np.count_nonzero(s > RANK_CUTOFF * s[0]))


@dataclass(frozen=True)
class WeightSolution:
    w: np.ndarray
    residual: float


def steerable_subspace(g, l, group=None):
    """Fixed subspace of the group-averaged degree-l representation.

    Improper group elements act with the spherical-harmonic parity
    (-1)^l folded in, so this is the subspace reachable by SH-built
    equivariant features.
    """
    if group is None:
        group = symmetry_group(g)
    n = 2 * l + 1
    if group.order <= 1:
        return SubspaceBasis(l, np.eye(n))
    avg = np.zeros((n, n))
    for t, _ in group.elements:
        avg += rep_matrix(l, t.linear)
    avg /= group.order
    # group average is a symmetric projector; keep its unit eigenspace
    vals, vecs = np.linalg.eigh(avg)
    keep = vals > 1.0 - 1e-8
    return SubspaceBasis(l, vecs[:, keep])


def _node_directions(g0):
    x = g0.positions
    r = np.linalg.norm(x, axis=1)
    ok = r > 1e-12 * max(g0.diameter(), 1.0)
    return x[ok] / r[ok, None]


def full_rank_basis(g, l, coloring=None, group=None):
    """Basis columns spanning the full degree-l fixed subspace.

    Columns are harmonics of node directions, augmented by couplings of
    pairs of edge directions when node count limits the raw rank. For
    graphs with nontrivial symmetry, columns are projected onto the
    fixed subspace (the rank target drops to its dimension).
    """
    g0, _ = decenter(g)
    if coloring is None:
        coloring = color_nodes(g0, "center")
    sub = steerable_subspace(g0, l, group=group)
    target = sub.dim
    proj = None if sub.dim == 2 * l + 1 else sub.projector()
    dirs = _node_directions(g0)
    cols = [real_sph_harm_values(l, u) for u in dirs]
    tags = [f"node:{k}" for k in range(len(cols))]

    def current_rank():
        m = np.array(cols).T
        if proj is not None:
            m = proj @ m
        s = np.linalg.svd(m, compute_uv=False)
        return int(np.count_nonzero(s > RANK_CUTOFF * s[0])) if s.size else 0

    if current_rank() < target:
        # pairs of distinct edge directions, lexicographic, coupled at
        # degree (l, l) -> l to lift past the node-count rank bound
        per = {a: SteerableVector(l, (-1) ** l, real_sph_harm_values(l, u))
               for a, u in enumerate(dirs)}
        for a in range(len(dirs)):
            for b in range(len(dirs)):
                if a == b:
                    continue
                cols.append(cg_product(per[a], per[b], l).values)
                tags.append(f"pair:{a},{b}")
                if current_rank() >= target:
                    break
            if current_rank() >= target:
                break
    m = np.array(cols).T
    if proj is not None:
        m = proj @ m
    return BasisMatrix(l, m, tuple(tags))


def solve_dynamic_weights(v, target):
    """Minimum-norm least-squares weights realizing the target in span(V)."""
    if isinstance(v, BasisMatrix):
        if isinstance(target, SteerableVector) and target.degree != v.degree:
            raise ValueError("degree mismatch")
        mat = v.columns
    elif isinstance(v, SubspaceBasis):
        mat = v.columns
    else:
        mat = np.asarray(v, dtype=float)
    t = target.values if isinstance(target, SteerableVector) else np.asarray(target)
    w, *_ = np.linalg.lstsq(mat, t, rcond=None)
    resid = float(np.linalg.norm(mat @ w - t))
    return WeightSolution(w, resid)


def common_basis_features(g, requests, nu=1):
    """Sums of coupled edge-direction harmonics over neighbor tuples.

    Request formats (key in the returned map is the request tuple):
      nu=1: (l,)                 -> sum_i sum_j Y^l(u_ij)
      nu=2: (l1, l2, lout)       -> couple the pair, then sum
      nu=3: (l1, l2, l12, l3, lout) -> left-fold coupling chain
    """
    if nu > 3:
        raise ValueError("body order limited to 3")
    g0, _ = decenter(g)
    x = g0.positions
    nbrs = {}
    for i, j in zip(g0.edge_src, g0.edge_dst):
        nbrs.setdefault(int(i), []).append(int(j))
    out = {}
    for req in requests:
        req = tuple(req) if np.iterable(req) else (req,)
        if nu == 1:
            (l,) = req
            lout = l
        elif nu == 2:
            l1, l2, lout = req
        else:
            l1, l2, l12, l3, lout = req
        acc = np.zeros(2 * lout + 1)
        for i, js in nbrs.items():
            for tup in _tuples(js, nu):
                us = []
                for j in tup:
                    v = x[j] - x[i]
                    nv = np.linalg.norm(v)
                    if nv < 1e-14:
                        raise ValueError("zero-length edge vector")
                    us.append(v / nv)
                if nu == 1:
                    acc += real_sph_harm_values(lout, us[0])
                elif nu == 2:
                    a = SteerableVector(l1, (-1) ** l1,
                                        real_sph_harm_values(l1, us[0]))
                    b = SteerableVector(l2, (-1) ** l2,
                                        real_sph_harm_values(l2, us[1]))
                    acc += cg_product(a, b, lout).values
                else:
                    a = SteerableVector(l1, (-1) ** l1,
                                        real_sph_harm_values(l1, us[0]))
                    b = SteerableVector(l2, (-1) ** l2,
                                        real_sph_harm_values(l2, us[1]))
                    c = SteerableVector(l3, (-1) ** l3,
                                        real_sph_harm_values(l3, us[2]))
                    acc += cg_product(cg_product(a, b, l12), c, lout).values
        parity = (-1) ** sum(req[:nu]) if nu > 1 else (-1) ** lout
        out[req] = SteerableVector(lout, parity, acc)
    return out


def _tuples(js, nu):
    if nu == 1:
        return [(j,) for j in js]
    if nu == 2:
        return [(a, b) for a in js for b in js]
    return [(a, b, c) for a in js for b in js for c in js]


def gram_feature(x_i, z):
    """Normalized Gram of the node-to-virtual-node frame; E(3)-invariant."""
    z = np.asarray(z, dtype=float).reshape(4, 3)
    m = np.asarray(x_i, dtype=float).reshape(1, 3) - z  # 1_4 x_i - Z
    gram = m @ m.T
    norm = np.linalg.norm(gram)
    if norm == 0.0:
        raise ValueError("zero Frobenius norm")
    return (gram / norm).reshape(16)


def default_weight_fn(seed=0xE6):
    """Fixed pseudo-random smooth scalar message function."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=4)
    b = rng.normal()

    def fn(hi, hj, eij, dist2):
        # endpoints enter with different coefficients so that distinct
        # colors produce asymmetric messages (m_ij != m_ji)
        s = np.array([
            float(np.mean(hi)),
            float(np.mean(hj)),
            float(dist2),
            float(np.mean(eij)) if np.size(eij) else 0.0,
        ])
        return float(np.tanh(a @ np.tanh(s) + b))

    return fn


def egnn_cpl_forward(g, coloring=None, weight_fn=None):
    """Single message-passing layer with scalar-gated coordinate update.

    Returns (positions, features): per-node updated positions
    y_i = x_c + (1/|N(i)|) sum_j w(m_ij) (x_i - x_j) and the (invariant)
    node features. The graph-level readout is the mean position.
    """
    if weight_fn is None:
        weight_fn = default_weight_fn()
    h = coloring.values if isinstance(coloring, Coloring) else g.node_features
    x = g.positions
    xc = g.centroid()
    deg = np.zeros(g.n_nodes)
    agg = np.zeros((g.n_nodes, 3))
    for i, j, e in zip(g.edge_src, g.edge_dst, g.edge_features):
        d = x[i] - x[j]
        w = weight_fn(h[i], h[j], e, float(d @ d))
        agg[i] += w * d
        deg[i] += 1
    scale = np.where(deg > 0, deg, 1.0)
    y = xc + agg / scale[:, None]
    return y, h.copy()


def readout(positions):
    return np.asarray(positions).mean(axis=0)


def uncolored_degeneration(g, weight_fn=None):
    """Graph-level output of the uncolored symmetric layer: the centroid.

    With uniform features, a fully-connected bidirectional edge set, and
    a message function symmetric in its endpoints, every w_ij x_ij
    cancels against w_ji x_ji, so the readout collapses to x_c.
    """
    y, _ = egnn_cpl_forward(g, coloring=None, weight_fn=weight_fn)
    return readout(y)
