"""Canonical forms for geometric graphs.

Two constructions share one fingerprint format:

  * the general form scans every ordered non-coplanar node quadruple,
    hashing per quadruple the quantized decentered Gram block together
    with the node and edge multisets of four-point distance signatures
    (O(N^6) quadruples, O(N^2) work each);
  * the fast form replaces the scan with a single reference quadruple of
    equivariantly generated virtual nodes (O(N^2) total), which exists
    exactly when the graph admits separating node colors.

All multisets are reduced with an order-independent sum of per-item
64-bit hashes computed on a quantization grid scaled by the coordinate
diameter, so the digest is bit-identical across E(3) x S_N actions (up
to the measure-zero event of a value landing on a grid boundary).
"""

from dataclasses import dataclass
import hashlib
import struct

import numpy as np

from . import _kernels
from .graph import decenter
from .isomorphism import DegenerateGraphError, symmetry_group
from .steerable import cg_product, real_sph_harm_values, SteerableVector

DEFAULT_REL_TOL = 1e-6
FEATURE_QUANTUM = 1e-6
DET_REL_TOL = 1e-8
PHI_SEED = 0x5EEDF00D
PHI_RETRIES = 8


class CoplanarVirtualNodesError(ValueError):
    """Virtual nodes degenerate; caller should use the general form."""


@dataclass(frozen=True)
class CanonicalDigest:
    """Order-independent fingerprint; equality means geometric isomorphism
    at the quantization step used to build it."""

    gram_block: tuple
    node_digest: int
    edge_digest: int
    combined: str  # 64 lowercase hex chars (sha256)
    mode: str
    n_quads: int = 0
    n_skipped: int = 0

    def __eq__(self, other):
        return isinstance(other, CanonicalDigest) and self.combined == other.combined

    def __hash__(self):
        return hash(self.combined)


def _quantize(x, quantum):
    return np.floor(np.asarray(x, dtype=float) / quantum + 0.5).astype(np.int64)


def multiset_digest(items, quantum):
    """Order-independent 64-bit hash of a multiset of real vectors."""
    if quantum <= 0:
        raise ValueError("quantum must be positive")
    items = np.asarray(items, dtype=float)
    if items.size == 0:
        return int(_kernels.SEED_ITEM)  # fixed sentinel for the empty multiset
    items = items.reshape(len(items), -1)
    h = _kernels.hash_items(_quantize(items, quantum), _kernels.SEED_ITEM)
    return int(_kernels.multiset_sum(h))


def _attr_hashes(g):
    """Per-node and per-edge uint64 hashes of quantized attribute vectors."""
    node_h = _kernels.hash_items(
        _quantize(g.node_features, FEATURE_QUANTUM), _kernels.SEED_ITEM
    )
    edge_h = _kernels.hash_items(
        _quantize(g.edge_features, FEATURE_QUANTUM), _kernels.SEED_ITEM
    )
    return np.asarray(node_h, dtype=np.uint64), np.asarray(edge_h, dtype=np.uint64)


def _combine(mode, payload_ints):
    raw = mode.encode() + b"".join(
        struct.pack("<Q", int(v) & (2**64 - 1)) for v in payload_ints
    )
    return hashlib.sha256(raw).hexdigest()


def general_canonical_form(g, tol=DEFAULT_REL_TOL, include_gram=True):
    """Quadruple-scan fingerprint; equal iff graphs are geometrically
    isomorphic at quantization tol (relative to the coordinate diameter)."""
    g0, _ = decenter(g)
    x = g0.positions
    n = g0.n_nodes
    diam = g0.diameter()
    if n < 4 or diam == 0.0:
        raise DegenerateGraphError("general form needs >= 4 non-coplanar nodes")
    q = tol * diam
    gram_q = tol * diam**2
    det_tol = DET_REL_TOL * diam**3
    dist_q = _quantize(g0.distance_matrix(), q)
    node_h, edge_h = _attr_hashes(g0)
    outer, n_quads, n_skipped = _kernels.general_scan(
        x, dist_q, node_h, g0.edge_src, g0.edge_dst, edge_h, det_tol, gram_q
    )
    if n_quads == 0:
        raise DegenerateGraphError("all quadruples coplanar")
    node_digest = int(_kernels.multiset_sum(node_h))
    edge_digest = int(_kernels.multiset_sum(edge_h))
    payload = [outer if include_gram else 0, n_quads, n_skipped,
               n, g0.n_edges, node_digest, edge_digest]
    return CanonicalDigest(
        gram_block=(int(outer),),
        node_digest=node_digest,
        edge_digest=edge_digest,
        combined=_combine("general", payload),
        mode="general",
        n_quads=int(n_quads),
        n_skipped=int(n_skipped),
    )


# ---------------------------------------------------------------------------
# Coloring methods
# ---------------------------------------------------------------------------

@dataclass
class Coloring:
    """E(3)-invariant per-node scalar vectors with a distinctness flag."""

    values: np.ndarray  # (N, C)
    method: str  # "none" | "center" | "tensor" | refined variants
    distinct: bool


def _sigma(t):
    """Bounded smooth nonlinearity used by the coloring formulas."""
    return np.tanh(t)


def _distinct(values, quantum):
    keys = {tuple(row) for row in _quantize(values, quantum)}
    return len(keys) == len(values)


def _tensor_colors(g0, l_max, order):
    """Degree-0 contractions of per-node direction harmonics against
    global steerable moments, up to the given correlation order."""
    x = g0.positions
    diam = g0.diameter()
    r = np.linalg.norm(x, axis=1)
    safe = r > 1e-12 * max(diam, 1.0)
    u = np.zeros_like(x)
    u[safe] = x[safe] / r[safe, None]
    w = _sigma(r / diam)
    per_node = {
        l: real_sph_harm_values(l, u) for l in range(l_max + 1)
    }  # (N, 2l+1)
    glob = {l: (w[:, None] * per_node[l]).sum(axis=0) for l in range(l_max + 1)}
    cols = [w[:, None]]
    # order 1: <Y^l(u_i), g^l>
    for l in range(1, l_max + 1):
        cols.append((per_node[l] * glob[l]).sum(axis=1, keepdims=True))
    if order >= 2:
        # order 2: couple Y^l1(u_i) with Y^l2(u_i), contract against g^l
        for l1 in range(1, l_max + 1):
            for l2 in range(l1, l_max + 1):
                for l in range(abs(l1 - l2), min(l1 + l2, l_max) + 1):
                    col = np.empty(len(x))
                    for i in range(len(x)):
                        v = cg_product(
                            SteerableVector(l1, (-1) ** l1, per_node[l1][i]),
                            SteerableVector(l2, (-1) ** l2, per_node[l2][i]),
                            l,
                        ).values
                        col[i] = v @ glob[l]
                    cols.append(col[:, None])
    return np.hstack(cols)


def color_nodes(g, method="center", l_max=3, order=2, tol=DEFAULT_REL_TOL):
    """Invariant node colors: none, center-distance, or tensor-product."""
    g0, _ = decenter(g)
    diam = g0.diameter()
    quantum = tol * max(diam, 1.0)
    if method in ("none", "empty"):
        vals = g0.node_features.copy()
        return Coloring(vals, "none", _distinct(vals, quantum))
    r = np.linalg.norm(g0.positions, axis=1)
    center = _sigma(r / diam)[:, None] if diam > 0 else r[:, None]
    if method == "center":
        vals = np.hstack([g0.node_features, center])
        return Coloring(vals, "center", _distinct(vals, quantum))
    if method == "tensor":
        vals = np.hstack([g0.node_features, _tensor_colors(g0, l_max, order)])
        return Coloring(vals, "tensor", _distinct(vals, quantum))
    raise ValueError(f"unknown coloring method: {method}")


@dataclass
class SymmetricReport:
    """Returned when no separating coloring can exist (nontrivial symmetry)."""

    group: object

    @property
    def order(self):
        return self.group.order


def unique_coloring(g, tol=DEFAULT_REL_TOL):
    """Separating colors via escalation, or a report of the symmetry group.

    Ladder: center-distance -> tensor-product (increasing degree/order) ->
    per-node sorted distance signatures. A graph with trivial symmetry
    group always separates by the final stage.
    """
    c = color_nodes(g, "center", tol=tol)
    if c.distinct:
        return c
    for l_max, order in ((3, 2), (4, 2), (4, 3)):
        c = color_nodes(g, "tensor", l_max=l_max, order=order, tol=tol)
        if c.distinct:
            return c
    g0, _ = decenter(g)
    diam = g0.diameter()
    quantum = tol * max(diam, 1.0)
    # distance-signature refinement: per-node sorted distance rows
    d = np.sort(g0.distance_matrix(), axis=1)
    vals = np.hstack([c.values, d])
    if _distinct(vals, quantum):
        return Coloring(vals, "tensor+distances", True)
    group = symmetry_group(g)
    if group.order > 1:
        return SymmetricReport(group)
    return Coloring(vals, "tensor+distances", False)


# ---------------------------------------------------------------------------
# Virtual nodes and the fast form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VirtualNodes:
    z: np.ndarray  # (4, 3)
    noncoplanarity: float  # |det| of the frame over its own spread cubed


def _phi_z(colors, seed):
    """Fixed deterministic map from color vectors to 4 bounded scalars."""
    colors = np.asarray(colors, dtype=float)
    scale = max(1.0, np.abs(colors).max())
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(colors.shape[1], 4))
    b = rng.normal(size=4)
    return np.tanh((colors / scale) @ a + b)  # (N, 4)


def generate_virtual_nodes(g, coloring, seed=PHI_SEED):
    """Four equivariant reference points Z = x_c + mean_i phi(c_i) x_ic."""
    c = g.centroid()
    xc = g.positions - c
    w = _phi_z(coloring.values, seed)  # (N, 4)
    z = c + (w.T @ xc) / g.n_nodes  # (4, 3)
    diam = g.diameter()
    v = z[1:] - z[0]
    # scale-free shape measure: the frame's own spread normalizes the
    # determinant, with an absolute floor so a fully collapsed frame
    # (all rows at the centroid) still reads as coplanar
    spread = max(float(np.linalg.norm(v, axis=1).max()), 1e-9 * max(diam, 1e-300))
    nc = abs(np.linalg.det(v)) / spread**3
    return VirtualNodes(z, float(nc))


def fast_canonical_form(g, tol=DEFAULT_REL_TOL, coloring=None,
                        include_gram=True):
    """Single-reference-quadruple fingerprint, O(N^2).

    Requires virtual nodes spanning a 3D volume; raises
    CoplanarVirtualNodesError (after deterministic retries) otherwise.
    """
    g0, centroid = decenter(g)
    diam = g0.diameter()
    if diam == 0.0:
        raise DegenerateGraphError("zero-diameter graph")
    if coloring is None:
        coloring = unique_coloring(g0, tol=tol)
    if isinstance(coloring, SymmetricReport):
        raise CoplanarVirtualNodesError(
            "graph has a nontrivial symmetry group (order "
            f"{coloring.order}); use general_canonical_form"
        )
    vn = None
    for k in range(PHI_RETRIES):
        cand = generate_virtual_nodes(g0, coloring, seed=PHI_SEED + k)
        if cand.noncoplanarity > 1e-6:
            vn = cand
            break
    if vn is None:
        raise CoplanarVirtualNodesError(
            "virtual nodes remain coplanar; use general_canonical_form"
        )
    q = tol * diam
    gram_q = tol * diam**2
    dist4 = np.linalg.norm(g0.positions[:, None] - vn.z[None], axis=-1)
    dist4_q = _quantize(dist4, q)
    node_h, edge_h = _attr_hashes(g0)
    node_sum, edge_sum = _kernels.fast_scan(
        dist4_q, node_h, g0.edge_src, g0.edge_dst, edge_h
    )
    gram = tuple(_quantize(vn.z @ vn.z.T, gram_q).reshape(-1).tolist())
    payload = [node_sum, edge_sum, g0.n_nodes, g0.n_edges]
    payload += list(gram) if include_gram else [0] * 16
    return CanonicalDigest(
        gram_block=gram,
        node_digest=int(node_sum),
        edge_digest=int(edge_sum),
        combined=_combine("fast", payload),
        mode="fast",
        n_quads=1,
    )
