"""Core data model: geometric graphs and Euclidean/permutation actions.

A geometric graph bundles per-node features, 3D coordinates, and directed
edges with optional features. Transforms act on coordinates only; node and
edge features are strictly invariant. Undirected graphs are stored as
symmetric directed pairs.
"""

from dataclasses import dataclass, field
import json

import numpy as np

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class EuclideanTransform:
    """Rigid motion x -> linear @ x + translation, with linear in O(3)."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float).reshape(3, 3)
        tr = np.asarray(self.translation, dtype=float).reshape(3)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)
        if not np.allclose(lin.T @ lin, np.eye(3), atol=1e-8):
            raise ValueError("linear part is not orthogonal")

    @property
    def is_reflection(self):
        return np.linalg.det(self.linear) < 0

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    def inverse(self):
        return EuclideanTransform(self.linear.T, -self.linear.T @ self.translation)

    def compose(self, other):
        """Transform equal to applying `other` first, then self."""
        return EuclideanTransform(
            self.linear @ other.linear,
            self.linear @ other.translation + self.translation,
        )

    def apply(self, x):
        """Apply to an (..., 3) array of positions."""
        return np.asarray(x, dtype=float) @ self.linear.T + self.translation


@dataclass(frozen=True)
class Permutation:
    """Bijection on node indices; result node k is source node mapping[k]."""

    mapping: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.intp).reshape(-1)
        object.__setattr__(self, "mapping", m)
        if not np.array_equal(np.sort(m), np.arange(len(m))):
            raise ValueError("mapping is not a bijection on 0..N-1")

    def __len__(self):
        return len(self.mapping)

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n))

    def inverse(self):
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(len(self.mapping))
        return Permutation(inv)


@dataclass(frozen=True)
class IsomorphismCertificate:
    """Witness (sigma, g) with apply_transform(H, g, sigma) matching G."""

    permutation: Permutation
    transform: EuclideanTransform
    residual: float


@dataclass
class GeometricGraph:
    """G = (H, X; A): node features, positions, directed edges with features."""

    node_features: np.ndarray  # (N, C_H)
    positions: np.ndarray  # (N, 3)
    edge_src: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    edge_dst: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    edge_features: np.ndarray | None = None
    directed: bool = True

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        n = len(self.positions)
        self.node_features = np.asarray(self.node_features, dtype=float).reshape(n, -1)
        self.edge_src = np.asarray(self.edge_src, dtype=np.intp).reshape(-1)
        self.edge_dst = np.asarray(self.edge_dst, dtype=np.intp).reshape(-1)
        if self.edge_features is None or np.size(self.edge_features) == 0:
            self.edge_features = np.zeros((len(self.edge_src), 0))
        else:
            self.edge_features = np.asarray(
                self.edge_features, dtype=float
            ).reshape(len(self.edge_src), -1)
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")
        if len(self.edge_src) and (
            self.edge_src.min() < 0
            or self.edge_src.max() >= n
            or self.edge_dst.min() < 0
            or self.edge_dst.max() >= n
        ):
            raise ValueError("edge index out of range")

    @property
    def n_nodes(self):
        return len(self.positions)

    @property
    def n_edges(self):
        return len(self.edge_src)

    def centroid(self):
        return self.positions.mean(axis=0)

    def diameter(self):
        """Largest pairwise distance; 0 for N < 2."""
        if self.n_nodes < 2:
            return 0.0
        d = self.positions[:, None] - self.positions[None, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    def distance_matrix(self):
        d = self.positions[:, None] - self.positions[None, :]
        return np.sqrt((d**2).sum(-1))

    def copy(self):
        return GeometricGraph(
            self.node_features.copy(),
            self.positions.copy(),
            self.edge_src.copy(),
            self.edge_dst.copy(),
            self.edge_features.copy(),
            self.directed,
        )

    def edge_set(self):
        """Directed edge pairs as a set of (src, dst) tuples."""
        return set(zip(self.edge_src.tolist(), self.edge_dst.tolist()))

    def to_dict(self):
        return {
            "directed": bool(self.directed),
            "nodes": [
                {"h": h.tolist(), "x": x.tolist()}
                for h, x in zip(self.node_features, self.positions)
            ],
            "edges": [
                {"i": int(i), "j": int(j), "e": e.tolist()}
                for i, j, e in zip(self.edge_src, self.edge_dst, self.edge_features)
            ],
        }

    @classmethod
    def from_dict(cls, d):
        nodes = d["nodes"]
        if not nodes:
            raise ValueError("graph has no nodes")
        h = np.array([nd["h"] for nd in nodes], dtype=float)
        x = np.array([nd["x"] for nd in nodes], dtype=float)
        edges = d.get("edges", [])
        src = np.array([e["i"] for e in edges], dtype=np.intp)
        dst = np.array([e["j"] for e in edges], dtype=np.intp)
        ef = None
        if edges:
            ef = np.array([e.get("e", []) for e in edges], dtype=float)
        return cls(h, x, src, dst, ef, bool(d.get("directed", True)))

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as f:
                f.write(text + "\n")
        return text

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))


def complete_graph(node_features, positions, edge_features=None):
    """Fully-connected bidirectional graph (no self loops)."""
    n = len(positions)
    src, dst = np.nonzero(~np.eye(n, dtype=bool))
    return GeometricGraph(node_features, positions, src, dst, edge_features,
                          directed=False)


def apply_transform(graph, t, perm=None):
    """Act on a graph by a Euclidean transform and optional node relabeling."""
    if perm is None:
        perm = Permutation.identity(graph.n_nodes)
    if len(perm) != graph.n_nodes:
        raise ValueError("permutation length mismatch")
    m = perm.mapping
    inv = perm.inverse().mapping
    x = t.apply(graph.positions)[m]
    return GeometricGraph(
        graph.node_features[m],
        x,
        inv[graph.edge_src],
        inv[graph.edge_dst],
        graph.edge_features.copy(),
        graph.directed,
    )


def random_transform(seed, allow_reflection=False, allow_translation=True):
    """Haar-random orthogonal part (QR with sign fix) + uniform translation."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if not allow_reflection and np.linalg.det(q) < 0:
        q[:, -1] *= -1.0
    tr = rng.uniform(-10.0, 10.0, size=3) if allow_translation else np.zeros(3)
    return EuclideanTransform(q, tr)


def random_permutation(seed, n):
    rng = np.random.default_rng(seed)
    return Permutation(rng.permutation(n))


def decenter(graph):
    """Translate the centroid to the origin; returns (graph, centroid)."""
    if graph.n_nodes == 0:
        raise ValueError("empty graph")
    c = graph.centroid()
    out = graph.copy()
    out.positions = out.positions - c
    return out, c


def mirror(graph, axis=0):
    """Reflect coordinates through the plane normal to the given axis."""
    lin = np.eye(3)
    lin[axis, axis] = -1.0
    return apply_transform(graph, EuclideanTransform(lin, np.zeros(3)))


def kabsch_align(X, Y):
    """Best O(3)+translation taking Y onto X; returns (transform, rmsd).

    Reflections are permitted (no det correction), so the result minimizes
    RMSD over the full Euclidean group including improper elements.
    """
    X = np.asarray(X, dtype=float).reshape(-1, 3)
    Y = np.asarray(Y, dtype=float).reshape(-1, 3)
    if X.shape != Y.shape or len(X) == 0:
        raise ValueError("point sets must be equal-size and nonempty")
    xc = X.mean(axis=0)
    yc = Y.mean(axis=0)
    cov = (X - xc).T @ (Y - yc)
    u, _, vt = np.linalg.svd(cov)
    rot = u @ vt
    t = EuclideanTransform(rot, xc - rot @ yc)
    rmsd = float(np.sqrt(((t.apply(Y) - X) ** 2).sum(-1).mean()))
    return t, rmsd
