"""Counterexample corpus: explicitly-printed geometries used across tests.

Every coordinate here is a verbatim decimal literal from the source
constructions: the 4-body isomorphic pairs, the chirality test triplet,
the unit-circle coloring counterexample, the square cone, and the
tetrahedron-center analytic oracle. Graphs default to uniform node
features and full bidirectional connectivity.
"""

from dataclasses import dataclass

import numpy as np

from .graph import GeometricGraph, apply_transform, complete_graph, EuclideanTransform
from .isomorphism import brute_force_isomorphic
from .steerable import cg_product, real_sph_harm_values, SteerableVector

# reflections about the yOz and zOx planes
M_X = np.diag([-1.0, 1.0, 1.0])
M_Y = np.diag([1.0, -1.0, 1.0])

H1 = np.array([[3.0, 2.0, -4.0], [0.0, 2.0, 5.0], [-3.0, 2.0, -4.0]])
H2 = np.array([[3.0, -2.0, -4.0], [0.0, -2.0, 5.0], [-3.0, -2.0, -4.0]])
H3 = np.array([[0.0, 5.0, 0.0]])
H4 = np.array([[3.0, 0.0, -4.0], [0.0, 0.0, 5.0], [-3.0, 0.0, -4.0]])
H5 = np.array([[0.0, 5.0, 0.0]])

# five unit-circle points with centroid at the origin
X0 = np.array([
    [-1.0, 0.0, 0.0],
    [1.0 / 3.0, 2.0 * np.sqrt(2.0) / 3.0, 0.0],
    [1.0 / 3.0, -2.0 * np.sqrt(2.0) / 3.0, 0.0],
    [1.0 / 6.0, np.sqrt(35.0) / 6.0, 0.0],
    [1.0 / 6.0, -np.sqrt(35.0) / 6.0, 0.0],
])

SQUARE_CONE = np.array([
    [1.0, 0.0, -1.0],
    [-1.0, 0.0, -1.0],
    [0.0, 1.0, -1.0],
    [0.0, -1.0, -1.0],
    [0.0, 0.0, 4.0],
])

VOLUME_GUARD = 1e-6


@dataclass
class LabeledPair:
    first: GeometricGraph
    second: GeometricGraph
    ground_truth_isomorphic: bool
    source: str


def _uniform_graph(positions):
    return complete_graph(np.ones((len(positions), 1)), positions)


def _rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _make_pair(xa, xb, truth, source, verify=True):
    ga, gb = _uniform_graph(xa), _uniform_graph(xb)
    if verify and len(xa) <= 8:
        if brute_force_isomorphic(ga, gb) != truth:
            raise AssertionError(f"ground truth mismatch for {source}")
    return LabeledPair(ga, gb, truth, source)


def four_body_nonchiral_pair(seed=0, verify=True):
    """(G1, G2): seven points differing only by a reflected apex; isomorphic
    via the transform (M_x R_y M_y)^T."""
    rng = np.random.default_rng(seed)
    ry = _rot_y(rng.uniform(0.0, 2.0 * np.pi))
    g1 = np.vstack([H1, H2 @ ry.T, H3])
    g2 = np.vstack([H1, H2 @ ry.T, H3 @ M_Y.T])
    return _make_pair(g1, g2, True, "four-body-nonchiral", verify)


def nonchiral_explicit_transform(seed=0):
    """Closed-form transform mapping the second nonchiral graph onto the
    first: (M_y R_y M_x)^T, with the same seeded rotation used to build
    the pair. (M_y commutes with R_y while M_x conjugates it to its
    transpose, which fixes the order of the reflections.)"""
    rng = np.random.default_rng(seed)
    ry = _rot_y(rng.uniform(0.0, 2.0 * np.pi))
    return EuclideanTransform((M_Y @ ry @ M_X).T, np.zeros(3))


def chiral_explicit_transform():
    """Closed-form transform mapping the second chiral graph onto the first."""
    return EuclideanTransform(M_X @ M_Y, np.zeros(3))


def four_body_chiral_pair(verify=True):
    """(G3, G4): four points, mirror-related apex; isomorphic via M_x M_y."""
    g3 = np.vstack([H4, H5])
    g4 = np.vstack([H4, H5 @ M_Y.T])
    return _make_pair(g3, g4, True, "four-body-chiral", verify)


def mirror_test_graph(seed=0):
    """G5: the chiral variant of G3 with one vertex rotated off-plane."""
    rng = np.random.default_rng(seed)
    ry = _rot_y(rng.uniform(0.0, 2.0 * np.pi))
    return np.vstack([H4[:1], (ry @ np.array([0.0, 0.0, 5.0]))[None],
                      H4[2:], H5])


def unit_circle_counterexample(seed=0, m=2):
    """Union of m randomly rotated copies of the unit-circle quintet; every
    node is at unit distance from the centroid (the origin)."""
    if m < 2:
        raise ValueError("need at least two rotated copies")
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(m):
        q, r = np.linalg.qr(rng.normal(size=(3, 3)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, -1] *= -1.0
        parts.append(X0 @ q.T)
    return _uniform_graph(np.vstack(parts))


def square_cone():
    """Four-fold pyramid with the printed coordinates; uniform features."""
    return _uniform_graph(SQUARE_CONE.copy())


def chirality_graphs(seed=0):
    """(inversion, mirror, counterexample) pairs, each improperly related."""
    g1 = four_body_nonchiral_pair(seed, verify=False).first.positions
    inversion = _make_pair(g1, -g1, True, "chirality-inversion")
    g5 = mirror_test_graph(seed)
    mirr = _make_pair(g5, g5 @ M_Y.T, True, "chirality-mirror")
    xc = unit_circle_counterexample(seed).positions
    counter = _make_pair(xc, -xc, True, "chirality-counterexample",
                         verify=False)
    return inversion, mirr, counter


# ---------------------------------------------------------------------------
# Tetrahedron analytic oracle
# ---------------------------------------------------------------------------

@dataclass
class TetrahedronSample:
    vertices: np.ndarray  # (4, 3)
    monge: np.ndarray
    twelve_point: np.ndarray
    incenter: np.ndarray
    circumradius: float


def tetra_centers(vertices):
    """Monge point, twelve-point center, and incenter of a tetrahedron.

    Uses the classical closed forms with a = A-O etc. (O = vertices[0]).
    Raises on near-degenerate input instead of silently regularizing the
    denominator, since callers rely on exact centers.
    """
    v = np.asarray(vertices, dtype=float).reshape(4, 3)
    o = v[0]
    a, b, c = v[1] - o, v[2] - o, v[3] - o
    vol6 = a @ np.cross(b, c)
    if abs(vol6) <= VOLUME_GUARD:
        raise ValueError("degenerate tetrahedron (volume below guard)")
    monge = o + (
        (a @ (b + c)) * np.cross(b, c)
        + (b @ (c + a)) * np.cross(c, a)
        + (c @ (a + b)) * np.cross(a, b)
    ) / (2.0 * vol6)
    # the twelve-point center sits a third of the way from the Monge point
    # toward the circumcenter
    twelve = monge + (circumcenter(v) - monge) / 3.0
    sbc = np.linalg.norm(np.cross(b, c))
    sca = np.linalg.norm(np.cross(c, a))
    sab = np.linalg.norm(np.cross(a, b))
    sabc = np.linalg.norm(np.cross(b, c) + np.cross(c, a) + np.cross(a, b))
    incenter = o + (sbc * a + sca * b + sab * c) / (sbc + sca + sab + sabc)
    return monge, twelve, incenter


def circumcenter(vertices):
    """Center of the sphere through the four vertices."""
    v = np.asarray(vertices, dtype=float).reshape(4, 3)
    mat = 2.0 * (v[1:] - v[0])
    rhs = (v[1:] ** 2).sum(1) - (v[0] ** 2).sum()
    return np.linalg.solve(mat, rhs)


def random_tetrahedron(seed=0):
    """Four points on a random sphere of radius <= 6, rejection-resampled
    until the volume exceeds 1e-3 * radius^3."""
    rng = np.random.default_rng(seed)
    radius = rng.uniform(1.0, 6.0)
    while True:
        u = rng.normal(size=(4, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        v = radius * u
        a, b, c = v[1] - v[0], v[2] - v[0], v[3] - v[0]
        if abs(a @ np.cross(b, c)) / 6.0 > 1e-3 * radius**3:
            break
    monge, twelve, incenter = tetra_centers(v)
    return TetrahedronSample(v, monge, twelve, incenter, radius)


# ---------------------------------------------------------------------------
# Chirality (parity-odd scalar) features
# ---------------------------------------------------------------------------

def chirality_det(points):
    """det of the frame spanned by four points; negates under reflection."""
    p = np.asarray(points, dtype=float).reshape(4, 3)
    return float(np.linalg.det(p[1:] - p[0]))


def chirality_moment3(graph):
    """Parity-odd scalar from third-order contractions of global moments.

    Uses the (2, 3, 4) contraction: the degree sum must be odd for odd
    parity, degree 1 is excluded (that moment vanishes whenever the
    centroid is at the origin), and repeating a degree is excluded
    (coupling two copies of the same moment to an odd total is
    antisymmetric, hence identically zero).
    """
    x = np.asarray(graph.positions, dtype=float) - graph.centroid()
    r = np.linalg.norm(x, axis=1)
    diam = max(graph.diameter(), 1e-300)
    safe = r > 1e-12 * diam
    u = np.zeros_like(x)
    u[safe] = x[safe] / r[safe, None]
    w = np.tanh(r / diam)
    glob = {
        l: SteerableVector(l, (-1) ** l,
                           (w[:, None] * real_sph_harm_values(l, u)).sum(0))
        for l in (2, 3, 4)
    }
    g23 = cg_product(glob[2], glob[3], 4)
    return float(g23.values @ glob[4].values)


def chirality_feature(arg, method="det"):
    """Dispatch: 'det' takes 4 positions, 'moment3' takes a graph."""
    if method == "det":
        return chirality_det(arg)
    if method == "moment3":
        return chirality_moment3(arg)
    raise ValueError(f"unknown chirality method: {method}")
