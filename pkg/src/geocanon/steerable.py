"""Steerable algebra: real spherical harmonics, their rotation matrices,
Clebsch-Gordan coupling, and the symmetric-tensor decomposition.

Conventions (fixed once, used everywhere):
  * real orthonormal spherical harmonics, m ordered -l..l, no
    Condon-Shortley phase; at degree 1 the components are proportional to
    (y, z, x), so the m-basis of a Cartesian vector is just a reordering;
  * parity of Y^(l) is (-1)^l;
  * rotation matrices on each degree are recovered numerically from the
    harmonics themselves (sampling + pseudo-inverse), so they match this
    convention by construction;
  * coupling tables are the unit-Frobenius-norm intertwiners, computed as
    the nullspace of the equivariance constraint and cached.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import sph_harm_y

L_MAX = 8

_SIGN_EPS = 1e-8


@dataclass(frozen=True)
class SteerableVector:
    """Degree-l feature of length 2l+1 with parity metadata."""

    degree: int
    parity: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        object.__setattr__(self, "values", v)
        if len(v) != 2 * self.degree + 1:
            raise ValueError("length must be 2l+1")
        if self.parity not in (+1, -1):
            raise ValueError("parity must be +1 or -1")


@dataclass(frozen=True)
class WignerMatrix:
    degree: int
    matrix: np.ndarray


@dataclass(frozen=True)
class CGTable:
    """Coupling tensor of shape (2l+1, 2l1+1, 2l2+1); zero iff out of range."""

    l1: int
    l2: int
    l: int
    coeffs: np.ndarray
    in_range: bool


def real_sph_harm_values(l, u):
    """Raw (2l+1,) array of real SH at unit vector(s) u of shape (..., 3)."""
    u = np.asarray(u, dtype=float)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    m_pos = np.arange(1, l + 1)
    out = np.empty(u.shape[:-1] + (2 * l + 1,))
    ylm = sph_harm_y(l, 0, theta, phi)
    out[..., l] = ylm.real
    if l > 0:
        # complex harmonics carry the Condon-Shortley phase; (-1)^m removes it
        yl = np.stack(
            [sph_harm_y(l, m, theta, phi) for m in m_pos], axis=-1
        )
        sgn = (-1.0) ** m_pos
        out[..., l + 1:] = np.sqrt(2.0) * sgn * yl.real
        out[..., l - 1::-1] = np.sqrt(2.0) * sgn * yl.imag
    return out


def real_sph_harm(l, u, l_max=L_MAX):
    """Real orthonormal spherical harmonics at a unit vector; parity (-1)^l."""
    if l > l_max:
        raise ValueError(f"degree {l} exceeds maximum {l_max}")
    u = np.asarray(u, dtype=float).reshape(3)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("input must be a unit vector")
    return SteerableVector(l, (-1) ** l, real_sph_harm_values(l, u))


@lru_cache(maxsize=None)
def _sample_frame(l):
    """Fixed sample directions and pinv of their SH matrix, per degree."""
    rng = np.random.default_rng(0x5EED + l)
    k = 4 * l + 9
    u = rng.normal(size=(k, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    ymat = real_sph_harm_values(l, u)  # (k, 2l+1)
    return u, np.linalg.pinv(ymat)


def wigner_d(l, rot, l_max=L_MAX):
    """Rotation matrix acting on degree-l harmonics: Y(Ru) = D Y(u)."""
    if l > l_max:
        raise ValueError(f"degree {l} exceeds maximum {l_max}")
    rot = np.asarray(rot, dtype=float).reshape(3, 3)
    if not np.allclose(rot.T @ rot, np.eye(3), atol=1e-9) or np.linalg.det(rot) < 0:
        raise ValueError("input is not a proper rotation")
    if l == 0:
        return WignerMatrix(0, np.ones((1, 1)))
    u, pinv = _sample_frame(l)
    y_rot = real_sph_harm_values(l, u @ rot.T)  # (k, 2l+1)
    d = (pinv @ y_rot).T
    return WignerMatrix(l, d)


def rep_matrix(l, ortho, l_max=L_MAX):
    """Representation of an O(3) element on degree-l SH-type features.

    For improper elements the SH parity (-1)^l factors out the inversion:
    rho(O) = (-1)^l * D(-O) when det(O) = -1.
    """
    ortho = np.asarray(ortho, dtype=float).reshape(3, 3)
    if np.linalg.det(ortho) > 0:
        return wigner_d(l, ortho, l_max).matrix
    return (-1.0) ** l * wigner_d(l, -ortho, l_max).matrix


@lru_cache(maxsize=None)
def _cg_coeffs(l1, l2, l):
    """Unit-norm intertwiner Q with D^(l) Q = Q (D^(l1) x D^(l2))."""
    n1, n2, n = 2 * l1 + 1, 2 * l2 + 1, 2 * l + 1
    rng = np.random.default_rng(0xC6 + 1000 * l1 + 100 * l2 + l)
    blocks = []
    # two generic rotations generate a dense subgroup of SO(3), so their
    # joint constraint already pins down the intertwiner
    for _ in range(2):
        q, r = np.linalg.qr(rng.normal(size=(3, 3)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, -1] *= -1.0
        d = wigner_d(l, q).matrix
        d12 = np.kron(wigner_d(l1, q).matrix, wigner_d(l2, q).matrix)
        # row-major vec: vec(D Q - Q M) = (D (x) I - I (x) M^T) vec(Q)
        blocks.append(np.kron(d, np.eye(n1 * n2)) - np.kron(np.eye(n), d12.T))
    a = np.vstack(blocks)
    _, s, vt = np.linalg.svd(a, full_matrices=False)
    if s[-1] > 1e-7:
        raise np.linalg.LinAlgError("no intertwiner found (unexpected)")
    if len(s) > 1 and s[-2] < 1e-4:
        raise np.linalg.LinAlgError("intertwiner space not one-dimensional")
    q = vt[-1]
    # deterministic sign: first significant entry positive
    idx = np.argmax(np.abs(q) > _SIGN_EPS)
    if q[idx] < 0:
        q = -q
    return q.reshape(n, n1, n2)


def cg_table(l1, l2, l, l_max=L_MAX):
    """Real Clebsch-Gordan coupling table; zero (flagged) out of range."""
    if max(l1, l2, l) > l_max:
        raise ValueError("degree exceeds maximum")
    n1, n2, n = 2 * l1 + 1, 2 * l2 + 1, 2 * l + 1
    if not abs(l1 - l2) <= l <= l1 + l2:
        return CGTable(l1, l2, l, np.zeros((n, n1, n2)), in_range=False)
    return CGTable(l1, l2, l, _cg_coeffs(l1, l2, l), in_range=True)


def cg_product(v1, v2, l_out, l_max=L_MAX):
    """Couple two steerable vectors into degree l_out; parities multiply."""
    if not abs(v1.degree - v2.degree) <= l_out <= v1.degree + v2.degree:
        raise ValueError("output degree outside the allowed range")
    tab = cg_table(v1.degree, v2.degree, l_out, l_max)
    vals = np.einsum("mij,i,j->m", tab.coeffs, v1.values, v2.values)
    return SteerableVector(l_out, v1.parity * v2.parity, vals)


# Cartesian (x,y,z) -> degree-1 m-basis (y,z,x) change of basis.
_P1 = np.array([[0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0]])


def cartesian_to_m(v):
    """Reorder a Cartesian 3-vector into the degree-1 m-basis."""
    return _P1 @ np.asarray(v, dtype=float).reshape(3)


def m_to_cartesian(v):
    return _P1.T @ np.asarray(v, dtype=float).reshape(3)


@lru_cache(maxsize=None)
def _tensor_projectors():
    """Per-degree (Q_l, pseudo-inverse scale) for decomposing 3x3 tensors.

    vec is row-major over the m-basis pair indices; Q_l Q_l^T = I/(2l+1)
    by Schur orthogonality given the unit Frobenius normalization.
    """
    out = {}
    for l in (0, 1, 2):
        q = _cg_coeffs(1, 1, l).reshape(2 * l + 1, 9)
        out[l] = q
    return out


def decompose_symmetric_tensor(xs):
    """Split sum_i x_i x_i^T into degree-0, 1, 2 steerable components."""
    xs = np.asarray(xs, dtype=float).reshape(-1, 3)
    if len(xs) == 0:
        raise ValueError("need at least one vector")
    t = xs.T @ xs
    tm = _P1 @ t @ _P1.T  # express both tensor slots in the m-basis
    vec = tm.reshape(9)
    proj = _tensor_projectors()
    return {
        l: SteerableVector(l, +1, proj[l] @ vec) for l in (0, 1, 2)
    }


def reconstruct_symmetric_tensor(components):
    """Inverse of decompose_symmetric_tensor (Cartesian 3x3 output)."""
    proj = _tensor_projectors()
    vec = np.zeros(9)
    for l, sv in components.items():
        q = proj[l]
        # Q Q^T = I/(2l+1), so the right inverse is (2l+1) Q^T
        vec += (2 * l + 1) * q.T @ sv.values
    tm = vec.reshape(3, 3)
    return _P1.T @ tm @ _P1
