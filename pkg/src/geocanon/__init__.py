"""Deterministic machinery for complete equivariant learning on geometric graphs.

Subpackages cover geometric-graph isomorphism testing, canonical forms
(a general quadruple-scan digest and a fast virtual-node variant),
steerable algebra (real spherical harmonics, rotation matrices on them,
coupling tables), full-rank equivariant bases, and a small corpus of
counterexample geometries.
"""

from geocanon._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
