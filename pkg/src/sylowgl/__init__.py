"""Sylow p-subgroups of GL_2 and SL_2 over Z/p^n: enumeration, subgroup lattices,
p-group structure, the H^1 module and E_2 page of the kernel extension, and
centric-radical classification in the group fusion system."""

__version__ = "0.1.0"

from .residue import Ctx, Mat2, mat_mul, mat_inverse, mat_pow, det, reduce_mod, commutator
from .groups import MatrixGroup, Subgroup, GroupKind, build_group, closure_from_generators, theta, element_order
from .kernels import available_backends, set_backend

__all__ = [
    "Ctx", "Mat2", "mat_mul", "mat_inverse", "mat_pow", "det", "reduce_mod", "commutator",
    "MatrixGroup", "Subgroup", "GroupKind", "build_group", "closure_from_generators", "theta",
    "element_order", "available_backends", "set_backend",
]
