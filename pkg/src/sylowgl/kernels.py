"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it is importable; otherwise
the numpy implementation in ``_pykernels`` takes over.  Set
``SYLOWGL_BACKEND=python`` to force the fallback, or call :func:`set_backend`.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_impl = _pykernels
BACKEND = "python"


def available_backends():
    return sorted(_BACKENDS)


def set_backend(name):
    global _impl, BACKEND
    if name == "auto":
        name = "cython" if "cython" in _BACKENDS else "python"
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    _impl = _BACKENDS[name]
    BACKEND = name


set_backend(os.environ.get("SYLOWGL_BACKEND", "auto"))


def ent_keys(e, M):
    return _impl.ent_keys(e, M)


def mul_ent(x, y, M):
    return _impl.mul_ent(x, y, M)


def lookup(keys, q):
    return _impl.lookup(keys, q)


def mul_idx(ent, keys, M, i, j):
    return _impl.mul_idx(ent, keys, M, i, j)


def conj_keys(h_ent, g, ginv, M):
    return _impl.conj_keys(h_ent, g, ginv, M)


def normalizes_mask(ent, keys, M, inv, member, gens):
    return _impl.normalizes_mask(ent, keys, M, inv, member, gens)


def normalizing_among(ent, keys, M, inv, member, gens, cand):
    return _impl.normalizing_among(ent, keys, M, inv, member, gens, cand)


def centralizes_mask(ent, M, gens_ent):
    return _impl.centralizes_mask(ent, M, gens_ent)


def closure_mask(ent, keys, M, member, gens):
    return _impl.closure_mask(ent, keys, M, member, gens)
