"""Pure numpy implementation of the hot group kernels.

Element tables are ``ent``: an ``(N, 4)`` int64 array of matrix entries sorted by
packed key, ``keys``: the matching sorted int64 key array, and the modulus ``M``.
Indices refer to rows of ``ent``.  Every function here has a twin with the same
signature in the compiled ``_ckernels`` module.
"""

import numpy as np


def ent_keys(e, M):
    e = np.asarray(e, dtype=np.int64)
    return ((e[..., 0] * M + e[..., 1]) * M + e[..., 2]) * M + e[..., 3]


def mul_ent(x, y, M):
    """Entrywise product of stacked matrices, reduced mod M (no overflow for M^2 < 2^63)."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
    out[..., 0] = (x[..., 0] * y[..., 0] % M + x[..., 1] * y[..., 2] % M) % M
    out[..., 1] = (x[..., 0] * y[..., 1] % M + x[..., 1] * y[..., 3] % M) % M
    out[..., 2] = (x[..., 2] * y[..., 0] % M + x[..., 3] * y[..., 2] % M) % M
    out[..., 3] = (x[..., 2] * y[..., 1] % M + x[..., 3] * y[..., 3] % M) % M
    return out


def lookup(keys, q):
    q = np.asarray(q, dtype=np.int64)
    pos = np.searchsorted(keys, q)
    pos = np.minimum(pos, len(keys) - 1)
    return np.where(keys[pos] == q, pos, -1).astype(np.int64)


def mul_idx(ent, keys, M, i, j):
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    return lookup(keys, ent_keys(mul_ent(ent[i], ent[j], M), M))


def conj_keys(h_ent, g, ginv, M):
    """Keys of ``g h g^-1`` for every row ``h`` of ``h_ent``; the result need not lie in any table."""
    g = np.asarray(g, dtype=np.int64)
    ginv = np.asarray(ginv, dtype=np.int64)
    return ent_keys(mul_ent(mul_ent(g, h_ent, M), ginv, M), M)


def normalizes_mask(ent, keys, M, inv, member, gens):
    """uint8 mask of all x with ``x h x^-1`` in ``member`` for each h in ``gens``."""
    N = len(keys)
    alive = np.arange(N, dtype=np.int64)
    for h in np.asarray(gens, dtype=np.int64):
        if not len(alive):
            break
        xh = mul_ent(ent[alive], ent[h], M)
        c = lookup(keys, ent_keys(mul_ent(xh, ent[inv[alive]], M), M))
        ok = c >= 0
        ok[ok] = member[c[ok]] != 0
        alive = alive[ok]
    out = np.zeros(N, dtype=np.uint8)
    out[alive] = 1
    return out


def normalizing_among(ent, keys, M, inv, member, gens, cand):
    """Boolean array: does ``cand[k]`` normalize the set ``member`` (tested on ``gens``)?"""
    cand = np.asarray(cand, dtype=np.int64)
    ok = np.ones(len(cand), dtype=bool)
    for h in np.asarray(gens, dtype=np.int64):
        sel = np.nonzero(ok)[0]
        if not len(sel):
            break
        x = cand[sel]
        c = lookup(keys, ent_keys(mul_ent(mul_ent(ent[x], ent[h], M), ent[inv[x]], M), M))
        good = c >= 0
        good[good] = member[c[good]] != 0
        ok[sel[~good]] = False
    return ok


def centralizes_mask(ent, M, gens_ent):
    """uint8 mask of all x commuting with every row of ``gens_ent``."""
    ok = np.ones(len(ent), dtype=bool)
    for h in np.asarray(gens_ent, dtype=np.int64).reshape(-1, 4):
        ok &= np.all(mul_ent(ent, h, M) == mul_ent(h, ent, M), axis=1)
    return ok.astype(np.uint8)


def closure_mask(ent, keys, M, member, gens):
    """Close the set ``member`` under right multiplication by ``gens``.

    When ``member`` contains the identity and lies inside the group generated
    by ``gens``, the result is exactly that group.
    """
    mask = np.array(member, dtype=np.uint8, copy=True)
    gens = np.asarray(gens, dtype=np.int64)
    frontier = np.nonzero(mask)[0]
    if not len(gens):
        return mask
    while len(frontier):
        a = np.repeat(frontier, len(gens))
        b = np.tile(gens, len(frontier))
        prod = mul_idx(ent, keys, M, a, b)
        if (prod < 0).any():
            raise ValueError("closure left the ambient element table")
        new = np.unique(prod[mask[prod] == 0])
        mask[new] = 1
        frontier = new
    return mask
