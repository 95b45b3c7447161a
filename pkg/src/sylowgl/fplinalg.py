"""Dense linear algebra over F_p on int64 numpy arrays.

Everything is plain Gaussian elimination; the matrices here are at most a few
hundred rows, so nothing cleverer is warranted.
"""

import numpy as np


def _mod(a, p):
    return np.asarray(a, dtype=np.int64) % p


def rref(a, p: int):
    """Reduced row echelon form and pivot columns of ``a`` mod p."""
    a = _mod(a, p).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if not len(nz):
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a, p: int) -> np.ndarray:
    """Basis of {v : a v = 0} as the rows of the returned array."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    r, piv = rref(a, p)
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(piv):
            basis[k, c] = (-r[i, f]) % p
    return basis


def inverse(a, p: int) -> np.ndarray:
    a = _mod(a, p)
    n = a.shape[0]
    r, piv = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return r[:, n:]


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def matpow(a, k: int, p: int) -> np.ndarray:
    a = _mod(a, p)
    out = np.eye(a.shape[0], dtype=np.int64)
    while k:
        if k & 1:
            out = matmul(out, a, p)
        a = matmul(a, a, p)
        k >>= 1
    return out


def det(a, p: int) -> int:
    a = _mod(a, p).copy()
    n = a.shape[0]
    d = 1
    for c in range(n):
        nz = np.nonzero(a[c:, c])[0]
        if not len(nz):
            return 0
        k = c + int(nz[0])
        if k != c:
            a[[c, k]] = a[[k, c]]
            d = -d
        d = d * int(a[c, c]) % p
        inv = pow(int(a[c, c]), -1, p)
        for i in range(c + 1, n):
            if a[i, c]:
                a[i] = (a[i] - a[i, c] * inv * a[c]) % p
    return d % p


def solve_coords(basis, vecs, p: int) -> np.ndarray:
    """Coordinates of the rows of ``vecs`` in the row basis ``basis`` (must lie in its span)."""
    basis = _mod(basis, p)
    vecs = _mod(vecs, p).reshape(-1, basis.shape[1])
    k = basis.shape[0]
    r, piv = rref(np.hstack([basis.T, vecs.T]), p)
    if any(c >= k for c in piv):
        raise ValueError("vector outside the span")
    return r[:k, k:].T % p
