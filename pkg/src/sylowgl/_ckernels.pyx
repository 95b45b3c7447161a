# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels`` (same signatures, same results)."""

import numpy as np
cimport numpy as cnp

ctypedef long long i64
ctypedef unsigned char u8

cnp.import_array()


cdef inline i64 _key(i64 a, i64 b, i64 c, i64 d, i64 M) noexcept nogil:
    return ((a * M + b) * M + c) * M + d


cdef inline void _mul(const i64* x, const i64* y, i64* out, i64 M) noexcept nogil:
    out[0] = (x[0] * y[0] % M + x[1] * y[2] % M) % M
    out[1] = (x[0] * y[1] % M + x[1] * y[3] % M) % M
    out[2] = (x[2] * y[0] % M + x[3] * y[2] % M) % M
    out[3] = (x[2] * y[1] % M + x[3] * y[3] % M) % M


cdef inline i64 _find(const i64* keys, i64 n, i64 q) noexcept nogil:
    cdef i64 lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < q:
            lo = mid + 1
        else:
            hi = mid
    if lo < n and keys[lo] == q:
        return lo
    return -1


def ent_keys(e, M):
    e = np.asarray(e, dtype=np.int64)
    return ((e[..., 0] * M + e[..., 1]) * M + e[..., 2]) * M + e[..., 3]


def mul_ent(x, y, M):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))
    shape = x.shape
    cdef const i64[:, ::1] xv = np.ascontiguousarray(x.reshape(-1, 4))
    cdef const i64[:, ::1] yv = np.ascontiguousarray(y.reshape(-1, 4))
    out = np.empty((xv.shape[0], 4), dtype=np.int64)
    cdef i64[:, ::1] ov = out
    cdef i64 k, m = M
    with nogil:
        for k in range(xv.shape[0]):
            _mul(&xv[k, 0], &yv[k, 0], &ov[k, 0], m)
    return out.reshape(shape)


def lookup(keys, q):
    q = np.asarray(q, dtype=np.int64)
    shape = q.shape
    cdef const i64[::1] kv = np.ascontiguousarray(keys, dtype=np.int64)
    cdef const i64[::1] qv = np.ascontiguousarray(q.reshape(-1))
    out = np.empty(qv.shape[0], dtype=np.int64)
    cdef i64[::1] ov = out
    cdef i64 k, n = kv.shape[0]
    with nogil:
        for k in range(qv.shape[0]):
            ov[k] = _find(&kv[0], n, qv[k])
    return out.reshape(shape)


def mul_idx(const i64[:, ::1] ent, const i64[::1] keys, i64 M, i, j):
    i, j = np.broadcast_arrays(np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64))
    shape = i.shape
    cdef const i64[::1] iv = np.ascontiguousarray(i.reshape(-1))
    cdef const i64[::1] jv = np.ascontiguousarray(j.reshape(-1))
    out = np.empty(iv.shape[0], dtype=np.int64)
    cdef i64[::1] ov = out
    cdef i64 k, n = keys.shape[0]
    cdef i64 t[4]
    with nogil:
        for k in range(iv.shape[0]):
            _mul(&ent[iv[k], 0], &ent[jv[k], 0], t, M)
            ov[k] = _find(&keys[0], n, _key(t[0], t[1], t[2], t[3], M))
    return out.reshape(shape)


def conj_keys(h_ent, g, ginv, i64 M):
    cdef const i64[:, ::1] hv = np.ascontiguousarray(np.asarray(h_ent, dtype=np.int64).reshape(-1, 4))
    cdef const i64[::1] gv = np.ascontiguousarray(g, dtype=np.int64)
    cdef const i64[::1] giv = np.ascontiguousarray(ginv, dtype=np.int64)
    out = np.empty(hv.shape[0], dtype=np.int64)
    cdef i64[::1] ov = out
    cdef i64 k
    cdef i64 t[4]
    cdef i64 u[4]
    with nogil:
        for k in range(hv.shape[0]):
            _mul(&gv[0], &hv[k, 0], t, M)
            _mul(t, &giv[0], u, M)
            ov[k] = _key(u[0], u[1], u[2], u[3], M)
    return out


def normalizes_mask(const i64[:, ::1] ent, const i64[::1] keys, i64 M,
                    const i64[::1] inv, const u8[::1] member, gens):
    cdef const i64[::1] gv = np.ascontiguousarray(gens, dtype=np.int64)
    cdef i64 N = keys.shape[0], ng = gv.shape[0]
    out = np.zeros(N, dtype=np.uint8)
    cdef u8[::1] ov = out
    cdef i64 x, k, c
    cdef i64 t[4]
    cdef i64 u[4]
    with nogil:
        for x in range(N):
            ov[x] = 1
            for k in range(ng):
                _mul(&ent[x, 0], &ent[gv[k], 0], t, M)
                _mul(t, &ent[inv[x], 0], u, M)
                c = _find(&keys[0], N, _key(u[0], u[1], u[2], u[3], M))
                if c < 0 or member[c] == 0:
                    ov[x] = 0
                    break
    return out


def normalizing_among(const i64[:, ::1] ent, const i64[::1] keys, i64 M,
                      const i64[::1] inv, const u8[::1] member, gens, cand):
    cdef const i64[::1] gv = np.ascontiguousarray(gens, dtype=np.int64)
    cdef const i64[::1] cv = np.ascontiguousarray(cand, dtype=np.int64)
    cdef i64 N = keys.shape[0], ng = gv.shape[0], nc = cv.shape[0]
    out = np.zeros(nc, dtype=np.bool_)
    cdef u8[::1] ov = out.view(np.uint8)
    cdef i64 j, x, k, c
    cdef i64 t[4]
    cdef i64 u[4]
    with nogil:
        for j in range(nc):
            x = cv[j]
            ov[j] = 1
            for k in range(ng):
                _mul(&ent[x, 0], &ent[gv[k], 0], t, M)
                _mul(t, &ent[inv[x], 0], u, M)
                c = _find(&keys[0], N, _key(u[0], u[1], u[2], u[3], M))
                if c < 0 or member[c] == 0:
                    ov[j] = 0
                    break
    return out


def centralizes_mask(const i64[:, ::1] ent, i64 M, gens_ent):
    cdef const i64[:, ::1] hv = np.ascontiguousarray(np.asarray(gens_ent, dtype=np.int64).reshape(-1, 4))
    cdef i64 N = ent.shape[0], ng = hv.shape[0]
    out = np.zeros(N, dtype=np.uint8)
    cdef u8[::1] ov = out
    cdef i64 x, k
    cdef i64 t[4]
    cdef i64 u[4]
    with nogil:
        for x in range(N):
            ov[x] = 1
            for k in range(ng):
                _mul(&ent[x, 0], &hv[k, 0], t, M)
                _mul(&hv[k, 0], &ent[x, 0], u, M)
                if t[0] != u[0] or t[1] != u[1] or t[2] != u[2] or t[3] != u[3]:
                    ov[x] = 0
                    break
    return out


def closure_mask(const i64[:, ::1] ent, const i64[::1] keys, i64 M, member, gens):
    mask = np.array(member, dtype=np.uint8, copy=True)
    cdef u8[::1] mv = mask
    cdef const i64[::1] gv = np.ascontiguousarray(gens, dtype=np.int64)
    cdef i64 N = keys.shape[0], ng = gv.shape[0]
    queue = np.empty(N, dtype=np.int64)
    cdef i64[::1] qv = queue
    cdef i64 head = 0, tail = 0, x, k, c
    cdef i64 t[4]
    cdef bint escaped = False
    for x in range(N):
        if mv[x]:
            qv[tail] = x
            tail += 1
    with nogil:
        while head < tail:
            x = qv[head]
            head += 1
            for k in range(ng):
                _mul(&ent[x, 0], &ent[gv[k], 0], t, M)
                c = _find(&keys[0], N, _key(t[0], t[1], t[2], t[3], M))
                if c < 0:
                    escaped = True
                    break
                if mv[c] == 0:
                    mv[c] = 1
                    qv[tail] = c
                    tail += 1
            if escaped:
                break
    if escaped:
        raise ValueError("closure left the ambient element table")
    return mask
