# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled digest kernels; semantics match reference.py bit for bit."""

from libc.math cimport floor, fabs

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef unsigned long long GOLD = 0x9E3779B97F4A7C15ULL
cdef unsigned long long C1 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long C2 = 0x94D049BB133111EBULL

SEED_ITEM = 0x589965CC75374CC3
SEED_NODE = 0xA0761D6478BD642F
SEED_EDGE = 0xE7037ED1A0B428DB
SEED_QUAD = 0x8EBC6AF09C88C6E3

cdef unsigned long long _SEED_NODE = 0xA0761D6478BD642FULL
cdef unsigned long long _SEED_EDGE = 0xE7037ED1A0B428DBULL
cdef unsigned long long _SEED_QUAD = 0x8EBC6AF09C88C6E3ULL


cdef inline unsigned long long _mix64(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * C1
    z = (z ^ (z >> 27)) * C2
    return z ^ (z >> 31)


cdef inline unsigned long long _chain(unsigned long long h,
                                      unsigned long long v) nogil:
    return _mix64(h ^ (v + GOLD))


cdef inline long long _quant(double x, double q) nogil:
    return <long long>floor(x / q + 0.5)


def hash_items(items, seed):
    """Chained hash of each row of an (M, K) int64 array -> (M,) uint64."""
    cdef long long[:, ::1] it = np.ascontiguousarray(items, dtype=np.int64)
    cdef Py_ssize_t m = it.shape[0], kk = it.shape[1], i, k
    out = np.empty(m, dtype=np.uint64)
    cdef unsigned long long[::1] o = out
    cdef unsigned long long s = <unsigned long long>seed, h
    with nogil:
        for i in range(m):
            h = s
            for k in range(kk):
                h = _chain(h, <unsigned long long>it[i, k])
            o[i] = h
    return out


def multiset_sum(hashes):
    cdef unsigned long long[::1] hs = np.ascontiguousarray(hashes, dtype=np.uint64)
    cdef unsigned long long acc = 0
    cdef Py_ssize_t i
    with nogil:
        for i in range(hs.shape[0]):
            acc += hs[i]
    return acc


def fast_scan(dist4_q, node_h, esrc, edst, edge_h):
    """Node/edge multiset hashes against four fixed reference points."""
    cdef long long[:, ::1] d = np.ascontiguousarray(dist4_q, dtype=np.int64)
    cdef unsigned long long[::1] nh = np.ascontiguousarray(node_h, dtype=np.uint64)
    cdef long long[::1] es = np.ascontiguousarray(esrc, dtype=np.int64)
    cdef long long[::1] ed = np.ascontiguousarray(edst, dtype=np.int64)
    cdef unsigned long long[::1] eh = np.ascontiguousarray(edge_h, dtype=np.uint64)
    cdef Py_ssize_t n = d.shape[0], ne = es.shape[0], i, k
    cdef long long s, t
    cdef unsigned long long h, node_sum = 0, edge_sum = 0
    with nogil:
        for i in range(n):
            h = _SEED_NODE
            for k in range(4):
                h = _chain(h, <unsigned long long>d[i, k])
            h = _chain(h, nh[i])
            node_sum += h
        for i in range(ne):
            s = es[i]
            t = ed[i]
            h = _SEED_EDGE
            for k in range(4):
                h = _chain(h, <unsigned long long>d[s, k])
            for k in range(4):
                h = _chain(h, <unsigned long long>d[t, k])
            h = _chain(h, eh[i])
            edge_sum += h
    return node_sum, edge_sum


def general_scan(pos, dist_q, node_h, esrc, edst, edge_h,
                 double det_tol, double gram_q):
    """Digest accumulation over every ordered non-coplanar quadruple."""
    cdef double[:, ::1] p = np.ascontiguousarray(pos, dtype=np.float64)
    cdef long long[:, ::1] dq = np.ascontiguousarray(dist_q, dtype=np.int64)
    cdef unsigned long long[::1] nh = np.ascontiguousarray(node_h, dtype=np.uint64)
    cdef long long[::1] es = np.ascontiguousarray(esrc, dtype=np.int64)
    cdef long long[::1] ed = np.ascontiguousarray(edst, dtype=np.int64)
    cdef unsigned long long[::1] eh = np.ascontiguousarray(edge_h, dtype=np.uint64)
    cdef Py_ssize_t n = p.shape[0], ne = es.shape[0]
    cdef Py_ssize_t a, b, c, e, i, k
    cdef Py_ssize_t q4[4]
    cdef double v1[3]
    cdef double v2[3]
    cdef double v3[3]
    cdef double cx, cy, cz, det, gx
    cdef double qp[4][3]
    cdef unsigned long long h, node_sum, edge_sum, hq, outer = 0
    cdef long long n_quads = 0, n_skipped = 0
    if n < 4:
        return 0, 0, 0
    with nogil:
        for a in range(n):
            for b in range(n):
                if b == a:
                    continue
                for c in range(n):
                    if c == a or c == b:
                        continue
                    for e in range(n):
                        if e == a or e == b or e == c:
                            continue
                        q4[0] = a; q4[1] = b; q4[2] = c; q4[3] = e
                        for k in range(3):
                            v1[k] = p[b, k] - p[a, k]
                            v2[k] = p[c, k] - p[a, k]
                            v3[k] = p[e, k] - p[a, k]
                        det = (v1[0] * (v2[1] * v3[2] - v2[2] * v3[1])
                               - v1[1] * (v2[0] * v3[2] - v2[2] * v3[0])
                               + v1[2] * (v2[0] * v3[1] - v2[1] * v3[0]))
                        if fabs(det) <= det_tol:
                            n_skipped += 1
                            continue
                        n_quads += 1
                        cx = 0.25 * (p[a, 0] + p[b, 0] + p[c, 0] + p[e, 0])
                        cy = 0.25 * (p[a, 1] + p[b, 1] + p[c, 1] + p[e, 1])
                        cz = 0.25 * (p[a, 2] + p[b, 2] + p[c, 2] + p[e, 2])
                        for i in range(4):
                            qp[i][0] = p[q4[i], 0] - cx
                            qp[i][1] = p[q4[i], 1] - cy
                            qp[i][2] = p[q4[i], 2] - cz
                        node_sum = 0
                        for i in range(n):
                            h = _SEED_NODE
                            for k in range(4):
                                h = _chain(h, <unsigned long long>dq[i, q4[k]])
                            h = _chain(h, nh[i])
                            node_sum += h
                        edge_sum = 0
                        for i in range(ne):
                            h = _SEED_EDGE
                            for k in range(4):
                                h = _chain(h, <unsigned long long>dq[es[i], q4[k]])
                            for k in range(4):
                                h = _chain(h, <unsigned long long>dq[ed[i], q4[k]])
                            h = _chain(h, eh[i])
                            edge_sum += h
                        hq = _SEED_QUAD
                        for i in range(4):
                            for k in range(4):
                                gx = (qp[i][0] * qp[k][0] + qp[i][1] * qp[k][1]
                                      + qp[i][2] * qp[k][2])
                                hq = _chain(hq, <unsigned long long>_quant(gx, gram_q))
                        hq = _chain(hq, node_sum)
                        hq = _chain(hq, edge_sum)
                        outer += hq
    return outer, n_quads, n_skipped
