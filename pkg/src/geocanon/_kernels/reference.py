"""Pure-numpy digest kernels.

Fallback used when the compiled extension is unavailable. Both backends
must produce bit-identical hashes; `tests/test_kernels.py` enforces this.

The multiset hash is a sum (mod 2^64) of per-item chained splitmix-style
mixes, so it is order-independent by construction.
"""

from itertools import permutations

import numpy as np

GOLD = 0x9E3779B97F4A7C15
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(GOLD)

SEED_ITEM = 0x589965CC75374CC3
SEED_NODE = 0xA0761D6478BD642F
SEED_EDGE = 0xE7037ED1A0B428DB
SEED_QUAD = 0x8EBC6AF09C88C6E3

_CHUNK = 256


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


def _chain(h, v):
    """One chaining step; v is a uint64 array/scalar."""
    return _mix64(h ^ (v + _GOLD))


def hash_items(items, seed):
    """Chained hash of each row of an (M, K) int64 array -> (M,) uint64."""
    items = np.ascontiguousarray(items, dtype=np.int64)
    m = items.shape[0]
    h = np.full(m, np.uint64(seed), dtype=np.uint64)
    u = items.astype(np.uint64)
    for k in range(items.shape[1]):
        h = _chain(h, u[:, k])
    return h


def multiset_sum(hashes):
    """Order-independent reduction of per-item hashes."""
    hashes = np.asarray(hashes, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return int(np.sum(hashes, dtype=np.uint64))


def _quantize(x, q):
    return np.floor(x / q + 0.5).astype(np.int64)


def fast_scan(dist4_q, node_h, esrc, edst, edge_h):
    """Node/edge multiset hashes against four fixed reference points.

    dist4_q: (N, 4) quantized node-to-reference distances.
    Returns (node_sum, edge_sum) as python ints (uint64 range).
    """
    dist4_q = np.ascontiguousarray(dist4_q, dtype=np.int64)
    node_h = np.asarray(node_h, dtype=np.uint64)
    u = dist4_q.astype(np.uint64)
    h = np.full(dist4_q.shape[0], np.uint64(SEED_NODE), dtype=np.uint64)
    for k in range(4):
        h = _chain(h, u[:, k])
    h = _chain(h, node_h)
    node_sum = multiset_sum(h)

    esrc = np.asarray(esrc, dtype=np.int64)
    edst = np.asarray(edst, dtype=np.int64)
    he = np.full(len(esrc), np.uint64(SEED_EDGE), dtype=np.uint64)
    us = u[esrc]
    ud = u[edst]
    for k in range(4):
        he = _chain(he, us[:, k])
    for k in range(4):
        he = _chain(he, ud[:, k])
    he = _chain(he, np.asarray(edge_h, dtype=np.uint64))
    edge_sum = multiset_sum(he)
    return node_sum, edge_sum


def general_scan(pos, dist_q, node_h, esrc, edst, edge_h, det_tol, gram_q):
    """Digest accumulation over every ordered non-coplanar quadruple.

    pos: (N, 3) float positions; dist_q: (N, N) quantized distances;
    node_h/edge_h: precomputed uint64 hashes of node/edge attributes.
    Returns (outer_sum, n_quads, n_skipped).
    """
    pos = np.asarray(pos, dtype=np.float64)
    n = pos.shape[0]
    if n < 4:
        return 0, 0, 0
    dist_q = np.ascontiguousarray(dist_q, dtype=np.int64)
    node_h = np.asarray(node_h, dtype=np.uint64)
    esrc = np.asarray(esrc, dtype=np.int64)
    edst = np.asarray(edst, dtype=np.int64)
    edge_h = np.asarray(edge_h, dtype=np.uint64)

    quads = np.array(list(permutations(range(n), 4)), dtype=np.intp)
    p = pos[quads]
    v = p[:, 1:] - p[:, :1]
    keep = np.abs(np.linalg.det(v)) > det_tol
    n_skipped = int(np.count_nonzero(~keep))
    quads = quads[keep]
    p = p[keep]
    nq = len(quads)
    if nq == 0:
        return 0, 0, n_skipped

    c = p - p.mean(axis=1, keepdims=True)
    gram = np.einsum("qik,qjk->qij", c, c).reshape(nq, 16)
    gq = _quantize(gram, gram_q).astype(np.uint64)

    uq = dist_q.astype(np.uint64)
    ne = len(esrc)
    outer = np.uint64(0)
    with np.errstate(over="ignore"):
        for lo in range(0, nq, _CHUNK):
            sl = slice(lo, lo + _CHUNK)
            qc = quads[sl]
            m = len(qc)
            # node multiset per quadruple
            d = uq[:, qc]  # (N, m, 4)
            h = np.full((n, m), np.uint64(SEED_NODE), dtype=np.uint64)
            for k in range(4):
                h = _chain(h, d[:, :, k])
            h = _chain(h, node_h[:, None])
            node_sum = np.sum(h, axis=0, dtype=np.uint64)
            # edge multiset per quadruple
            ds = d[esrc]  # (E, m, 4)
            dd = d[edst]
            he = np.full((ne, m), np.uint64(SEED_EDGE), dtype=np.uint64)
            for k in range(4):
                he = _chain(he, ds[:, :, k])
            for k in range(4):
                he = _chain(he, dd[:, :, k])
            he = _chain(he, edge_h[:, None])
            edge_sum = np.sum(he, axis=0, dtype=np.uint64)
            # per-quadruple hash
            hq = np.full(m, np.uint64(SEED_QUAD), dtype=np.uint64)
            for k in range(16):
                hq = _chain(hq, gq[sl][:, k])
            hq = _chain(hq, node_sum)
            hq = _chain(hq, edge_sum)
            outer = outer + np.sum(hq, dtype=np.uint64)
    return int(outer), nq, n_skipped
