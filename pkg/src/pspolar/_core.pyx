# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled list-decoding engine.

Same contract as ``pspolar._pycore.decode_frame``.  Path state is kept in
double-buffered flat arrays; stage ``s`` of a path lives at offset ``2**s``
of its LLR row (``2**s`` values) and of its partial-sum row (``2**(s-1)``
values holding the left child's beta while the right child is decoded).

Candidate branch metrics come from a per-path table of all subset sums of
the node magnitudes, so a candidate costs one lookup.  Ties everywhere are
broken by (metric, parent row, enumeration index).
"""

import numpy as np

from libc.math cimport exp, fabs, log1p
from libc.string cimport memcpy

ctypedef unsigned char u8


cdef inline double _boxplus(double a, double b, bint minsum) nogil:
    cdef double fa = fabs(a)
    cdef double fb = fabs(b)
    cdef double r = fa if fa < fb else fb
    if (a < 0) != (b < 0):
        r = -r
    if not minsum:
        r += log1p(exp(-fabs(a + b))) - log1p(exp(-fabs(a - b)))
    return r


cdef inline bint _before(double pa, int ra, int ja, double pb, int rb, int jb) nogil:
    if pa < pb:
        return True
    if pa > pb:
        return False
    if ra != rb:
        return ra < rb
    return ja < jb


cdef inline int _insert(double* key, int* row, int* idx, int count, int cap,
                        double k, int r, int j) nogil:
    """Insert into a sorted bounded buffer; returns the new count."""
    cdef int pos
    if count == cap:
        if not _before(k, r, j, key[cap - 1], row[cap - 1], idx[cap - 1]):
            return count
        pos = cap - 1
    else:
        pos = count
        count += 1
    while pos > 0 and _before(k, r, j, key[pos - 1], row[pos - 1], idx[pos - 1]):
        key[pos] = key[pos - 1]
        row[pos] = row[pos - 1]
        idx[pos] = idx[pos - 1]
        pos -= 1
    key[pos] = k
    row[pos] = r
    idx[pos] = j
    return count


def decode_frame(llr, layout, int list_size, keep=None, bint minsum=True,
                 pmp=None, pmp_steps=None, trace=None, bint full_warmup=False):
    if trace is not None:
        raise NotImplementedError("trace hooks are only available in the pure-Python engine")
    cdef int N = layout.n_block
    cdef int Nv = layout.node_size
    cdef int n = N.bit_length() - 1
    cdef int m = Nv.bit_length() - 1
    cdef int T = N // Nv
    cdef int L = list_size
    cdef int C = 1 << Nv

    cdef double[::1] ch = np.ascontiguousarray(llr, dtype=np.float64)
    if ch.shape[0] != N:
        raise ValueError(f"expected {N} LLRs, got {ch.shape[0]}")
    cdef int[::1] ncand = np.ascontiguousarray(layout.n_candidates, dtype=np.int32)
    cdef int[::1] classes = np.ascontiguousarray(layout.classes, dtype=np.int32)
    cdef int[:, ::1] cws = np.ascontiguousarray(layout.codewords, dtype=np.int32)
    cdef int[:, ::1] ums = np.ascontiguousarray(layout.u_masks, dtype=np.int32)

    cdef bint partial_enabled = keep is not None
    cdef int[::1] kr = np.ascontiguousarray(keep if partial_enabled else np.zeros(L), dtype=np.int32)
    if kr.shape[0] != L:
        raise ValueError("keep must hold one count per row")
    cdef bint tally = pmp is not None
    cdef long long[:, :, ::1] tab
    cdef long long[::1] steps
    if tally:
        tab = pmp
        steps = pmp_steps
        if tab.shape[1] != L or tab.shape[2] < C:
            raise ValueError("pmp table shape does not match list and node size")

    cdef double[:, :, ::1] alpha = np.zeros((2, L, 2 * N))
    cdef u8[:, :, ::1] betal = np.zeros((2, L, 2 * N), dtype=np.uint8)
    cdef u8[:, :, ::1] u = np.zeros((2, L, N), dtype=np.uint8)
    cdef double[:, ::1] pm = np.zeros((2, L))
    cdef double[:, ::1] bms = np.zeros((L, C))
    cdef double[::1] sums = np.zeros(C)
    cdef int[::1] lowbit = np.zeros(C, dtype=np.int32)
    cdef double[::1] absval = np.zeros(Nv)
    cdef u8[::1] bcur = np.zeros(N, dtype=np.uint8)
    cdef double[::1] sel_key = np.zeros(L)
    cdef int[::1] sel_row = np.zeros(L, dtype=np.int32)
    cdef int[::1] sel_idx = np.zeros(L, dtype=np.int32)
    cdef double[::1] row_key = np.zeros(C)
    cdef int[::1] row_row = np.zeros(C, dtype=np.int32)
    cdef int[::1] row_idx = np.zeros(C, dtype=np.int32)

    cdef int cur = 0, nxt, P = 1, newP, t, s, s_top, i, h, off, p, q, j, k, nc, cnt, rcnt
    cdef int hmask, mask, low, rank, cls, cw, um, tail_off, tail_len
    cdef bint partial
    cdef double a, b, bm
    cdef double* ap
    cdef u8* bp

    for mask in range(1, C):
        low = 0
        while not (mask >> low) & 1:
            low += 1
        lowbit[mask] = low

    for i in range(N):
        alpha[cur, 0, N + i] = ch[i]
    tail_off = 2 << m
    tail_len = 2 * N - tail_off

    with nogil:
        for t in range(T):
            if t == 0:
                s_top = n
            else:
                s_top = m + 1
                k = (t ^ (t - 1)) >> 1
                while k:
                    s_top += 1
                    k >>= 1
            for p in range(P):
                ap = &alpha[cur, p, 0]
                bp = &betal[cur, p, 0]
                s = s_top
                while s > m:
                    h = 1 << (s - 1)
                    off = 1 << s
                    if (t >> (s - 1 - m)) & 1:
                        for i in range(h):
                            ap[h + i] = ap[off + h + i] + (1.0 - 2.0 * bp[off + i]) * ap[off + i]
                    else:
                        for i in range(h):
                            ap[h + i] = _boxplus(ap[off + i], ap[off + h + i], minsum)
                    s -= 1

            nc = ncand[t]
            partial = partial_enabled and (P == L or not full_warmup)
            cnt = 0
            for p in range(P):
                ap = &alpha[cur, p, Nv]
                hmask = 0
                for i in range(Nv):
                    if ap[i] < 0:
                        hmask |= 1 << i
                    absval[i] = fabs(ap[i])
                sums[0] = 0.0
                for mask in range(1, C):
                    sums[mask] = sums[mask & (mask - 1)] + absval[lowbit[mask]]
                if partial:
                    rcnt = 0
                    for j in range(nc):
                        rcnt = _insert(&row_key[0], &row_row[0], &row_idx[0], rcnt, kr[p],
                                       sums[cws[t, j] ^ hmask], 0, j)
                    for q in range(rcnt):
                        cnt = _insert(&sel_key[0], &sel_row[0], &sel_idx[0], cnt, L,
                                      pm[cur, p] + row_key[q], p, row_idx[q])
                else:
                    for j in range(nc):
                        bm = sums[cws[t, j] ^ hmask]
                        bms[p, j] = bm
                        cnt = _insert(&sel_key[0], &sel_row[0], &sel_idx[0], cnt, L,
                                      pm[cur, p] + bm, p, j)
            newP = cnt

            if tally and not partial and P == L:
                cls = classes[t]
                for q in range(newP):
                    p = sel_row[q]
                    j = sel_idx[q]
                    bm = bms[p, j]
                    rank = 0
                    for k in range(nc):
                        if bms[p, k] < bm or (bms[p, k] == bm and k < j):
                            rank += 1
                    tab[cls, p, rank] += 1
                steps[cls] += 1

            nxt = cur ^ 1
            for q in range(newP):
                p = sel_row[q]
                j = sel_idx[q]
                if tail_len > 0:
                    memcpy(&alpha[nxt, q, tail_off], &alpha[cur, p, tail_off], tail_len * sizeof(double))
                    memcpy(&betal[nxt, q, tail_off], &betal[cur, p, tail_off], tail_len * sizeof(u8))
                memcpy(&u[nxt, q, 0], &u[cur, p, 0], t * Nv * sizeof(u8))
                pm[nxt, q] = sel_key[q]
                cw = cws[t, j]
                um = ums[t, j]
                for i in range(Nv):
                    u[nxt, q, t * Nv + i] = (um >> i) & 1
                    bcur[i] = (cw >> i) & 1
                bp = &betal[nxt, q, 0]
                s = m + 1
                while s <= n:
                    h = 1 << (s - 1)
                    off = 1 << s
                    if (t >> (s - 1 - m)) & 1:
                        for i in range(h):
                            b = bcur[i]
                            bcur[i] = bp[off + i] ^ bcur[i]
                            bcur[h + i] = <u8>b
                        s += 1
                    else:
                        for i in range(h):
                            bp[off + i] = bcur[i]
                        break
            cur = nxt
            P = newP

    u_out = np.asarray(u[cur, :P, :]).copy()
    pm_out = np.asarray(pm[cur, :P]).copy()
    return u_out, pm_out
