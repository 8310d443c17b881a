# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled transform kernels: periodized DWT and the noiselet butterfly.

Semantics match cskit._kernels.pure; see that module for layout notes.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def dwt_forward(object x, object h, object g):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t L = hv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cur = xv.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nxt = np.empty(n // 2 if n >= 2 else 1, dtype=np.float64)
    cdef Py_ssize_t N = n, k, i, t
    cdef double sa, sd
    while N >= 2:
        for k in range(N // 2):
            sa = 0.0
            sd = 0.0
            for i in range(L):
                t = 2 * k + i
                if t >= N:
                    t = t % N
                sa += hv[i] * cur[t]
                sd += gv[i] * cur[t]
            nxt[k] = sa
            out[N // 2 + k] = sd
        for k in range(N // 2):
            cur[k] = nxt[k]
        N //= 2
    out[0] = cur[0]
    return out


def dwt_adjoint(object c, object h, object g):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[0]
    cdef Py_ssize_t L = hv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cur = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nxt = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t N = 2, k, i, t
    cdef double ak, dk
    cur[0] = cv[0]
    while N <= n:
        for t in range(N):
            nxt[t] = 0.0
        for k in range(N // 2):
            ak = cur[k]
            dk = cv[N // 2 + k]
            for i in range(L):
                t = 2 * k + i
                if t >= N:
                    t = t % N
                nxt[t] += hv[i] * ak + gv[i] * dk
        for t in range(N):
            cur[t] = nxt[t]
        N *= 2
    return cur[:n].copy() if n > 1 else cur[:1].copy()


def noiselet_forward(object x):
    # complex arithmetic spelled out on float64 views: Cython's complex
    # multiply is not inlined and costs ~5x on these tight loops
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef Py_ssize_t n = xv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(xv.view(np.float64)).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.empty(2 * n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tmp
    cdef Py_ssize_t L = 2, blk, half, base, k, ia, ib, oe, oo
    cdef double ar, ai, br, bi
    while L <= n:
        half = L // 2
        for blk in range(n // L):
            base = blk * L
            for k in range(half):
                ia = 2 * (base + k)
                ib = 2 * (base + half + k)
                ar = v[ia]; ai = v[ia + 1]
                br = v[ib]; bi = v[ib + 1]
                oe = 2 * (base + 2 * k)
                oo = oe + 2
                # (1-i)a + (1+i)b
                w[oe] = ar + ai + br - bi
                w[oe + 1] = ai - ar + br + bi
                # (1+i)a + (1-i)b
                w[oo] = ar - ai + br + bi
                w[oo + 1] = ar + ai - br + bi
        tmp = v; v = w; w = tmp
        L *= 2
    return v.view(np.complex128).copy()


def noiselet_adjoint(object y):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef Py_ssize_t n = yv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(yv.view(np.float64)).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.empty(2 * n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tmp
    cdef Py_ssize_t L = n, blk, half, base, k, ie, io, oa, ob
    cdef double er, ei, our, oui
    while L >= 2:
        half = L // 2
        for blk in range(n // L):
            base = blk * L
            for k in range(half):
                ie = 2 * (base + 2 * k)
                io = ie + 2
                er = v[ie]; ei = v[ie + 1]
                our = v[io]; oui = v[io + 1]
                oa = 2 * (base + k)
                ob = 2 * (base + half + k)
                # (1+i)e + (1-i)o
                w[oa] = er - ei + our + oui
                w[oa + 1] = er + ei - our + oui
                # (1-i)e + (1+i)o
                w[ob] = er + ei + our - oui
                w[ob + 1] = ei - er + our + oui
        tmp = v; v = w; w = tmp
        L //= 2
    return v.view(np.complex128).copy()
