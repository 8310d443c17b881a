"""NumPy fallback for the hot transform kernels.

Matches cskit._kernels._core exactly (same signatures, same bit-level
results up to float rounding differences in summation order; the test
suite checks agreement to 1e-12). Used whenever the compiled extension
is unavailable or CSKIT_PURE_PYTHON=1 is set.
"""
import numpy as np

BACKEND = "pure"


def dwt_forward(x, h, g):
    """Full-depth periodized orthogonal wavelet analysis.

    Output layout: [scaling coeff | details coarsest ... details finest],
    with the scale-j detail block occupying out[n>>j : 2*(n>>j)].
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    L = h.shape[0]
    out = np.empty(n)
    cur = x.copy()
    N = n
    while N >= 2:
        ext = np.resize(cur[:N], N + L - 1)  # circular extension
        win = np.lib.stride_tricks.sliding_window_view(ext, L)[::2]
        out[N // 2 : N] = win @ g
        cur = win @ h
        N //= 2
    out[0] = cur[0]
    return out


def dwt_adjoint(c, h, g):
    """Adjoint of dwt_forward; for orthonormal filters this is synthesis."""
    c = np.ascontiguousarray(c, dtype=np.float64)
    n = c.shape[0]
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    L = h.shape[0]
    cur = c[:1].copy()
    N = 2
    while N <= n:
        up_a = np.zeros(N)
        up_d = np.zeros(N)
        up_a[0::2] = cur
        up_d[0::2] = c[N // 2 : N]
        x = np.zeros(N)
        for i in range(L):
            x += h[i] * np.roll(up_a, i) + g[i] * np.roll(up_d, i)
        cur = x
        N *= 2
    return cur


def noiselet_forward(x):
    """Unnormalized noiselet butterfly; the Gram of the result is n^2 I.

    Stage update on each half-pair (a, b):
        ((1-1j)*a + (1+1j)*b, (1+1j)*a + (1-1j)*b)
    """
    x = np.ascontiguousarray(x, dtype=np.complex128)
    n = x.shape[0]
    v = x.copy()
    L = 2
    while L <= n:
        blocks = v.reshape(n // L, L)
        a = blocks[:, : L // 2]
        b = blocks[:, L // 2 :]
        nxt = np.empty_like(blocks)
        nxt[:, 0::2] = (1 - 1j) * a + (1 + 1j) * b
        nxt[:, 1::2] = (1 + 1j) * a + (1 - 1j) * b
        v = nxt.reshape(n)
        L *= 2
    return v


def noiselet_adjoint(y):
    """Conjugate transpose of the unnormalized noiselet butterfly."""
    y = np.ascontiguousarray(y, dtype=np.complex128)
    n = y.shape[0]
    v = y.copy()
    L = n
    while L >= 2:
        blocks = v.reshape(n // L, L)
        e = blocks[:, 0::2]
        o = blocks[:, 1::2]
        nxt = np.empty_like(blocks)
        nxt[:, : L // 2] = (1 + 1j) * e + (1 - 1j) * o
        nxt[:, L // 2 :] = (1 - 1j) * e + (1 + 1j) * o
        v = nxt.reshape(n)
        L //= 2
    return v
