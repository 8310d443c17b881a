"""Periodized orthonormal wavelet bases (Haar and Daubechies 8-tap).

The operators are oriented as sparsity bases: ``forward`` synthesizes a
signal from its coefficient vector (the matrix whose columns are the
waveforms), ``adjoint`` analyzes a signal into coefficients. Boundary
handling is periodization at every scale, so the waveforms at scale j are
circular shifts of one another by 2^j.

Coefficient layout, for n = 2^J: index 0 holds the overall scaling
coefficient and the scale-j detail block occupies ``[n >> j, 2*(n >> j))``,
j = 1 (finest) .. J (coarsest).
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from .operators import LinearOperator

__all__ = ["haar", "daub8", "wavelet_operator", "detail_slice", "wavelet_waveform",
           "HAAR_FILTER", "DAUB8_FILTER"]

HAAR_FILTER = np.array([1.0, 1.0]) / np.sqrt(2.0)

# 8-tap Daubechies scaling filter (4 vanishing moments), spectral factorization
# rounded to the nearest float64; sum h = sqrt(2) and sum h^2 = 1 hold exactly
# in double precision.
DAUB8_FILTER = np.array([
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
])

_FILTERS = {"haar": HAAR_FILTER, "daub8": DAUB8_FILTER}


def _highpass(h):
    L = len(h)
    return np.array([(-1.0) ** k * h[L - 1 - k] for k in range(L)])


def _check_pow2(n, minimum=2):
    if n < minimum or (n & (n - 1)) != 0:
        raise ValueError(f"signal length must be a power of 2 and >= {minimum}, got {n}")


def _wavelet_from_filter(n, h):
    g = _highpass(h)

    def synthesize(c):
        if np.iscomplexobj(c):  # real operator applied to a complex vector
            return (_kernels.dwt_adjoint(c.real, h, g)
                    + 1j * _kernels.dwt_adjoint(c.imag, h, g))
        return _kernels.dwt_adjoint(c, h, g)

    def analyze(x):
        if np.iscomplexobj(x):
            return (_kernels.dwt_forward(x.real, h, g)
                    + 1j * _kernels.dwt_forward(x.imag, h, g))
        return _kernels.dwt_forward(x, h, g)

    return LinearOperator(n, n, synthesize, analyze, scaling=1.0, field="real")


def haar(n):
    """Orthonormal periodized Haar basis on n = 2^J points (O(n) per apply)."""
    _check_pow2(n)
    return _wavelet_from_filter(n, HAAR_FILTER)


def daub8(n):
    """Orthonormal periodized Daubechies 8-tap basis; requires n = 2^J >= 16."""
    _check_pow2(n, minimum=16)
    return _wavelet_from_filter(n, DAUB8_FILTER)


def wavelet_operator(name, n):
    """Look up a wavelet basis by name ("haar" or "daub8")."""
    if name not in _FILTERS:
        raise ValueError(f"unknown wavelet {name!r}; choose from {sorted(_FILTERS)}")
    return haar(n) if name == "haar" else daub8(n)


def detail_slice(n, j):
    """Indices of the scale-j detail coefficients in the layout of this module."""
    _check_pow2(n)
    if j < 1 or (n >> j) < 1:
        raise ValueError(f"scale j={j} out of range for n={n}")
    nj = n >> j
    return slice(nj, 2 * nj)


def wavelet_waveform(name, n, j, k=1):
    """The k-th waveform at scale j, materialized by synthesizing a unit coefficient."""
    op = wavelet_operator(name, n)
    nj = n >> j
    if not (1 <= k <= nj):
        raise ValueError(f"shift k={k} out of range 1..{nj}")
    c = np.zeros(n)
    c[nj + (k - 1)] = 1.0
    return op.forward(c)
