"""Complex noiselet measurement system.

Noiselets are computed by a multiscale butterfly in O(n log n): each stage
maps half-block pairs (a, b) to ((1-i)a + (1+i)b, (1+i)a + (1-i)b). The
unnormalized butterfly N has N*N = n^2 I and entries of magnitude sqrt(n)
whose real/imaginary parts are integers; dividing by sqrt(n) yields the
system Phi with Phi*Phi = nI and unit-magnitude entries, maximally
incoherent with the Haar basis.
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from .operators import LinearOperator

__all__ = ["noiselet"]


def noiselet(n):
    """Noiselet system Phi on n = 2^J points, normalized so Phi*Phi = nI."""
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"signal length must be a power of 2 and >= 2, got {n}")
    scale = 1.0 / np.sqrt(n)

    def fwd(x):
        return _kernels.noiselet_forward(x) * scale

    def adj(y):
        return _kernels.noiselet_adjoint(y) * scale

    return LinearOperator(n, n, fwd, adj, scaling=float(n), field="complex")
