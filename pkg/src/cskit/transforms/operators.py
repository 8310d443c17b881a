"""Implicit linear operators and their algebra.

Every operator here is a value object: dimensions, an optional scaling
constant c with A*A = c*I, a forward procedure and its adjoint. Operators
are immutable after construction and safe to share between workers; the
forward/adjoint procedures are re-entrant.

Convention for measurement systems: a full system U of size n carries
scaling n (rows of norm sqrt(n)), so that (1/n) U* inverts U.
"""
from __future__ import annotations

import numpy as np

__all__ = ["LinearOperator", "dft", "identity", "compose", "column_restrict",
           "materialize"]


class LinearOperator:
    """Matrix-free linear map given by forward/adjoint procedures.

    Parameters
    ----------
    n_rows, n_cols : int
        Shape of the represented matrix.
    forward, adjoint : callable
        ``forward(x)`` applies the matrix to a length-``n_cols`` vector;
        ``adjoint(y)`` applies the conjugate transpose.
    scaling : float or None
        The constant c such that A*A = c*I when the operator is a scaled
        isometry; None when no such constant is declared.
    field : {"real", "complex"}
        Dtype of the operator's entries.
    """

    __slots__ = ("n_rows", "n_cols", "scaling", "field", "_forward", "_adjoint")

    def __init__(self, n_rows, n_cols, forward, adjoint, scaling=None, field="real"):
        if field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
        object.__setattr__(self, "n_rows", int(n_rows))
        object.__setattr__(self, "n_cols", int(n_cols))
        object.__setattr__(self, "scaling", None if scaling is None else float(scaling))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_forward", forward)
        object.__setattr__(self, "_adjoint", adjoint)

    def __setattr__(self, name, value):
        raise AttributeError("LinearOperator is immutable")

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def dtype(self):
        return np.complex128 if self.field == "complex" else np.float64

    def forward(self, x):
        x = np.asarray(x)
        if x.shape != (self.n_cols,):
            raise ValueError(f"forward expects shape ({self.n_cols},), got {x.shape}")
        return self._forward(x)

    def adjoint(self, y):
        y = np.asarray(y)
        if y.shape != (self.n_rows,):
            raise ValueError(f"adjoint expects shape ({self.n_rows},), got {y.shape}")
        return self._adjoint(y)

    def __repr__(self):
        c = f", scaling={self.scaling:g}" if self.scaling is not None else ""
        return f"LinearOperator({self.n_rows}x{self.n_cols}, {self.field}{c})"


def dft(n):
    """Unnormalized discrete Fourier transform, y_k = sum_t x(t) e^{-i2pi(t-1)k/n}.

    Satisfies F*F = nI, so the declared scaling is n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def fwd(x):
        return np.fft.fft(np.asarray(x, dtype=np.complex128))

    def adj(y):
        return np.fft.ifft(np.asarray(y, dtype=np.complex128)) * n

    return LinearOperator(n, n, fwd, adj, scaling=float(n), field="complex")


def identity(n):
    """Identity map, scaling 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def f(x):
        return np.array(x, copy=True)

    return LinearOperator(n, n, f, f, scaling=1.0, field="real")


def compose(measurement, sparsity):
    """Measurement-times-sparsity composite U with forward = measurement o sparsity.

    Requires sparsity to be orthonormal (scaling 1) and measurement to carry
    the full-system normalization (scaling = its size), so the composite is a
    scaled isometry with U*U = nI.
    """
    if measurement.n_cols != sparsity.n_rows:
        raise ValueError(f"dimension mismatch: measurement is {measurement.shape}, "
                         f"sparsity is {sparsity.shape}")
    if sparsity.scaling is None or abs(sparsity.scaling - 1.0) > 1e-12:
        raise ValueError(f"sparsity operator must have scaling 1, got {sparsity.scaling}")
    n = measurement.n_cols
    if measurement.scaling is None or abs(measurement.scaling - n) > 1e-9 * n:
        raise ValueError(f"measurement operator must have scaling {n}, "
                         f"got {measurement.scaling}")

    field = "complex" if "complex" in (measurement.field, sparsity.field) else "real"

    def fwd(x):
        return measurement.forward(sparsity.forward(x))

    def adj(y):
        return sparsity.adjoint(measurement.adjoint(y))

    return LinearOperator(measurement.n_rows, sparsity.n_cols, fwd, adj,
                          scaling=measurement.scaling, field=field)


def column_restrict(op, cols):
    """Restriction of an operator to a subset of its columns.

    forward embeds the reduced vector at positions ``cols`` (zeros elsewhere)
    and applies ``op``; adjoint selects those entries of ``op.adjoint``.
    No scaling is declared: a column subset of a scaled isometry keeps
    orthogonal columns, but the spectral identity is only inherited when the
    subset is the full set.
    """
    cols = np.asarray(cols, dtype=np.intp)
    if cols.size and (cols.min() < 0 or cols.max() >= op.n_cols):
        raise IndexError("column index out of range")
    k = cols.size

    def fwd(x):
        full = np.zeros(op.n_cols, dtype=np.result_type(np.asarray(x).dtype, op.dtype))
        full[cols] = x
        return op._forward(full)

    def adj(y):
        return op._adjoint(y)[cols]

    return LinearOperator(op.n_rows, k, fwd, adj, scaling=None, field=op.field)


def materialize(op):
    """Dense matrix of an implicit operator, built column by column on impulses."""
    M = np.zeros((op.n_rows, op.n_cols), dtype=op.dtype)
    e = np.zeros(op.n_cols)
    for t in range(op.n_cols):
        e[t] = 1.0
        M[:, t] = op.forward(e)
        e[t] = 0.0
    return M
