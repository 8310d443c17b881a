"""Random measurement sets, sparse sign models, and row restriction.

Randomness comes from counter-based Philox streams keyed by (seed, stream
tag), so any draw is reproducible from its 64-bit seed alone, independent
of call order or worker scheduling. Indices are 0-based throughout.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .transforms.operators import LinearOperator

__all__ = ["SampleSet", "SparseModel", "sample_uniform", "sample_bernoulli",
           "random_model", "restrict", "keyed_generator"]

_MASK64 = (1 << 64) - 1

# stream tags keep draws with equal seeds decorrelated across purposes
_STREAM_UNIFORM = 0x5B75
_STREAM_BERNOULLI = 0xBE52
_STREAM_MODEL = 0x51D5


def keyed_generator(seed, stream):
    """Philox generator keyed by (seed, stream); counter-based and splittable."""
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """An ordered measurement set Omega with the model that produced it.

    indices are sorted, distinct, 0-based rows in range(n_rows).
    """
    n_rows: int
    indices: np.ndarray
    model: str  # "uniform_m" or "bernoulli_m_over_n"
    seed: int

    def __eq__(self, other):
        return (isinstance(other, SampleSet)
                and self.n_rows == other.n_rows
                and self.model == other.model
                and self.seed == other.seed
                and np.array_equal(self.indices, other.indices))

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        object.__setattr__(self, "indices", idx)
        if idx.size:
            if idx.min() < 0 or idx.max() >= self.n_rows:
                raise ValueError("sample indices out of range")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("sample indices must be sorted and distinct")

    @property
    def size(self):
        return int(self.indices.size)

    def to_dict(self):
        return {"n": self.n_rows, "indices": self.indices.tolist(),
                "model": self.model, "seed": int(self.seed)}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(n_rows=d["n"], indices=np.asarray(d["indices"], dtype=np.intp),
                   model=d["model"], seed=d["seed"])


@dataclass(frozen=True, eq=False)
class SparseModel:
    """Support T and sign sequence z of a sparse target vector."""
    n: int
    support: np.ndarray
    signs: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, SparseModel)
                and self.n == other.n
                and np.array_equal(self.support, other.support)
                and np.array_equal(self.signs, other.signs))

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=np.intp)
        sg = np.asarray(self.signs, dtype=np.float64)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "signs", sg)
        if sup.size != sg.size:
            raise ValueError("support and signs must have equal length")
        if sup.size:
            if sup.min() < 0 or sup.max() >= self.n:
                raise ValueError("support indices out of range")
            if np.any(np.diff(sup) <= 0):
                raise ValueError("support must be sorted and distinct")
            if not np.all(np.abs(sg) == 1.0):
                raise ValueError("signs must be +1 or -1")

    @property
    def sparsity(self):
        return int(self.support.size)

    def vector(self):
        """The target x0: the sign sequence on T and zero elsewhere."""
        x = np.zeros(self.n)
        x[self.support] = self.signs
        return x

    def flipped(self):
        """Same support with negated signs."""
        return SparseModel(self.n, self.support.copy(), -self.signs)

    def to_dict(self):
        return {"n": self.n, "support": self.support.tolist(),
                "signs": self.signs.astype(int).tolist()}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(n=d["n"], support=np.asarray(d["support"], dtype=np.intp),
                   signs=np.asarray(d["signs"], dtype=np.float64))


def _partial_fisher_yates(rng, n, m):
    """First m entries of a uniformly random permutation of range(n)."""
    idx = np.arange(n)
    for i in range(m):
        j = int(rng.integers(i, n))
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:m]


def sample_uniform(n, m, seed):
    """Omega uniform over all size-m subsets of range(n); |Omega| = m exactly."""
    if not 0 < m <= n:
        raise ValueError(f"m must satisfy 0 < m <= n, got m={m}, n={n}")
    rng = keyed_generator(seed, _STREAM_UNIFORM)
    idx = np.sort(_partial_fisher_yates(rng, n, m))
    return SampleSet(n_rows=n, indices=idx, model="uniform_m", seed=int(seed))


def sample_bernoulli(n, m, seed):
    """Each row included independently with probability m/n; E|Omega| = m.

    The empty set is a legal outcome.
    """
    if not 0 < m <= n:
        raise ValueError(f"m must satisfy 0 < m <= n, got m={m}, n={n}")
    rng = keyed_generator(seed, _STREAM_BERNOULLI)
    mask = rng.random(n) < (m / n)
    return SampleSet(n_rows=n, indices=np.flatnonzero(mask),
                     model="bernoulli_m_over_n", seed=int(seed))


def random_model(n, S, seed):
    """Support uniform over size-S subsets, signs i.i.d. +-1 with probability 1/2."""
    if not 0 < S <= n:
        raise ValueError(f"S must satisfy 0 < S <= n, got S={S}, n={n}")
    rng = keyed_generator(seed, _STREAM_MODEL)
    support = np.sort(_partial_fisher_yates(rng, n, S))
    signs = rng.integers(0, 2, size=S) * 2.0 - 1.0
    return SparseModel(n=n, support=support, signs=signs)


def restrict(A, omega):
    """Row restriction A_Omega: forward selects the sampled entries of A.forward,
    adjoint zero-pads before applying A.adjoint. No scaling is declared."""
    if isinstance(omega, SampleSet):
        if omega.n_rows != A.n_rows:
            raise ValueError(f"sample set is over {omega.n_rows} rows, "
                             f"operator has {A.n_rows}")
        idx = omega.indices
    else:
        idx = np.asarray(omega, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= A.n_rows):
            raise IndexError("row index out of range")
    m = idx.size

    def fwd(x):
        return A._forward(x)[idx]

    def adj(z):
        z = np.asarray(z)
        padded = np.zeros(A.n_rows, dtype=np.result_type(z.dtype, A.dtype))
        padded[idx] = z
        return A._adjoint(padded)

    return LinearOperator(m, A.n_cols, fwd, adj, scaling=None, field=A.field)
