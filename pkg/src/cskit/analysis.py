"""Coherence, restricted Gram spectra, and the weak uncertainty principle.

Coherence follows the body convention for systems normalized by U*U = nI:
mu(U) = max |U_{k,j}|, a value between 1 and sqrt(n). (For an operator with
unit-norm rows the same quantity is often written sqrt(n) max |U_{k,j}|;
both describe the same statistic under the two normalizations.)
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .sampling import SampleSet, keyed_generator, sample_bernoulli

__all__ = ["SpectralReport", "coherence", "gram_spectrum", "sampled_columns",
           "uncertainty_check", "deviation_tail", "CoherenceSubsampleWarning"]

_STREAM_TAIL = 0x7A11


class CoherenceSubsampleWarning(UserWarning):
    """Raised when coherence() falls back to a column subsample (lower bound)."""


def coherence(U, max_exact=4096, columns=512, seed=0):
    """Largest entry magnitude of a scaling-n system, by sweeping impulses.

    Exact for U.n_cols <= max_exact; for larger systems a random column
    subsample is used instead, which yields a lower bound and raises
    CoherenceSubsampleWarning.
    """
    n = U.n_cols
    if n <= max_exact:
        cols = range(n)
    else:
        warnings.warn(f"n={n} exceeds max_exact={max_exact}; returning a "
                      f"column-subsample lower bound on the coherence",
                      CoherenceSubsampleWarning, stacklevel=2)
        rng = keyed_generator(seed, 0xC05E)
        cols = np.sort(rng.permutation(n)[:min(columns, n)])
    mu = 0.0
    e = np.zeros(n)
    for t in cols:
        e[t] = 1.0
        mu = max(mu, float(np.abs(U.forward(e)).max()))
        e[t] = 0.0
    return mu


@dataclass(frozen=True)
class SpectralReport:
    """Extreme eigenvalues of the restricted Gram (1/m) U_OT* U_OT."""
    lambda_min: float
    lambda_max: float
    deviation: float
    m: int
    s: int

    def to_dict(self):
        return {"lambda_min": self.lambda_min, "lambda_max": self.lambda_max,
                "deviation": self.deviation, "m": self.m, "s": self.s}

    def to_json(self):
        return json.dumps(self.to_dict())


def sampled_columns(U, omega, support):
    """The m x s matrix U_OT: columns of U on the support, rows on Omega."""
    idx = omega.indices if isinstance(omega, SampleSet) else np.asarray(omega, np.intp)
    support = np.asarray(support, dtype=np.intp)
    cols = np.zeros((idx.size, support.size), dtype=U.dtype)
    e = np.zeros(U.n_cols)
    for i, t in enumerate(support):
        e[t] = 1.0
        cols[:, i] = U.forward(e)[idx]
        e[t] = 0.0
    return cols


def gram_spectrum(U, omega, support):
    """Spectral report of (1/m) U_OT* U_OT via a dense Hermitian eigensolve.

    m is the realized |Omega|; an empty Omega yields the zero Gram
    (deviation 1). Intended for s up to a couple of thousand.
    """
    support = np.asarray(support, dtype=np.intp)
    s = support.size
    if s == 0:
        raise ValueError("support must be nonempty")
    idx = omega.indices if isinstance(omega, SampleSet) else np.asarray(omega, np.intp)
    m = idx.size
    if m == 0:
        return SpectralReport(lambda_min=0.0, lambda_max=0.0, deviation=1.0, m=0, s=s)
    UOT = sampled_columns(U, omega, support)
    G = (UOT.conj().T @ UOT) / m
    lam = np.linalg.eigvalsh(G)
    lmin = float(max(lam[0], 0.0))  # Gram is PSD; clip eigensolver noise
    lmax = float(lam[-1])
    dev = max(abs(lmax - 1.0), abs(lmin - 1.0))
    return SpectralReport(lambda_min=lmin, lambda_max=lmax, deviation=dev, m=m, s=s)


def uncertainty_check(x, U, omega):
    """Energy fraction ||U_O x||^2 / ||x||^2 for x supported on T.

    bounds_hold reports whether the fraction lies in [m/2, 3m/2], the
    band implied by a Gram deviation of at most 1/2.
    """
    x = np.asarray(x, dtype=np.float64)
    xn2 = float(x @ x)
    if xn2 == 0.0:
        raise ValueError("x must be nonzero")
    idx = omega.indices if isinstance(omega, SampleSet) else np.asarray(omega, np.intp)
    m = idx.size
    y = U.forward(x)[idx] if m else np.zeros(0)
    ratio = float(np.abs(y) @ np.abs(y)) / xn2 if m else 0.0
    return {"energy_ratio": ratio,
            "bounds_hold": bool(m / 2 <= ratio <= 3 * m / 2)}


def deviation_tail(U, support, m, trials, seed):
    """Monte-Carlo estimate of P(deviation >= 1/2) under the Bernoulli model.

    Each trial draws its own Bernoulli Omega from a seed derived from
    (seed, trial index), so the frequency is deterministic given the seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    support = np.asarray(support, dtype=np.intp)
    hits = 0
    for t in range(trials):
        sub = int(keyed_generator(seed, _STREAM_TAIL + t).integers(0, 2**63))
        omega = sample_bernoulli(U.n_rows, m, sub)
        rep = gram_spectrum(U, omega, support)
        hits += rep.deviation >= 0.5
    return hits / trials
