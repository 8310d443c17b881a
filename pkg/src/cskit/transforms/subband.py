"""Fourier sampling systems for single wavelet subbands.

At scale j the periodized waveforms are spectrally flat over a two-sided
frequency band of size n_j = n 2^{-j}. Re-weighting the DFT rows in that
band by the first waveform's Fourier coefficients turns the n_j x n_j
band-limited measurement of the subband into a perfectly flat system
(every entry of magnitude one, Gram n_j I), so the subband coefficients
can be sensed like a partial Fourier ensemble.
"""
from __future__ import annotations

import numpy as np

from .operators import LinearOperator
from .wavelets import wavelet_operator, wavelet_waveform

__all__ = ["SubbandSystem", "subband_system", "wavelet_spectrum",
           "subband_frequencies", "two_sided_frequencies"]


def _check_scale(n, j):
    if n < 16 or (n & (n - 1)) != 0:
        raise ValueError(f"signal length must be a power of 2 and >= 16, got {n}")
    if j < 1 or (1 << j) * 16 > n:
        raise ValueError(f"scale j={j} out of range: need 2^j <= n/16 with n={n}")


def subband_frequencies(n, j):
    """The two-sided band of scale j: {n_j/2+1..n_j} followed by {-n_j+1..-n_j/2}."""
    nj = n >> j
    pos = np.arange(nj // 2 + 1, nj + 1)
    neg = np.arange(-nj + 1, -nj // 2 + 1)
    return np.concatenate([pos, neg])


def two_sided_frequencies(n):
    """Frequency axis -n/2+1 .. n/2 used by wavelet_spectrum."""
    return np.arange(-n // 2 + 1, n // 2 + 1)


def wavelet_spectrum(n, j, wavelet="daub8"):
    """|psi_hat_{j,1}(omega)| over omega = -n/2+1 .. n/2.

    The magnitude is shared by every waveform at scale j since circular
    shifts only change the phase.
    """
    _check_scale(n, j)
    psi = wavelet_waveform(wavelet, n, j, k=1)
    spec = np.fft.fft(psi)
    return np.abs(spec[two_sided_frequencies(n) % n])


class SubbandSystem:
    """Assembled scale-j measurement system U = D^{-1} F_j Psi_j.

    Attributes
    ----------
    n, j, n_j : int
        Signal length, scale index, and subband size n_j = n 2^{-j}.
    band : ndarray
        Two-sided frequencies of the band (length n_j).
    diag : ndarray
        Complex re-weighting d(omega) = psi_hat_{j,1}(omega) on the band.
    operator : LinearOperator
        The n_j x n_j system, scaling n_j, complex field.
    wavelet : str
        Basis used for Psi_j.
    """

    __slots__ = ("n", "j", "n_j", "band", "diag", "operator", "wavelet")

    def __init__(self, n, j, n_j, band, diag, operator, wavelet):
        self.n = n
        self.j = j
        self.n_j = n_j
        self.band = band
        self.diag = diag
        self.operator = operator
        self.wavelet = wavelet

    def __repr__(self):
        return (f"SubbandSystem(n={self.n}, j={self.j}, n_j={self.n_j}, "
                f"wavelet={self.wavelet!r})")


def subband_system(n, j, wavelet="daub8"):
    """Build the scale-j subband sampling system for an n-point signal.

    Raises ValueError if any re-weighting coefficient on the band falls
    below 1e-12 in magnitude (the diagonal would not be invertible).
    """
    _check_scale(n, j)
    nj = n >> j
    band = subband_frequencies(n, j)
    rows = band % n

    psi1 = wavelet_waveform(wavelet, n, j, k=1)
    diag = np.fft.fft(psi1)[rows]
    small = np.abs(diag) < 1e-12
    if small.any():
        bad = band[small][:4].tolist()
        raise ValueError(f"wavelet spectrum vanishes on the band near omega={bad}; "
                         f"cannot invert the re-weighting for {wavelet!r} at j={j}")

    basis = wavelet_operator(wavelet, n)
    lo = nj  # detail block for scale j is [nj, 2*nj)

    def fwd(w):
        w = np.asarray(w)
        coeffs = np.zeros(n, dtype=np.complex128 if np.iscomplexobj(w) else np.float64)
        coeffs[lo : 2 * nj] = w
        x = basis.forward(coeffs)
        return np.fft.fft(x)[rows] / diag

    def adj(z):
        padded = np.zeros(n, dtype=np.complex128)
        padded[rows] = np.asarray(z, dtype=np.complex128) / np.conj(diag)
        x = np.fft.ifft(padded) * n
        return basis.adjoint(x)[lo : 2 * nj]

    op = LinearOperator(nj, nj, fwd, adj, scaling=float(nj), field="complex")
    return SubbandSystem(n=n, j=j, n_j=nj, band=band, diag=diag, operator=op,
                         wavelet=wavelet)
