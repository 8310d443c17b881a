"""Dual certificates for exact recovery.

For a support T with sign sequence z0, the candidate dual vector is

    pi = U_Omega^* U_OT (U_OT^* U_OT)^{-1} z0,

which lies in the row space of U_Omega by construction and equals z0 on T
whenever the restricted Gram is invertible. If additionally |pi(t)| < 1
off the support, the target is the unique l1 minimizer, so a strict
certificate predicts exact recovery independently of any solver.

For complex measurement systems the conditions are evaluated on the real
dual of the realified constraint system (stacked real/imaginary rows over
a real unknown, matching the solver): the Gram becomes the real part of
the Hermitian Gram and |pi(t)| is a real absolute value. For real systems
this reduces to the plain construction above.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .analysis import SpectralReport, sampled_columns
from .sampling import SampleSet, restrict
from .solver import recover

__all__ = ["CertificateReport", "dual_vector", "certify_then_solve"]

_SINGULAR_REL = 1e-10
_ON_SUPPORT_TOL = 1e-8


@dataclass
class CertificateReport:
    """The dual vector and the three exactness conditions.

    pi is None when the Gram is numerically singular (invertible=False);
    the sign and magnitude conditions are then not evaluated. coefficients
    holds the measurement-domain vector c with pi = Re(U_Omega^* c), the
    stored witness that pi lies in the row space of U_Omega.
    """
    pi: np.ndarray | None
    on_support_ok: bool
    off_support_max: float
    strict: bool
    gram_spectrum: SpectralReport
    invertible: bool
    coefficients: np.ndarray | None = None

    def to_dict(self, max_dense_len=256):
        d = {"on_support_ok": self.on_support_ok,
             "off_support_max": self.off_support_max,
             "strict": self.strict,
             "invertible": self.invertible,
             "gram_spectrum": self.gram_spectrum.to_dict()}
        if self.pi is None:
            d["pi"] = None
        elif self.pi.size <= max_dense_len:
            d["pi"] = self.pi.tolist()
        else:
            keep = np.flatnonzero(np.abs(self.pi) > 1e-6)
            d["pi_support"] = keep.tolist()
            d["pi_values"] = self.pi[keep].tolist()
            d["n"] = int(self.pi.size)
        return d

    def to_json(self, max_dense_len=256):
        return json.dumps(self.to_dict(max_dense_len=max_dense_len))


def _cholesky_solve(L, b):
    """Solve (L L^T) w = b by forward/back substitution."""
    s = L.shape[0]
    t = np.empty(s)
    for i in range(s):
        t[i] = (b[i] - L[i, :i] @ t[:i]) / L[i, i]
    w = np.empty(s)
    for i in range(s - 1, -1, -1):
        w[i] = (t[i] - L[i + 1 :, i] @ w[i + 1 :]) / L[i, i]
    return w


def dual_vector(U, omega, model):
    """Construct the candidate dual vector and report the three conditions.

    The s x s Gram of the sampled support columns is factored by dense
    Cholesky without regularization (a regularized pi would not certify
    anything); a Gram with lambda_min/m below 1e-10 is reported as
    singular instead.
    """
    if model.sparsity == 0:
        raise ValueError("model support must be nonempty")
    idx = omega.indices if isinstance(omega, SampleSet) else np.asarray(omega, np.intp)
    m = int(idx.size)
    if m == 0:
        raise ValueError("sample set must be nonempty")

    UOT = sampled_columns(U, omega, model.support)
    Gc = UOT.conj().T @ UOT
    lam_c = np.linalg.eigvalsh(Gc / m)
    spectrum = SpectralReport(lambda_min=float(max(lam_c[0], 0.0)),
                              lambda_max=float(lam_c[-1]),
                              deviation=float(max(abs(lam_c[-1] - 1.0),
                                                  abs(max(lam_c[0], 0.0) - 1.0))),
                              m=m, s=model.sparsity)

    # the solver works on the realified system, so the certificate does too
    Gr = np.ascontiguousarray(Gc.real) if U.field == "complex" else Gc.real
    lam_r_min = float(np.linalg.eigvalsh(Gr)[0])
    if lam_r_min / m < _SINGULAR_REL:
        return CertificateReport(pi=None, on_support_ok=False,
                                 off_support_max=float("nan"), strict=False,
                                 gram_spectrum=spectrum, invertible=False)

    L = np.linalg.cholesky(Gr)
    w = _cholesky_solve(L, model.signs)

    c = UOT @ w  # measurement-domain coefficients; pi = Re(U_Omega^* c)
    A = restrict(U, omega if isinstance(omega, SampleSet) else idx)
    pi = np.asarray(A.adjoint(c)).real

    on_T = pi[model.support]
    on_support_ok = bool(np.abs(on_T - model.signs).max() <= _ON_SUPPORT_TOL)
    off_mask = np.ones(model.n, dtype=bool)
    off_mask[model.support] = False
    off_support_max = float(np.abs(pi[off_mask]).max()) if off_mask.any() else 0.0
    return CertificateReport(pi=pi, on_support_ok=on_support_ok,
                             off_support_max=off_support_max,
                             strict=bool(on_support_ok and off_support_max < 1.0),
                             gram_spectrum=spectrum, invertible=True,
                             coefficients=c)


def certify_then_solve(U, omega, model, opts=None):
    """Run the certificate and the solver on the same instance.

    consistent is the one-sided check strict => exact (ties at |pi| = 1
    are reported as non-strict and never counted as inconsistent);
    expected_failure flags an invertible Gram whose dual magnitude exceeds
    1 by a clear margin.
    """
    certificate = dual_vector(U, omega, model)
    recovery = recover(U, omega, model, opts=opts)
    consistent = (not certificate.strict) or bool(recovery.exact)
    expected_failure = bool(certificate.invertible
                            and certificate.off_support_max > 1.0 + 1e-6)
    return {"certificate": certificate, "recovery": recovery,
            "consistent": consistent, "expected_failure": expected_failure}
