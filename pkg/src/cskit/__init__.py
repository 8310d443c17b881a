"""cskit: matrix-free compressive sampling at desk scale.

Recover sparse signals from partial orthogonal measurements by basis
pursuit, verify recovery with dual certificates and restricted-Gram
spectra, and reproduce subband-Fourier and noiselet/Haar sampling
experiments end to end.
"""
from ._kernels import HAVE_COMPILED, backend
from .analysis import (CoherenceSubsampleWarning, SpectralReport, coherence,
                       deviation_tail, gram_spectrum, sampled_columns,
                       uncertainty_check)
from .certificate import CertificateReport, certify_then_solve, dual_vector
from .sampling import (SampleSet, SparseModel, keyed_generator, random_model,
                       restrict, sample_bernoulli, sample_uniform)
from .solver import (EXACTNESS_THRESHOLD, RecoveryResult, SolverOptions,
                     basis_pursuit, recover)
from .transforms import (LinearOperator, SubbandSystem, column_restrict, compose,
                         daub8, dft, haar, identity, materialize, noiselet,
                         subband_system, wavelet_spectrum)

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED", "backend", "CoherenceSubsampleWarning", "SpectralReport",
    "coherence", "deviation_tail", "gram_spectrum", "sampled_columns",
    "uncertainty_check", "CertificateReport", "certify_then_solve",
    "dual_vector", "SampleSet", "SparseModel", "keyed_generator",
    "random_model", "restrict", "sample_bernoulli", "sample_uniform",
    "EXACTNESS_THRESHOLD", "RecoveryResult", "SolverOptions", "basis_pursuit",
    "recover", "LinearOperator", "SubbandSystem", "column_restrict", "compose",
    "daub8", "dft", "haar", "identity", "materialize", "noiselet",
    "subband_system", "wavelet_spectrum", "__version__",
]
