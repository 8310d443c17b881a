"""Implicit O(n log n) orthogonal transforms and measurement systems."""
from .operators import (LinearOperator, column_restrict, compose, dft, identity,
                        materialize)
from .noiselets import noiselet
from .subband import (SubbandSystem, subband_frequencies, subband_system,
                      two_sided_frequencies, wavelet_spectrum)
from .wavelets import (DAUB8_FILTER, HAAR_FILTER, daub8, detail_slice, haar,
                       wavelet_operator, wavelet_waveform)

__all__ = [
    "LinearOperator", "column_restrict", "compose", "dft", "identity",
    "materialize", "noiselet", "SubbandSystem", "subband_frequencies",
    "subband_system", "two_sided_frequencies", "wavelet_spectrum",
    "DAUB8_FILTER", "HAAR_FILTER", "daub8", "detail_slice", "haar",
    "wavelet_operator", "wavelet_waveform",
]
