"""Transform operators: stated examples, adjoint/isometry laws, dense oracles."""
import time

import numpy as np
import pytest

from cskit import (LinearOperator, compose, daub8, dft, haar, identity,
                   materialize, noiselet, subband_system, wavelet_spectrum)
from cskit.transforms import (subband_frequencies, two_sided_frequencies,
                              wavelet_waveform)

from oracles import adjoint_mismatch, dense_matrix, isometry_mismatch

SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------- dft

def test_dft_impulse_is_flat():
    y = dft(4).forward(np.array([1.0, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(y, np.ones(4), atol=1e-12)


def test_dft_constant_is_dc():
    y = dft(4).forward(np.ones(4))
    np.testing.assert_allclose(y, [4.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_dft_parseval_scaling(rng):
    F = dft(8)
    x = rng.standard_normal(8)
    assert abs(np.linalg.norm(F.forward(x)) ** 2 - 8 * np.linalg.norm(x) ** 2) \
        <= 1e-10 * 8 * np.linalg.norm(x) ** 2


def test_dft_rejects_bad_n():
    with pytest.raises(ValueError):
        dft(0)


# ---------------------------------------------------------------- haar

def test_haar_two_point_examples():
    H = haar(2)
    # analysis and synthesis coincide at n=2; check both directions
    np.testing.assert_allclose(H.adjoint(np.array([1.0, 1.0])), [SQRT2, 0.0],
                               atol=1e-12)
    np.testing.assert_allclose(H.adjoint(np.array([1.0, -1.0])), [0.0, SQRT2],
                               atol=1e-12)
    np.testing.assert_allclose(H.forward(np.array([1.0, 1.0])), [SQRT2, 0.0],
                               atol=1e-12)


def test_haar_roundtrip(rng):
    H = haar(8)
    x = rng.standard_normal(8)
    np.testing.assert_allclose(H.adjoint(H.forward(x)), x, atol=1e-12)
    np.testing.assert_allclose(H.forward(H.adjoint(x)), x, atol=1e-12)


@pytest.mark.parametrize("n", [0, 3, 6, 12])
def test_haar_rejects_non_power_of_two(n):
    with pytest.raises(ValueError):
        haar(n)


# ---------------------------------------------------------------- daub8

def test_daub8_norm_preservation(rng):
    D = daub8(64)
    x = rng.standard_normal(64)
    assert abs(np.linalg.norm(D.forward(x)) - np.linalg.norm(x)) <= 1e-10


def test_daub8_forward_adjoint_identity(rng):
    D = daub8(64)
    for _ in range(20):
        x = rng.standard_normal(64)
        np.testing.assert_allclose(D.forward(D.adjoint(x)), x, atol=1e-10)


@pytest.mark.parametrize("n", [8, 12, 17, 24])
def test_daub8_rejects_bad_n(n):
    with pytest.raises(ValueError):
        daub8(n)


@pytest.mark.parametrize("wavelet", ["haar", "daub8"])
@pytest.mark.parametrize("j,k", [(1, 2), (2, 5), (3, 4)])
def test_waveforms_are_circular_shifts(wavelet, j, k):
    n = 256
    psi_1 = wavelet_waveform(wavelet, n, j, k=1)
    psi_k = wavelet_waveform(wavelet, n, j, k=k)
    np.testing.assert_allclose(psi_k, np.roll(psi_1, (2 ** j) * (k - 1)),
                               atol=1e-12)


# ---------------------------------------------------------------- noiselet

def test_noiselet_two_point_entries():
    # the sqrt(2)-rescaled realization is integer-valued with +-1 parts
    M = materialize(noiselet(2)) * SQRT2
    np.testing.assert_allclose(np.abs(M.real), np.ones((2, 2)), atol=1e-12)
    np.testing.assert_allclose(np.abs(M.imag), np.ones((2, 2)), atol=1e-12)
    np.testing.assert_allclose(M, np.array([[1 - 1j, 1 + 1j],
                                            [1 + 1j, 1 - 1j]]), atol=1e-12)


def test_noiselet_scaled_isometry(rng):
    N = noiselet(16)
    x = rng.standard_normal(16)
    assert abs(np.linalg.norm(N.forward(x)) ** 2 - 16 * np.linalg.norm(x) ** 2) \
        <= 1e-10 * 16 * np.linalg.norm(x) ** 2


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_noiselet_unit_magnitude_entries(n):
    M = materialize(noiselet(n))
    np.testing.assert_allclose(np.abs(M), np.ones((n, n)), atol=1e-10)


@pytest.mark.parametrize("n", [0, 3, 6])
def test_noiselet_rejects_bad_n(n):
    with pytest.raises(ValueError):
        noiselet(n)


def test_noiselet_haar_composition_is_flat():
    M = materialize(compose(noiselet(16), haar(16)))
    assert abs(np.abs(M).max() - 1.0) <= 1e-10
    assert abs(np.abs(M).min() - 1.0) <= 1e-10


# ---------------------------------------------------------------- compose

def test_compose_with_identity_matches_dft(rng):
    F = dft(8)
    U = compose(F, identity(8))
    for _ in range(10):
        x = rng.standard_normal(8)
        np.testing.assert_allclose(U.forward(x), F.forward(x), atol=1e-12)


def test_compose_noiselet_haar_gram():
    U = compose(noiselet(16), haar(16))
    M = dense_matrix(U)
    np.testing.assert_allclose(M.conj().T @ M, 16 * np.eye(16), atol=1e-10)
    assert U.scaling == 16.0


def test_compose_adjoint_consistency(rng):
    U = compose(noiselet(32), haar(32))
    assert adjoint_mismatch(U, rng, trials=50) <= 1e-10


def test_compose_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(dft(8), haar(16))


def test_compose_rejects_scaling_violations():
    with pytest.raises(ValueError):
        compose(haar(16), haar(16))  # measurement must carry scaling n
    with pytest.raises(ValueError):
        compose(dft(16), dft(16))  # sparsity must be orthonormal


# ---------------------------------------------------------------- subband

def test_subband_sizes_at_scale_one():
    sys_1 = subband_system(1024, 1, "daub8")
    assert sys_1.n_j == 512
    assert len(sys_1.band) == 512
    assert sys_1.operator.shape == (512, 512)


def test_subband_band_matches_two_sided_definition():
    band = subband_frequencies(64, 2)
    nj = 16
    expected = set(range(nj // 2 + 1, nj + 1)) | set(range(-nj + 1, -nj // 2 + 1))
    assert set(band.tolist()) == expected
    assert len(band) == nj


@pytest.mark.parametrize("j", [1, 2, 3])
def test_subband_flatness_daub8(j):
    mags = wavelet_spectrum(1024, j, "daub8")
    omegas = two_sided_frequencies(1024)
    sel = np.isin(omegas, subband_frequencies(1024, j))
    band = mags[sel]
    assert band.max() / band.min() < 1.5


@pytest.mark.parametrize("n,j", [(256, 1), (256, 2), (1024, 3)])
def test_subband_entries_have_unit_magnitude(n, j):
    U = subband_system(n, j, "daub8").operator
    M = dense_matrix(U)
    assert np.abs(np.abs(M) - 1.0).max() <= 1e-8


def test_subband_gram_identity():
    sys_2 = subband_system(256, 2, "daub8")
    M = dense_matrix(sys_2.operator)
    nj = sys_2.n_j
    assert np.abs(M.conj().T @ M - nj * np.eye(nj)).max() <= 1e-8 * nj


def test_subband_scale_out_of_range():
    with pytest.raises(ValueError):
        subband_system(64, 3, "daub8")  # 2^3 > 64/16
    with pytest.raises(ValueError):
        subband_system(100, 1, "daub8")


def test_subband_rejects_vanishing_weights(monkeypatch):
    import cskit.transforms.subband as sb

    def tiny_waveform(name, n, j, k=1):
        return np.zeros(n)

    monkeypatch.setattr(sb, "wavelet_waveform", tiny_waveform)
    with pytest.raises(ValueError, match="vanishes"):
        sb.subband_system(256, 1, "daub8")


# ---------------------------------------------------------------- spectrum

def test_wavelet_spectrum_parseval():
    for j in (1, 2):
        mags = wavelet_spectrum(512, j, "daub8")
        assert abs((mags ** 2).sum() - 512) <= 1e-8 * 512


def test_wavelet_spectrum_shift_invariant_magnitude():
    n, j = 256, 2
    mags_1 = wavelet_spectrum(n, j, "daub8")
    spec_2 = np.fft.fft(wavelet_waveform("daub8", n, j, k=2))
    mags_2 = np.abs(spec_2[two_sided_frequencies(n) % n])
    np.testing.assert_allclose(mags_1, mags_2, atol=1e-10)


def test_wavelet_spectrum_band_ratio_j2():
    mags = wavelet_spectrum(1024, 2, "daub8")
    sel = np.isin(two_sided_frequencies(1024), subband_frequencies(1024, 2))
    band = mags[sel]
    assert band.max() / band.min() < 1.5


# ------------------------------------------------- module-wide properties

def _exported_operators():
    return {
        "dft": dft(32),
        "haar": haar(32),
        "daub8": daub8(32),
        "noiselet": noiselet(32),
        "identity": identity(32),
        "noiselet_haar": compose(noiselet(32), haar(32)),
        "subband": subband_system(256, 2, "daub8").operator,
    }


@pytest.mark.parametrize("name", list(_exported_operators().keys()))
def test_adjoint_property_all_operators(name, rng):
    op = _exported_operators()[name]
    assert adjoint_mismatch(op, rng, trials=100) <= 1e-10


@pytest.mark.parametrize("name", list(_exported_operators().keys()))
def test_scaled_isometry_all_operators(name, rng):
    op = _exported_operators()[name]
    assert op.scaling is not None
    assert isometry_mismatch(op, rng, trials=50) <= 1e-10


@pytest.mark.parametrize("name,op_factory", [
    ("dft", lambda: dft(32)),
    ("haar", lambda: haar(32)),
    ("daub8", lambda: daub8(32)),
    ("noiselet", lambda: noiselet(32)),
    ("noiselet_haar", lambda: compose(noiselet(32), haar(32))),
    ("subband", lambda: subband_system(256, 3, "daub8").operator),
])
def test_dense_equivalence_small_n(name, op_factory, rng):
    op = op_factory()
    M = dense_matrix(op)
    for _ in range(10):
        x = rng.standard_normal(op.n_cols)
        y = rng.standard_normal(op.n_rows)
        if op.field == "complex":
            x = x + 1j * rng.standard_normal(op.n_cols)
            y = y + 1j * rng.standard_normal(op.n_rows)
        np.testing.assert_allclose(op.forward(x), M @ x, atol=1e-10)
        np.testing.assert_allclose(op.adjoint(y), M.conj().T @ y, atol=1e-10)


@pytest.mark.parametrize("factory", [dft, haar, daub8, noiselet],
                         ids=["dft", "haar", "daub8", "noiselet"])
def test_fast_path_scaling_smoke(factory):
    n1, n2 = 2 ** 10, 2 ** 14
    xs = {n: np.random.default_rng(n).standard_normal(n) for n in (n1, n2)}
    ops = {n: factory(n) for n in (n1, n2)}

    def best(n):
        t = np.inf
        for _ in range(20):
            t0 = time.perf_counter()
            ops[n].forward(xs[n])
            t = min(t, time.perf_counter() - t0)
        return t

    allowed = 1.3 * (n2 * np.log(n2)) / (n1 * np.log(n1))
    assert best(n2) / best(n1) <= allowed


def test_detail_slice_layout():
    from cskit.transforms import detail_slice
    assert detail_slice(16, 1) == slice(8, 16)
    assert detail_slice(16, 2) == slice(4, 8)
    assert detail_slice(16, 4) == slice(1, 2)
    with pytest.raises(ValueError):
        detail_slice(16, 5)


def test_operator_immutable():
    op = dft(4)
    with pytest.raises(AttributeError):
        op.scaling = 2.0


def test_custom_operator_shape_checks():
    op = LinearOperator(3, 2, lambda x: np.zeros(3), lambda y: np.zeros(2))
    with pytest.raises(ValueError):
        op.forward(np.zeros(3))
    with pytest.raises(ValueError):
        op.adjoint(np.zeros(2))
