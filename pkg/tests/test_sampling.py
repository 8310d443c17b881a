"""Sampling models: determinism, distributions, restriction, serialization."""
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cskit import (SampleSet, SparseModel, dft, haar, random_model, restrict,
                   sample_bernoulli, sample_uniform)

from oracles import adjoint_mismatch, dense_matrix


# ------------------------------------------------------------- uniform

def test_uniform_full_set():
    om = sample_uniform(8, 8, seed=1)
    np.testing.assert_array_equal(om.indices, np.arange(8))


def test_uniform_determinism():
    a = sample_uniform(100, 17, seed=42)
    b = sample_uniform(100, 17, seed=42)
    np.testing.assert_array_equal(a.indices, b.indices)
    assert (a.indices != sample_uniform(100, 17, seed=43).indices).any()


def test_uniform_properties():
    om = sample_uniform(50, 20, seed=7)
    assert om.size == 20
    assert len(set(om.indices.tolist())) == 20
    assert om.indices.min() >= 0 and om.indices.max() < 50
    assert (np.diff(om.indices) > 0).all()
    assert om.model == "uniform_m"


@pytest.mark.parametrize("m", [0, 5])
def test_uniform_rejects_bad_m(m):
    with pytest.raises(ValueError):
        sample_uniform(4, m, seed=0)


def test_uniform_subset_frequencies():
    # n=4, m=2: all six subsets equally likely to within 0.01 of 1/6
    counts = {frozenset(c): 0 for c in itertools.combinations(range(4), 2)}
    draws = 100_000
    for s in range(draws):
        om = sample_uniform(4, 2, seed=s)
        counts[frozenset(om.indices.tolist())] += 1
    for c, k in counts.items():
        assert abs(k / draws - 1 / 6) <= 0.01, (set(c), k / draws)


# ------------------------------------------------------------- bernoulli

def test_bernoulli_full_probability():
    om = sample_bernoulli(16, 16, seed=3)
    np.testing.assert_array_equal(om.indices, np.arange(16))


def test_bernoulli_mean_size():
    sizes = [sample_bernoulli(1000, 100, seed=s).size for s in range(10_000)]
    assert abs(np.mean(sizes) - 100) <= 3


def test_bernoulli_empty_set_is_legal():
    # empty draws occur with positive probability and must be representable
    empty = None
    for s in range(500):
        om = sample_bernoulli(50, 1, seed=s)
        if om.size == 0:
            empty = om
            break
    assert empty is not None
    assert empty.indices.shape == (0,)
    rt = SampleSet.from_dict(json.loads(empty.to_json()))
    assert rt.size == 0


def test_bernoulli_rejects_bad_m():
    with pytest.raises(ValueError):
        sample_bernoulli(10, 0, seed=0)
    with pytest.raises(ValueError):
        sample_bernoulli(10, 11, seed=0)


# ------------------------------------------------------------- model

def test_model_full_support():
    mod = random_model(12, 12, seed=5)
    np.testing.assert_array_equal(mod.support, np.arange(12))


def test_model_sign_mean():
    means = [random_model(64, 8, seed=s).signs.mean() for s in range(10_000)]
    assert -0.03 <= np.mean(means) <= 0.03


def test_model_determinism():
    a = random_model(64, 8, seed=9)
    b = random_model(64, 8, seed=9)
    np.testing.assert_array_equal(a.support, b.support)
    np.testing.assert_array_equal(a.signs, b.signs)


def test_model_rejects_bad_s():
    with pytest.raises(ValueError):
        random_model(10, 0, seed=0)
    with pytest.raises(ValueError):
        random_model(10, 11, seed=0)


def test_model_vector_and_flip():
    mod = random_model(16, 4, seed=2)
    x = mod.vector()
    assert np.abs(x).sum() == 4
    np.testing.assert_array_equal(mod.flipped().vector(), -x)


# ------------------------------------------------------------- restrict

def test_restrict_full_rows_behaves_as_original(rng):
    A = dft(16)
    om = sample_uniform(16, 16, seed=0)
    R = restrict(A, om)
    x = rng.standard_normal(16)
    np.testing.assert_allclose(R.forward(x), A.forward(x), atol=1e-12)


def test_restrict_adjoint(rng):
    R = restrict(dft(32), sample_uniform(32, 10, seed=4))
    assert adjoint_mismatch(R, rng, trials=50) <= 1e-10


def test_restrict_dense_rows_oracle(rng):
    A = dft(16)
    om = sample_uniform(16, 6, seed=8)
    R = restrict(A, om)
    M = dense_matrix(A)[om.indices]
    x = rng.standard_normal(16)
    np.testing.assert_allclose(R.forward(x), M @ x, atol=1e-10)


def test_restrict_projection_oracle(rng):
    # adjoint(forward(x)) equals dense A* P_Omega A x
    A = haar(32)
    om = sample_uniform(32, 12, seed=6)
    R = restrict(A, om)
    M = dense_matrix(A)
    P = np.zeros((32, 32))
    P[om.indices, om.indices] = 1.0
    x = rng.standard_normal(32)
    np.testing.assert_allclose(R.adjoint(R.forward(x)),
                               M.conj().T @ (P @ (M @ x)), atol=1e-10)


def test_restrict_rejects_out_of_range():
    with pytest.raises((IndexError, ValueError)):
        restrict(dft(8), np.array([3, 9]))


# ------------------------------------------------------------- serialization

def test_sampleset_json_roundtrip():
    om = sample_uniform(32, 5, seed=77)
    rt = SampleSet.from_dict(json.loads(om.to_json()))
    assert rt == om


def test_model_json_roundtrip():
    mod = random_model(32, 5, seed=77)
    rt = SparseModel.from_dict(json.loads(mod.to_json()))
    assert rt.n == mod.n
    np.testing.assert_array_equal(rt.support, mod.support)
    np.testing.assert_array_equal(rt.signs, mod.signs)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 128), st.data())
def test_roundtrips_hypothesis(n, data):
    s = data.draw(st.integers(1, n))
    seed = data.draw(st.integers(0, 2**63 - 1))
    mod = random_model(n, s, seed)
    rt = SparseModel.from_dict(json.loads(mod.to_json()))
    np.testing.assert_array_equal(rt.support, mod.support)
    om = sample_uniform(n, s, seed)
    assert SampleSet.from_dict(json.loads(om.to_json())) == om


# ------------------------------------------------------------- validation

def test_sampleset_validation():
    with pytest.raises(ValueError):
        SampleSet(8, np.array([3, 1]), "uniform_m", 0)  # unsorted
    with pytest.raises(ValueError):
        SampleSet(8, np.array([1, 9]), "uniform_m", 0)  # out of range
    with pytest.raises(ValueError):
        SampleSet(8, np.array([2, 2]), "uniform_m", 0)  # duplicate


def test_sparsemodel_validation():
    with pytest.raises(ValueError):
        SparseModel(8, np.array([1, 2]), np.array([1.0]))
    with pytest.raises(ValueError):
        SparseModel(8, np.array([1, 2]), np.array([1.0, 0.5]))
