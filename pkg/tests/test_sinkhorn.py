import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mubkit import catalog
from mubkit.errors import ConvergenceError, ValidationError
from mubkit.linalg import haar_unitary
from mubkit.mub import dephase_vector
from mubkit.musearch import _project, find_mu_vectors, mu_residual
from mubkit.sinkhorn import (
    is_doubly_quasistochastic,
    mu_vector_from_sinkhorn,
    sinkhorn_normalize,
    sum_residual,
)

seeds = st.integers(0, 2**32 - 1)


def test_identity_is_fixed():
    sf = sinkhorn_normalize(np.eye(4))
    assert sf.iterations == 0
    assert np.array_equal(sf.left, np.eye(4)) and np.array_equal(sf.right, np.eye(4))
    assert np.array_equal(sf.core, np.eye(4))


def test_fourier6_normal_form():
    sf = sinkhorn_normalize(catalog.fourier6(), tol=1e-10)
    assert sf.residual < 1e-10
    assert sum_residual(sf.core) < 1e-10


def test_is_doubly_quasistochastic():
    assert is_doubly_quasistochastic(np.eye(5))
    assert is_doubly_quasistochastic(np.full((4, 4), 0.25))
    assert not is_doubly_quasistochastic(catalog.fourier6())


@given(seeds, st.integers(2, 6))
def test_form_invariants(seed, d):
    r = np.random.default_rng(seed)
    u = haar_unitary(d, r)
    sf = sinkhorn_normalize(u, tol=1e-10, seed=seed)
    assert np.max(np.abs(sf.left @ u @ sf.right - sf.core)) < 1e-10
    assert sum_residual(sf.core) < 1e-10
    assert np.max(np.abs(sf.core.conj().T @ sf.core - np.eye(d))) < 1e-10
    for m in (sf.left, sf.right):
        assert np.allclose(np.abs(np.diagonal(m)), 1, atol=1e-14)
        assert np.count_nonzero(m - np.diag(np.diagonal(m))) == 0


def test_row_sum_identity_on_unitary_input(rng):
    for d in range(2, 7):
        u = haar_unitary(d, rng)
        assert abs(np.sum(np.abs(u @ np.ones(d)) ** 2) - d) < 1e-10


def test_rejects_non_unitary():
    with pytest.raises(ValidationError):
        sinkhorn_normalize(np.ones((3, 3)))
    with pytest.raises(ValidationError):
        sinkhorn_normalize(np.eye(1))


def test_budget_exhaustion_carries_best(rng):
    u = haar_unitary(6, rng)
    with pytest.raises(ConvergenceError) as info:
        sinkhorn_normalize(u, tol=1e-10, max_iter=1)
    assert info.value.best is not None
    assert info.value.best.residual > 0


def test_mu_vector_fourier6():
    f = catalog.fourier6()
    v = mu_vector_from_sinkhorn(f, 1e-10)
    assert np.allclose(np.abs(f.conj().T @ v), 1 / np.sqrt(6), atol=1e-9)
    assert np.allclose(np.abs(v), 1 / np.sqrt(6), atol=1e-9)


def test_mu_vector_identity():
    v = mu_vector_from_sinkhorn(np.eye(6))
    assert np.allclose(np.abs(v), 1 / np.sqrt(6), atol=1e-12)


@given(seeds, st.integers(2, 6))
def test_mu_vector_random(seed, d):
    u = haar_unitary(d, np.random.default_rng(seed))
    v = mu_vector_from_sinkhorn(u, 1e-10)
    assert mu_residual(u, v) < 1e-9
    assert np.array_equal(dephase_vector(v), v)
    # fixed point of the alternating map used by the search
    w, done, bad = _project(u, v[None, :].copy())
    assert done[0] and not bad[0]
    assert np.max(np.abs(w[0] - v)) < 1e-8


def test_mu_vector_of_spectral_is_in_search_set():
    s = find_mu_vectors(catalog.spectral(), trials=3000, seed=2)
    v = mu_vector_from_sinkhorn(catalog.spectral(), 1e-10)
    assert np.min(np.linalg.norm(s.vectors - v, axis=1)) < s.dedup_tol
