import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mubkit import catalog
from mubkit.errors import ConvergenceError, ShapeError, ValidationError
from mubkit.linalg import (
    BipartiteShape,
    Tolerances,
    as_matrix,
    dagger,
    haar_unitary,
    kron,
    numeric_rank,
    partial_transpose,
    singular_values,
    transpose,
    conjugate,
)
from mubkit.schmidt import realign

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))


def test_kron_gives_h1():
    assert np.allclose(kron(catalog.fourier2(), catalog.fourier3()), catalog.h1(), atol=1e-15)


def test_kron_index_law(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    k = kron(a, b)
    assert k.shape == (6, 6)
    for i, j, p, q in [(0, 1, 2, 0), (1, 0, 1, 2), (1, 1, 0, 0)]:
        assert abs(k[i * 3 + p, j * 3 + q] - a[i, j] * b[p, q]) < 1e-15 * abs(a[i, j] * b[p, q]) + 1e-300


@given(seeds)
def test_kron_associative(seed):
    r = np.random.default_rng(seed)
    a, b, c = (np.exp(2j * np.pi * r.random((2, 2))) for _ in range(3))
    assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) < 1e-15


def test_singular_values_simple():
    assert np.allclose(singular_values(np.eye(6)), np.ones(6))
    assert np.allclose(singular_values(np.diag([1.0, 2.0])), [2.0, 1.0])


def test_singular_values_of_realigned_spectral_match_charpoly_oracle():
    r = realign(catalog.spectral())
    # independent route: roots of the characteristic polynomial of R R^H
    gram = r @ r.conj().T
    roots = np.sort(np.sqrt(np.abs(np.roots(np.poly(gram)).real)))[::-1]
    sv = singular_values(r)
    assert np.allclose(sv, roots, atol=1e-7)
    assert np.sum(sv > 1e-10) == 4
    # frozen from the oracle above
    assert np.allclose(sv, [1.6054128033591940, 1.1927488129570178, 1.0, 1.0], atol=1e-12)


def test_singular_values_nonfinite_rejected():
    with pytest.raises(ValidationError):
        singular_values(np.array([[np.nan, 0], [0, 1]]))


def test_singular_values_wraps_lapack_failure(monkeypatch):
    def boom(*a, **k):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(np.linalg, "svd", boom)
    with pytest.raises(ConvergenceError):
        singular_values(np.eye(2))


@given(seeds)
def test_singular_values_adjoint_invariant(seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(4, 9)) + 1j * r.normal(size=(4, 9))
    assert np.allclose(singular_values(a), singular_values(dagger(a)), atol=1e-12)


def test_numeric_rank_cases():
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank(np.eye(6)) == 6
    assert numeric_rank(np.full((3, 2), 1 / np.sqrt(6))) == 1


def test_numeric_rank_is_relative():
    m = np.diag([1.0, 1e-12])
    assert numeric_rank(m) == 1
    assert numeric_rank(m * 1e-20) == 1
    assert numeric_rank(np.diag([1.0, 1e-9]) * 1e-20) == 2


def test_partial_transpose_product_law(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(partial_transpose(kron(a, b)), kron(a.T, b), atol=1e-15)


def test_partial_transpose_blocks(rng):
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    pt = partial_transpose(m)
    assert np.array_equal(pt[:3, 3:], m[3:, :3])
    assert np.array_equal(pt[3:, :3], m[:3, 3:])
    assert np.array_equal(partial_transpose(pt), m)


def test_partial_transpose_bell_projector():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    pt = partial_transpose(np.outer(psi, psi), BipartiteShape(2, 2))
    # frozen from a hand computation: swap-operator spectrum / 2
    assert np.allclose(np.sort(np.linalg.eigvalsh(pt)), [-0.5, 0.5, 0.5, 0.5], atol=1e-14)


def test_partial_transpose_shape_mismatch():
    with pytest.raises(ShapeError):
        partial_transpose(np.eye(5))


def test_dagger_family(chms):
    assert np.array_equal(dagger(np.eye(6)), np.eye(6))
    s = catalog.spectral()
    assert np.array_equal(dagger(dagger(s)), s)
    assert np.array_equal(dagger(s), transpose(conjugate(s)))
    for name, u in chms.items():
        assert np.max(np.abs(dagger(u) @ u - np.eye(6))) < 1e-12, name


def test_as_matrix_validation():
    with pytest.raises(ShapeError):
        as_matrix(np.ones(3))
    with pytest.raises(ValidationError):
        as_matrix([[np.inf]])


def test_tolerances_bounds():
    Tolerances(1e-2, 1e-2, 1e-2)
    for bad in (0.0, -1e-3, 0.1):
        with pytest.raises(ValidationError):
            Tolerances(structural_tol=bad)


def test_bipartite_shape():
    assert BipartiteShape() == BipartiteShape(2, 3)
    assert BipartiteShape.parse("3X2").order == 6
    assert str(BipartiteShape(2, 3)) == "2x3"
    with pytest.raises(ValidationError):
        BipartiteShape(1, 6)
    with pytest.raises(ValidationError):
        BipartiteShape.parse("six")


@given(seeds)
def test_block_rank_property(seed):
    r = np.random.default_rng(seed)
    u = haar_unitary(6, r)
    v0, v3 = u[:3, :3], u[3:, 3:]
    r0, r3 = numeric_rank(v0), numeric_rank(v3)
    assert (r0 == 3) == (r3 == 3)
    assert r0 + r3 <= 6 - 2 * (3 - r0)


def test_block_rank_on_block_structured_unitaries(chms):
    # catalog matrices with exact zero or singular blocks exercise the non-generic branch
    h3_zero = catalog.h3(catalog.H3Params((0.0, 0.0, 0.0), (0.0,) * 3, (0.0,) * 3,
                                          catalog.fourier3(), np.eye(3)))
    for u in [*chms.values(), h3_zero, np.eye(6), np.roll(np.eye(6), 3, axis=0)]:
        v0, v3 = u[:3, :3], u[3:, 3:]
        r0, r3 = numeric_rank(v0), numeric_rank(v3)
        assert (r0 == 3) == (r3 == 3)
        assert r0 + r3 <= 6 - 2 * (3 - r0)
