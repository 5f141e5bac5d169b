import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mubkit import catalog
from mubkit.catalog import (
    ALPHA,
    OMEGA,
    H2Params,
    H3Params,
    KarlssonParams,
    check_sr2,
    fourier3,
    fourier6,
    fourier_family,
    karlsson_matrix,
    karlsson_params_from_matrix,
    karlsson_validate,
)
from mubkit.detectors import scan_real_submatrix, scan_singular_order3, scan_subunitary
from mubkit.errors import PreconditionError, ValidationError
from mubkit.mub import dephase_matrix, is_chm, is_unitary, product_columns
from mubkit.schmidt import schmidt_rank

angles = st.floats(min_value=0, max_value=2 * np.pi, exclude_max=True)
# rows (0, 1, 2, 5, 3, 4) of the Fourier family sit in the H2-reducible frame
FRAME_ROWS = [0, 1, 2, 5, 3, 4]


def test_roots_of_unity():
    assert abs(OMEGA**3 - 1) < 1e-15
    assert abs(ALPHA**2 - OMEGA) < 1e-15


def test_fourier6_entries():
    f = fourier6()
    assert f.shape == (6, 6)
    assert np.allclose(f[0], 1 / np.sqrt(6), atol=0)
    j, k = 4, 5
    assert abs(f[j, k] - ALPHA ** (j * k) / np.sqrt(6)) < 1e-14
    assert is_chm(f)
    assert len(product_columns(f)) == 6


def test_constant_matrices_reproducible():
    for ctor in (fourier6, catalog.spectral, catalog.spectral_prime):
        assert np.array_equal(ctor(), ctor())


def test_spectral_matrices():
    s, sp = catalog.spectral(), catalog.spectral_prime()
    assert is_chm(s) and is_chm(sp)
    assert np.array_equal(s, s.T)
    assert schmidt_rank(s) == 4
    assert schmidt_rank(sp) == 3


def test_spectral_move_is_printed_equivalence():
    w = OMEGA
    d = np.diag([1, w, w**2, w, w**2, w])
    p = np.zeros((6, 6), dtype=complex)
    for r, c, v in [(0, 1, 1), (1, 5, w), (2, 4, 1), (3, 2, 1), (4, 3, w), (5, 0, 1)]:
        p[r, c] = v
    assert np.max(np.abs(d @ catalog.spectral() @ p - catalog.spectral_prime())) < 1e-12
    move = catalog.spectral_move()
    assert np.array_equal(move.left, d)
    assert np.allclose(move.right, p, atol=0)


@given(angles, angles)
def test_fourier_family_is_chm(a, b):
    assert is_chm(fourier_family(np.exp(1j * a), np.exp(1j * b)))


def test_fourier_family_first_column():
    assert np.allclose(fourier_family(1, 1)[:, 0], np.ones(6) / np.sqrt(6), atol=0)


def test_fourier_family_rejects_non_unimodular():
    with pytest.raises(ValidationError):
        fourier_family(1.1, 1)


def test_h1():
    assert schmidt_rank(catalog.h1()) == 1
    assert is_chm(catalog.h1())


def _h2_example():
    # V = i diag(1, 1, -1) W keeps V, W independent while satisfying the constraints
    w = fourier3()
    return H2Params(np.pi / 4, np.pi / 4, 0.0, 1j * np.diag([1, 1, -1]) @ w, w)


def test_h2_example_is_schmidt_rank_two_chm():
    p = _h2_example()
    report = check_sr2(p)
    assert report.satisfied, report.residuals
    u = catalog.h2(p)
    assert is_chm(u)
    assert schmidt_rank(u) == 2
    # the explicit formula at alpha = beta = pi/4, gamma = 0
    expected = 0.5 * np.block([[p.V + p.W, p.V - p.W], [p.V - p.W, p.V + p.W]])
    assert np.allclose(u, expected, atol=1e-15)


def test_h2_rejects_proportional_v_w():
    w = fourier3()
    with pytest.raises(ValidationError):
        H2Params(np.pi / 4, np.pi / 4, 0.0, 1j * w, w)


def test_h2_report_flags_violations():
    w = fourier3()
    p = H2Params(0.5, 0.5, 0.0, 1j * np.diag([1, 1, -1]) @ w, w)
    report = check_sr2(p)
    assert not report.satisfied
    assert abs(report.residuals["sr2-1"] - np.cos(1.0) ** 2) < 1e-12
    u = catalog.h2(p)
    assert is_unitary(u) and not is_chm(u)


@pytest.mark.parametrize("kwargs", [
    dict(alpha=-0.1), dict(alpha=1.0), dict(alpha=0.1, beta=0.1), dict(gamma=7.0),
])
def test_h2_param_validation(kwargs):
    w = fourier3()
    base = dict(alpha=np.pi / 4, beta=np.pi / 4, gamma=0.0, V=1j * np.diag([1, 1, -1]) @ w, W=w)
    base.update(kwargs)
    with pytest.raises(ValidationError):
        H2Params(**base)


@given(st.lists(angles, min_size=6, max_size=6),
       st.lists(st.floats(0, np.pi / 2), min_size=3, max_size=3))
def test_h3_is_unitary_with_rank_at_most_three(phases, alphas):
    p = H3Params(tuple(alphas), tuple(phases[:3]), tuple(phases[3:]), fourier3(), np.eye(3))
    u = catalog.h3(p)
    assert is_unitary(u)
    assert schmidt_rank(u) <= 3


def test_h3_default_is_rank_three_chm():
    u = catalog.build("h3")
    assert is_chm(u)
    assert schmidt_rank(u) == 3


def test_h3_zero_alphas_block_diagonal():
    p = H3Params((0.0, 0.0, 0.0), (0.0, 1.0, 2.0), (0.5, 0.0, 0.0), fourier3(), np.eye(3))
    u = catalog.h3(p)
    assert np.max(np.abs(u[:3, 3:])) == 0 and np.max(np.abs(u[3:, :3])) == 0
    assert schmidt_rank(u) <= 3
    hits = scan_singular_order3(u)
    assert any(h.rows == (0, 1, 2) and h.cols == (3, 4, 5) for h in hits)


def test_h3_requires_real_first_column_of_w():
    with pytest.raises(ValidationError):
        H3Params((0.0,) * 3, (0.0,) * 3, (0.0,) * 3, fourier3(), np.diag([1j, 1, 1]))


def test_sr3_example():
    v = fourier3()
    u = catalog.sr3_example(v)
    assert is_chm(u)
    assert schmidt_rank(u) == 3
    assert np.allclose(u[:3, :3], np.diag([-1j, 1j, 1]) @ v / np.sqrt(2), atol=1e-16)
    assert np.allclose(u[:3, 3:], v / np.sqrt(2), atol=0)


@given(st.lists(angles, min_size=6, max_size=6), st.booleans())
def test_sr3_example_unitary_for_any_order3_chm(phases, conj):
    d1 = np.diag(np.exp(1j * np.array(phases[:3])))
    d2 = np.diag(np.exp(1j * np.array(phases[3:])))
    v = d1 @ fourier3(conj) @ d2
    assert is_unitary(catalog.sr3_example(v))


def test_sr3_example_rejects_non_chm():
    with pytest.raises(ValidationError):
        catalog.sr3_example(np.eye(3))


def test_sr4_example_rank_four_against_gram_oracle():
    u = catalog.sr4_example(np.diag([1, OMEGA, OMEGA**2]), fourier3(), fourier3(True))
    assert is_chm(u)
    assert schmidt_rank(u) == 4
    # independent route: rank of the Gram matrix of the four 3x3 blocks
    blocks = [u[3 * j:3 * j + 3, 3 * k:3 * k + 3] for j in range(2) for k in range(2)]
    gram = np.array([[np.vdot(a, b) for b in blocks] for a in blocks])
    eig = np.linalg.eigvalsh(gram)
    assert np.sum(eig > 1e-10 * eig.max()) == 4


@pytest.mark.parametrize("d, v, w, code", [
    (np.eye(3), None, None, "d-proportional-to-identity"),
    (None, fourier3(), fourier3(), "v-w-dependent"),
    (None, fourier3(), np.diag([1, OMEGA, 1]) @ fourier3(), "wv-dagger-diagonal"),
])
def test_sr4_example_preconditions(d, v, w, code):
    with pytest.raises(PreconditionError) as info:
        catalog.sr4_example(d, v, w)
    assert info.value.code == code


def test_bjorck():
    b = catalog.bjorck()
    assert is_chm(b)
    assert schmidt_rank(b) == 2
    x, y = b[:3, :3], b[:3, 3:]
    assert np.allclose(b[3:, 3:], x, atol=1e-15) and np.allclose(b[3:, :3], y, atol=1e-15)
    for block in (x, y, b[3:, 3:], b[3:, :3]):
        padded = np.zeros((6, 6), dtype=complex)
        padded[:3, :3] = block
        assert not [h for h in scan_subunitary(padded, 3) if h.rows == (0, 1, 2)
                    and h.cols == (0, 1, 2)]


def test_dita_phase_exposes_real_submatrix():
    d = catalog.dita()
    assert is_chm(d)
    assert not scan_real_submatrix(d)
    rows = [r for r in range(6) if scan_real_submatrix(catalog.multiply_row(d, r, 1j))]
    assert rows


def test_karlsson_frame_from_fourier_family():
    rng = np.random.default_rng(5)
    for _ in range(20):
        z1, z2 = np.exp(2j * np.pi * rng.random(2))
        u = fourier_family(z1, z2)[FRAME_ROWS]
        p = karlsson_params_from_matrix(u)
        report = karlsson_validate(p)
        assert report.satisfied, report.residuals
        assert max(report.residuals.values()) < 1e-8
        assert report.is_unitary and report.is_chm
        assert np.allclose(karlsson_matrix(p), dephase_matrix(u)[0], atol=1e-12)


def test_karlsson_all_ones():
    p = KarlssonParams(*([1] * 16))
    report = karlsson_validate(p)
    for key in ("z1z3", "z2z3", "z1z4", "z2z4"):
        assert report.residuals[key] == 0
    assert not report.is_unitary


def test_karlsson_perturbation():
    p = karlsson_params_from_matrix(fourier_family(np.exp(0.4j), np.exp(2.0j))[FRAME_ROWS])
    q = p.replace(a1=p.a1 * np.exp(0.1j))
    report = karlsson_validate(q)
    assert abs(report.residuals["z1z3"] - abs(np.exp(0.1j) - 1)) < 1e-12
    assert report.residuals["z1z3"] > 1e-2
    assert not report.satisfied


def test_karlsson_params_need_unimodular():
    with pytest.raises(ValidationError):
        KarlssonParams(*([1] * 15 + [2]))


def test_karlsson_rejects_matrix_outside_frame():
    with pytest.raises(ValidationError):
        karlsson_params_from_matrix(catalog.spectral())


def test_catalog_registry_builds_everything():
    for name in catalog.CATALOG:
        u = catalog.build(name)
        assert is_unitary(u), name
    with pytest.raises(ValidationError):
        catalog.build("nope")
    with pytest.raises(ValidationError):
        catalog.build("fourier6", {"z1": "1"})
    u = catalog.build("fourier_family", {"z1": "phase:0.3", "z2": "0.6+0.8i"})
    assert np.allclose(u, fourier_family(np.exp(0.3j), 0.6 + 0.8j), atol=1e-15)


def test_every_catalog_constructor_is_chm(chms):
    for name, u in chms.items():
        assert is_chm(u), name
