"""Concrete order-six complex Hadamard matrices and parametrised families.

Roots of unity are built as ``exp`` of exact rational multiples of pi so that
structural residuals stay near machine epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import PreconditionError, ValidationError
from .linalg import (
    DEFAULT_TOL,
    ComplexMatrix,
    Tolerances,
    as_square,
    numeric_rank,
    structural_tol,
)
from .mub import EquivalenceMove, is_chm, is_unitary, permutation_matrix

OMEGA = np.exp(2j * np.pi / 3)
ALPHA = np.exp(1j * np.pi / 3)

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
SQRT6 = np.sqrt(6.0)


def _w(k: int) -> complex:
    return OMEGA ** (k % 3)


def fourier3(conjugate: bool = False) -> ComplexMatrix:
    """One of the two order-three CHM cores; every order-3 CHM is ``D1 @ core @ D2``."""
    f = np.array([[_w(j * k) for k in range(3)] for j in range(3)]) / SQRT3
    return f.conj() if conjugate else f


def fourier2() -> ComplexMatrix:
    return np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2


def fourier6() -> ComplexMatrix:
    """``F6[j, k] = exp(i pi j k / 3) / sqrt(6)``."""
    return np.array([[np.exp(1j * np.pi * ((j * k) % 6) / 3) for k in range(6)]
                     for j in range(6)]) / SQRT6


_SPECTRAL_EXPONENTS = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 2, 2],
    [0, 1, 0, 2, 2, 1],
    [0, 1, 2, 0, 1, 2],
    [0, 2, 2, 1, 0, 1],
    [0, 2, 1, 2, 1, 0],
]

_SPECTRAL_PRIME_EXPONENTS = [
    [0, 0, 0, 1, 0, 1],
    [0, 1, 2, 1, 2, 2],
    [0, 2, 1, 2, 2, 1],
    [0, 1, 1, 0, 0, 0],
    [0, 2, 0, 0, 1, 2],
    [1, 1, 0, 0, 2, 1],
]


def _omega_matrix(exponents) -> ComplexMatrix:
    return np.array([[_w(k) for k in row] for row in exponents]) / SQRT6


def spectral() -> ComplexMatrix:
    """The spectral matrix, dephased, entries powers of omega over sqrt(6)."""
    return _omega_matrix(_SPECTRAL_EXPONENTS)


def spectral_prime() -> ComplexMatrix:
    """Equivalent form of the spectral matrix with Schmidt rank three."""
    return _omega_matrix(_SPECTRAL_PRIME_EXPONENTS)


def spectral_move() -> EquivalenceMove:
    """Move ``(D, P)`` with ``D @ spectral() @ P == spectral_prime()``."""
    left = np.diag([_w(k) for k in (0, 1, 2, 1, 2, 1)])
    right = permutation_matrix([1, 5, 4, 2, 3, 0], [1, OMEGA, 1, 1, OMEGA, 1])
    return EquivalenceMove(left, right)


def _check_unimodular(name: str, z: complex, tol: float):
    if abs(abs(z) - 1) >= tol:
        raise ValidationError(f"{name}={z!r} is not unimodular")


def fourier_family(z1: complex = 1, z2: complex = 1,
                   tol: Tolerances | float | None = None) -> ComplexMatrix:
    """Standard form of the two-parameter Fourier family."""
    t = structural_tol(tol)
    _check_unimodular("z1", z1, t)
    _check_unimodular("z2", z2, t)
    w, w2 = OMEGA, OMEGA**2
    m = np.array([
        [1, 1, 1, 1, 1, 1],
        [1, -1, z1, -z1, z2, -z2],
        [1, 1, w, w, w2, w2],
        [1, -1, w * z1, -w * z1, w2 * z2, -w2 * z2],
        [1, 1, w2, w2, w, w],
        [1, -1, w2 * z1, -w2 * z1, w * z2, -w * z2],
    ], dtype=complex)
    return m / SQRT6


def h1() -> ComplexMatrix:
    """Schmidt-rank-one representative ``F2 (x) F3``."""
    return np.kron(fourier2(), fourier3())


# --------------------------------------------------------------------------
# Schmidt-rank-two and -three parametrisations


def _rank_of_stack(v, w, tol) -> int:
    return numeric_rank(np.vstack([np.ravel(v), np.ravel(w)]), tol)


@dataclass(frozen=True)
class H2Params:
    alpha: float
    beta: float
    gamma: float
    V: ComplexMatrix
    W: ComplexMatrix

    def __post_init__(self):
        t = DEFAULT_TOL.structural_tol
        quarter = np.pi / 4
        for name in ("alpha", "beta"):
            x = getattr(self, name)
            if not -t <= x <= quarter + t:
                raise ValidationError(f"{name}={x} outside [0, pi/4]")
        if self.alpha + self.beta < quarter - t:
            raise ValidationError("alpha + beta < pi/4")
        if not 0 <= self.gamma < 2 * np.pi:
            raise ValidationError(f"gamma={self.gamma} outside [0, 2pi)")
        for name in ("V", "W"):
            m = as_square(getattr(self, name), 3)
            if not is_unitary(m):
                raise ValidationError(f"{name} is not unitary")
            object.__setattr__(self, name, m)
        if _rank_of_stack(self.V, self.W, t) != 2:
            raise ValidationError("V and W are linearly dependent")


def h2(p: H2Params) -> ComplexMatrix:
    """Assemble the Schmidt-rank-two form; a CHM only if :func:`check_sr2` passes."""
    ca, sa = np.cos(p.alpha), np.sin(p.alpha)
    cb, sb = np.cos(p.beta), np.sin(p.beta)
    g = np.exp(1j * p.gamma)
    left = np.array([[ca, sa], [g * sa, -g * ca]])
    right = np.array([[cb, sb], [sb, -cb]])
    mid = np.zeros((6, 6), dtype=complex)
    mid[:3, :3] = p.V
    mid[3:, 3:] = p.W
    return np.kron(left, np.eye(3)) @ mid @ np.kron(right, np.eye(3))


@dataclass
class Sr2Report:
    """Worst entrywise residual of each constraint on ``(alpha, beta, V, W)``."""

    residuals: dict[str, float]
    tol: float

    @property
    def satisfied(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())


def check_sr2(p: H2Params, tol: Tolerances | float | None = None) -> Sr2Report:
    """Evaluate the entrywise constraints that make :func:`h2` a CHM.

    The angle condition is already enforced by :class:`H2Params`, so only
    the four entrywise equations are reported (keys ``"sr2-1"`` .. ``"sr2-4"``).
    """
    v, w = p.V, p.W
    c2a, c2b = np.cos(2 * p.alpha), np.cos(2 * p.beta)
    s2a, s2b = np.sin(2 * p.alpha), np.sin(2 * p.beta)
    cross = (v * w.conj() + v.conj() * w).real
    av2, aw2 = np.abs(v) ** 2, np.abs(w) ** 2
    residuals = {
        "sr2-1": np.max(np.abs(c2a * c2b + 1.5 * cross * s2a * s2b)),
        "sr2-2": np.max(np.abs(av2 + aw2 - 2 / 3)),
        "sr2-3": np.max(np.abs((av2 - 1 / 3) * c2a)),
        "sr2-4": np.max(np.abs((av2 - 1 / 3) * c2b)),
    }
    return Sr2Report({k: float(x) for k, x in residuals.items()}, structural_tol(tol))


@dataclass(frozen=True)
class H3Params:
    alphas: tuple[float, float, float]
    betas: tuple[float, float, float]
    gammas: tuple[float, float, float]
    V: ComplexMatrix
    W: ComplexMatrix

    def __post_init__(self):
        t = DEFAULT_TOL.structural_tol
        for a in self.alphas:
            if not -t <= a <= np.pi / 2 + t:
                raise ValidationError(f"alpha={a} outside [0, pi/2]")
        for x in (*self.betas, *self.gammas):
            if not 0 <= x < 2 * np.pi:
                raise ValidationError(f"angle {x} outside [0, 2pi)")
        for name in ("V", "W"):
            m = as_square(getattr(self, name), 3)
            if not is_unitary(m):
                raise ValidationError(f"{name} is not unitary")
            object.__setattr__(self, name, m)
        col = self.W[:, 0]
        if np.any(np.abs(col.imag) > t) or np.any(col.real < -t):
            raise ValidationError("first column of W must be real and nonnegative")


def h3(p: H3Params) -> ComplexMatrix:
    """Assemble the Schmidt-rank-three (controlled-unitary) form."""
    mid = np.zeros((6, 6), dtype=complex)
    for k, (a, b, g) in enumerate(zip(p.alphas, p.betas, p.gammas)):
        ca, sa = np.cos(a), np.sin(a)
        mid[k, k] = ca
        mid[k, k + 3] = np.exp(1j * g) * sa
        mid[k + 3, k] = np.exp(1j * b) * sa
        mid[k + 3, k + 3] = -np.exp(1j * (b + g)) * ca
    i2 = np.eye(2)
    return np.kron(i2, p.V) @ mid @ np.kron(i2, p.W)


def sr3_example(v=None) -> ComplexMatrix:
    """Schmidt-rank-three CHM built from an order-three CHM ``v``."""
    v = fourier3() if v is None else as_square(v, 3)
    if not is_chm(v):
        raise ValidationError("v is not an order-three CHM")
    top = np.hstack([np.diag([-1j, 1j, 1]) @ v, v])
    bottom = np.hstack([v, np.diag([-1j, 1j, -1]) @ v])
    return np.vstack([top, bottom]) / SQRT2


def sr4_example(d=None, v=None, w=None) -> ComplexMatrix:
    """Schmidt-rank-four ``2 x d_B`` CHM ``[[D V, D W], [V, -W]] / sqrt(2)``."""
    d = np.diag([1, OMEGA, OMEGA**2]) if d is None else as_square(d)
    n = d.shape[0]
    v = fourier3() if v is None else as_square(v, n)
    w = fourier3(conjugate=True) if w is None else as_square(w, n)
    t = DEFAULT_TOL.structural_tol
    off = d - np.diag(np.diagonal(d))
    if np.max(np.abs(off)) > t or not is_unitary(d):
        raise PreconditionError("d-not-diagonal-unitary")
    for name, m in (("v", v), ("w", w)):
        if not is_chm(m):
            raise PreconditionError(f"{name}-not-chm")
    if np.max(np.abs(d - d[0, 0] * np.eye(n))) < t:
        raise PreconditionError("d-proportional-to-identity")
    if _rank_of_stack(v, w, t) < 2:
        raise PreconditionError("v-w-dependent")
    wv = w @ v.conj().T
    if np.max(np.abs(wv - np.diag(np.diagonal(wv)))) < t:
        raise PreconditionError("wv-dagger-diagonal")
    return np.block([[d @ v, d @ w], [v, -w]]) / SQRT2


# --------------------------------------------------------------------------
# Literature matrices, validated on construction


def bjorck() -> ComplexMatrix:
    """Björck's circulant CHM of order six.

    First row ``(1, i d, -d, -i, -d*, i d*)`` with
    ``d = (1 - sqrt3)/2 + i sqrt(sqrt3/2)``; rows are cyclic shifts.
    """
    from .detectors import subunitary_residual
    from .schmidt import schmidt_rank

    d = (1 - SQRT3) / 2 + 1j * np.sqrt(SQRT3 / 2)
    first = np.array([1, 1j * d, -d, -1j, -d.conjugate(), 1j * d.conjugate()])
    m = np.array([np.roll(first, k) for k in range(6)]) / SQRT6
    x, y = m[:3, :3], m[:3, 3:]
    t = DEFAULT_TOL.structural_tol
    if not is_chm(m):
        raise ValidationError("bjorck: not a CHM")
    if np.max(np.abs(m[3:, 3:] - x)) > t or np.max(np.abs(m[3:, :3] - y)) > t:
        raise ValidationError("bjorck: not of block form [[X, Y], [Y, X]]")
    if subunitary_residual(x) < t or subunitary_residual(y) < t:
        raise ValidationError("bjorck: a diagonal block is subunitary")
    if schmidt_rank(m) != 2:
        raise ValidationError("bjorck: Schmidt rank is not 2")
    return m


_DITA_STANDARD = np.array([
    [1, 1, 1, 1, 1, 1],
    [1, -1, 1j, -1j, -1j, 1j],
    [1, 1j, -1, 1j, -1j, -1j],
    [1, -1j, 1j, -1, 1j, -1j],
    [1, -1j, -1j, 1j, -1, 1j],
    [1, 1j, -1j, -1j, 1j, -1],
])


def dita() -> ComplexMatrix:
    """Dita's matrix ``D0`` with its last row multiplied by ``i``.

    The dephased standard form needs two rows multiplied by ``i`` before a
    real 3x2 submatrix appears; this equivalent representative needs one.
    """
    from .detectors import scan_real_submatrix

    m = _DITA_STANDARD.astype(complex)
    m[5] *= 1j
    m /= SQRT6
    if not is_chm(m):
        raise ValidationError("dita: not a CHM")
    if scan_real_submatrix(m):
        raise ValidationError("dita: already contains a real 3x2 submatrix")
    if not any(scan_real_submatrix(multiply_row(m, r, 1j)) for r in range(6)):
        raise ValidationError("dita: no single row phase exposes a real 3x2 submatrix")
    return m


def multiply_row(u, row: int, factor: complex) -> ComplexMatrix:
    out = np.array(u, dtype=complex)
    out[row] *= factor
    return out


# --------------------------------------------------------------------------
# Karlsson frame for H2-reducible matrices

_KARLSSON_NAMES = ("z1", "z2", "z3", "z4", "a1", "a2", "a3", "b1", "b2", "b3",
                   "c1", "c2", "c3", "d1", "d2", "d3")


@dataclass(frozen=True)
class KarlssonParams:
    z1: complex
    z2: complex
    z3: complex
    z4: complex
    a1: complex
    a2: complex
    a3: complex
    b1: complex
    b2: complex
    b3: complex
    c1: complex
    c2: complex
    c3: complex
    d1: complex
    d2: complex
    d3: complex

    def __post_init__(self):
        t = DEFAULT_TOL.structural_tol
        for f in fields(self):
            _check_unimodular(f.name, getattr(self, f.name), t)

    def replace(self, **changes) -> "KarlssonParams":
        values = {name: getattr(self, name) for name in _KARLSSON_NAMES}
        values.update(changes)
        return KarlssonParams(**values)


def karlsson_matrix(p: KarlssonParams) -> ComplexMatrix:
    m = np.array([
        [1, 1, 1, 1, 1, 1],
        [1, -1, p.z1, -p.z1, p.z2, -p.z2],
        [1, p.z3, p.a1, p.a2, p.b1, p.b2],
        [1, -p.z3, p.a1 * p.a3, -p.a2 * p.a3, p.b1 * p.b3, -p.b2 * p.b3],
        [1, p.z4, p.c1, p.c2, p.d1, p.d2],
        [1, -p.z4, p.c1 * p.c3, -p.c2 * p.c3, p.d1 * p.d3, -p.d2 * p.d3],
    ], dtype=complex)
    return m / SQRT6


def karlsson_params_from_matrix(u, tol: Tolerances | float | None = None) -> KarlssonParams:
    """Read the sixteen parameters off a matrix already laid out in the frame.

    ``u`` is dephased first; raises if the dephased matrix does not have the
    sign pattern of the frame.
    """
    from .mub import dephase_matrix

    m, _ = dephase_matrix(u)
    m = m * SQRT6
    a1, b1, c1, d1 = m[2, 2], m[2, 4], m[4, 2], m[4, 4]
    p = KarlssonParams(
        z1=m[1, 2], z2=m[1, 4], z3=m[2, 1], z4=m[4, 1],
        a1=a1, a2=m[2, 3], a3=m[3, 2] / a1,
        b1=b1, b2=m[2, 5], b3=m[3, 4] / b1,
        c1=c1, c2=m[4, 3], c3=m[5, 2] / c1,
        d1=d1, d2=m[4, 5], d3=m[5, 4] / d1,
    )
    if np.max(np.abs(karlsson_matrix(p) * SQRT6 - m)) > 10 * structural_tol(tol):
        raise ValidationError("matrix is not laid out in the H2-reducible frame")
    return p


KARLSSON_EQUATIONS = ("z1z3", "z2z3", "z1z4", "z2z4", "a1+a3", "z3a1+a3", "b1+b3", "z3b1+b3")


@dataclass
class KarlssonReport:
    residuals: dict[str, float]
    tol: float
    is_unitary: bool
    is_chm: bool

    @property
    def satisfied(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())


def karlsson_validate(p: KarlssonParams, tol: Tolerances | float | None = None) -> KarlssonReport:
    """Residual of each of the eight relations among the frame parameters.

    ``tol`` defaults to the search tolerance: parameters usually come from a
    numerical pipeline rather than exact data.
    """
    t = DEFAULT_TOL.search_tol if tol is None else (
        tol.search_tol if isinstance(tol, Tolerances) else float(tol))
    c = np.conj
    z1, z2, z3, z4 = p.z1, p.z2, p.z3, p.z4
    a1, a2, b1, b2, c1, c2, d1, d2 = p.a1, p.a2, p.b1, p.b2, p.c1, p.c2, p.d1, p.d2

    def plus(x1, x2, zz):
        return x1 + x2 + zz * (c(x2) - c(x1))

    def minus(x1, x2, zz):
        return x1 + x2 - zz * (c(x2) - c(x1))

    res = {
        "z1z3": z1 * z3 - a1 * a2 * p.a3,
        "z2z3": z2 * z3 - b1 * b2 * p.b3,
        "z1z4": z1 * z4 - c1 * c2 * p.c3,
        "z2z4": z2 * z4 - d1 * d2 * p.d3,
        "a1+a3": plus(a1, a2, z1 * z3) - plus(d1, d2, z2 * z4),
        "z3a1+a3": c(z3) * minus(a1, a2, z1 * z3) - c(z4) * minus(d1, d2, z2 * z4),
        "b1+b3": plus(b1, b2, z2 * z3) - plus(c1, c2, z1 * z4),
        "z3b1+b3": c(z3) * minus(b1, b2, z2 * z3) - c(z4) * minus(c1, c2, z1 * z4),
    }
    m = karlsson_matrix(p)
    return KarlssonReport({k: float(abs(v)) for k, v in res.items()}, t,
                          is_unitary(m), is_chm(m))


# --------------------------------------------------------------------------
# Registry used by the command line


def _parse_complex(text: str) -> complex:
    text = text.strip()
    if text.startswith("phase:"):
        return complex(np.exp(1j * float(text[6:])))
    return complex(text.replace("i", "j"))


def _default_h2() -> H2Params:
    w = fourier3()
    return H2Params(np.pi / 4, np.pi / 4, 0.0, 1j * np.diag([1, 1, -1]) @ w, w)


def _build_h2(params):
    base = _default_h2()
    return h2(H2Params(float(params.get("alpha", base.alpha)), float(params.get("beta", base.beta)),
                       float(params.get("gamma", base.gamma)), base.V, base.W))


def _build_h3(params):
    def three(prefix, default):
        return tuple(float(params.get(f"{prefix}{k}", default)) for k in (1, 2, 3))
    return h3(H3Params(three("alpha", np.pi / 4), _phases(params, "beta"),
                       _phases(params, "gamma"), fourier3(), np.eye(3)))


def _phases(params, prefix):
    # default (0, pi/2, pi) makes the three controlled blocks independent
    return tuple(float(params.get(f"{prefix}{k + 1}", k * np.pi / 2)) for k in range(3))


def _build_karlsson(params):
    base = karlsson_params_from_matrix(fourier_family()[[0, 1, 2, 5, 3, 4]])
    return karlsson_matrix(base.replace(**{k: _parse_complex(v) for k, v in params.items()}))


CATALOG = {
    "fourier6": lambda params: fourier6(),
    "spectral": lambda params: spectral(),
    "spectral_prime": lambda params: spectral_prime(),
    "fourier_family": lambda params: fourier_family(
        _parse_complex(params.get("z1", "1")), _parse_complex(params.get("z2", "1"))),
    "h1": lambda params: h1(),
    "h2": _build_h2,
    "h3": _build_h3,
    "sr3_example": lambda params: sr3_example(fourier3(conjugate=params.get("core", "0") == "1")),
    "sr4_example": lambda params: sr4_example(),
    "bjorck": lambda params: bjorck(),
    "dita": lambda params: dita(),
    "karlsson": _build_karlsson,
}

CATALOG_PARAMS = {
    "fourier_family": ("z1", "z2"),
    "h2": ("alpha", "beta", "gamma"),
    "h3": tuple(f"{p}{k}" for p in ("alpha", "beta", "gamma") for k in (1, 2, 3)),
    "sr3_example": ("core",),
    "karlsson": _KARLSSON_NAMES,
}


def build(name: str, params: dict[str, str] | None = None) -> ComplexMatrix:
    """Construct catalog entry ``name`` with string-valued parameters."""
    params = dict(params or {})
    if name not in CATALOG:
        raise ValidationError(f"unknown catalog name {name!r}")
    unknown = set(params) - set(CATALOG_PARAMS.get(name, ()))
    if unknown:
        raise ValidationError(f"{name} does not take parameters {sorted(unknown)}")
    return CATALOG[name](params)
