"""Small dense complex linear algebra helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here
is sized for order-six problems (at most 9x9 after realignment), so the
routines favour clarity over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import ConvergenceError, ShapeError, ValidationError

ComplexMatrix = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole package.

    Attributes
    ----------
    structural_tol : float
        Unitarity, orthogonality and rank decisions.
    search_tol : float
        Residual accepted from iterative searches.
    dedup_tol : float
        Euclidean distance under which two vectors count as one.
    """

    structural_tol: float = 1e-10
    search_tol: float = 1e-8
    dedup_tol: float = 1e-6

    def __post_init__(self):
        for name in ("structural_tol", "search_tol", "dedup_tol"):
            value = getattr(self, name)
            if not 0 < value <= 1e-2:
                raise ValidationError(f"{name}={value!r} outside (0, 1e-2]")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class BipartiteShape:
    """Factorisation ``d = d_A * d_B`` of a matrix order."""

    d_A: int = 2
    d_B: int = 3

    def __post_init__(self):
        if self.d_A < 2 or self.d_B < 2:
            raise ValidationError(f"bipartite factors must be >= 2, got {self.d_A}x{self.d_B}")

    @property
    def order(self) -> int:
        return self.d_A * self.d_B

    @classmethod
    def parse(cls, text: str) -> "BipartiteShape":
        """Parse ``"2x3"`` style shape strings."""
        try:
            a, b = text.lower().split("x")
            return cls(int(a), int(b))
        except ValueError as exc:
            raise ValidationError(f"bad shape {text!r}, expected e.g. 2x3") from exc

    def __str__(self):
        return f"{self.d_A}x{self.d_B}"


DEFAULT_SHAPE = BipartiteShape()


def structural_tol(tol: Tolerances | float | None) -> float:
    """Resolve a tolerance argument to the structural threshold."""
    if tol is None:
        return DEFAULT_TOL.structural_tol
    if isinstance(tol, Tolerances):
        return tol.structural_tol
    return float(tol)


def as_matrix(a) -> ComplexMatrix:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def as_square(a, order: int | None = None) -> ComplexMatrix:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    if order is not None and m.shape[0] != order:
        raise ShapeError(f"expected order {order}, got {m.shape[0]}")
    return m


def kron(a, b) -> ComplexMatrix:
    """Kronecker product; entry ``(i*b.rows + k, j*b.cols + l) = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> ComplexMatrix:
    return as_matrix(a).conj().T


def transpose(a) -> ComplexMatrix:
    return as_matrix(a).T.copy()


def conjugate(a) -> ComplexMatrix:
    return as_matrix(a).conj()


def singular_values(a) -> npt.NDArray[np.float64]:
    """Singular values in descending order, ``min(rows, cols)`` of them."""
    m = as_matrix(a)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge for {m.shape} matrix") from exc


def numeric_rank(a, tol: Tolerances | float | None = None) -> int:
    """Number of singular values above ``structural_tol * sigma_max``.

    The threshold is relative, so the zero matrix has rank 0 and the result
    does not depend on the overall scale of ``a``.
    """
    s = singular_values(a)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > structural_tol(tol) * s[0]))


def partial_transpose(m, shape: BipartiteShape = DEFAULT_SHAPE) -> ComplexMatrix:
    """Transpose on the first tensor factor.

    Block ``(i, j)`` of the result, each ``d_B x d_B``, is block ``(j, i)`` of
    ``m``. The map is an involution.
    """
    m = as_square(m, shape.order)
    a, b = shape.d_A, shape.d_B
    return m.reshape(a, b, a, b).transpose(2, 1, 0, 3).reshape(a * b, a * b)


def haar_unitary(d: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_phases(n: int, rng: np.random.Generator) -> npt.NDArray[np.complex128]:
    return np.exp(2j * np.pi * rng.random(n))


def phase(x):
    """Entrywise ``x / |x|``; callers must rule out zeros."""
    return x / np.abs(x)
