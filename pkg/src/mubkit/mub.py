"""Unbiasedness predicates, dephasing, equivalence moves and product columns."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ShapeError, ValidationError
from .linalg import (
    DEFAULT_SHAPE,
    BipartiteShape,
    ComplexMatrix,
    Tolerances,
    as_matrix,
    as_square,
    numeric_rank,
    phase,
    structural_tol,
)


def is_unitary(u, tol: Tolerances | float | None = None) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    gram = u.conj().T @ u
    return bool(np.max(np.abs(gram - np.eye(u.shape[0]))) < structural_tol(tol))


def is_chm(u, tol: Tolerances | float | None = None) -> bool:
    """Unitary with every entry of modulus ``1/sqrt(d)``."""
    u = as_matrix(u)
    if not is_unitary(u, tol):
        return False
    target = 1 / np.sqrt(u.shape[0])
    return bool(np.max(np.abs(np.abs(u) - target)) < structural_tol(tol))


def are_unbiased(b1, b2, tol: Tolerances | float | None = None) -> bool:
    """True iff every column of ``b1`` is unbiased to every column of ``b2``."""
    b1, b2 = as_square(b1), as_square(b2)
    if b1.shape != b2.shape:
        raise ShapeError(f"order mismatch: {b1.shape[0]} vs {b2.shape[0]}")
    overlaps = np.abs(b1.conj().T @ b2)
    return bool(np.max(np.abs(overlaps - 1 / np.sqrt(b1.shape[0]))) < structural_tol(tol))


def is_mub_trio(u, v, w, tol: Tolerances | float | None = None) -> bool:
    """Check whether ``{I, u, v, w}`` are four mutually unbiased bases.

    Only verifies the supplied triple; it never searches for one.
    """
    for name, m in (("u", u), ("v", v), ("w", w)):
        if not is_chm(m, tol):
            raise ValidationError(f"{name} is not a complex Hadamard matrix")
    u, v, w = as_matrix(u), as_matrix(v), as_matrix(w)
    return all(is_chm(x.conj().T @ y, tol) for x, y in ((u, v), (v, w), (w, u)))


def is_complex_permutation(m, tol: Tolerances | float | None = None) -> bool:
    """Exactly one nonzero per row and column, each of modulus one."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    t = structural_tol(tol)
    nonzero = np.abs(m) > t
    if not (np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1)):
        return False
    return bool(np.all(np.abs(np.abs(m[nonzero]) - 1) < t))


@dataclass(frozen=True)
class EquivalenceMove:
    """Pair of complex permutation matrices acting as ``left @ u @ right``."""

    left: ComplexMatrix
    right: ComplexMatrix

    def __post_init__(self):
        for name in ("left", "right"):
            m = as_square(getattr(self, name))
            if not is_complex_permutation(m):
                raise ValidationError(f"{name} factor is not a complex permutation matrix")
            object.__setattr__(self, name, m)
        if self.left.shape != self.right.shape:
            raise ShapeError("move factors have different orders")

    @classmethod
    def identity(cls, d: int = 6) -> "EquivalenceMove":
        return cls(np.eye(d, dtype=complex), np.eye(d, dtype=complex))

    @property
    def order(self) -> int:
        return self.left.shape[0]

    def inverse(self) -> "EquivalenceMove":
        return EquivalenceMove(self.left.conj().T, self.right.conj().T)

    def then(self, other: "EquivalenceMove") -> "EquivalenceMove":
        """Move equal to applying ``self`` first and ``other`` second."""
        return EquivalenceMove(other.left @ self.left, self.right @ other.right)


def apply_equivalence(u, move: EquivalenceMove) -> ComplexMatrix:
    u = as_square(u, move.order)
    return move.left @ u @ move.right


def permutation_matrix(perm, phases=None) -> ComplexMatrix:
    """Complex permutation ``P`` with ``P[i, perm[i]] = phases[i]``."""
    perm = list(perm)
    d = len(perm)
    p = np.zeros((d, d), dtype=complex)
    p[np.arange(d), perm] = 1 if phases is None else phases
    return p


def random_complex_permutation(d: int, rng: np.random.Generator) -> ComplexMatrix:
    return permutation_matrix(rng.permutation(d), np.exp(2j * np.pi * rng.random(d)))


def dephase_matrix(u) -> tuple[ComplexMatrix, EquivalenceMove]:
    """Bring a CHM to dephased form with a diagonal move.

    The left factor is fixed by the first column, then the right factor by
    the first row of the left-adjusted matrix.
    """
    u = as_square(u)
    if np.any(u[:, 0] == 0) or np.any(u[0, :] == 0):
        raise ValidationError("zero entry in first row/column; input is not a CHM")
    left = np.diag(phase(u[:, 0]).conj())
    lu = left @ u
    right = np.diag(phase(lu[0, :]).conj())
    return lu @ right, EquivalenceMove(left, right)


def dephase_vector(v) -> np.ndarray:
    """Rotate ``v`` so its first nonzero entry is real and positive."""
    v = np.asarray(v, dtype=np.complex128)
    nz = np.flatnonzero(v)
    if nz.size == 0:
        return v.copy()
    pivot = v[nz[0]]
    if pivot.imag == 0 and pivot.real > 0:
        return v.copy()
    out = v * phase(pivot).conj()
    out[nz[0]] = abs(v[nz[0]])
    return out


@dataclass
class ProductColumnReport:
    """Columns whose bipartite reshape has rank one, with their factors.

    ``factors[k]`` is ``(left, right)`` for column ``indices[k]``: ``left`` is
    a unit vector in C^{d_A} and ``kron(left, right)`` reproduces the column.
    """

    indices: list[int] = field(default_factory=list)
    factors: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    shape: BipartiteShape = DEFAULT_SHAPE

    def __len__(self):
        return len(self.indices)


def product_columns(u, shape: BipartiteShape = DEFAULT_SHAPE,
                    tol: Tolerances | float | None = None) -> ProductColumnReport:
    u = as_square(u, shape.order)
    report = ProductColumnReport(shape=shape)
    for j in range(u.shape[1]):
        block = u[:, j].reshape(shape.d_A, shape.d_B)
        if numeric_rank(block, tol) != 1:
            continue
        x, s, yh = np.linalg.svd(block)
        left = x[:, 0]
        right = s[0] * yh[0]
        report.indices.append(j)
        report.factors.append((left, right))
    return report


def same_left_factor_pairs(report: ProductColumnReport,
                           tol: Tolerances | float | None = None) -> list[tuple[int, int]]:
    """Pairs of product columns ``|a,b>``, ``|a',c>`` with ``a`` parallel to ``a'``."""
    t = structural_tol(tol)
    pairs = []
    for (i, (a, _)), (j, (b, _)) in combinations(zip(report.indices, report.factors), 2):
        if abs(np.vdot(a, b)) > 1 - t:
            pairs.append((i, j))
    return pairs
