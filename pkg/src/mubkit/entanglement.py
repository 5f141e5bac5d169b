"""Partial-transpose entanglement test for ``2 x 3`` states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError
from .linalg import DEFAULT_SHAPE, BipartiteShape, ComplexMatrix, as_square, partial_transpose

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite density matrix (Hermitian, unit trace, PSD)."""

    matrix: ComplexMatrix
    shape: BipartiteShape = DEFAULT_SHAPE

    def __post_init__(self):
        m = as_square(self.matrix)
        if m.shape[0] != self.shape.order:
            raise ShapeError(f"order {m.shape[0]} does not match shape {self.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > TRACE_TOL:
            raise ValidationError(f"trace {np.trace(m).real:.3g} is not 1")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vectors(cls, weights, vectors, shape: BipartiteShape = DEFAULT_SHAPE
                     ) -> "DensityMatrix":
        """``sum_k w_k |v_k><v_k|`` for unit vectors ``v_k``."""
        m = np.zeros((shape.order, shape.order), dtype=complex)
        for w, v in zip(weights, vectors):
            v = np.asarray(v, dtype=complex).ravel()
            if v.size != shape.order:
                raise ShapeError(f"vector length {v.size} != {shape.order}")
            if abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ValidationError("vectors must have unit norm")
            m += w * np.outer(v, v.conj())
        return cls(m, shape)


def is_ppt(rho: DensityMatrix, tol: float = PSD_TOL) -> tuple[bool, float]:
    """Peres test: whether the partial transpose is positive semidefinite.

    Returns
    -------
    ppt : bool
        ``min_eigenvalue >= -tol``.
    min_eigenvalue : float
        Smallest eigenvalue of the partial transpose on the first factor.
    """
    pt = partial_transpose(rho.matrix, rho.shape)
    lam = float(np.linalg.eigvalsh(pt)[0])
    return lam >= -tol, lam


def certify_entangled_2x3(rho: DensityMatrix, tol: float = PSD_TOL) -> bool:
    """True iff ``rho`` is NPT, which for ``2 x 3`` systems means entangled."""
    if (rho.shape.d_A, rho.shape.d_B) not in {(2, 3), (3, 2), (2, 2)}:
        raise ShapeError("the PPT test decides entanglement only for 2x2 and 2x3")
    return not is_ppt(rho, tol)[0]


def build_lemma_state(alpha, beta, gamma, p: float, q: float,
                      shape: BipartiteShape = DEFAULT_SHAPE) -> DensityMatrix:
    """``p |alpha><alpha| + q |beta><beta| + (1 - p - q) |gamma><gamma|``.

    Requires ``p, q >= 0`` and ``p + q < 1``.
    """
    if p < 0 or q < 0 or p + q >= 1:
        raise ValidationError(f"weights p={p}, q={q} need p, q >= 0 and p + q < 1")
    return DensityMatrix.from_vectors([p, q, 1 - p - q], [alpha, beta, gamma], shape)
