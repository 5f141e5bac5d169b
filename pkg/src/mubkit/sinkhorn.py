"""Sinkhorn normal form of unitaries and the unbiased vector it yields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .linalg import DEFAULT_TOL, ComplexMatrix, Tolerances, as_square, phase
from .mub import dephase_vector, is_unitary


def _search_tol(tol) -> float:
    if tol is None:
        return DEFAULT_TOL.search_tol
    if isinstance(tol, Tolerances):
        return tol.search_tol
    return float(tol)


@dataclass
class SinkhornForm:
    """``left @ u @ right == core`` with ``core`` doubly quasistochastic."""

    u: ComplexMatrix
    left: ComplexMatrix
    right: ComplexMatrix
    core: ComplexMatrix
    iterations: int
    residual: float
    restarts: int = 0


def sum_residual(m) -> float:
    """``max |row sum - 1|`` and ``max |column sum - 1|``, whichever is larger."""
    m = np.asarray(m)
    return float(max(np.max(np.abs(m.sum(axis=1) - 1)), np.max(np.abs(m.sum(axis=0) - 1))))


def is_doubly_quasistochastic(m, tol: Tolerances | float | None = None) -> bool:
    """Every row and column of ``m`` sums to one within ``tol`` (search tolerance)."""
    return sum_residual(as_square(m)) < _search_tol(tol)


def _safe_phase(x):
    with np.errstate(invalid="ignore", divide="ignore"):
        out = phase(x)
    return np.where(np.isfinite(out), out, 1.0)


def sinkhorn_normalize(u, tol: Tolerances | float | None = None, max_iter: int = 100_000,
                       seed: int = 0, max_restarts: int = 10) -> SinkhornForm:
    """Diagonal unitaries ``L, R`` making ``L u R`` doubly quasistochastic.

    Alternates two phase alignments: ``L`` rotates every row sum onto the
    positive real axis, then ``R`` does the same for column sums. The
    iteration stops once all sums are within ``tol`` of one. If the residual
    improves by less than ``1e-14`` over 100 iterations the iterate is
    restarted from random diagonal phases drawn from ``seed``.

    Raises
    ------
    ConvergenceError
        When ``max_iter`` iterations or ``max_restarts`` restarts are used up.
        ``err.best`` holds the best :class:`SinkhornForm` seen.
    """
    u = as_square(u)
    d = u.shape[0]
    if d < 2:
        raise ValidationError("order must be at least 2")
    if not is_unitary(u):
        raise ValidationError("sinkhorn_normalize needs a unitary matrix")
    t = _search_tol(tol)
    rng = np.random.default_rng(seed)
    l = np.ones(d, dtype=complex)
    r = np.ones(d, dtype=complex)
    ut = u.T

    def residual(l, r):
        rows = l * (u @ r)
        cols = r * (ut @ l)
        return float(max(np.max(np.abs(rows - 1)), np.max(np.abs(cols - 1))))

    def form(l, r, it, res, restarts):
        return SinkhornForm(u, np.diag(l), np.diag(r), l[:, None] * u * r[None, :],
                            it, res, restarts)

    res = residual(l, r)
    best = (res, l, r)
    restarts = 0
    checkpoint = res
    it = 0
    while res >= t:
        if it >= max_iter:
            raise ConvergenceError(f"no convergence in {max_iter} iterations "
                                   f"(best residual {best[0]:.3e})",
                                   best=form(best[1], best[2], it, best[0], restarts))
        l = np.conj(_safe_phase(u @ r))
        r = np.conj(_safe_phase(ut @ l))
        it += 1
        res = residual(l, r)
        if res < best[0]:
            best = (res, l, r)
        if it % 100 == 0:
            if checkpoint - res < 1e-14:
                if restarts >= max_restarts:
                    raise ConvergenceError(f"stagnated after {restarts} restarts "
                                           f"(best residual {best[0]:.3e})",
                                           best=form(best[1], best[2], it, best[0], restarts))
                restarts += 1
                l = np.exp(2j * np.pi * rng.random(d))
                r = np.exp(2j * np.pi * rng.random(d))
                res = residual(l, r)
            checkpoint = res
    return form(l, r, it, res, restarts)


def mu_vector_from_sinkhorn(u, tol: Tolerances | float | None = None, seed: int = 0
                            ) -> np.ndarray:
    """A dephased unit vector unbiased to both ``I_d`` and the columns of ``u``.

    With ``L u^H R`` doubly quasistochastic and ``f`` the diagonal of ``R``,
    ``u^H f = L^* e`` so every overlap of ``f / sqrt(d)`` has modulus
    ``1 / sqrt(d)``.
    """
    u = as_square(u)
    sf = sinkhorn_normalize(u.conj().T, tol, seed=seed)
    f = np.diagonal(sf.right)
    return dephase_vector(f / np.sqrt(u.shape[0]))
