"""Operator-Schmidt rank of bipartite unitaries via realignment."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .catalog import spectral_move
from .linalg import (
    DEFAULT_SHAPE,
    BipartiteShape,
    ComplexMatrix,
    Tolerances,
    as_square,
    numeric_rank,
    singular_values,
    structural_tol,
)
from .errors import ShapeError
from .mub import EquivalenceMove, apply_equivalence, permutation_matrix


def _shape(shape) -> BipartiteShape:
    if shape is None:
        return DEFAULT_SHAPE
    if isinstance(shape, str):
        return BipartiteShape.parse(shape)
    if isinstance(shape, BipartiteShape):
        return shape
    return BipartiteShape(*shape)


def realign(u, shape: BipartiteShape | None = None) -> ComplexMatrix:
    """Realignment ``R[(j, k), (l, m)] = u[(j, l), (k, m)]``.

    Row ``(j, k)`` of the result is the row-major flattening of block
    ``U_jk``, so ``R`` has shape ``(d_A**2, d_B**2)``.
    """
    s = _shape(shape)
    u = as_square(u)
    if u.shape[0] != s.order:
        raise ShapeError(f"order {u.shape[0]} does not match shape {s}")
    a, b = s.d_A, s.d_B
    return u.reshape(a, b, a, b).transpose(0, 2, 1, 3).reshape(a * a, b * b)


def schmidt_rank(u, shape: BipartiteShape | None = None,
                 tol: Tolerances | float | None = None) -> int:
    return numeric_rank(realign(u, shape), tol)


@dataclass
class SchmidtData:
    """Realignment spectrum and the operator-Schmidt terms ``u = sum A_j (x) B_j``.

    The ``A_j`` carry the singular values and are mutually orthogonal in the
    trace inner product; the ``B_j`` are orthonormal.
    """

    singular_values: np.ndarray
    rank: int
    terms: list[tuple[ComplexMatrix, ComplexMatrix]]
    shape: BipartiteShape

    def reconstruct(self) -> ComplexMatrix:
        n = self.shape.order
        out = np.zeros((n, n), dtype=complex)
        for a, b in self.terms:
            out += np.kron(a, b)
        return out


def schmidt_decomposition(u, shape: BipartiteShape | None = None,
                          tol: Tolerances | float | None = None) -> SchmidtData:
    s = _shape(shape)
    r = realign(u, s)
    x, sv, vh = np.linalg.svd(r)
    rank = numeric_rank(r, tol)
    a, b = s.d_A, s.d_B
    terms = [(sv[j] * x[:, j].reshape(a, a), vh[j].reshape(b, b)) for j in range(rank)]
    return SchmidtData(sv, rank, terms, s)


# The permutation taking the Fourier family to a form whose upper blocks agree.
_Q_PERM = [0, 2, 4, 1, 3, 5]


def q_matrix() -> ComplexMatrix:
    return permutation_matrix(_Q_PERM)


def q_move() -> EquivalenceMove:
    """The move ``u -> Q u Q^H``."""
    q = q_matrix()
    return EquivalenceMove(q, q.T.copy())


def conjugate_by_Q(u, inverse: bool = False) -> ComplexMatrix:
    """Return ``Q u Q^H`` (or ``Q^H u Q`` when ``inverse``)."""
    u = as_square(u, 6)
    p = np.asarray(_Q_PERM)
    if inverse:
        inv = np.argsort(p)
        return u[np.ix_(inv, inv)]
    return u[np.ix_(p, p)]


def _move_digest(move: EquivalenceMove) -> tuple:
    return tuple(np.round(np.concatenate([move.left.ravel(), move.right.ravel()])
                          .view(float), 12))


POLISH_EVALS = 2000


def min_schmidt_upper_bound(u, budget: int = 10_000, seed: int = 0,
                            tol: Tolerances | float | None = None,
                            shape: BipartiteShape | None = None
                            ) -> tuple[int, EquivalenceMove]:
    """Smallest Schmidt rank found over equivalent forms of ``u``.

    Known analytic moves are tried first. The remaining budget, counted in
    objective evaluations, goes to restarts from a random row and column
    permutation. Each restart hill-climbs over transpositions of either
    permutation and then tunes the diagonal phases with Powell's
    derivative-free method. The objective is the squared weight of the
    realignment spectrum beyond the target rank, relative to the top
    singular value. A rank is only claimed once :func:`numeric_rank`
    confirms it, so the result is an upper bound on the min-Schmidt rank.

    Returns
    -------
    best_rank, best_move
        ``schmidt_rank(apply_equivalence(u, best_move)) == best_rank``.
    """
    s = _shape(shape)
    u = as_square(u, s.order)
    t = structural_tol(tol)
    n = s.order

    def rank_of(move):
        return schmidt_rank(apply_equivalence(u, move), s, t)

    candidates = [EquivalenceMove.identity(n)]
    if n == 6:
        candidates += [spectral_move(), q_move()]
    scored = sorted((rank_of(m), _move_digest(m), i) for i, m in enumerate(candidates))
    best_rank, _, idx = scored[0]
    best_move = candidates[idx]

    rng = np.random.default_rng(seed)
    swaps = list(combinations(range(n), 2))
    evals = 0
    while evals < budget and best_rank > 1:
        target = best_rank - 1

        def objective(rows, cols, left, right):
            m = left[:, None] * u[np.ix_(rows, cols)] * right[None, :]
            sv = singular_values(realign(m, s))
            return float(np.sum(sv[target:] ** 2) / sv[0] ** 2)

        rows, cols = rng.permutation(n), rng.permutation(n)
        ones = np.ones(n, dtype=complex)
        current = objective(rows, cols, ones, ones)
        evals += 1
        improved = True
        while improved and evals < budget:
            improved = False
            for axis in (0, 1):
                for i, j in swaps:
                    r2, c2 = rows.copy(), cols.copy()
                    if axis == 0:
                        r2[[i, j]] = r2[[j, i]]
                    else:
                        c2[[i, j]] = c2[[j, i]]
                    value = objective(r2, c2, ones, ones)
                    evals += 1
                    if value < current - 1e-15:
                        rows, cols, current, improved = r2, c2, value, True

        def phases(theta):
            left = np.exp(1j * np.concatenate([[0.0], theta[: n - 1]]))
            right = np.exp(1j * np.concatenate([[0.0], theta[n - 1:]]))
            return left, right

        maxfev = max(min(budget - evals, POLISH_EVALS), 1)
        res = minimize(lambda th: objective(rows, cols, *phases(th)),
                       rng.uniform(0, 2 * np.pi, 2 * n - 2), method="Powell",
                       options={"maxfev": maxfev, "xtol": 1e-12, "ftol": 1e-28})
        evals += max(int(res.nfev), 1)
        theta = res.x if res.fun < current else np.zeros(2 * n - 2)
        left, right = phases(theta)
        # u[rows][:, cols] == P_r @ u @ P_c with P_r[i, rows[i]] = 1, P_c[cols[j], j] = 1
        move = EquivalenceMove(np.diag(left) @ permutation_matrix(rows),
                               permutation_matrix(cols).T @ np.diag(right))
        r = rank_of(move)
        if r < best_rank:
            best_rank, best_move = r, move
    return best_rank, best_move


def random_equivalence_rank_probe(u, trials: int = 100, seed: int = 0,
                                  tol: Tolerances | float | None = None,
                                  shape: BipartiteShape | None = None) -> Counter:
    """Histogram of Schmidt ranks of ``D1 u D2`` for random diagonal unitaries.

    Trial 0 uses the identity move, so the histogram always contains the
    rank of ``u`` itself.
    """
    s = _shape(shape)
    u = as_square(u, s.order)
    rng = np.random.default_rng(seed)
    hist: Counter = Counter()
    for k in range(trials):
        if k == 0:
            v = u
        else:
            d1 = np.exp(2j * np.pi * rng.random(s.order))
            d2 = np.exp(2j * np.pi * rng.random(s.order))
            v = d1[:, None] * u * d2[None, :]
        hist[schmidt_rank(v, s, tol)] += 1
    return hist
