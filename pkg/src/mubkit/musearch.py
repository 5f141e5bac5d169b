"""Search for vectors unbiased to both ``I_d`` and a unitary ``U`` (MU vectors)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, ValidationError
from .linalg import DEFAULT_TOL, ComplexMatrix, Tolerances, as_square
from .mub import dephase_vector, is_complex_permutation, is_unitary
from .sinkhorn import mu_vector_from_sinkhorn

BATCH = 4096
MAX_STEPS = 10_000
MOVE_TOL = 1e-13


def thread_count() -> int:
    """Worker threads from ``MUBKIT_THREADS`` (``0`` or unset means automatic)."""
    raw = os.environ.get("MUBKIT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"MUBKIT_THREADS={raw!r} is not an integer") from None
    if n < 0:
        raise ValidationError("MUBKIT_THREADS must be nonnegative")
    return n if n > 0 else min(4, os.cpu_count() or 1)


@dataclass
class MuVectorSet:
    """Distinct dephased MU vectors found for ``basis_matrix``.

    ``vectors`` has one vector per row, sorted lexicographically by
    ``(real, imag)`` parts. ``hit_counts[i]`` is the number of accepted trials
    that landed on ``vectors[i]``. ``near_duplicates`` lists index pairs whose
    distance lies in ``[dedup_tol, 10 * dedup_tol]``; they are kept separate
    but deserve a second look. ``saturated`` is a heuristic for "the count has
    stopped growing": more than half of the vectors were hit at least twice.
    """

    basis_matrix: ComplexMatrix
    vectors: np.ndarray
    residuals: np.ndarray
    trials_run: int
    seed: int
    tol: float
    dedup_tol: float
    hit_counts: np.ndarray
    discarded: int = 0
    unconverged: int = 0
    near_duplicates: list[tuple[int, int]] = field(default_factory=list)
    capped: bool = False

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def saturated(self) -> bool:
        if len(self) == 0:
            return False
        return bool(np.sum(self.hit_counts >= 2) > len(self) / 2)


def mu_residual(u, v) -> float:
    """Worst deviation of ``sqrt(d) |<b, v>|`` from one over the columns of ``I`` and ``u``."""
    u = np.asarray(u)
    v = np.asarray(v)
    d = u.shape[0]
    ov = np.concatenate([np.abs(v), np.abs(u.conj().T @ v)])
    return float(np.max(np.abs(ov * np.sqrt(d) - 1)))


def _residuals(u, vs) -> np.ndarray:
    d = u.shape[0]
    ov = np.hstack([np.abs(vs), np.abs(vs @ u.conj())])
    return np.max(np.abs(ov * np.sqrt(d) - 1), axis=1)


def _project(u, starts):
    """Run the alternating map on the rows of ``starts``.

    Returns final iterates, a mask of converged rows and a mask of rows
    discarded because an overlap vanished.
    """
    d = u.shape[0]
    s = np.sqrt(d)
    uc, ut = u.conj(), u.T
    v = starts.copy()
    active = np.arange(len(v))
    bad = np.zeros(len(v), dtype=bool)
    done = np.zeros(len(v), dtype=bool)
    for _ in range(MAX_STEPS):
        x = v[active]
        y = x @ uc
        ay = np.abs(y)
        z = (y / np.where(ay > 0, ay, 1)) @ ut
        az = np.abs(z)
        zero = np.any(ay == 0, axis=1) | np.any(az == 0, axis=1)
        xn = z / np.where(az > 0, az, 1) / s
        moved = np.max(np.abs(xn - x), axis=1)
        v[active] = xn
        bad[active[zero]] = True
        stop = (moved < MOVE_TOL) | zero
        done[active[stop & ~zero]] = True
        active = active[~stop]
        if active.size == 0:
            break
    return v, done, bad


def _sort_key_order(vs) -> np.ndarray:
    keys = np.round(np.hstack([vs.real, vs.imag]), 9)
    return np.lexsort(keys.T[::-1])


def _dedup(vs, dedup_tol):
    """Greedy clustering in lexicographic order; returns representatives and counts."""
    reps: list[np.ndarray] = []
    counts: list[int] = []
    for v in vs[_sort_key_order(vs)]:
        if reps:
            dist = np.linalg.norm(np.asarray(reps) - v, axis=1)
            j = int(np.argmin(dist))
            if dist[j] <= dedup_tol:
                counts[j] += 1
                continue
        reps.append(v)
        counts.append(1)
    d = vs.shape[1] if vs.ndim == 2 else 0
    return np.asarray(reps).reshape(-1, d), np.asarray(counts, dtype=int)


def _near_pairs(vs, dedup_tol):
    pairs = []
    for i in range(len(vs)):
        dist = np.linalg.norm(vs[i + 1:] - vs[i], axis=1)
        for j in np.flatnonzero((dist >= dedup_tol) & (dist <= 10 * dedup_tol)):
            pairs.append((i, i + 1 + int(j)))
    return pairs


def _assemble(u, accepted, trials, seed, tol, dedup_tol, discarded, unconverged, cap):
    d = u.shape[0]
    if accepted:
        vs = np.array([dephase_vector(v) for v in np.vstack(accepted)])
    else:
        vs = np.zeros((0, d), dtype=complex)
    reps, counts = _dedup(vs, dedup_tol)
    order = _sort_key_order(reps) if len(reps) else np.arange(0)
    reps, counts = reps[order], counts[order]
    capped = cap is not None and len(reps) > cap
    if capped:
        reps, counts = reps[:cap], counts[:cap]
    return MuVectorSet(u, reps, _residuals(u, reps) if len(reps) else np.zeros(0),
                       trials, seed, tol, dedup_tol, counts, discarded, unconverged,
                       _near_pairs(reps, dedup_tol), capped)


def _tols(tol) -> tuple[float, float]:
    if tol is None:
        return DEFAULT_TOL.search_tol, DEFAULT_TOL.dedup_tol
    if isinstance(tol, Tolerances):
        return tol.search_tol, tol.dedup_tol
    return float(tol), DEFAULT_TOL.dedup_tol


def find_mu_vectors(u, trials: int = 10_000, seed: int = 0,
                    tol: Tolerances | float | None = None,
                    max_vectors: int | None = 10_000) -> MuVectorSet:
    """Collect distinct MU vectors of ``u`` from seeded random starts.

    Trial 0 is the vector extracted from the Sinkhorn normal form, so the
    result is nonempty whenever that converges. The other starts have flat
    moduli and uniform random phases and are iterated under
    ``v -> P_I(P_U(v))`` until they move by less than ``1e-13`` or
    ``10**4`` steps pass. A start is kept if its residual is below ``tol``
    (search tolerance). Kept vectors are dephased and merged when closer
    than the dedup tolerance.

    Starts are processed in fixed-size batches, each with its own child
    seed, so the result does not depend on the thread count. When more than
    ``max_vectors`` distinct vectors turn up (for instance ``u = I``) the list
    is truncated and ``capped`` is set.

    Examples
    --------
    >>> from mubkit.catalog import spectral
    >>> s = find_mu_vectors(spectral(), trials=2000, seed=1)
    >>> bool(len(s) > 0 and s.residuals.max() < 1e-8)
    True
    """
    u = as_square(u)
    if not is_unitary(u):
        raise ValidationError("find_mu_vectors needs a unitary matrix")
    if trials < 1:
        raise ValidationError("trials must be positive")
    d = u.shape[0]
    t, dedup_tol = _tols(tol)

    accepted: list[np.ndarray] = []
    try:
        v0 = mu_vector_from_sinkhorn(u, min(t, DEFAULT_TOL.search_tol) / 10, seed=seed)
        if mu_residual(u, v0) < t:
            accepted.append(v0[None, :])
    except ConvergenceError:
        pass

    n_random = trials - 1
    sizes = [BATCH] * (n_random // BATCH) + ([n_random % BATCH] if n_random % BATCH else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(args):
        size, child = args
        rng = np.random.default_rng(child)
        starts = np.exp(2j * np.pi * rng.random((size, d))) / np.sqrt(d)
        v, done, bad = _project(u, starts)
        ok = done & ~bad
        res = _residuals(u, v)
        keep = ok & (res < t)
        return v[keep], int(bad.sum()), int((~done & ~bad).sum())

    jobs = list(zip(sizes, children))
    workers = thread_count()
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    discarded = unconverged = 0
    for kept, nbad, nslow in results:
        accepted.append(kept)
        discarded += nbad
        unconverged += nslow
    return _assemble(u, accepted, trials, seed, t, dedup_tol, discarded, unconverged, max_vectors)


def pairwise_min_overlap(s: MuVectorSet | np.ndarray) -> float:
    """Smallest ``|<v, w>|`` over distinct pairs of vectors."""
    vs = s.vectors if isinstance(s, MuVectorSet) else np.asarray(s)
    if len(vs) < 2:
        raise ValidationError("need at least two vectors")
    g = np.abs(vs.conj() @ vs.T)
    iu = np.triu_indices(len(vs), 1)
    return float(np.min(g[iu]))


def _rebuild(s: MuVectorSet, basis, vectors) -> MuVectorSet:
    vs = np.array([dephase_vector(v) for v in vectors]).reshape(-1, basis.shape[0])
    order = _sort_key_order(vs) if len(vs) else np.arange(0)
    vs = vs[order]
    return replace(s, basis_matrix=basis, vectors=vs,
                   residuals=_residuals(basis, vs) if len(vs) else np.zeros(0),
                   hit_counts=s.hit_counts[order],
                   near_duplicates=_near_pairs(vs, s.dedup_tol))


def map_solutions(s: MuVectorSet, q1, q2) -> MuVectorSet:
    """Transport the set to ``q1 @ u @ q2`` via ``v -> dephase(q1 v)``."""
    u = s.basis_matrix
    d = u.shape[0]
    q1, q2 = as_square(q1, d), as_square(q2, d)
    if not (is_complex_permutation(q1) and is_complex_permutation(q2)):
        raise ValidationError("q1 and q2 must be complex permutation matrices")
    return _rebuild(s, q1 @ u @ q2, s.vectors @ q1.T)


def conjugate_solutions(s: MuVectorSet) -> MuVectorSet:
    """Transport the set to ``conj(u)`` via ``v -> dephase(conj(v))``."""
    return _rebuild(s, s.basis_matrix.conj(), s.vectors.conj())
