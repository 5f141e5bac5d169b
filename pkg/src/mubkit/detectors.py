"""Literal submatrix scans and the MUB-trio admissibility filter.

Every scan enumerates fixed row and column subsets; none of them tries to
recognise a pattern up to equivalence. Submatrices are stacked and tested in
one batched call, which keeps full scans of an order-six matrix cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ValidationError
from .linalg import DEFAULT_SHAPE, ComplexMatrix, Tolerances, as_matrix, as_square, structural_tol
from .mub import is_chm, product_columns, same_left_factor_pairs

SUBUNITARY = "SUBUNITARY_{k}"
RANK_ONE = "RANK_ONE_{r}X{c}"
LOW_RANK = "RANK_LE{rank}_{r}X{c}"
REAL_3X2 = "REAL_3X2"
PHASE_REAL_3X2 = "PHASE_REAL_3X2"
SINGULAR_3 = "SINGULAR_3"
SINGULAR = "SINGULAR_{k}"
ORTHO_COLUMN_TRIPLE = "ORTHO_COLUMN_TRIPLE_{k}X3"
H2_REDUCIBLE = "H2_REDUCIBLE"
ORTHO_3X2_COLUMNS = "ORTHO_3X2_COLUMNS"
Y7_SHARED_LEFT_FACTOR = "Y7_SHARED_LEFT_FACTOR"
Y9_SUBUNITARY_PLUS_SINGULAR = "Y9_SUBUNITARY_PLUS_SINGULAR"


@dataclass(frozen=True)
class PatternHit:
    """A witnessed pattern: the submatrix ``u[rows][:, cols]`` passes the test.

    ``extra`` carries pattern-specific witness data (for Y9 the two row
    pairs).
    """

    pattern: str
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    residual: float
    extra: tuple = field(default=(), compare=False)

    def sort_key(self):
        return (self.pattern, self.rows, self.cols)


# --------------------------------------------------------------------------
# batched single-submatrix tests; each maps (..., r, c) -> (...) residuals


def _stack(u, r: int, c: int):
    rows = np.array(list(combinations(range(u.shape[0]), r)), dtype=int)
    cols = np.array(list(combinations(range(u.shape[1]), c)), dtype=int)
    sub = u[rows[:, None, :, None], cols[None, :, None, :]]
    return rows, cols, sub


def _low_rank_residual(sub, rank: int):
    sv = np.linalg.svd(sub, compute_uv=False)
    top = sv[..., 0]
    if rank >= sv.shape[-1]:
        return np.zeros(top.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        res = sv[..., rank] / top
    return np.where(top > 0, res, 0.0)


def _subunitary_residual(sub):
    k = sub.shape[-1]
    g = np.conj(np.swapaxes(sub, -1, -2)) @ sub
    scale = np.real(np.trace(g, axis1=-2, axis2=-1)) / k
    dev = np.max(np.abs(g - scale[..., None, None] * np.eye(k)), axis=(-2, -1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, dev / scale, np.inf)


def _real_residual(sub):
    mag = np.max(np.abs(sub), axis=(-2, -1))
    im = np.max(np.abs(sub.imag), axis=(-2, -1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(mag > 0, im / mag, 0.0)


def _phase_real_residual(sub):
    if np.any(np.abs(sub) == 0):
        raise ValidationError("zero entry: cross-ratio test needs nonzero entries")
    r = sub.shape[-2]
    worst = np.zeros(sub.shape[:-2])
    for i, k in combinations(range(r), 2):
        cr = sub[..., i, 0] * sub[..., k, 1] / (sub[..., i, 1] * sub[..., k, 0])
        worst = np.maximum(worst, np.abs(np.imag(cr)) / np.abs(cr))
    return worst


def _gram_normalised(sub):
    norms = np.linalg.norm(sub, axis=-2)
    g = np.conj(np.swapaxes(sub, -1, -2)) @ sub
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.abs(g) / (norms[..., :, None] * norms[..., None, :])


def _ortho_triple_residual(sub):
    """Per stacked k x 3 submatrix, the best column orthogonal to the other two."""
    g = _gram_normalised(sub)
    per_col = np.stack([np.maximum(g[..., 0, 1], g[..., 0, 2]),
                        np.maximum(g[..., 1, 0], g[..., 1, 2]),
                        np.maximum(g[..., 2, 0], g[..., 2, 1])], axis=-1)
    return np.min(per_col, axis=-1)


def _ortho_pair_residual(sub):
    return _gram_normalised(sub)[..., 0, 1]


def subunitary_residual(m) -> float:
    """``max|M^H M - (tr M^H M / k) I| / (tr M^H M / k)`` for a single ``M``."""
    return float(_subunitary_residual(as_matrix(m)))


def _collect(pattern, rows, cols, res, tol) -> list[PatternHit]:
    idx = np.argwhere(res < tol)
    return [PatternHit(pattern, tuple(int(x) for x in rows[i]), tuple(int(x) for x in cols[j]),
                       float(res[i, j])) for i, j in idx]


def _scan(u, r, c, residual, pattern, tol):
    rows, cols, sub = _stack(u, r, c)
    return _collect(pattern, rows, cols, residual(sub), tol)


# --------------------------------------------------------------------------
# public scans


def scan_subunitary(u, k: int, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """All ``k x k`` submatrices proportional to a unitary, ``2 <= k <= 5``."""
    if not 2 <= k <= 5:
        raise ValidationError(f"k={k} outside 2..5")
    u = as_square(u, 6)
    return _scan(u, k, k, _subunitary_residual, SUBUNITARY.format(k=k), structural_tol(tol))


def scan_low_rank(u, r: int, c: int, max_rank: int,
                  tol: Tolerances | float | None = None) -> list[PatternHit]:
    """All ``r x c`` submatrices of numeric rank at most ``max_rank``."""
    u = as_matrix(u)
    if not (1 <= r <= u.shape[0] and 1 <= c <= u.shape[1]):
        raise ValidationError(f"submatrix size {r}x{c} does not fit {u.shape}")
    pattern = (RANK_ONE.format(r=r, c=c) if max_rank == 1
               else LOW_RANK.format(rank=max_rank, r=r, c=c))
    return _scan(u, r, c, lambda s: _low_rank_residual(s, max_rank), pattern, structural_tol(tol))


_RANK_ONE_SIZES = {(2, 2), (2, 3), (3, 2)}


def scan_rank_one(u, r: int, c: int, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """Rank-one ``r x c`` submatrices for the sizes a CHM can actually contain.

    A ``2 x k`` rank-one submatrix of an order-six CHM has ``k <= 3``, so only
    ``(2, 2)``, ``(2, 3)`` and ``(3, 2)`` are accepted; use
    :func:`scan_low_rank` for arbitrary sizes.
    """
    if (r, c) not in _RANK_ONE_SIZES:
        raise ValidationError(f"rank-one scan size {r}x{c} not in {sorted(_RANK_ONE_SIZES)}")
    return scan_low_rank(as_square(u, 6), r, c, 1, tol)


def scan_singular(u, k: int, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """``k x k`` submatrices with ``sigma_min < tol * sigma_max``."""
    u = as_square(u, 6)
    return _scan(u, k, k, lambda s: _low_rank_residual(s, k - 1), SINGULAR.format(k=k),
                 structural_tol(tol))


def scan_singular_order3(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    return scan_singular(u, 3, tol)


def scan_real_submatrix(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """Literal ``3 x 2`` submatrices whose entries are all real.

    The imaginary parts are measured relative to the largest entry modulus.
    """
    u = as_square(u, 6)
    return _scan(u, 3, 2, _real_residual, REAL_3X2, structural_tol(tol))


def scan_phase_real_3x2(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """``3 x 2`` submatrices that become real after row and column phases.

    Uses the cross-ratio test ``Im(M_i0 M_k1 / (M_i1 M_k0)) = 0``. Zero
    entries raise :class:`ValidationError`.
    """
    u = as_square(u, 6)
    return _scan(u, 3, 2, _phase_real_residual, PHASE_REAL_3X2, structural_tol(tol))


def scan_ortho_column_triple(u, k: int, tol: Tolerances | float | None = None
                             ) -> list[PatternHit]:
    """``k x 3`` submatrices in which one column is orthogonal to the other two."""
    if not 2 <= k <= 4:
        raise ValidationError(f"k={k} outside 2..4")
    u = as_matrix(u)
    return _scan(u, k, 3, _ortho_triple_residual, ORTHO_COLUMN_TRIPLE.format(k=k),
                 structural_tol(tol))


def detect_h2_reducible(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    hits = scan_subunitary(u, 2, tol)
    return [PatternHit(H2_REDUCIBLE, h.rows, h.cols, h.residual) for h in hits]


def detect_ortho_3x2_columns(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    u = as_square(u, 6)
    return _scan(u, 3, 2, _ortho_pair_residual, ORTHO_3X2_COLUMNS, structural_tol(tol))


def detect_y9(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """Column pairs holding both a subunitary and a singular ``2 x 2`` submatrix.

    ``rows`` is the sorted union of both row pairs; ``extra`` holds
    ``(subunitary_rows, singular_rows)``.
    """
    u = as_square(u, 6)
    t = structural_tol(tol)
    rows, cols, sub = _stack(u, 2, 2)
    su = _subunitary_residual(sub)
    sg = _low_rank_residual(sub, 1)
    hits = []
    for j, c in enumerate(cols):
        i_su = int(np.argmin(su[:, j]))
        i_sg = int(np.argmin(sg[:, j]))
        if su[i_su, j] < t and sg[i_sg, j] < t:
            r_su, r_sg = tuple(int(x) for x in rows[i_su]), tuple(int(x) for x in rows[i_sg])
            hits.append(PatternHit(Y9_SUBUNITARY_PLUS_SINGULAR,
                                   tuple(sorted(set(r_su) | set(r_sg))),
                                   tuple(int(x) for x in c),
                                   float(max(su[i_su, j], sg[i_sg, j])), (r_su, r_sg)))
    return hits


def detect_y7(u, tol: Tolerances | float | None = None) -> list[PatternHit]:
    """Pairs of product columns ``|a, b>`` and ``|a, c>`` sharing the left factor."""
    u = as_square(u, 6)
    t = structural_tol(tol)
    report = product_columns(u, DEFAULT_SHAPE, t)
    hits = []
    for i, j in same_left_factor_pairs(report, t):
        a, b = report.factors[report.indices.index(i)][0], report.factors[report.indices.index(j)][0]
        res = 1 - abs(np.vdot(a, b))
        hits.append(PatternHit(Y7_SHARED_LEFT_FACTOR, tuple(range(6)), (i, j), float(max(res, 0.0))))
    return hits


# --------------------------------------------------------------------------
# re-verification of a single hit


def verify_hit(u, hit: PatternHit, tol: Tolerances | float | None = None) -> float:
    """Recompute the residual of ``hit`` from the witnessed submatrix alone."""
    u = as_matrix(u)
    if hit.pattern == Y9_SUBUNITARY_PLUS_SINGULAR:
        r_su, r_sg = hit.extra
        cols = list(hit.cols)
        return float(max(_subunitary_residual(u[np.ix_(r_su, cols)]),
                         _low_rank_residual(u[np.ix_(r_sg, cols)], 1)))
    if hit.pattern == Y7_SHARED_LEFT_FACTOR:
        col_hits = detect_y7(u[:, list(hit.cols) + [c for c in range(6) if c not in hit.cols]], tol)
        return min((h.residual for h in col_hits if h.cols == (0, 1)), default=np.inf)
    m = u[np.ix_(hit.rows, hit.cols)]
    p = hit.pattern
    if p.startswith("SUBUNITARY_") or p == H2_REDUCIBLE:
        return float(_subunitary_residual(m))
    if p.startswith("RANK_ONE_"):
        return float(_low_rank_residual(m, 1))
    if p.startswith("RANK_LE"):
        return float(_low_rank_residual(m, int(p[7:p.index("_")])))
    if p.startswith("SINGULAR_"):
        return float(_low_rank_residual(m, m.shape[0] - 1))
    if p == REAL_3X2:
        return float(_real_residual(m))
    if p == PHASE_REAL_3X2:
        return float(_phase_real_residual(m))
    if p.startswith("ORTHO_COLUMN_TRIPLE_"):
        return float(_ortho_triple_residual(m))
    if p == ORTHO_3X2_COLUMNS:
        return float(_ortho_pair_residual(m))
    raise ValidationError(f"unknown pattern {p!r}")


# --------------------------------------------------------------------------
# the filter


@dataclass
class FilterReport:
    """Verdict of the trio filter.

    ``hits`` are the pattern hits that exclude ``u``; ``informational`` holds
    hits that are reported but never count toward exclusion. ``excluded`` is
    true iff ``product_column_count > 2``, ``schmidt_rank <= 2`` or ``hits``
    is nonempty. A clean report does not certify trio membership.
    """

    product_column_count: int
    schmidt_rank: int
    hits: list[PatternHit]
    informational: list[PatternHit]
    excluded: bool
    reasons: list[str]


# pattern -> reason label, for hits that count toward exclusion
_COUNTING = {
    SUBUNITARY.format(k=3): "Y1: order-3 subunitary submatrix",
    RANK_ONE.format(r=3, c=2): "Y2: rank-one 3x2 submatrix",
    ORTHO_COLUMN_TRIPLE.format(k=3): "Y3: order-3 submatrix with one column orthogonal to the others",
    SINGULAR_3: "Y5: singular order-3 submatrix",
    REAL_3X2: "Y6: real 3x2 submatrix",
    Y7_SHARED_LEFT_FACTOR: "Y7: product columns |a,b> and |a,c>",
    Y9_SUBUNITARY_PLUS_SINGULAR: "Y9: order-2 subunitary and singular submatrices in two columns",
    ORTHO_COLUMN_TRIPLE.format(k=4): "Y10: 4x3 submatrix with one column orthogonal to the others",
}


def filter_trio_candidate(u, tol: Tolerances | float | None = None) -> FilterReport:
    """Run every literal exclusion test on an order-six CHM."""
    from .schmidt import schmidt_rank

    u = as_square(u, 6)
    t = structural_tol(tol)
    if not is_chm(u, t):
        raise ValidationError("filter_trio_candidate needs an order-six CHM")
    pc = len(product_columns(u, DEFAULT_SHAPE, t))
    sr = schmidt_rank(u, DEFAULT_SHAPE, t)

    counting = [
        *scan_subunitary(u, 3, t),
        *scan_rank_one(u, 3, 2, t),
        *scan_ortho_column_triple(u, 3, t),
        *scan_singular_order3(u, t),
        *scan_real_submatrix(u, t),
        *detect_y7(u, t),
        *detect_y9(u, t),
        *scan_ortho_column_triple(u, 4, t),
    ]
    informational = [
        *scan_rank_one(u, 2, 3, t),
        *scan_ortho_column_triple(u, 2, t),
        *scan_phase_real_3x2(u, t),
        *detect_h2_reducible(u, t),
        *detect_ortho_3x2_columns(u, t),
    ]
    counting.sort(key=PatternHit.sort_key)
    informational.sort(key=PatternHit.sort_key)

    reasons = []
    if pc > 2:
        reasons.append(f"Theorem 1: {pc} product columns > 2")
    if sr <= 2:
        reasons.append(f"Theorem 2: Schmidt rank {sr} ≤ 2")
    seen = []
    for h in counting:
        label = _COUNTING[h.pattern]
        if label not in seen:
            seen.append(label)
    reasons += seen
    return FilterReport(pc, sr, counting, informational, bool(reasons), reasons)
