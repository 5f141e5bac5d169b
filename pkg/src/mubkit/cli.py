"""Command-line interface: ``mubkit <command> ...``.

Matrix arguments are JSON matrix files (see :mod:`mubkit.io`); ``-`` reads
standard input. Every analysis prints a short text summary followed by a
JSON block introduced by a ``# json`` line.

Exit codes: 0 success, 2 usage error, 3 parse error, 4 validation error,
5 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import catalog, detectors, entanglement, io, musearch, mub, schmidt, sinkhorn
from .errors import ConvergenceError, ParseError, ValidationError
from .linalg import DEFAULT_SHAPE, DEFAULT_TOL, BipartiteShape

EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_CONVERGENCE = 5


def _cx(z) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _vec(v) -> list:
    return [_cx(z) for z in v]


def _emit(lines: list[str], data: dict) -> None:
    out = sys.stdout
    for line in lines:
        out.write(line + "\n")
    out.write("# json\n")
    out.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def _load(path: str):
    return io.read_matrix(path)


def _shape_arg(text: str) -> BipartiteShape:
    try:
        return BipartiteShape.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _param_arg(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


# --------------------------------------------------------------------------
# subcommands


def cmd_catalog(args) -> int:
    if args.catalog_cmd == "list":
        for name in catalog.CATALOG:
            params = catalog.CATALOG_PARAMS.get(name, ())
            sys.stdout.write(name + (f"  [{', '.join(params)}]" if params else "") + "\n")
        return 0
    m = catalog.build(args.name, dict(args.param or []))
    io.write_matrix("-", m, DEFAULT_SHAPE)
    return 0


def cmd_analyze(args) -> int:
    m, shape = _load(args.file)
    shape = shape or DEFAULT_SHAPE
    tol = args.tol
    unitary = mub.is_unitary(m, tol)
    chm = mub.is_chm(m, tol)
    lines = [f"order: {m.shape[0]}", f"unitary: {unitary}", f"chm: {chm}"]
    data = {"order": m.shape[0], "is_unitary": unitary, "is_chm": chm}
    if m.shape[0] == m.shape[1]:
        dephased, _ = mub.dephase_matrix(m)
        data["dephased"] = io.matrix_to_dict(dephased)["entries"]
        if m.shape[0] == shape.order:
            pc = mub.product_columns(m, shape, tol)
            lines.append(f"product columns ({shape}): {len(pc)} {pc.indices}")
            data["product_columns"] = {
                "count": len(pc),
                "indices": pc.indices,
                "factors": [{"left": _vec(a), "right": _vec(b)} for a, b in pc.factors],
            }
    _emit(lines, data)
    return 0


def cmd_schmidt(args) -> int:
    m, file_shape = _load(args.file)
    shape = args.shape or file_shape or DEFAULT_SHAPE
    sd = schmidt.schmidt_decomposition(m, shape, args.tol)
    sv = [float(x) for x in sd.singular_values]
    lines = [f"shape: {shape}", "singular values: " + " ".join(f"{x:.12g}" for x in sv),
             f"rank: {sd.rank}"]
    data = {"shape": [shape.d_A, shape.d_B], "singular_values": sv, "rank": sd.rank}
    if args.min_search:
        best, move = schmidt.min_schmidt_upper_bound(m, args.budget, args.seed, args.tol, shape)
        lines.append(f"min-Schmidt upper bound: {best} (budget {args.budget}, seed {args.seed})")
        data["min_search"] = {"best_rank": best, "budget": args.budget, "seed": args.seed,
                              "left": io.matrix_to_dict(move.left)["entries"],
                              "right": io.matrix_to_dict(move.right)["entries"]}
    _emit(lines, data)
    return 0


def _hit(h: detectors.PatternHit) -> dict:
    return {"pattern": h.pattern, "rows": list(h.rows), "cols": list(h.cols),
            "residual": h.residual}


def cmd_filter(args) -> int:
    m, _ = _load(args.file)
    r = detectors.filter_trio_candidate(m, args.tol)
    lines = [f"excluded: {r.excluded}",
             f"product columns: {r.product_column_count}",
             f"schmidt rank: {r.schmidt_rank}"]
    lines += [f"reason: {x}" for x in r.reasons]
    lines.append(f"counting hits: {len(r.hits)}; informational hits: {len(r.informational)}")
    _emit(lines, {"excluded": r.excluded, "product_column_count": r.product_column_count,
                  "schmidt_rank": r.schmidt_rank, "reasons": r.reasons,
                  "hits": [_hit(h) for h in r.hits],
                  "informational": [_hit(h) for h in r.informational]})
    return 0


def cmd_sinkhorn(args) -> int:
    m, _ = _load(args.file)
    sf = sinkhorn.sinkhorn_normalize(m, args.tol, args.max_iter, args.seed)
    v = sinkhorn.mu_vector_from_sinkhorn(m, args.tol, args.seed)
    res = musearch.mu_residual(m, v)
    lines = [f"iterations: {sf.iterations}", f"restarts: {sf.restarts}",
             f"residual: {sf.residual:.3e}", f"mu vector residual: {res:.3e}"]
    _emit(lines, {"iterations": sf.iterations, "restarts": sf.restarts,
                  "residual": sf.residual,
                  "left": _vec(np.diagonal(sf.left)), "right": _vec(np.diagonal(sf.right)),
                  "core": io.matrix_to_dict(sf.core)["entries"],
                  "mu_vector": _vec(v), "mu_vector_residual": res})
    return 0


def cmd_musearch(args) -> int:
    m, _ = _load(args.file)
    s = musearch.find_mu_vectors(m, args.trials, args.seed, args.tol)
    overlap = musearch.pairwise_min_overlap(s) if len(s) >= 2 else None
    lines = [f"distinct vectors found: {len(s)}",
             f"trials: {s.trials_run}; seed: {s.seed}",
             f"max residual: {float(s.residuals.max()) if len(s) else float('nan'):.3e}",
             f"min pairwise overlap: {overlap if overlap is not None else 'n/a'}",
             f"saturated: {s.saturated}; capped: {s.capped}",
             f"discarded: {s.discarded}; unconverged: {s.unconverged}; "
             f"near duplicates: {len(s.near_duplicates)}"]
    if args.out:
        io.write_matrix(args.out, s.vectors)
        lines.append(f"vectors written to {args.out}")
    _emit(lines, {"count": len(s), "trials": s.trials_run, "seed": s.seed, "tol": s.tol,
                  "max_residual": float(s.residuals.max()) if len(s) else None,
                  "min_pairwise_overlap": overlap, "saturated": s.saturated,
                  "capped": s.capped, "discarded": s.discarded,
                  "unconverged": s.unconverged,
                  "near_duplicates": [list(p) for p in s.near_duplicates]})
    return 0


def cmd_ppt(args) -> int:
    m, shape = _load(args.file)
    rho = entanglement.DensityMatrix(m, shape or DEFAULT_SHAPE)
    ppt, lam = entanglement.is_ppt(rho)
    _emit([f"ppt: {ppt}", f"min eigenvalue of partial transpose: {lam:.12g}"],
          {"ppt": ppt, "min_eigenvalue": lam})
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mubkit", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="list or emit catalog matrices")
    csub = c.add_subparsers(dest="catalog_cmd", required=True)
    csub.add_parser("list", help="names of all constructors")
    e = csub.add_parser("emit", help="write a catalog matrix to standard output")
    e.add_argument("name")
    e.add_argument("--param", action="append", type=_param_arg, metavar="K=V",
                   help="constructor parameter; complex values like 0.6+0.8i or phase:0.3")
    c.set_defaults(func=cmd_catalog)

    a = sub.add_parser("analyze", help="unitarity, CHM test, dephased form, product columns")
    a.add_argument("file")
    a.add_argument("--tol", type=float, default=DEFAULT_TOL.structural_tol)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("schmidt", help="operator-Schmidt rank via realignment")
    s.add_argument("file")
    s.add_argument("--shape", type=_shape_arg, default=None)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL.structural_tol)
    s.add_argument("--min-search", action="store_true")
    s.add_argument("--budget", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_schmidt)

    f = sub.add_parser("filter", help="MUB-trio admissibility filter")
    f.add_argument("file")
    f.add_argument("--tol", type=float, default=DEFAULT_TOL.structural_tol)
    f.set_defaults(func=cmd_filter)

    k = sub.add_parser("sinkhorn", help="Sinkhorn normal form and an unbiased vector")
    k.add_argument("file")
    k.add_argument("--tol", type=float, default=DEFAULT_TOL.search_tol)
    k.add_argument("--max-iter", type=int, default=100_000)
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(func=cmd_sinkhorn)

    m = sub.add_parser("musearch", help="search for vectors unbiased to I and U")
    m.add_argument("file")
    m.add_argument("--trials", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--tol", type=float, default=DEFAULT_TOL.search_tol)
    m.add_argument("--out", help="write the vectors (one per row) to this matrix file")
    m.set_defaults(func=cmd_musearch)

    t = sub.add_parser("ppt", help="partial-transpose test of a density matrix")
    t.add_argument("file")
    t.set_defaults(func=cmd_ppt)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except ConvergenceError as e:
        sys.stderr.write(f"convergence failure: {e}\n")
        return EXIT_CONVERGENCE
    except (ValidationError, ValueError) as e:
        sys.stderr.write(f"validation error: {e}\n")
        return EXIT_VALIDATION
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error for us
        sys.stdout = open(os.devnull, "w")
        return 0


if __name__ == "__main__":
    sys.exit(main())
