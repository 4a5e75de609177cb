"""Command-line front end.

Every subcommand reads a JSON problem file (``--input``) and writes JSON or
CSV to ``--output`` (a directory) or to standard output.  Exit codes: 0 on
success, 2 when a face is not invariant under the transition operator, 3 on
invalid input.

Problem file keys
-----------------
matrix      integer rows of M (required except for ``bspline`` without analysis)
digits      digit list; defaults to the canonical digits of M
mask        list of ``{"index": [...], "value": v}``; overrides digits
order       B-spline order l (default 0)
max_order   batch mode: analyze orders 0..max_order
max_k       cap on the k loop of the regularity analysis
nodes       node list for ``design``
faces       ``[{"label", "r_s", "constraints": [...]}]``; a constraint without
            ``order`` gets ``2(k+1)`` for each k analyzed
tolerances  ``{"nullity": 1e-10, "clustering": 1e-6}``
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .attractor import omega, tile_points
from .bspline import bspline_mask
from .errors import NotInvariant, RefinableError
from .lattice import (DigitSet, canonical_digits, digits_valid, rational_invariant_check,
                      spectral_moduli, validate_dilation)
from .mask import Mask
from .maskdesign import design_minimal_mask
from .subdivision import sample_refinable
from .transition import Face, regularity
from .trigpoly import ZeroConstraint

__all__ = ["main", "build_parser", "load_problem"]

EXIT_OK, EXIT_NOT_INVARIANT, EXIT_INVALID = 0, 2, 3


class InputError(RefinableError):
    """Malformed problem file."""


def _fmt(x):
    return float(f"{float(x):.12g}")


def load_problem(path) -> dict:
    try:
        text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("problem file must hold a JSON object")
    return data


def _matrix(problem):
    if "matrix" not in problem:
        raise InputError("problem file lacks 'matrix'")
    rows = problem["matrix"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("'matrix' must be a list of integer rows")
    if any(not isinstance(x, int) or isinstance(x, bool) for r in rows for x in r):
        raise InputError("matrix entries must be integers")
    return validate_dilation(rows)


def _digits(problem, M):
    if "digits" not in problem:
        return canonical_digits(M)
    D = DigitSet(tuple(tuple(int(x) for x in d) for d in problem["digits"]))
    if not digits_valid(M, D):
        raise InputError("digits are not a complete set of coset representatives")
    return D


def _mask(problem, M, order):
    if "mask" in problem:
        return Mask.from_json(problem["mask"])
    return bspline_mask(_digits(problem, M), order)


def _face_factory(problem, n):
    raw = problem.get("faces")
    if not raw:
        return None

    def build(k):
        faces = []
        for f in raw:
            cons = []
            for c in f.get("constraints", ()):
                c = dict(c)
                c.setdefault("order", 2 * (k + 1))
                cons.append(ZeroConstraint.from_json(c))
            faces.append(Face(str(f["label"]), float(f["r_s"]), tuple(cons)))
        return faces

    build(0)
    return build


def _orders(problem, args):
    top = args.max_order if args.max_order is not None else problem.get("max_order")
    if top is not None:
        return list(range(int(top) + 1)), True
    return [int(problem.get("order", 0))], False


def cmd_analyze(problem, args):
    M = _matrix(problem)
    tol = args.tolerance if args.tolerance is not None else problem.get("tolerances", {}).get("nullity")
    faces = _face_factory(problem, M.n)
    orders, batch = _orders(problem, args)
    max_k = problem.get("max_k")
    reports = []
    for ell in orders:
        mask = _mask(problem, M, ell)
        rep = regularity(M, mask, max_k=max_k, rtol=tol, faces=faces)
        reports.append((ell, rep))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["order", "k", "dim", "rho", "alpha_candidate", "alpha"])
        for ell, rep in reports:
            for row in rep.table:
                w.writerow([ell, row.k, row.dim, f"{row.rho:.12g}", f"{row.half_log:.12g}",
                            "" if rep.alpha is None else f"{rep.alpha:.12g}"])
        return buf.getvalue(), "analyze.csv"
    if batch:
        out = {"rows": [{"order": ell, "report": rep.to_json()} for ell, rep in reports]}
    else:
        out = reports[0][1].to_json()
    return _dump(out), "analyze.json"


def cmd_omega(problem, args):
    M = _matrix(problem)
    mask = _mask(problem, M, int(problem.get("order", 0)))
    S = omega(M, mask.support)
    return _dump({"size": len(S), "omega": S.to_json()}), "omega.json"


def cmd_tile(problem, args):
    M = _matrix(problem)
    D = _digits(problem, M)
    depth = args.depth if args.depth is not None else int(problem.get("depth", 6))
    cloud = tile_points(M, D, depth, sample=problem.get("sample"), seed=args.seed)
    if args.format == "json":
        return _dump({"depth": cloud.depth, "count": cloud.count, "sampled": cloud.sampled,
                      "points": [[_fmt(x) for x in p] for p in cloud.points]}), "tile.json"
    buf = io.StringIO()
    cloud.to_csv(buf)
    return buf.getvalue(), "tile.csv"


def cmd_bspline(problem, args):
    if "matrix" in problem:
        M = _matrix(problem)
        D = _digits(problem, M)
    else:
        D = DigitSet(tuple(tuple(int(x) for x in d) for d in problem["digits"]))
    order = args.max_order if args.max_order is not None else int(problem.get("order", 0))
    return _dump({"order": order, "mask": bspline_mask(D, order).to_json()}), "bspline.json"


def cmd_subdivide(problem, args):
    M = _matrix(problem)
    mask = _mask(problem, M, int(problem.get("order", 0)))
    depth = args.depth if args.depth is not None else int(problem.get("depth", 4))
    grid = sample_refinable(mask, M, depth)
    if args.format == "json":
        return _dump({"level": grid.level,
                      "points": grid.points.tolist(),
                      "values": [_fmt(v) for v in grid.values]}), "subdivide.json"
    buf = io.StringIO()
    grid.to_csv(buf)
    return buf.getvalue(), "subdivide.csv"


def cmd_design(problem, args):
    M = _matrix(problem)
    order = args.max_order if args.max_order is not None else int(problem.get("order", 0))
    mask = design_minimal_mask(M, order, problem.get("nodes"))
    return _dump({"order": order, "mask": mask.to_json()}), "design.json"


def cmd_spectra(problem, args):
    M = _matrix(problem)
    tol = args.tolerance if args.tolerance is not None else problem.get("tolerances", {}).get("clustering")
    st = spectral_moduli(M, tol)
    out = {"matrix": M.to_json(),
           "m": M.m,
           "eigenvalues": [[_fmt(z.real), _fmt(z.imag)] for z in M.eigenvalues],
           "moduli": [_fmt(r) for r in st.moduli],
           "multiplicities": list(st.multiplicities),
           "clustering_tolerance": st.clustering_tolerance,
           "digits": canonical_digits(M).to_json(),
           "digits_transpose": canonical_digits(M, transpose=True).to_json(),
           "invariant_subspace": rational_invariant_check(M).to_json()}
    return _dump(out), "spectra.json"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


COMMANDS = {"analyze": cmd_analyze, "omega": cmd_omega, "tile": cmd_tile,
            "bspline": cmd_bspline, "subdivide": cmd_subdivide,
            "design": cmd_design, "spectra": cmd_spectra}

HELP = {"analyze": "regularity report (sum rules, rho_k table, alpha)",
        "omega": "the support set Omega as a sorted JSON list",
        "tile": "point cloud of the attractor (CSV)",
        "bspline": "tile B-spline mask",
        "subdivide": "samples S^j delta of the refinable function (CSV)",
        "design": "minimal-support mask for |det M| = 2",
        "spectra": "eigenvalues, moduli, digits and invariant-subspace verdict"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="refinable",
                                description="L2 regularity of refinable functions.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=HELP[name])
        s.add_argument("--input", "-i", required=True, help="problem file (JSON), '-' for stdin")
        s.add_argument("--output", "-o", help="output directory (default: stdout)")
        s.add_argument("--max-order", type=int, help="batch over orders 0..N (order for bspline/design)")
        s.add_argument("--tolerance", type=float, help="nullity threshold (analyze) or clustering tolerance (spectra)")
        s.add_argument("--depth", type=int, help="digit depth (tile) or subdivision level (subdivide)")
        s.add_argument("--format", choices=("json", "csv"), default=None)
        s.add_argument("--seed", type=int, default=0, help="sampling seed for tile")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in ("tile", "subdivide") else "json"
    try:
        problem = load_problem(args.input)
        text, name = COMMANDS[args.command](problem, args)
    except NotInvariant as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_INVARIANT
    except (RefinableError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
