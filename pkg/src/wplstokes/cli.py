"""``wplstokes`` command-line interface.

Subcommands::

    euler     Euler matrix of the canonical collection
    jacobian  Jacobian algebra basis, dimension and exponents
    critical  critical points/values and the admissible-line analysis
    stokes1d  numerical Stokes matrix (a1 = 1 family)
    lattice   Gram matrix, Coxeter invariants and property checks
    mutate    replay a move script such as "b3 s1 B2" on a matrix
    verify    full pipeline with a JSON/text/SVG report

Exit codes: 0 success, 2 check failed, 3 degenerate or invalid input,
4 inconclusive equivalence search, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import WplError
from .jacobian import (build_jacobian_algebra, choose_phi, critical_data, exponent_data,
                       generic_point, sector_analysis)
from .lattice import MoveSequence, coxeter_invariants, is_unitriangular
from .mirror1d import reduce_to_1d, stokes_numeric
from .orbifold import canonical_collection_euler_matrix, format_matrix, make_orbifold
from .report import (SCHEMA, VerifyOptions, cache_key, content_hash, emit, lattice_property_checks,
                     load_report, run_verify)
from .svg import critical_value_svg, thimble_svg

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_NUMERIC = 0, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _triple(text: str) -> tuple[int, int, int]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated integers, e.g. 1,2,3")
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex(text: str) -> complex:
    parts = text.replace(" ", "").split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError("expected 're' or 're,im'")


def _matrix(text: str) -> np.ndarray:
    """A JSON matrix literal, or a path to a JSON file holding one (or a report)."""
    p = Path(text)
    data = json.loads(p.read_text()) if p.exists() else json.loads(text)
    if isinstance(data, dict):
        for key in ("S", "matrix"):
            if key in data:
                data = data[key]
                break
        else:
            raise argparse.ArgumentTypeError("JSON object has no 'S' or 'matrix' entry")
    return np.array(data, dtype=np.int64)


def _c(z: complex) -> list[float]:
    return [float(complex(z).real), float(complex(z).imag)]


def _out(payload: dict, args, text: str | None = None) -> None:
    payload = {"schema": SCHEMA, "tool_version": __version__, **payload}
    if args.format == "text" and text is not None:
        body = text if text.endswith("\n") else text + "\n"
    else:
        body = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(body)
    else:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body)


# --- subcommands --------------------------------------------------------------

def cmd_euler(args) -> int:
    A = make_orbifold(*args.a)
    _, chi = canonical_collection_euler_matrix(A)
    _out({"A": list(A.a), "mu": A.mu_A, "chi_A": str(A.chi_A), **chi.to_dict()}, args,
         "\n".join(chi.labels) + "\n" + chi.to_text())
    return EXIT_OK


def cmd_jacobian(args) -> int:
    A = make_orbifold(*args.a)
    s = generic_point(A, args.q, seed=args.seed)
    alg = build_jacobian_algebra(A, s)
    ex = exponent_data(A)
    payload = {"A": list(A.a), "point": s.to_dict(), "dimension": alg.dimension, "mu": A.mu_A,
               "basis": [list(b) for b in alg.basis],
               "exponents": [str(d) for d in ex.degrees],
               "commutator_defect": alg.commutator_defect()}
    _out(payload, args, f"dim = {alg.dimension} (mu_A = {A.mu_A})\nbasis: {alg.basis}")
    return EXIT_OK if alg.dimension == A.mu_A else EXIT_CHECK


def cmd_critical(args) -> int:
    A = make_orbifold(*args.a)
    s = generic_point(A, args.q, seed=args.seed)
    crit = critical_data(A, s)
    phi = args.phi if args.phi is not None else choose_phi(crit.values)
    sector = sector_analysis(crit.values, phi)
    scale = max(1.0, float(np.abs(crit.values).max()))
    agree = float(np.abs(crit.values - crit.refined_values).max() / scale)
    payload = {"A": list(A.a), "point": s.to_dict(), **crit.to_dict(), "sector": sector.to_dict(),
               "eig_vs_newton": agree}
    text = "\n".join(f"{i}: w = {w:.12g}" for i, w in enumerate(crit.values))
    if args.format == "svg-bundle":
        out = Path(args.out or "wplstokes-out")
        out.mkdir(parents=True, exist_ok=True)
        (out / "critical_values.svg").write_text(critical_value_svg(crit.values, phi))
        args = argparse.Namespace(**{**vars(args), "out": str(out / "critical.json"), "format": "json"})
    _out(payload, args, text)
    return EXIT_OK if agree <= args.tol_crit else EXIT_CHECK


def cmd_stokes1d(args) -> int:
    A = make_orbifold(*args.a)
    s = generic_point(A, args.q, seed=args.seed)
    m = reduce_to_1d(A, s)
    R = stokes_numeric(m, phi=args.phi, Lam=args.lam, int_tol=args.tol_int)
    payload = {"A": list(A.a), "point": s.to_dict(), "mirror": m.to_dict(), **R.to_dict()}
    if args.format == "svg-bundle":
        out = Path(args.out or "wplstokes-out")
        out.mkdir(parents=True, exist_ok=True)
        pts = [t.x_c for t in R.thimbles_right]
        (out / "critical_values.svg").write_text(critical_value_svg(R.values, R.phi))
        for side, ths in (("right", R.thimbles_right), ("left", R.thimbles_left)):
            (out / f"thimbles_{side}.svg").write_text(thimble_svg(ths, pts))
        (out / "thimbles.json").write_text(json.dumps(
            {"right": [t.to_dict() for t in R.thimbles_right],
             "left": [t.to_dict() for t in R.thimbles_left]}))
        args = argparse.Namespace(**{**vars(args), "out": str(out / "stokes.json"), "format": "json"})
    _out(payload, args, format_matrix(R.S.tolist()))
    return EXIT_OK


def _matrix_or_chi(args) -> np.ndarray:
    if args.matrix is not None:
        return args.matrix
    if args.a is None:
        raise ValueError("give --a or --matrix")
    return canonical_collection_euler_matrix(make_orbifold(*args.a))[1].array()


def cmd_lattice(args) -> int:
    S = _matrix_or_chi(args)
    if not is_unitriangular(S):
        print("matrix is not upper unitriangular", file=sys.stderr)
        return EXIT_INPUT
    opts = VerifyOptions(tol_unit=args.tol_unit)
    info = lattice_property_checks(S, args.seed, opts)
    _out({"S": S.tolist(), **info}, args,
         f"Coxeter polynomial: {info['coxeter_poly']}\n" +
         "\n".join(f"  {'PASS' if v else 'FAIL'}  {k}" for k, v in info["checks"].items()))
    return EXIT_OK if all(info["checks"].values()) else EXIT_CHECK


def cmd_mutate(args) -> int:
    S = _matrix_or_chi(args)
    seq = MoveSequence.parse(args.moves)
    T = seq.replay(S)
    poly_before, _ = coxeter_invariants(S)
    poly_after, _ = coxeter_invariants(T)
    _out({"moves": seq.to_text(), "before": S.tolist(), "after": T.tolist(),
          "coxeter_preserved": poly_before == poly_after}, args, format_matrix(T.tolist()))
    return EXIT_OK if poly_before == poly_after else EXIT_CHECK


def cmd_verify(args) -> int:
    opts = VerifyOptions(depth=args.depth, tol_int=args.tol_int, tol_crit=args.tol_crit,
                         tol_unit=args.tol_unit, lam=args.lam)
    cache_dir = Path(args.cache_dir) if args.cache_dir else None
    if cache_dir is None and args.out not in (None, "-"):
        out = Path(args.out)
        cache_dir = (out if args.format == "svg-bundle" else out.parent) / ".wplstokes-cache"
    cached = None
    if cache_dir is not None and not args.no_cache:
        cached = cache_dir / f"verify-{cache_key(args.a, args.q, args.seed, opts)}.json"
    if cached is not None and cached.exists() and args.format != "svg-bundle":
        report = load_report(cached)
    else:
        report = run_verify(args.a, args.q, args.seed, opts)
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            cached.write_text(report.to_json() + "\n")
    emit(report, args.format, args.out)
    print(f"content hash {content_hash(report)}", file=sys.stderr)
    return report.exit_code


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wplstokes", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, need_a=True, formats=("json", "text")):
        if need_a:
            p.add_argument("--a", type=_triple, required=True, help="isotropy orders, e.g. 1,2,3")
        p.add_argument("--q", type=_complex, default=complex(1.0), help="s_mu as 're' or 're,im'")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file (or directory for svg-bundle)")
        p.add_argument("--format", choices=formats, default="json")
        p.add_argument("--tol-int", type=float, default=1e-4)
        p.add_argument("--tol-crit", type=float, default=1e-9)
        p.add_argument("--tol-unit", type=float, default=1e-8)

    p = sub.add_parser("euler", help="Euler matrix of the canonical collection")
    common(p)
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("jacobian", help="Jacobian algebra summary")
    common(p)
    p.set_defaults(func=cmd_jacobian)

    p = sub.add_parser("critical", help="critical data and admissible line")
    common(p, formats=("json", "text", "svg-bundle"))
    p.add_argument("--phi", type=float, default=None)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("stokes1d", help="numerical Stokes matrix, a1 = 1")
    common(p, formats=("json", "text", "svg-bundle"))
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--lam", type=float, default=40.0)
    p.set_defaults(func=cmd_stokes1d)

    for name, func, hlp in (("lattice", cmd_lattice, "lattice invariants"),
                            ("mutate", cmd_mutate, "replay a move script")):
        p = sub.add_parser(name, help=hlp)
        common(p, need_a=False)
        p.add_argument("--a", type=_triple, default=None)
        p.add_argument("--matrix", type=_matrix, default=None,
                       help="JSON matrix literal or file (default: Euler matrix of --a)")
        if name == "mutate":
            p.add_argument("--moves", required=True, help='move script, e.g. "b3 s1 B2"')
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="full pipeline report")
    common(p, formats=("json", "text", "svg-bundle"))
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--lam", type=float, default=40.0)
    p.add_argument("--cache-dir", default=None,
                   help="fixture cache directory (default: .wplstokes-cache next to --out)")
    p.add_argument("--no-cache", action="store_true", help="bypass the fixture cache")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "phi", None) is not None and not math.isfinite(args.phi):
        print("phi must be finite", file=sys.stderr)
        return EXIT_INPUT
    try:
        return int(args.func(args))
    except WplError as exc:
        err = {"schema": SCHEMA, "error": type(exc).__name__, "stage": exc.stage,
               "message": str(exc)}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(json.dumps({"schema": SCHEMA, "error": "ValueError", "stage": "input",
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
