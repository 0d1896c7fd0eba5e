"""End-to-end verification reports.

``run_verify`` strings the library together: Euler matrix of the canonical
collection, critical data of the unfolding (perturbed when the undeformed
point is degenerate), the numerical Stokes matrix for a1 = 1, and the
move-sequence search connecting it to the Euler matrix.  For min a_i >= 2
it records lattice invariants and property checks instead.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .errors import EquivalenceInconclusive
from .jacobian import build_jacobian_algebra, choose_phi, critical_data, generic_point
from .lattice import (NotEquivalent, coxeter_invariants, equivalence_search, random_move_sequence)
from .mirror1d import reduce_to_1d, reduction_defect, stokes_numeric
from .orbifold import canonical_collection_euler_matrix, format_matrix, make_orbifold
from .svg import critical_value_svg, thimble_svg

SCHEMA = 1

__all__ = ["VerifyOptions", "VerifyReport", "run_verify", "emit", "load_report",
           "content_hash", "lattice_property_checks", "SCHEMA"]


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class VerifyOptions:
    depth: int = 12
    tol_int: float = 1e-4          # max distance of Stokes entries to Z
    tol_crit: float = 1e-9         # critical-value cross-checks (relative)
    tol_unit: float = 1e-8         # Coxeter roots vs the unit circle
    tol_residual: float = 1e-8     # moment residual after rounding
    lam: float = 40.0
    n_move_checks: int = 20
    move_length: int = 12

    def profile(self) -> dict:
        return asdict(self)


@dataclass
class VerifyReport:
    A: list[int]
    q: list[float]
    seed: int
    tolerances: dict
    chi_matrix: dict
    jacobian: dict
    stokes: dict | None
    lattice: dict
    equivalence: dict
    checks: dict[str, bool]
    timings: dict[str, float] = field(default_factory=dict)
    tool_version: str = __version__
    schema: int = SCHEMA
    # drawing material, not serialized
    artifacts: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def exit_code(self) -> int:
        if self.equivalence.get("status") == "inconclusive":
            return 4
        return 0 if self.passed else 2

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "artifacts"}
        d["passed"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> VerifyReport:
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        keys = {f for f in cls.__dataclass_fields__ if f != "artifacts"}
        return cls(**{k: d[k] for k in keys if k in d})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def content_hash(report: VerifyReport) -> str:
    """SHA-256 of the canonical JSON without timings."""
    d = report.to_dict()
    d.pop("timings", None)
    return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def lattice_property_checks(S: np.ndarray, seed: int, opts: VerifyOptions) -> dict:
    """det, diagonal, Coxeter polynomial and its invariance under random moves."""
    S = np.asarray(S, dtype=np.int64)
    poly, roots = coxeter_invariants(S)
    unit = float(np.abs(np.abs(roots) - 1).max()) if len(roots) else 0.0
    rng = np.random.default_rng(seed)
    invariant = True
    for _ in range(opts.n_move_checks):
        seq = random_move_sequence(rng, S.shape[0], opts.move_length)
        if coxeter_invariants(seq.replay(S))[0] != poly:
            invariant = False
    det = int(round(np.linalg.det(S)))
    return {
        "gram": (-(S + S.T)).tolist(),
        "coxeter_poly": poly,
        "coxeter_roots": [_c(z) for z in roots],
        "max_unit_circle_defect": unit,
        "det": det,
        "checks": {
            "det_is_one": det == 1,
            "diag_sym_is_two": bool(np.all(np.diag(S + S.T) == 2)),
            "coxeter_integer": all(isinstance(c, int) for c in poly),
            "coxeter_roots_on_unit_circle": unit <= opts.tol_unit,
            "coxeter_move_invariant": invariant,
        },
    }


def run_verify(a: tuple[int, int, int], q: complex = 1.0, seed: int = 0,
               options: VerifyOptions | None = None) -> VerifyReport:
    opts = options or VerifyOptions()
    timings: dict[str, float] = {}
    checks: dict[str, bool] = {}
    artifacts: dict[str, Any] = {}

    t0 = time.perf_counter()
    A = make_orbifold(*a)
    _, chi = canonical_collection_euler_matrix(A)
    timings["euler"] = time.perf_counter() - t0
    checks["chi_unitriangular"] = chi.is_unitriangular()

    t0 = time.perf_counter()
    s = generic_point(A, q, seed=seed)
    alg = build_jacobian_algebra(A, s)
    crit = critical_data(A, s, alg)
    timings["jacobian"] = time.perf_counter() - t0
    scale = max(1.0, float(np.abs(crit.values).max()))
    eig_vs_newton = float(np.abs(crit.values - crit.refined_values).max() / scale)
    checks["jacobian_dimension"] = alg.dimension == A.mu_A
    checks["critical_values_agree"] = eig_vs_newton <= opts.tol_crit
    artifacts["critical_values"] = crit.values
    jac = {"mu": A.mu_A, "dimension": alg.dimension, "point": s.to_dict(),
           "perturbed": bool(s.s_arm or s.s1),
           "critical_values": [_c(w) for w in crit.values],
           "eig_vs_newton": eig_vs_newton}

    lattice = lattice_property_checks(chi.array(), seed, opts)
    stokes = None
    if 1 in A.a:
        t0 = time.perf_counter()
        m = reduce_to_1d(A, s)
        red = reduction_defect(A, s, crit.values)
        checks["reduction_certificate"] = red <= opts.tol_crit
        R = stokes_numeric(m, Lam=opts.lam, int_tol=opts.tol_int)
        timings["stokes"] = time.perf_counter() - t0
        checks["stokes_integer"] = R.residual <= opts.tol_int
        checks["stokes_moment_residual"] = R.moment_residual <= opts.tol_residual
        G = R.gram()
        checks["stokes_gram_diagonal"] = bool(np.all(np.diag(G) == -2))
        stokes = R.to_dict()
        stokes["reduction_defect"] = red
        stokes["mirror"] = m.to_dict()
        artifacts["stokes"] = R
        artifacts["phi"] = R.phi

        t0 = time.perf_counter()
        try:
            seq = equivalence_search(R.S, chi.array(), max_depth=opts.depth)
            ok = bool(np.array_equal(seq.replay(R.S), chi.array()))
            equivalence = {"status": "found", "moves": seq.to_text(), "length": len(seq),
                           "max_depth": opts.depth}
            checks["equivalence_found"] = ok
        except NotEquivalent as exc:
            equivalence = {"status": "not_equivalent", "reason": str(exc), "max_depth": opts.depth}
            checks["equivalence_found"] = False
        except EquivalenceInconclusive as exc:
            equivalence = {"status": "inconclusive", "reason": str(exc), "max_depth": opts.depth,
                           "explored": exc.explored}
        timings["equivalence"] = time.perf_counter() - t0
    else:
        artifacts["phi"] = choose_phi(crit.values)
        equivalence = {"status": "skipped",
                       "reason": "no isotropy order equals 1; lattice properties checked instead"}
        checks.update({f"lattice_{k}": v for k, v in lattice["checks"].items()})

    return VerifyReport(A=list(A.a), q=_c(q), seed=int(seed), tolerances=opts.profile(),
                        chi_matrix=chi.to_dict(), jacobian=jac, stokes=stokes, lattice=lattice,
                        equivalence=equivalence, checks=checks,
                        timings={k: round(v, 6) for k, v in timings.items()},
                        artifacts=artifacts)


def report_text(report: VerifyReport) -> str:
    lines = [f"A = {tuple(report.A)}  q = {complex(*report.q)}  seed = {report.seed}",
             "Euler matrix of the canonical collection:",
             format_matrix(report.chi_matrix["matrix"])]
    if report.stokes is not None:
        lines += ["numerical Stokes matrix (dominance order):", format_matrix(report.stokes["S"]),
                  f"  residual to Z: {report.stokes['residual']:.2e}  "
                  f"condition: {report.stokes['condition']:.2e}"]
    lines.append(f"Coxeter polynomial: {report.lattice['coxeter_poly']}")
    eq = report.equivalence
    lines.append(f"equivalence: {eq['status']}" + (f"  [{eq['moves']}]" if eq.get("moves") else ""))
    for name, ok in report.checks.items():
        lines.append(f"  {'PASS' if ok else 'FAIL'}  {name}")
    return "\n".join(lines) + "\n"


def emit(report: VerifyReport, fmt: str = "json", path: str | Path | None = None) -> list[Path]:
    """Serialize ``report``; returns the files written (none when printing)."""
    if fmt == "json":
        return _write(report.to_json() + "\n", path)
    if fmt == "text":
        return _write(report_text(report), path)
    if fmt == "svg-bundle":
        out = Path(path or "wplstokes-out")
        out.mkdir(parents=True, exist_ok=True)
        files = [out / "report.json"]
        files[0].write_text(report.to_json() + "\n")
        values = report.artifacts.get("critical_values")
        if values is None:
            values = [complex(*w) for w in report.jacobian["critical_values"]]
        f = out / "critical_values.svg"
        f.write_text(critical_value_svg(values, report.artifacts.get("phi"),
                                        title=f"critical values A={tuple(report.A)}"))
        files.append(f)
        R = report.artifacts.get("stokes")
        if R is not None:
            pts = [t.x_c for t in R.thimbles_right]
            for side, ths in (("right", R.thimbles_right), ("left", R.thimbles_left)):
                f = out / f"thimbles_{side}.svg"
                f.write_text(thimble_svg(ths, pts, title=f"{side} thimbles A={tuple(report.A)}"))
                files.append(f)
        return files
    raise ValueError(f"unknown format {fmt!r}")


def _write(text: str, path) -> list[Path]:
    if path is None or str(path) == "-":
        print(text, end="")
        return []
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return [p]


def load_report(path: str | Path) -> VerifyReport:
    return VerifyReport.from_dict(json.loads(Path(path).read_text()))


def cache_key(a, q: complex, seed: int, opts: VerifyOptions) -> str:
    blob = json.dumps({"A": list(a), "q": _c(q), "seed": seed, "tol": opts.profile(),
                       "version": __version__}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]

