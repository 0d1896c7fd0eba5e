"""Landau-Ginzburg side: the unfolding F_A, its Jacobian algebra and critical data.

    F_A(x; s, s_mu) = x1^a1 + x2^a2 + x3^a3 - x1 x2 x3 / s_mu
                      + s1 + sum_{i,j} s_{i,j} x_i^j

The Jacobian algebra C[x]/(dF/dx1, dF/dx2, dF/dx3) is built exactly over
the Gaussian rationals from a reduced Groebner basis.  Critical values are
the eigenvalues of multiplication by F (Stickelberger), critical points come
from the common eigenvectors of multiplication by x1, x2, x3 and are then
polished by Newton's method on grad F = 0.

Deformation parameters are rounded once to Gaussian rationals (denominator
at most ``RATIONAL_DENOMINATOR``) when an :class:`UnfoldingPoint` is built,
and every later float evaluation uses the rounded values, so the exact and
floating computations always describe the same point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import mpmath
import numpy as np
import sympy as sp

from .errors import DegeneratePoint, DimensionMismatch, Inadmissible, NewtonDivergence, ZeroHessian
from .orbifold import OrbifoldType

__all__ = [
    "UnfoldingPoint",
    "JacobianAlgebra",
    "CriticalData",
    "ExponentData",
    "SectorConfig",
    "SectorReport",
    "eval_unfolding",
    "grad_unfolding",
    "hessian_unfolding",
    "build_jacobian_algebra",
    "kodaira_spencer_class",
    "euler_field",
    "critical_data",
    "canonical_frame",
    "exponent_data",
    "assemble_UV",
    "sector_analysis",
    "wall_angles",
    "choose_phi",
    "generic_point",
]

RATIONAL_DENOMINATOR = 10**6

_X = sp.symbols("x1 x2 x3")

Direction = Union[str, tuple[int, int]]


def _gauss_rational(z: complex, den: int = RATIONAL_DENOMINATOR) -> tuple[Fraction, Fraction]:
    z = complex(z)
    return (Fraction(z.real).limit_denominator(den), Fraction(z.imag).limit_denominator(den))


def _to_sympy(c: tuple[Fraction, Fraction]) -> sp.Expr:
    re, im = c
    return sp.Rational(re.numerator, re.denominator) + sp.I * sp.Rational(im.numerator, im.denominator)


def _to_complex(c: tuple[Fraction, Fraction]) -> complex:
    return complex(float(c[0]), float(c[1]))


@dataclass(frozen=True)
class UnfoldingPoint:
    """A point (s1, s_{i,j}, s_mu) of the deformation space.

    Use :meth:`make`; it rounds the inputs to Gaussian rationals.
    ``s_arm`` is keyed by 1-based (arm, power).
    """

    s1: complex
    s_arm: Mapping[tuple[int, int], complex]
    s_mu: complex
    exact: dict = field(default=None, repr=False, compare=False, hash=False)

    @classmethod
    def make(cls, s1: complex = 0.0, s_arm: Mapping[tuple[int, int], complex] | None = None,
             s_mu: complex = 1.0) -> UnfoldingPoint:
        ex_mu = _gauss_rational(s_mu)
        if ex_mu == (0, 0):
            raise ValueError("s_mu must be nonzero")
        ex_1 = _gauss_rational(s1)
        ex_arm = {}
        for key, v in (s_arm or {}).items():
            r = _gauss_rational(v)
            if r != (0, 0):
                ex_arm[(int(key[0]), int(key[1]))] = r
        exact = {"s1": ex_1, "s_mu": ex_mu, "s_arm": ex_arm}
        return cls(s1=_to_complex(ex_1), s_mu=_to_complex(ex_mu),
                   s_arm={k: _to_complex(v) for k, v in sorted(ex_arm.items())}, exact=exact)

    @classmethod
    def origin(cls, q: complex = 1.0) -> UnfoldingPoint:
        """The undeformed cusp polynomial f_A at s = (0, 0, q)."""
        return cls.make(0.0, {}, q)

    @property
    def t_mu(self) -> complex:
        # principal branch of log s_mu
        return cmath.log(self.s_mu)

    def validate(self, A: OrbifoldType) -> None:
        for (i, j) in self.s_arm:
            if not (1 <= i <= 3 and 1 <= j <= A.a[i - 1] - 1):
                raise ValueError(f"no deformation direction s_{i},{j} for A = {A.a}")

    def to_dict(self) -> dict:
        return {"s1": [self.s1.real, self.s1.imag],
                "s_arm": {f"{i},{j}": [v.real, v.imag] for (i, j), v in self.s_arm.items()},
                "s_mu": [self.s_mu.real, self.s_mu.imag]}


def _terms(A: OrbifoldType, s: UnfoldingPoint) -> dict[tuple[int, int, int], complex]:
    t: dict[tuple[int, int, int], complex] = {}

    def add(e, c):
        t[e] = t.get(e, 0) + c

    for i, ai in enumerate(A.a):
        e = [0, 0, 0]
        e[i] = ai
        add(tuple(e), 1.0)
    add((1, 1, 1), -1.0 / s.s_mu)
    add((0, 0, 0), s.s1)
    for (i, j), c in s.s_arm.items():
        e = [0, 0, 0]
        e[i - 1] = j
        add(tuple(e), c)
    return t


def _sympy_unfolding(A: OrbifoldType, s: UnfoldingPoint) -> sp.Expr:
    x1, x2, x3 = _X
    ex = s.exact
    f = x1**A.a[0] + x2**A.a[1] + x3**A.a[2] - x1 * x2 * x3 / _to_sympy(ex["s_mu"]) + _to_sympy(ex["s1"])
    for (i, j), c in ex["s_arm"].items():
        f += _to_sympy(c) * _X[i - 1]**j
    return sp.expand(f)


def eval_unfolding(A: OrbifoldType, s: UnfoldingPoint, x: Sequence[complex]) -> complex:
    x = np.asarray(x, dtype=complex)
    return complex(sum(c * np.prod(x ** np.array(e)) for e, c in _terms(A, s).items()))


def grad_unfolding(A: OrbifoldType, s: UnfoldingPoint, x: Sequence[complex]) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    g = np.zeros(3, dtype=complex)
    for e, c in _terms(A, s).items():
        for k in range(3):
            if e[k]:
                ek = list(e)
                ek[k] -= 1
                g[k] += c * e[k] * np.prod(x ** np.array(ek))
    return g


def hessian_unfolding(A: OrbifoldType, s: UnfoldingPoint, x: Sequence[complex]) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    H = np.zeros((3, 3), dtype=complex)
    for e, c in _terms(A, s).items():
        for k in range(3):
            for l in range(3):
                ek = list(e)
                coef = ek[k]
                ek[k] -= 1
                if coef == 0:
                    continue
                coef *= ek[l]
                ek[l] -= 1
                if coef == 0:
                    continue
                H[k, l] += c * coef * np.prod(x ** np.array(ek))
    return H


@dataclass
class JacobianAlgebra:
    """Finite-dimensional algebra C[x]/(grad F) with multiplication matrices.

    ``mult_ops[k][:, b]`` holds the coordinates of x_{k+1} * basis[b];
    ``mult_F`` does the same for F itself.  ``basis[0]`` is the unit.
    """

    A: OrbifoldType
    point: UnfoldingPoint
    basis: list[tuple[int, int, int]]
    mult_ops: list[np.ndarray]
    mult_F: np.ndarray
    groebner: sp.polys.polytools.GroebnerBasis = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    mult_F_exact: list[list[sp.Expr]] = field(default_factory=list, repr=False)

    def exact_coordinates(self, poly: sp.Expr) -> list[sp.Expr]:
        """Exact (Gaussian rational) coordinates of the class of ``poly``."""
        _, rem = self.groebner.reduce(sp.expand(poly))
        vec = [sp.Integer(0)] * self.dimension
        index = {m: i for i, m in enumerate(self.basis)}
        for mon, c in sp.Poly(rem, *_X).terms():
            if mon not in index:
                raise DimensionMismatch(f"remainder monomial {mon} outside the normal set")
            vec[index[mon]] = c
        return vec

    def coordinates(self, poly: sp.Expr) -> np.ndarray:
        """Coordinates of the class of a polynomial in ``basis`` (exact reduction)."""
        return np.array([complex(c) for c in self.exact_coordinates(poly)], dtype=complex)

    def critical_values_mp(self, dps: int = 40) -> np.ndarray:
        """Eigenvalues of multiplication by F, computed in extended precision
        from the exact matrix and rounded to complex doubles."""
        with mpmath.workdps(dps):
            M = mpmath.matrix([[_to_mpc(c) for c in row] for row in self.mult_F_exact])
            ev = mpmath.eig(M, left=False, right=False)
            return np.array([complex(z) for z in ev])

    def commutator_defect(self) -> float:
        worst = 0.0
        for a in range(3):
            for b in range(a + 1, 3):
                Ma, Mb = self.mult_ops[a], self.mult_ops[b]
                scale = np.linalg.norm(Ma) * np.linalg.norm(Mb) or 1.0
                worst = max(worst, np.linalg.norm(Ma @ Mb - Mb @ Ma) / scale)
        return worst


def _standard_monomials(lead: list[tuple[int, int, int]], bound: int) -> list[tuple[int, int, int]]:
    out = []
    for d in range(bound + 1):
        for i in range(d, -1, -1):
            for j in range(d - i, -1, -1):
                m = (i, j, d - i - j)
                if not any(all(m[k] >= l[k] for k in range(3)) for l in lead):
                    out.append(m)
    return out


def build_jacobian_algebra(A: OrbifoldType, s: UnfoldingPoint) -> JacobianAlgebra:
    s.validate(A)
    F = _sympy_unfolding(A, s)
    grads = [sp.diff(F, v) for v in _X]
    G = sp.groebner(grads, *_X, order="grevlex", domain=sp.QQ_I)
    lead = [sp.Poly(g, *_X).monoms(order="grevlex")[0] for g in G.exprs]
    # zero-dimensional iff every variable has a pure power among the leading monomials
    for k in range(3):
        if not any(l[k] > 0 and sum(l) == l[k] for l in lead):
            raise DimensionMismatch(f"Jacobian ideal is not zero-dimensional at {s}")
    bound = sum(max(l[k] for l in lead if sum(l) == l[k]) for k in range(3))
    basis = _standard_monomials(lead, bound)
    if len(basis) != A.mu_A:
        raise DimensionMismatch(f"quotient has dimension {len(basis)}, expected mu_A = {A.mu_A}")
    alg = JacobianAlgebra(A=A, point=s, basis=basis, mult_ops=[], mult_F=np.zeros(0), groebner=G)
    monos = [sp.Mul(*[v**e for v, e in zip(_X, m)]) for m in basis]
    alg.mult_ops = [np.column_stack([alg.coordinates(v * b) for b in monos]) for v in _X]
    cols = [alg.exact_coordinates(F * b) for b in monos]
    alg.mult_F_exact = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols))]
    alg.mult_F = np.array([[complex(c) for c in row] for row in alg.mult_F_exact], dtype=complex)
    return alg


def _to_mpc(c: sp.Expr) -> mpmath.mpc:
    re, im = c.as_real_imag()
    return mpmath.mpc(mpmath.mpf(sp.Rational(re).p) / sp.Rational(re).q,
                      mpmath.mpf(sp.Rational(im).p) / sp.Rational(im).q)


def euler_field(A: OrbifoldType, s: UnfoldingPoint) -> dict[Direction, complex]:
    """Coefficients of the Euler vector field along each deformation direction."""
    E: dict[Direction, complex] = {"s1": s.s1}
    for i, ai in enumerate(A.a, start=1):
        for j in range(1, ai):
            E[(i, j)] = (ai - j) / ai * s.s_arm.get((i, j), 0.0)
    E["s_mu"] = float(A.chi_A) * s.s_mu
    return E


def _partial_F(A: OrbifoldType, s: UnfoldingPoint, direction: Direction) -> sp.Expr:
    x1, x2, x3 = _X
    if direction == "s1":
        return sp.Integer(1)
    if direction == "s_mu":
        mu = _to_sympy(s.exact["s_mu"])
        return x1 * x2 * x3 / mu**2
    i, j = direction
    if not (1 <= i <= 3 and 1 <= j <= A.a[i - 1] - 1):
        raise ValueError(f"no deformation direction s_{i},{j} for A = {A.a}")
    return _X[i - 1]**j


def kodaira_spencer_class(A: OrbifoldType, s: UnfoldingPoint, direction,
                          algebra: JacobianAlgebra | None = None) -> np.ndarray:
    """Coordinates of [dF/d(direction)] in the algebra basis.

    ``direction`` is ``"s1"``, ``"s_mu"``, an arm pair ``(i, j)``, or a
    mapping of such directions to coefficients (a vector field).
    """
    alg = algebra or build_jacobian_algebra(A, s)
    if isinstance(direction, Mapping):
        return sum(complex(c) * alg.coordinates(_partial_F(A, s, d)) for d, c in direction.items())
    return alg.coordinates(_partial_F(A, s, direction))


@dataclass
class CriticalData:
    points: np.ndarray           # (mu, 3)
    values: np.ndarray           # eigenvalues of mult_F, paired with points
    refined_values: np.ndarray   # F evaluated at the Newton-refined points
    hessians: np.ndarray
    grad_norms: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        c = lambda z: [float(z.real), float(z.imag)]
        return {"points": [[c(v) for v in p] for p in self.points],
                "values": [c(w) for w in self.values],
                "refined_values": [c(w) for w in self.refined_values],
                "hessians": [c(h) for h in self.hessians]}


def _min_gap(values: np.ndarray) -> float:
    v = np.asarray(values)
    if len(v) < 2:
        return math.inf
    d = np.abs(v[:, None] - v[None, :])
    d[np.diag_indices(len(v))] = np.inf
    return float(d.min())


def _newton(A, s, p, tol=1e-12, maxiter=50):
    p = np.array(p, dtype=complex)
    for _ in range(maxiter):
        step = np.linalg.solve(hessian_unfolding(A, s, p), grad_unfolding(A, s, p))
        p = p - step
        if np.linalg.norm(step) <= tol * max(1.0, np.linalg.norm(p)):
            return p
    raise NewtonDivergence(f"Newton refinement did not converge near {p}")


def _polish_mp(A: OrbifoldType, s: UnfoldingPoint, p, dps: int = 40, steps: int = 4):
    F = _sympy_unfolding(A, s)
    grad = [sp.diff(F, v) for v in _X]
    hess = [[sp.diff(g, v) for v in _X] for g in grad]
    f_F = sp.lambdify(_X, F, "mpmath")
    f_g = sp.lambdify(_X, grad, "mpmath")
    f_h = sp.lambdify(_X, hess, "mpmath")
    with mpmath.workdps(dps):
        x = mpmath.matrix([mpmath.mpc(z) for z in p])
        for _ in range(steps):
            g = mpmath.matrix(f_g(*x))
            H = mpmath.matrix(f_h(*x))
            x = x - mpmath.lu_solve(H, g)
        return list(x), f_F(*x), float(mpmath.norm(mpmath.matrix(f_g(*x))))


def critical_data(A: OrbifoldType, s: UnfoldingPoint, algebra: JacobianAlgebra | None = None,
                  collision_tol: float = 1e-8, newton_tol: float = 1e-12) -> CriticalData:
    alg = algebra or build_jacobian_algebra(A, s)
    values_eig = alg.critical_values_mp()
    scale = max(1.0, float(np.median(np.abs(values_eig))))
    if _min_gap(values_eig) < collision_tol * scale:
        raise DegeneratePoint(f"critical values collide at {s.to_dict()}; perturb the arm parameters")
    # a generic combination separates the points
    coef = np.array([1.0, math.sqrt(2) * 1j, math.sqrt(3) + 0.5j])
    C = sum(c * M for c, M in zip(coef, alg.mult_ops))
    _, V = np.linalg.eig(C)
    Vinv = np.linalg.inv(V)
    coords = np.array([np.diag(Vinv @ M @ V) for M in alg.mult_ops]).T
    paired = np.diag(Vinv @ alg.mult_F @ V)
    # snap the paired diagonal onto the directly computed spectrum
    values = np.array([values_eig[np.argmin(np.abs(values_eig - w))] for w in paired])
    points = np.array([_newton(A, s, p, tol=newton_tol) for p in coords])
    # far-out critical points have huge values with heavy cancellation, so the
    # final polish and evaluation run in extended precision
    polished = [_polish_mp(A, s, p) for p in points]
    points = np.array([[complex(z) for z in p] for p, _, _ in polished])
    refined = np.array([complex(v) for _, v, _ in polished])
    grads = np.array([g for _, _, g in polished])
    hess = np.array([np.linalg.det(hessian_unfolding(A, s, p)) for p in points])
    return CriticalData(points=points, values=values, refined_values=refined,
                        hessians=hess, grad_norms=grads)


def canonical_frame(A: OrbifoldType, s: UnfoldingPoint, crit: CriticalData,
                    tol: float = 1e-12) -> list[tuple[complex, complex]]:
    """(eta(d/dw_i, d/dw_i), Psi_1i) per critical point.

    eta_ii = -exp(-2 t_mu) / Delta_i and Psi_1i = exp(-t_mu) / sqrt(-Delta_i),
    principal square root, t_mu the principal log of s_mu.
    """
    t = s.t_mu
    out = []
    for d in crit.hessians:
        if abs(d) <= tol:
            raise ZeroHessian(f"vanishing Hessian determinant {d}")
        out.append((-cmath.exp(-2 * t) / d, cmath.exp(-t) / cmath.sqrt(-d)))
    return out


@dataclass(frozen=True)
class ExponentData:
    degrees: tuple[Fraction, ...]
    directions: tuple[Direction, ...]

    @property
    def V(self) -> np.ndarray:
        return np.diag([float(q - Fraction(1, 2)) for q in self.degrees])

    @property
    def V_exact(self) -> tuple[Fraction, ...]:
        return tuple(q - Fraction(1, 2) for q in self.degrees)


def exponent_data(A: OrbifoldType) -> ExponentData:
    """Degrees q_i in the order unit, s_{1,1}, ..., s_{3,a3-1}, s_mu."""
    degs: list[Fraction] = [Fraction(0)]
    dirs: list[Direction] = ["s1"]
    for i, ai in enumerate(A.a, start=1):
        for j in range(1, ai):
            degs.append(Fraction(j, ai))
            dirs.append((i, j))
    degs.append(Fraction(1))
    dirs.append("s_mu")
    return ExponentData(degrees=tuple(degs), directions=tuple(dirs))


def assemble_UV(A: OrbifoldType, s: UnfoldingPoint, exponents: ExponentData | None = None,
                algebra: JacobianAlgebra | None = None) -> tuple[np.ndarray, np.ndarray]:
    """U as multiplication by F in the algebra basis, V = diag(q_i - 1/2)."""
    alg = algebra or build_jacobian_algebra(A, s)
    exponents = exponents or exponent_data(A)
    return alg.mult_F.copy(), exponents.V


# --- admissible lines --------------------------------------------------------

@dataclass(frozen=True)
class SectorConfig:
    phi: float
    eps: float

    @property
    def D_right(self) -> tuple[float, float]:
        return (self.phi - math.pi - self.eps, self.phi + self.eps)

    @property
    def D_left(self) -> tuple[float, float]:
        return (self.phi - self.eps, self.phi + math.pi + self.eps)

    @property
    def D_plus(self) -> tuple[float, float]:
        return (self.phi - self.eps, self.phi + self.eps)


@dataclass(frozen=True)
class SectorReport:
    phi: float
    admissible: bool
    margin: float
    order: tuple[int, ...] | None

    def config(self) -> SectorConfig:
        if not self.admissible:
            raise Inadmissible(f"line at phi = {self.phi} is not admissible")
        return SectorConfig(phi=self.phi, eps=self.margin)

    def to_dict(self) -> dict:
        return {"phi": self.phi, "admissible": self.admissible, "margin": self.margin,
                "order": list(self.order) if self.order is not None else None}


def wall_angles(values: Sequence[complex]) -> np.ndarray:
    """Sorted angles phi in [0, pi) at which some pair becomes non-admissible."""
    v = np.asarray(values, dtype=complex)
    out = [(cmath.phase(v[a] - v[b]) + math.pi / 2) % math.pi
           for a in range(len(v)) for b in range(a + 1, len(v))]
    return np.sort(np.array(out, dtype=float))


def _margin(walls: np.ndarray, phi: float) -> float:
    if len(walls) == 0:
        return math.pi / 2
    d = np.abs((walls - phi + math.pi / 2) % math.pi - math.pi / 2)
    return float(d.min())


def sector_analysis(values: Sequence[complex], phi: float, tol: float = 1e-9,
                    strict: bool = False) -> SectorReport:
    v = np.asarray(values, dtype=complex)
    rot = v * cmath.exp(-1j * phi)
    admissible = True
    for a in range(len(v)):
        for b in range(a + 1, len(v)):
            diff = v[a] - v[b]
            if abs((diff * cmath.exp(-1j * phi)).real) <= tol * max(1.0, abs(diff)):
                admissible = False
    if not admissible:
        if strict:
            raise Inadmissible(f"line at phi = {phi} is orthogonal to a critical-value difference")
        return SectorReport(phi=phi, admissible=False, margin=0.0, order=None)
    order = tuple(int(i) for i in np.argsort(rot.real, kind="stable"))
    return SectorReport(phi=phi, admissible=True, margin=_margin(wall_angles(v), phi), order=order)


def choose_phi(values: Sequence[complex], preferred: float = math.pi / 2,
               min_margin: float = 0.05) -> float:
    """Keep ``preferred`` if its margin is at least ``min_margin``,
    otherwise take the midpoint of the widest gap between walls."""
    walls = wall_angles(values)
    if len(walls) == 0 or _margin(walls, preferred) >= min_margin:
        return preferred
    ext = np.concatenate([walls, [walls[0] + math.pi]])
    i = int(np.argmax(np.diff(ext)))
    return float(((ext[i] + ext[i + 1]) / 2) % math.pi)


def generic_point(A: OrbifoldType, q: complex = 1.0, seed: int = 0, scale: float = 0.3,
                  min_gap: float = 1e-4, attempts: int = 20) -> UnfoldingPoint:
    """s = (0, 0, q) when its critical values are well separated, otherwise a
    seeded random perturbation of the s_{i,1} directions."""
    s = UnfoldingPoint.origin(q)
    if _separated(A, s, min_gap):
        return s
    rng = np.random.default_rng(seed)
    arms = [i for i in (1, 2, 3) if A.a[i - 1] >= 2]
    if not arms:
        raise DegeneratePoint(f"no arm directions to perturb for A = {A.a}")
    for _ in range(attempts):
        z = scale * (rng.standard_normal(len(arms)) + 1j * rng.standard_normal(len(arms)))
        cand = UnfoldingPoint.make(0.0, {(i, 1): complex(c) for i, c in zip(arms, z)}, q)
        if _separated(A, cand, min_gap):
            return cand
    raise DegeneratePoint(f"could not find a semisimple perturbation for A = {A.a}")


def _separated(A: OrbifoldType, s: UnfoldingPoint, min_gap: float) -> bool:
    vals = np.linalg.eigvals(build_jacobian_algebra(A, s).mult_F)
    # median, not max: a few far-out values would otherwise swamp the scale
    return _min_gap(vals) >= min_gap * max(1.0, float(np.median(np.abs(vals))))
