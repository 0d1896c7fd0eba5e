"""One-dimensional mirror for the a1 = 1 family.

When one isotropy order equals 1, the linear variable of F_A can be
integrated out (dF/dx1 = 0 forces x2 x3 = s_mu) and the oscillatory
integrals reduce to integrals over curves in C^* of

    g(x) = x^p + q^r x^{-r} + s1 + sum_j b_j x^j + sum_j c_j x^{-j}

against dx/x.  This module finds the critical points of g, traces Lefschetz
thimbles as steepest-descent curves, integrates the moments

    m_k(Gamma, u) = (2 pi u)^{-1/2} int_Gamma e^{g(x)/u} x^{k-1} dx

and recovers the integer Stokes matrix relating the thimble bases on the two
sides of an admissible line.

Thimbles are parametrized by sigma = sqrt(tau), i.e. along the curve

    g(x(sigma)) = w_i - e^{i theta} sigma^2,   sigma in [-S, S],

which is smooth through the saddle (x ~ x_i + v sigma with
v^2 = -2 e^{i theta} / g''(x_i)), so no square-root singularity needs
special treatment in either the tracer or the quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (DecayViolation, DegenerateCritical, IllConditioned, NonIntegerEntry,
                     NotReducible, QuadratureStall, SaddleCollision, StepFailure,
                     TriangularityViolation)
from .jacobian import UnfoldingPoint, _min_gap, choose_phi, sector_analysis, wall_angles
from .orbifold import OrbifoldType

__all__ = [
    "Mirror1D",
    "Thimble",
    "MomentMatrix",
    "StokesResult",
    "reduce_to_1d",
    "critical_points_1d",
    "wall_structure",
    "trace_thimble",
    "moment_integral",
    "moment_matrix",
    "stokes_numeric",
    "asymptotic_check",
    "reduction_defect",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class Mirror1D:
    """Laurent polynomial g on C^*.

    ``b[j]`` multiplies x^j (1 <= j < p) and ``c[j]`` multiplies x^{-j}
    (1 <= j < r); any power of q coming from the reduction is already
    absorbed into ``c``.
    """

    p: int
    r: int
    q: complex = 1.0
    s1: complex = 0.0
    b: Mapping[int, complex] = field(default_factory=dict)
    c: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.p < 1 or self.r < 1:
            raise ValueError(f"exponents must be positive, got p={self.p}, r={self.r}")
        if self.q == 0:
            raise ValueError("q must be nonzero")
        for j in self.b:
            if not 1 <= j < self.p:
                raise ValueError(f"b_{j} outside 1..{self.p - 1}")
        for j in self.c:
            if not 1 <= j < self.r:
                raise ValueError(f"c_{j} outside 1..{self.r - 1}")
        co: dict[int, complex] = {self.p: 1.0, -self.r: complex(self.q) ** self.r}
        if self.s1:
            co[0] = complex(self.s1)
        for j, v in self.b.items():
            co[j] = co.get(j, 0) + complex(v)
        for j, v in self.c.items():
            co[-j] = co.get(-j, 0) + complex(v)
        co = {k: v for k, v in co.items() if v != 0}
        object.__setattr__(self, "_exps", np.array(sorted(co), dtype=float))
        object.__setattr__(self, "_coefs", np.array([co[k] for k in sorted(co)], dtype=complex))

    @property
    def mu(self) -> int:
        return self.p + self.r

    @property
    def laurent(self) -> dict[int, complex]:
        return {int(k): complex(v) for k, v in zip(self._exps, self._coefs)}

    def g(self, x):
        x = np.asarray(x, dtype=complex)
        return np.sum(self._coefs * x[..., None] ** self._exps, axis=-1)

    def dg(self, x):
        x = np.asarray(x, dtype=complex)
        return np.sum(self._coefs * self._exps * x[..., None] ** (self._exps - 1), axis=-1)

    def d2g(self, x):
        x = np.asarray(x, dtype=complex)
        e = self._exps
        return np.sum(self._coefs * e * (e - 1) * x[..., None] ** (e - 2), axis=-1)

    def to_dict(self) -> dict:
        c = lambda z: [float(complex(z).real), float(complex(z).imag)]
        return {"p": self.p, "r": self.r, "q": c(self.q), "s1": c(self.s1),
                "b": {str(j): c(v) for j, v in sorted(self.b.items())},
                "c": {str(j): c(v) for j, v in sorted(self.c.items())}}


def reduce_to_1d(A: OrbifoldType, s: UnfoldingPoint) -> Mirror1D:
    """Eliminate the variable with isotropy order 1.

    The remaining arms become (p, r) = (a2, a3) after permuting so that
    a1 = 1; x3 = s_mu / x2 turns s_{3,j} x3^j into s_{3,j} s_mu^j x^{-j}.
    """
    s.validate(A)
    if 1 not in A.a:
        raise NotReducible(f"no isotropy order equals 1 in A = {A.a}")
    lin = A.a.index(1)
    rest = [i for i in range(3) if i != lin]
    p, r = A.a[rest[0]], A.a[rest[1]]
    q = s.s_mu
    b = {j: v for (i, j), v in s.s_arm.items() if i - 1 == rest[0]}
    c = {j: v * q ** j for (i, j), v in s.s_arm.items() if i - 1 == rest[1]}
    return Mirror1D(p=p, r=r, q=q, s1=s.s1, b=b, c=c)


def critical_points_1d(m: Mirror1D, collision_tol: float = 1e-8,
                       newton_steps: int = 8) -> list[tuple[complex, complex, complex]]:
    """(x_i, w_i, g''(x_i)) for every critical point, sorted by value.

    The critical points are the roots of the polynomial x^{r+1} g'(x),
    found as companion-matrix eigenvalues and polished by Newton steps.
    """
    coeffs = np.zeros(m.p + m.r + 1, dtype=complex)
    for k, c in m.laurent.items():
        if k:
            coeffs[k + m.r] += k * c
    xs = P.polyroots(coeffs)
    for _ in range(newton_steps):
        xs = xs - m.dg(xs) / m.d2g(xs)
    ws = m.g(xs)
    scale = max(1.0, float(np.median(np.abs(ws))))
    if len(xs) != m.mu or _min_gap(ws) < collision_tol * scale:
        raise DegenerateCritical(f"critical values of g collide (min gap {_min_gap(ws):.3g}); "
                                 "perturb the deformation")
    order = sorted(range(len(xs)), key=lambda i: (round(ws[i].real, 12), ws[i].imag))
    return [(complex(xs[i]), complex(ws[i]), complex(m.d2g(xs[i]))) for i in order]


def wall_structure(values: Sequence[complex]) -> list[float]:
    """Sorted non-admissible directions phi in [0, pi)."""
    return [float(t) for t in wall_angles(values)]


# --- thimbles ----------------------------------------------------------------

@dataclass(frozen=True)
class Thimble:
    """Oriented steepest-descent curve through one critical point.

    ``sigma`` runs from -S to S; ``path[k]`` satisfies
    g(path[k]) = w - e^{i theta} sigma[k]^2 and the tangent at sigma = 0
    is ``v``.
    """

    index: int
    theta: float
    w: complex
    x_c: complex
    v: complex
    sigma: np.ndarray
    path: np.ndarray
    level: float

    def level_defect(self, m: Mirror1D) -> float:
        """max |Im((g - w) e^{-i theta})| along the polyline."""
        return float(np.abs(((m.g(self.path) - self.w) * cmath.exp(-1j * self.theta)).imag).max())

    def reversed(self) -> Thimble:
        return Thimble(self.index, self.theta, self.w, self.x_c, -self.v,
                       -self.sigma[::-1].copy(), self.path[::-1].copy(), self.level)

    def to_dict(self) -> dict:
        return {"index": self.index, "theta": self.theta,
                "w": [self.w.real, self.w.imag], "x_c": [self.x_c.real, self.x_c.imag],
                "level": self.level, "sigma": self.sigma.tolist(),
                "path": [[z.real, z.imag] for z in self.path]}


def _local_direction(theta: float, g2: complex) -> complex:
    return cmath.sqrt(-2 * cmath.exp(1j * theta) / g2)


def _project(m: Mirror1D, x, target, maxiter: int = 40, tol: float = 1e-15):
    """Newton iteration for g(x) = target, elementwise."""
    x = np.array(x, dtype=complex)
    for _ in range(maxiter):
        dx = (m.g(x) - target) / m.dg(x)
        x = x - dx
        if np.all(np.abs(dx) <= tol * np.maximum(1.0, np.abs(x))):
            return x, True
    return x, False


def trace_thimble(m: Mirror1D, i: int, theta: float, Lam: float = 40.0, scale: float = 1.0,
                  v: complex | None = None,
                  crit: list[tuple[complex, complex, complex]] | None = None,
                  h0: float = 0.02, h_max: float = 0.5, max_steps: int = 100_000) -> Thimble:
    """Trace the thimble of critical point ``i`` along arg u = ``theta``.

    The curve is followed until g - w_i = -e^{i theta} Lam * scale, i.e.
    sigma_max = sqrt(Lam * scale); with scale = |u| this is a tail bound
    of e^{-Lam} on the integrand.  ``v`` selects the orientation (it must
    square to -2 e^{i theta} / g''); by default the principal root is used.
    """
    crit = crit if crit is not None else critical_points_1d(m)
    xc, w, g2 = crit[i]
    e = cmath.exp(1j * theta)
    others = [c for k, c in enumerate(crit) if k != i]
    # another critical value on the descending half-line means a wall
    for _, wj, _ in others:
        d = (wj - w) * cmath.exp(-1j * theta)
        if d.real < 0 and abs(d.imag) <= 1e-10 * max(1.0, abs(wj - w)):
            raise SaddleCollision(f"critical value {wj} lies on the half-line from {w}")
    if v is None:
        v = _local_direction(theta, g2)
    elif abs(v * v * g2 + 2 * e) > 1e-8 * abs(e):
        raise ValueError("v is not a local steepest-descent direction")
    smax = math.sqrt(Lam * scale)
    dists = [abs(xc - xj) for xj, _, _ in others]
    safety = 1e-3 * min(dists) if dists else 0.0
    h_init = min(h0, smax / 50)

    branches = {}
    for sgn in (1, -1):
        sig, xs, h = [0.0], [complex(xc)], h_init
        steps = 0
        while sig[-1] < smax:
            steps += 1
            if steps > max_steps:
                raise StepFailure(f"too many steps tracing thimble {i}")
            s0, x0 = sig[-1], xs[-1]
            d0 = sgn * v if s0 == 0 else -2 * s0 * e / complex(m.dg(x0))
            while True:
                s1 = min(s0 + h, smax)
                pred = x0 + d0 * (s1 - s0)
                x, ok = _project(m, pred, w - e * s1 ** 2, maxiter=30, tol=1e-14)
                x = complex(x)
                if ok and abs(x - pred) < 0.1 * max(abs(x0), 1e-3):
                    break
                h /= 2
                if h < 1e-14 * max(1.0, smax):
                    raise StepFailure(f"step size underflow tracing thimble {i} at sigma={s0}")
            if safety and min(abs(x - xj) for xj, _, _ in others) < safety:
                raise SaddleCollision(f"thimble {i} passes within {safety:.2e} of another saddle")
            sig.append(s1)
            xs.append(x)
            h = min(h * 1.5, h_max)
        branches[sgn] = (np.array(sig) * sgn, np.array(xs))
    sigma = np.concatenate([branches[-1][0][::-1], branches[1][0][1:]])
    path = np.concatenate([branches[-1][1][::-1], branches[1][1][1:]])
    return Thimble(index=i, theta=float(theta), w=complex(w), x_c=complex(xc), v=complex(v),
                   sigma=sigma, path=path, level=float(Lam))


# --- quadrature -------------------------------------------------------------

def _panel(m: Mirror1D, th: Thimble, a: float, b: float, xa: complex, xb: complex,
           u: complex, K: int):
    """Gauss-Legendre panel of the scaled moments plus integrand abs-mass."""
    e = cmath.exp(1j * th.theta)
    t = (_GL_NODES + 1) / 2 * (b - a) + a
    guess = xa + (xb - xa) * (t - a) / (b - a)
    x, _ = _project(m, guess, th.w - e * t ** 2)
    dxds = -2 * t * e / m.dg(x)
    # on the thimble g - w = -e sigma^2 exactly; use that instead of g(x) - w
    f = np.exp(-e * t ** 2 / u) * dxds * x[None, :] ** (np.arange(K)[:, None] - 1.0)
    half = (b - a) / 2
    return f @ _GL_WEIGHTS * half, np.abs(f) @ _GL_WEIGHTS * abs(half)


def _scaled_moments(m: Mirror1D, th: Thimble, u: complex, K: int, tol: float = 1e-10,
                    max_depth: int = 14) -> np.ndarray:
    """int_Gamma e^{(g - w)/u} x^{k-1} dx for k < K (no prefactor)."""
    ang = (cmath.phase(u) - th.theta + math.pi) % (2 * math.pi) - math.pi
    if abs(ang) >= math.pi / 2:
        raise DecayViolation(f"|arg u - theta| = {abs(ang):.3f} >= pi/2: integrand grows "
                             "along the thimble")
    s, x = th.sigma, th.path
    coarse = [_panel(m, th, s[k], s[k + 1], x[k], x[k + 1], u, K) for k in range(len(s) - 1)]
    mass = np.sum([c[1] for c in coarse], axis=0)
    total = np.zeros(K, dtype=complex)
    e = cmath.exp(1j * th.theta)

    def refine(a, b, xa, xb, est, depth):
        mid = (a + b) / 2
        xm = complex(_project(m, xa + (xb - xa) / 2, th.w - e * mid ** 2)[0])
        left = _panel(m, th, a, mid, xa, xm, u, K)[0]
        right = _panel(m, th, mid, b, xm, xb, u, K)[0]
        fine = left + right
        if np.all(np.abs(fine - est) <= tol * np.maximum(mass, 1e-300)):
            return fine
        if depth >= max_depth:
            raise QuadratureStall(f"panel [{a:.3g}, {b:.3g}] did not converge")
        return (refine(a, mid, xa, xm, left, depth + 1)
                + refine(mid, b, xm, xb, right, depth + 1))

    for k, (est, _) in enumerate(coarse):
        total += refine(s[k], s[k + 1], x[k], x[k + 1], est, 0)
    return total


def _prefactor(u: complex) -> complex:
    return 1 / cmath.sqrt(2 * math.pi * u)


def moment_integral(m: Mirror1D, thimble: Thimble, u: complex, k: int = 0,
                    tol: float = 1e-10) -> complex:
    """m_k = (2 pi u)^{-1/2} int_thimble e^{g(x)/u} x^{k-1} dx, principal root."""
    if k < 0:
        raise ValueError("moment index must be non-negative")
    scaled = _scaled_moments(m, thimble, u, k + 1, tol=tol)[k]
    return _prefactor(u) * cmath.exp(thimble.w / u) * scaled


@dataclass(frozen=True)
class MomentMatrix:
    """entries[k, j] = m_k(Gamma_j, u0) * exp(-w_j / u0) (columns rescaled)."""

    u0: complex
    entries: np.ndarray
    values: np.ndarray

    def unscaled(self) -> np.ndarray:
        return self.entries * np.exp(self.values / self.u0)[None, :]


def moment_matrix(m: Mirror1D, thimbles: Sequence[Thimble], u0: complex,
                  tol: float = 1e-10) -> MomentMatrix:
    K = len(thimbles)
    cols = [_prefactor(u0) * _scaled_moments(m, th, u0, K, tol=tol) for th in thimbles]
    M = np.column_stack(cols)
    if not np.all(np.isfinite(M)) or np.any(np.linalg.norm(M, axis=0) == 0):
        raise IllConditioned("moment matrix has non-finite or vanishing columns")
    return MomentMatrix(u0=u0, entries=M, values=np.array([th.w for th in thimbles]))


# --- Stokes matrix -----------------------------------------------------------

@dataclass(frozen=True)
class StokesResult:
    S: np.ndarray                    # integer, dominance order
    residual: float                  # max distance of the solved entries to Z
    condition: float                 # 2-norm condition number of the right moments
    order: tuple[int, ...]           # dominance order as indices into critical_points_1d
    moment_residual: float           # ||M_R S - M_L|| / ||M_L|| after rounding
    phi: float
    u0: complex
    values: np.ndarray               # critical values in dominance order
    thimbles_right: tuple[Thimble, ...] = field(default=(), repr=False)
    thimbles_left: tuple[Thimble, ...] = field(default=(), repr=False)

    def gram(self) -> np.ndarray:
        return -(self.S + self.S.T)

    def to_dict(self) -> dict:
        c = lambda z: [float(complex(z).real), float(complex(z).imag)]
        return {"S": self.S.tolist(), "residual": self.residual, "condition": self.condition,
                "order": list(self.order), "moment_residual": self.moment_residual,
                "phi": self.phi, "u0": c(self.u0), "values": [c(w) for w in self.values]}


def stokes_numeric(m: Mirror1D, phi: float | None = None, Lam: float = 40.0,
                   r0: float | None = None, r0_factor: float = 1.0, delta_max: float = 0.1,
                   cond_max: float = 1e12, int_tol: float = 1e-4,
                   quad_tol: float = 1e-10) -> StokesResult:
    """Integer Stokes matrix of g for the admissible line at angle ``phi``.

    Right thimbles are traced at theta_R = phi - pi/2 + delta, left ones at
    theta_L = phi + pi/2 - delta; both families are integrated at the
    common point u0 = r0 e^{i phi}, where both still decay.  Then
    Gamma_left = Gamma_right S, read off from M_R S = M_L.
    """
    crit = critical_points_1d(m)
    w_all = np.array([c[1] for c in crit])
    if phi is None:
        phi = choose_phi(w_all)
    report = sector_analysis(w_all, phi, strict=True)
    order = report.order
    crit_o = [crit[i] for i in order]
    w = np.array([c[1] for c in crit_o])
    delta = min(report.margin / 2, delta_max)
    th_R = phi - math.pi / 2 + delta
    th_L = phi + math.pi / 2 - delta

    proj = (w * cmath.exp(-1j * phi)).real
    if r0 is None:
        spread = float(proj.max() - proj.min())
        r0 = max(_min_gap(w) / 2, spread / 8)
    r0 *= r0_factor
    u0 = r0 * cmath.exp(1j * phi)

    right, left = [], []
    for j, (xc, wj, g2) in enumerate(crit_o):
        vR = _local_direction(th_R, g2)
        # continue the orientation from the right to the left family
        vL = vR * cmath.exp(1j * (th_L - th_R) / 2)
        for th, v, bucket in ((th_R, vR, right), (th_L, vL, left)):
            t = trace_thimble(m, j, th, Lam=Lam, scale=r0 / math.cos(th - phi), v=v, crit=crit_o)
            bucket.append(t)
    MR = moment_matrix(m, right, u0, tol=quad_tol).entries
    ML = moment_matrix(m, left, u0, tol=quad_tol).entries
    cond = float(np.linalg.cond(MR))
    if not np.isfinite(cond) or cond > cond_max:
        raise IllConditioned(f"right moment matrix condition {cond:.3g} exceeds {cond_max:.3g}; "
                             "retry with another |u0|")
    X = np.linalg.solve(MR, ML)
    # undo the column scaling: S_ij = X_ij exp((w_j - w_i) / u0)
    S = X * np.exp((w[None, :] - w[:, None]) / u0)
    S_int = np.round(S.real).astype(np.int64)
    dist = float(np.abs(S - S_int).max())
    if dist > int_tol:
        raise NonIntegerEntry(f"Stokes entries are {dist:.3g} away from integers")
    mu = len(w)
    if any(S_int[i, i] != 1 for i in range(mu)) or np.any(np.tril(S_int, -1)):
        raise TriangularityViolation(f"rounded S is not unit upper triangular:\n{S_int}")
    back = S_int * np.exp((w[:, None] - w[None, :]) / u0)
    mres = float(np.linalg.norm(MR @ back - ML) / np.linalg.norm(ML))
    return StokesResult(S=S_int, residual=dist, condition=cond, order=tuple(order),
                        moment_residual=mres, phi=float(phi), u0=u0, values=w,
                        thimbles_right=tuple(right), thimbles_left=tuple(left))


def asymptotic_check(m: Mirror1D, i: int, u_sequence: Sequence[complex],
                     Lam: float = 40.0) -> list[complex]:
    """Ratios of m_0(Gamma_i, u) to its leading saddle-point term.

    The leading term is e^{w_i/u} / (x_i sqrt(-g''(x_i))) with the square
    root taken on the branch fixed by the thimble orientation; the ratio
    tends to 1 linearly in |u|.
    """
    crit = critical_points_1d(m)
    xc, w, g2 = crit[i]
    out = []
    for u in u_sequence:
        u = complex(u)
        theta = cmath.phase(u)
        th = trace_thimble(m, i, theta, Lam=Lam, scale=abs(u), crit=crit)
        m0_scaled = _prefactor(u) * _scaled_moments(m, th, u, 1)[0]
        # local Gaussian: int e^{-e^{i theta} s^2 / u} v ds = v sqrt(pi |u|)
        lead_scaled = _prefactor(u) * th.v * math.sqrt(math.pi * abs(u)) / xc
        out.append(complex(m0_scaled / lead_scaled))
    return out


def reduction_defect(A: OrbifoldType, s: UnfoldingPoint, values_3d: Sequence[complex]) -> float:
    """Max relative distance between the 1-d and 3-d critical-value multisets."""
    w1 = [c[1] for c in critical_points_1d(reduce_to_1d(A, s))]
    rest = [complex(v) for v in values_3d]
    if len(rest) != len(w1):
        return math.inf
    scale = max(1.0, max(abs(v) for v in rest))
    worst = 0.0
    for v in w1:
        k = min(range(len(rest)), key=lambda j: abs(rest[j] - v))
        worst = max(worst, abs(rest.pop(k) - v) / scale)
    return worst
