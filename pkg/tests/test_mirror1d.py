from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bessel_k0_series
from wplstokes.errors import (DecayViolation, DegenerateCritical, NotReducible, SaddleCollision,
                              StepFailure)
from wplstokes.jacobian import UnfoldingPoint, critical_data, generic_point
from wplstokes.lattice import DistinguishedBasis, stokes_from_gram
from wplstokes.mirror1d import (Mirror1D, asymptotic_check, critical_points_1d, moment_integral,
                                reduce_to_1d, reduction_defect, stokes_numeric, trace_thimble,
                                wall_structure)
from wplstokes.orbifold import make_orbifold

BESSEL = Mirror1D(p=1, r=1, q=1.0)


def test_reduction_examples():
    m = reduce_to_1d(make_orbifold(1, 1, 1), UnfoldingPoint.origin(1.0))
    assert (m.p, m.r) == (1, 1) and m.laurent == {1: 1, -1: 1}
    m = reduce_to_1d(make_orbifold(1, 2, 2), UnfoldingPoint.origin(0.5))
    assert m.laurent[2] == 1 and m.laurent[-2] == pytest.approx(0.25)
    with pytest.raises(DegenerateCritical):
        critical_points_1d(m)
    with pytest.raises(NotReducible):
        reduce_to_1d(make_orbifold(2, 3, 3), UnfoldingPoint.origin(1.0))
    # the order-1 variable need not come first
    m = reduce_to_1d(make_orbifold(2, 1, 3), UnfoldingPoint.origin(1.0))
    assert (m.p, m.r) == (2, 3)


def test_critical_points_examples():
    crit = critical_points_1d(BESSEL)
    assert [c[0] for c in crit] == pytest.approx([-1, 1])
    assert [c[1] for c in crit] == pytest.approx([-2, 2])
    assert [c[2] for c in crit] == pytest.approx([-2, 2])
    crit = critical_points_1d(Mirror1D(p=2, r=2, q=1.0, b={1: 0.3}))
    w = np.array([c[1] for c in crit])
    assert len(w) == 4
    assert min(abs(a - b) for i, a in enumerate(w) for b in w[i + 1:]) > 1e-3


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4),
       st.complex_numbers(min_magnitude=0.5, max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_critical_count_and_stationarity(p, r, q):
    m = Mirror1D(p=p, r=r, q=q, b={1: 0.17 + 0.05j} if p > 1 else {})
    try:
        crit = critical_points_1d(m)
    except DegenerateCritical:
        return
    assert len(crit) == p + r == m.mu
    for x, w, _ in crit:
        assert abs(m.dg(x)) < 1e-9 * max(1, abs(x) ** p, abs(x) ** -r)
        assert m.g(x) == pytest.approx(w)


def test_wall_examples():
    assert wall_structure([2, -2]) == pytest.approx([math.pi / 2])
    assert wall_structure([2j, -2j]) == pytest.approx([0.0])
    assert wall_structure([1.5]) == []


@pytest.mark.parametrize("a", [(1, 1, 1), (1, 1, 2), (1, 2, 2), (1, 2, 3), (1, 3, 3), (1, 2, 4)])
def test_reduction_certificate(a):
    A = make_orbifold(*a)
    s = generic_point(A, 1.0)
    assert reduction_defect(A, s, critical_data(A, s).values) < 1e-9


def test_thimble_level_invariant_and_periodicity():
    theta = math.pi / 2 - 0.1
    crit = critical_points_1d(BESSEL)
    i = [k for k, c in enumerate(crit) if abs(c[0] - 1) < 1e-12][0]
    th = trace_thimble(BESSEL, i, theta)
    assert th.level_defect(BESSEL) < 1e-8 * max(1, abs(th.w))
    # the two branches leave the saddle in antipodal directions
    k0 = int(np.argmin(np.abs(th.sigma)))
    for k in (k0 + 1, k0 - 1):
        slope = (th.path[k] - th.x_c) / th.sigma[k]
        assert abs(slope - th.v) < 0.05 * abs(th.v)
    assert th.v ** 2 * critical_points_1d(BESSEL)[i][2] == pytest.approx(-2 * cmath.exp(1j * theta))
    again = trace_thimble(BESSEL, i, theta + 2 * math.pi)
    assert np.allclose(again.path, th.path, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.4, 1.4), st.sampled_from([(1, 2), (2, 1), (2, 3)]))
def test_level_line_invariant(theta_off, pr):
    p, r = pr
    m = Mirror1D(p=p, r=r, q=0.8 + 0.1j, b={1: 0.21} if p > 1 else {}, c={1: -0.13j} if r > 1 else {})
    crit = critical_points_1d(m)
    values = [c[1] for c in crit]
    for i, (_, w, _) in enumerate(crit):
        theta = cmath.phase(values[i]) + theta_off
        try:
            th = trace_thimble(m, i, theta, Lam=20, crit=crit)
        except (SaddleCollision, StepFailure):  # grazing a wall is allowed to be refused
            continue
        assert th.level_defect(m) < 1e-8 * max(1, abs(w))


def test_bessel_oracle():
    crit = critical_points_1d(BESSEL)
    i = [k for k, c in enumerate(crit) if abs(c[0] - 1) < 1e-12][0]
    for u in (-0.1, -0.05):
        th = trace_thimble(BESSEL, i, math.pi, scale=abs(u))
        m0 = moment_integral(BESSEL, th, u)
        integral = m0 * cmath.sqrt(2 * math.pi * u)
        ref = 2 * bessel_k0_series(2 / abs(u))
        assert abs(integral - ref) / abs(ref) < 1e-8


def test_reversed_thimble_negates():
    crit = critical_points_1d(BESSEL)
    th = trace_thimble(BESSEL, 1, math.pi, scale=0.1)
    for k in range(3):
        a = moment_integral(BESSEL, th, -0.1, k)
        b = moment_integral(BESSEL, th.reversed(), -0.1, k)
        assert b == pytest.approx(-a, rel=1e-10)
    assert crit[1][1] == pytest.approx(2)


def test_decay_violation():
    th = trace_thimble(BESSEL, 1, math.pi, scale=0.1)
    with pytest.raises(DecayViolation):
        moment_integral(BESSEL, th, 0.1)


def test_asymptotic_ratio_tends_to_one():
    crit = critical_points_1d(BESSEL)
    i = [k for k, c in enumerate(crit) if abs(c[0] - 1) < 1e-12][0]
    us = [-0.04, -0.02, -0.01]
    defects = [abs(r - 1) for r in asymptotic_check(BESSEL, i, us)]
    assert defects[0] > defects[1] > defects[2]
    # a ratio near +1 (not -1) means the lead term follows the thimble orientation
    assert all(abs(d) < 0.01 for d in defects)


def test_stokes_small_case():
    R = stokes_numeric(BESSEL)
    assert abs(R.S[0, 1]) == 2 and np.array_equal(np.diag(R.S), [1, 1])
    assert R.residual < 1e-6
    G = R.gram()
    assert np.array_equal(G, G.T) and np.all(np.diag(G) == -2)
    assert np.array_equal(stokes_from_gram(DistinguishedBasis.standard(G)), R.S)
