"""Lefschetz thimbles and the numerical Stokes matrix of the 1-d mirror.

Checks a thimble integral against the modified Bessel function, shows the
saddle-point ratio approaching 1, and recovers integer Stokes matrices.
Pass an output directory to also write SVG drawings of the thimbles.
"""

from __future__ import annotations

import cmath
import math
import sys
from pathlib import Path

import mpmath

from wplstokes.jacobian import generic_point
from wplstokes.mirror1d import (Mirror1D, asymptotic_check, critical_points_1d, moment_integral,
                                reduce_to_1d, stokes_numeric, trace_thimble)
from wplstokes.orbifold import format_matrix, make_orbifold
from wplstokes.svg import thimble_svg

m = Mirror1D(p=1, r=1, q=1.0)
crit = critical_points_1d(m)
i = min(range(2), key=lambda k: abs(crit[k][0] - 1))
for u in (-0.1, -0.05):
    th = trace_thimble(m, i, math.pi, scale=abs(u), crit=crit)
    val = moment_integral(m, th, u) * cmath.sqrt(2 * math.pi * u)
    ref = 2 * float(mpmath.besselk(0, 2 / abs(u)))
    print(f"u = {u}: integral {val.real:.12e}, 2 K0 = {ref:.12e}, rel err {abs(val - ref) / ref:.1e}")
for u, r in zip((-0.04, -0.02, -0.01), asymptotic_check(m, i, (-0.04, -0.02, -0.01))):
    print(f"u = {u}: |ratio - 1| = {abs(r - 1):.2e}")
print()

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
for a in [(1, 1, 1), (1, 1, 2), (1, 2, 3)]:
    A = make_orbifold(*a)
    R = stokes_numeric(reduce_to_1d(A, generic_point(A, 1.0)))
    print(f"A = {a}: phi = {R.phi:.3f}, |u0| = {abs(R.u0):.3f}, residual {R.residual:.1e}, "
          f"cond {R.condition:.2f}")
    print("\n".join("  " + line for line in format_matrix(R.S.tolist()).splitlines()))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        pts = [t.x_c for t in R.thimbles_right]
        (out / f"thimbles_{''.join(map(str, a))}.svg").write_text(thimble_svg(R.thimbles_right, pts))
