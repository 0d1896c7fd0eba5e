"""Jacobian algebra and critical data of the unfolding.

Builds the Jacobian algebra at a generic point, compares eigenvalue critical
values with Newton-refined ones, and picks an admissible direction.
"""

from __future__ import annotations

import numpy as np

from wplstokes.jacobian import (build_jacobian_algebra, choose_phi, critical_data, generic_point,
                                sector_analysis)
from wplstokes.orbifold import make_orbifold

for a in [(1, 1, 1), (1, 2, 2), (2, 2, 3)]:
    A = make_orbifold(*a)
    s = generic_point(A, 1.0)
    alg = build_jacobian_algebra(A, s)
    cd = critical_data(A, s, alg)
    phi = choose_phi(cd.values)
    rep = sector_analysis(cd.values, phi)
    print(f"A = {a}: dim = {alg.dimension} (mu_A = {A.mu_A}), perturbed = {bool(s.s_arm)}")
    print(f"  commutator defect {alg.commutator_defect():.1e}, "
          f"eig vs Newton {np.abs(cd.values - cd.refined_values).max():.1e}")
    print(f"  admissible phi = {phi:.4f} (margin {rep.margin:.3f}), order {rep.order}")
    for w in cd.values[list(rep.order)]:
        print(f"    w = {w:.10f}")
    print()
