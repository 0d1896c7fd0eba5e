"""Braid/sign moves and the search connecting Stokes and Euler matrices.

Scrambles an Euler matrix with random moves, checks the Coxeter polynomial
is unchanged, and finds a move sequence back.
"""

from __future__ import annotations

import numpy as np

from wplstokes.lattice import coxeter_invariants, equivalence_search, random_move_sequence
from wplstokes.orbifold import canonical_collection_euler_matrix, format_matrix, make_orbifold

rng = np.random.default_rng(1)
for a in [(1, 1, 2), (1, 2, 3), (2, 2, 2)]:
    chi = canonical_collection_euler_matrix(make_orbifold(*a))[1].array()
    poly, roots = coxeter_invariants(chi)
    seq = random_move_sequence(rng, chi.shape[0], 4)
    T = seq.replay(chi)
    back = equivalence_search(T, chi, max_depth=8)
    print(f"A = {a}: Coxeter polynomial {poly}, max ||root| - 1| = "
          f"{np.abs(np.abs(roots) - 1).max():.1e}")
    print(f"  scrambled by '{seq.to_text()}':")
    print("\n".join("    " + line for line in format_matrix(T.tolist()).splitlines()))
    print(f"  recovered by '{back.to_text()}': {np.array_equal(back.replay(T), chi)}\n")
