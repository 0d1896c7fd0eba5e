"""Euler matrices of the canonical line-bundle collection.

Prints the collection labels, the Euler matrix and its symmetrization for a
few isotropy types.
"""

from __future__ import annotations

from wplstokes.orbifold import canonical_collection_euler_matrix, make_orbifold

for a in [(1, 1, 1), (1, 2, 3), (2, 2, 2), (2, 3, 5)]:
    A = make_orbifold(*a)
    _, chi = canonical_collection_euler_matrix(A)
    M = chi.array()
    print(f"A = {a}: mu_A = {A.mu_A}, chi_A = {A.chi_A}")
    print("  collection:", ", ".join(chi.labels))
    print("\n".join("  " + line for line in chi.to_text().splitlines()))
    print(f"  diagonal of chi + chi^T: {(M + M.T).diagonal().tolist()}\n")
