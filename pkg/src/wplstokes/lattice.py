"""Integer Picard-Lefschetz calculus on lattices with a symmetric form.

A distinguished basis (L_1, ..., L_mu) of vanishing cycles with Gram
matrix G = (I(L_i, L_j)) determines the upper unitriangular matrix

    S_ij = -I(L_i, L_j)  (i < j),   S_ii = 1,   S_ij = 0  (i > j),

so that S + S^T = -G.  Braid (Gabrielov) moves and orientation flips of
the basis act on S; the characteristic polynomial of S^{-1} S^T is
invariant under both.  ``equivalence_search`` looks for an explicit move
sequence connecting two such matrices.

Positions ``k`` are 1-based throughout, matching the move script
notation ``b3 s1 B2`` (braid at 3, flip 1, inverse braid at 2).
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import sympy as sp

from .errors import EquivalenceInconclusive, MoveError, WplError

__all__ = [
    "MilnorLattice",
    "DistinguishedBasis",
    "MoveSequence",
    "NotEquivalent",
    "pl_reflection",
    "stokes_from_gram",
    "gram_from_stokes",
    "left_basis_expansion",
    "braid_move",
    "sign_flip",
    "apply_move",
    "coxeter_invariants",
    "charpoly_int",
    "equivalence_search",
    "is_unitriangular",
    "random_move_sequence",
]


class NotEquivalent(WplError):
    """Raised when an invariant proves two matrices lie in different orbits."""

    stage = "equivalence"
    exit_code = 2


def _as_int_matrix(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype.kind == "f":
        if not np.all(arr == np.round(arr)):
            raise ValueError("matrix has non-integer entries")
    return np.asarray(np.round(arr), dtype=np.int64)


def is_unitriangular(S) -> bool:
    S = np.asarray(S)
    return bool(np.all(np.diag(S) == 1) and np.all(np.tril(S, -1) == 0))


@dataclass(frozen=True)
class MilnorLattice:
    gram: np.ndarray

    def __post_init__(self):
        g = _as_int_matrix(self.gram)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("Gram matrix must be square")
        if not np.array_equal(g, g.T):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    def pair(self, x, y) -> int:
        return int(np.asarray(x, dtype=np.int64) @ self.gram @ np.asarray(y, dtype=np.int64))


@dataclass(frozen=True)
class DistinguishedBasis:
    lattice: MilnorLattice
    vectors: np.ndarray  # row i is L_{i+1} in ambient coordinates

    def __post_init__(self):
        v = _as_int_matrix(self.vectors)
        if v.ndim != 2 or v.shape[1] != self.lattice.rank:
            raise ValueError("basis vectors must live in the ambient lattice")
        object.__setattr__(self, "vectors", v)
        g = self.gram()
        if not np.all(np.diag(g) == -2):
            raise ValueError("every vanishing cycle must have self-intersection -2")

    @classmethod
    def standard(cls, gram) -> DistinguishedBasis:
        lat = MilnorLattice(gram)
        return cls(lat, np.eye(lat.rank, dtype=np.int64))

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.lattice.gram @ self.vectors.T

    def with_vectors(self, vectors) -> DistinguishedBasis:
        return DistinguishedBasis(self.lattice, vectors)


def pl_reflection(lattice: MilnorLattice, v, x) -> np.ndarray:
    """Picard-Lefschetz monodromy h_v(x) = x + I(x, v) v."""
    v = np.asarray(v, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    return x + lattice.pair(x, v) * v


def stokes_from_gram(basis: DistinguishedBasis) -> np.ndarray:
    return stokes_from_gram_matrix(basis.gram())


def stokes_from_gram_matrix(G) -> np.ndarray:
    G = _as_int_matrix(G)
    S = -np.triu(G, 1)
    np.fill_diagonal(S, 1)
    return S


def gram_from_stokes(S) -> MilnorLattice:
    S = _as_int_matrix(S)
    if not is_unitriangular(S):
        raise ValueError("expected an upper triangular matrix with unit diagonal")
    return MilnorLattice(-(S + S.T))


def _inverse_unitriangular(T: np.ndarray) -> np.ndarray:
    """Exact inverse of an upper unitriangular integer matrix."""
    n = T.shape[0]
    inv = np.eye(n, dtype=np.int64)
    for j in range(n):
        for i in range(j - 1, -1, -1):
            inv[i, j] = -int(T[i, i + 1:j + 1] @ inv[i + 1:j + 1, j])
    return inv


def left_basis_expansion(basis: DistinguishedBasis) -> np.ndarray:
    """Column j expresses the left thimble j in the right thimbles.

    The right vanishing cycles are L_{j,right} = h_1 ... h_{j-1}(L_j), with
    L_j the left ones; we expand them in the basis by applying the
    reflections, then invert the resulting unitriangular change of basis.
    """
    lat, L = basis.lattice, basis.vectors
    n = basis.size
    # T[:, j] = coordinates of L_{j,right} with respect to (L_1, ..., L_n)
    T = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        coords = np.zeros(n, dtype=np.int64)
        coords[j] = 1
        for i in range(j - 1, -1, -1):  # innermost reflection first
            vec = coords @ L
            coords[i] += lat.pair(vec, L[i])
        T[:, j] = coords
    return _inverse_unitriangular(T)


# --- moves ------------------------------------------------------------------

def _check_position(k: int, n: int, pair: bool = True) -> None:
    hi = n - 1 if pair else n
    if not 1 <= k <= hi:
        raise MoveError(f"position {k} out of range 1..{hi}")


def braid_move(basis: DistinguishedBasis, k: int, direction: str = "right") -> DistinguishedBasis:
    """Gabrielov move at positions (k, k+1), 1-based.

    right: (L_k, L_{k+1}) -> (h_{L_k}(L_{k+1}), L_k); left is its inverse.
    """
    n = basis.size
    _check_position(k, n)
    V = basis.vectors.copy()
    a, b = V[k - 1].copy(), V[k].copy()
    lat = basis.lattice
    if direction == "right":
        V[k - 1], V[k] = pl_reflection(lat, a, b), a
    elif direction == "left":
        V[k - 1], V[k] = b, pl_reflection(lat, b, a)
    else:
        raise MoveError(f"unknown direction {direction!r}")
    return basis.with_vectors(V)


def sign_flip(basis: DistinguishedBasis, k: int) -> DistinguishedBasis:
    _check_position(k, basis.size, pair=False)
    V = basis.vectors.copy()
    V[k - 1] = -V[k - 1]
    return basis.with_vectors(V)


# A move is (kind, k) with kind in {"b", "B", "s", "r"}; "r" ignores k.
Move = tuple[str, int]


def apply_move(S, move: Move) -> np.ndarray:
    """Act on a Stokes-like matrix by one move (works on the Gram side)."""
    S = _as_int_matrix(S)
    kind, k = move
    n = S.shape[0]
    if kind == "s":
        _check_position(k, n, pair=False)
        d = np.ones(n, dtype=np.int64)
        d[k - 1] = -1
        return S * np.outer(d, d)
    if kind == "r":
        return S[::-1, ::-1].T.copy()
    if kind not in ("b", "B"):
        raise MoveError(f"unknown move {kind!r}")
    _check_position(k, n)
    G = -(S + S.T)
    i, j = k - 1, k
    g = G[i, j]
    # new tuple expressed in the old one; only rows/cols i, j change
    T = np.eye(n, dtype=np.int64)
    if kind == "b":
        # L'_i = L_j + g L_i, L'_j = L_i
        T[:, i] = 0
        T[j, i] = 1
        T[i, i] = g
        T[:, j] = 0
        T[i, j] = 1
    else:
        # L'_i = L_j, L'_j = L_i + g L_j
        T[:, i] = 0
        T[j, i] = 1
        T[:, j] = 0
        T[i, j] = 1
        T[j, j] = g
    return stokes_from_gram_matrix(T.T @ G @ T)


@dataclass
class MoveSequence:
    moves: list[Move] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.moves)

    def to_text(self) -> str:
        return " ".join(kind if kind == "r" else f"{kind}{k}" for kind, k in self.moves)

    @classmethod
    def parse(cls, text: str) -> MoveSequence:
        moves: list[Move] = []
        for tok in text.split():
            m = re.fullmatch(r"([bBs])(\d+)|r", tok)
            if not m:
                raise MoveError(f"cannot parse move {tok!r}")
            moves.append(("r", 0) if tok == "r" else (m.group(1), int(m.group(2))))
        return cls(moves)

    def replay(self, S) -> np.ndarray:
        S = _as_int_matrix(S)
        for mv in self.moves:
            S = apply_move(S, mv)
        return S

    def inverse(self) -> MoveSequence:
        flip = {"b": "B", "B": "b", "s": "s", "r": "r"}
        return MoveSequence([(flip[kind], k) for kind, k in reversed(self.moves)])

    def to_json(self) -> str:
        return json.dumps({"moves": self.to_text()})

    def simplified(self) -> MoveSequence:
        """Equivalent shorter sequence: sign flips within a run commute, so
        each run keeps only the positions flipped an odd number of times;
        adjacent b_k B_k (or B_k b_k) pairs and r r pairs cancel."""
        out: list[Move] = []
        run: set[int] = set()

        def flush():
            out.extend(("s", k) for k in sorted(run))
            run.clear()

        inverse = {"b": "B", "B": "b", "r": "r"}
        for kind, k in self.moves:
            if kind == "s":
                run.symmetric_difference_update({k})
                continue
            flush()
            if out and out[-1] == (inverse[kind], k):
                out.pop()
                # the pop may expose a sign run that now merges with the next one
                while out and out[-1][0] == "s":
                    run.symmetric_difference_update({out.pop()[1]})
            else:
                out.append((kind, k))
        flush()
        return MoveSequence(out)


def random_move_sequence(rng: np.random.Generator, size: int, length: int,
                         allow_signs: bool = True) -> MoveSequence:
    """Uniformly drawn braid / inverse-braid / sign moves (for property checks)."""
    kinds = ["b", "B"] + (["s"] if allow_signs else [])
    moves: list[Move] = []
    for _ in range(length):
        kind = kinds[int(rng.integers(len(kinds)))]
        top = size if kind == "s" else size - 1
        moves.append((kind, int(rng.integers(1, top + 1))))
    return MoveSequence(moves)


# --- Coxeter invariants -----------------------------------------------------

def charpoly_int(M: Sequence[Sequence[int]]) -> list[int]:
    """Exact characteristic polynomial (Faddeev-LeVerrier), leading coefficient first."""
    M = [[int(v) for v in row] for row in M]
    n = len(M)
    coeffs = [1]
    Mk = [[0] * n for _ in range(n)]
    c_prev = 1
    for k in range(1, n + 1):
        # Mk <- M @ Mk + c_prev * I
        Mk = [[sum(M[i][t] * Mk[t][j] for t in range(n)) + (c_prev if i == j else 0)
               for j in range(n)] for i in range(n)]
        tr = sum(sum(M[i][t] * Mk[t][i] for t in range(n)) for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral trace step; matrix not integral?")
        c_prev = -tr // k
        coeffs.append(c_prev)
    return coeffs


def coxeter_matrix(S) -> np.ndarray:
    S = _as_int_matrix(S)
    if not is_unitriangular(S):
        raise ValueError("expected an upper unitriangular matrix")
    return _inverse_unitriangular(S) @ S.T


def coxeter_invariants(S) -> tuple[list[int], np.ndarray]:
    """Characteristic polynomial and eigenvalues of S^{-1} S^T."""
    M = coxeter_matrix(S)
    poly = charpoly_int(M.tolist())
    return poly, _roots_with_multiplicity(poly)


def _roots_with_multiplicity(poly: list[int]) -> np.ndarray:
    # repeated roots are ill-conditioned for companion matrices (error ~ eps^(1/m)),
    # so root the exact square-free factors and repeat them
    if len(poly) <= 1:
        return np.array([], dtype=complex)
    lam = sp.Symbol("lam")
    _, factors = sp.sqf_list(sp.Poly(poly, lam))
    out = []
    for f, mult in factors:
        coeffs = [int(c) for c in f.all_coeffs()]
        r = np.roots(np.array(coeffs, dtype=float)) if len(coeffs) > 1 else []
        out.extend(list(r) * mult)
    return np.sort_complex(np.array(out, dtype=complex))


# --- equivalence search -----------------------------------------------------

def _sign_canonical(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Representative of the sign-flip orbit plus the diagonal signs used.

    Walks the nonzero pattern in row-major order and fixes signs along a
    spanning forest so that forest entries are positive.  The forest only
    depends on the zero pattern, which is orbit invariant.
    """
    n = S.shape[0]
    eps = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            v = S[i, j]
            if v == 0:
                continue
            if eps[i] == 0:
                if eps[j] == 0:
                    eps[i] = 1
                else:
                    eps[i] = 1 if v * eps[j] > 0 else -1
                    continue
            if eps[j] == 0:
                eps[j] = 1 if v * eps[i] > 0 else -1
    eps[eps == 0] = 1
    return S * np.outer(eps, eps), eps


def _sign_moves(eps: np.ndarray) -> list[Move]:
    return [("s", i + 1) for i in range(len(eps)) if eps[i] < 0]


def equivalence_search(S_source, S_target, max_depth: int = 12, allow_signs: bool = True,
                       allow_reversal: bool = False, max_entry: int | None = None,
                       max_states: int = 2_000_000) -> MoveSequence:
    """Find moves taking ``S_source`` to ``S_target``.

    Bidirectional breadth-first search over braid moves; with
    ``allow_signs`` states are identified modulo sign flips, and the flips
    are written into the returned sequence.  States with an entry larger
    than ``max_entry`` in absolute value are not expanded.

    Raises NotEquivalent if the Coxeter polynomials differ and
    EquivalenceInconclusive if the budget is exhausted.
    """
    src = _as_int_matrix(S_source)
    dst = _as_int_matrix(S_target)
    if src.shape != dst.shape:
        raise ValueError("matrices of different size")
    if not (is_unitriangular(src) and is_unitriangular(dst)):
        raise ValueError("both matrices must be upper unitriangular")
    if np.array_equal(src, dst):
        return MoveSequence([])
    p_src, p_dst = charpoly_int(coxeter_matrix(src).tolist()), charpoly_int(coxeter_matrix(dst).tolist())
    if p_src != p_dst:
        if not allow_reversal or p_src != p_dst[::-1]:
            raise NotEquivalent(f"Coxeter polynomials differ: {p_src} vs {p_dst}")
    n = src.shape[0]
    if max_entry is None:
        max_entry = max(3, 2 * int(max(np.abs(src).max(), np.abs(dst).max())))

    kinds: list[Move] = [(kd, k) for k in range(1, n) for kd in ("b", "B")]
    if allow_reversal:
        kinds.append(("r", 0))

    def canon(S):
        if allow_signs:
            return _sign_canonical(S)
        return S, np.ones(n, dtype=np.int64)

    # node: key -> (parent key, moves from parent state to this state)
    c_src, e_src = canon(src)
    c_dst, e_dst = canon(dst)
    start_moves = _sign_moves(e_src)
    end_moves = _sign_moves(e_dst)  # dst -> canonical(dst)
    k_src, k_dst = c_src.tobytes(), c_dst.tobytes()
    if k_src == k_dst:
        return MoveSequence(start_moves + end_moves).simplified()

    trees = [{k_src: (None, [])}, {k_dst: (None, [])}]
    frontiers = [[(k_src, c_src)], [(k_dst, c_dst)]]
    depth = [0, 0]
    explored = 2

    def path_to_root(tree, key):
        steps = []
        while tree[key][0] is not None:
            parent, mv = tree[key]
            steps.append(mv)
            key = parent
        return steps[::-1]  # root -> key

    while depth[0] + depth[1] < max_depth and (frontiers[0] or frontiers[1]):
        side = 0 if (len(frontiers[0]) <= len(frontiers[1]) and frontiers[0]) or not frontiers[1] else 1
        tree, other = trees[side], trees[1 - side]
        nxt = []
        for key, S in frontiers[side]:
            for mv in kinds:
                T = apply_move(S, mv)
                if np.abs(T).max() > max_entry:
                    continue
                cT, eps = canon(T)
                kT = cT.tobytes()
                if kT in tree:
                    continue
                tree[kT] = (key, [mv] + _sign_moves(eps))
                explored += 1
                if kT in other:
                    fwd_tree, bwd_tree = (tree, other) if side == 0 else (other, tree)
                    fwd = [m for step in path_to_root(fwd_tree, kT) for m in step]
                    bwd = [m for step in path_to_root(bwd_tree, kT) for m in step]
                    seq = MoveSequence(start_moves + fwd)
                    seq.moves += MoveSequence(bwd).inverse().moves + end_moves
                    seq = seq.simplified()
                    return seq
                if explored > max_states:
                    raise EquivalenceInconclusive(depth[0] + depth[1] + 1, explored)
                nxt.append((kT, cT))
        frontiers[side] = nxt
        depth[side] += 1
    raise EquivalenceInconclusive(max_depth, explored)
