"""Exact combinatorics of the orbifold projective line P^1_A.

The Picard group L_A is generated by x1, x2, x3 subject to
a1*x1 = a2*x2 = a3*x3 =: c.  Every element has a unique normal form

    n*c + m1*x1 + m2*x2 + m3*x3,    0 <= m_i < a_i,

and the graded ring R_A = C[X1, X2, X3] / (X3^a3 - X2^a2 + X1^a1) has
dim (R_A)_l = n + 1 for n >= 0 and 0 otherwise.  Euler pairings of line
bundles follow from Serre duality with the dualizing element
w = c - x1 - x2 - x3.

All arithmetic here is exact (Python ints and Fractions).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NonPositiveEuler

__all__ = [
    "OrbifoldType",
    "PicElement",
    "LineBundleCollection",
    "EulerMatrix",
    "make_orbifold",
    "pic_normalize",
    "canonical_element",
    "graded_dim",
    "euler_pairing",
    "canonical_collection_euler_matrix",
]


@dataclass(frozen=True)
class OrbifoldType:
    a: tuple[int, int, int]
    chi_A: Fraction
    mu_A: int

    def __str__(self) -> str:
        return "P1_({},{},{})".format(*self.a)


def make_orbifold(a1: int, a2: int, a3: int) -> OrbifoldType:
    """Validate a triple of isotropy orders and attach mu_A, chi_A.

    >>> make_orbifold(2, 3, 5).mu_A
    9
    """
    a = (int(a1), int(a2), int(a3))
    if min(a) < 1:
        raise ValueError(f"isotropy orders must be positive, got {a}")
    chi = sum(Fraction(1, k) for k in a) - 1
    if chi <= 0:
        raise NonPositiveEuler(f"chi_A = {chi} <= 0 for A = {a}")
    return OrbifoldType(a=a, chi_A=chi, mu_A=2 + sum(k - 1 for k in a))


@dataclass(frozen=True)
class PicElement:
    """Normal-form element ``n*c + sum m_i x_i`` of L_A."""

    a: tuple[int, int, int]
    n: int
    m: tuple[int, int, int]

    @property
    def degree(self) -> Fraction:
        return self.n + sum(Fraction(mi, ai) for mi, ai in zip(self.m, self.a))

    def raw(self) -> tuple[int, int, int]:
        # a representative in Z^3 (all of c put on x1)
        return (self.m[0] + self.n * self.a[0], self.m[1], self.m[2])

    def __add__(self, other: PicElement) -> PicElement:
        _check_same(self, other)
        raw = tuple(u + v for u, v in zip(self.m, other.m))
        return _normalize(self.a, raw, self.n + other.n)

    def __neg__(self) -> PicElement:
        return _normalize(self.a, tuple(-v for v in self.m), -self.n)

    def __sub__(self, other: PicElement) -> PicElement:
        return self + (-other)

    def __mul__(self, k: int) -> PicElement:
        return _normalize(self.a, tuple(k * v for v in self.m), k * self.n)

    __rmul__ = __mul__

    def label(self) -> str:
        terms = []
        if self.n:
            terms.append("c" if self.n == 1 else f"{self.n}c")
        for i, mi in enumerate(self.m, start=1):
            if mi:
                terms.append(f"x{i}" if mi == 1 else f"{mi}x{i}")
        return "O" if not terms else "O(" + "+".join(terms) + ")"


def _check_same(u: PicElement, v: PicElement) -> None:
    if u.a != v.a:
        raise ValueError(f"elements of different Picard groups: {u.a} vs {v.a}")


def _normalize(a: tuple[int, int, int], raw: Sequence[int], shift: int) -> PicElement:
    n = shift
    m = []
    for k, ak in zip(raw, a):
        q, r = divmod(int(k), ak)
        n += q
        m.append(r)
    return PicElement(a=a, n=n, m=tuple(m))


def pic_normalize(A: OrbifoldType, raw: Sequence[int], shift: int = 0) -> PicElement:
    """Normal form of ``shift*c + raw[0]*x1 + raw[1]*x2 + raw[2]*x3``."""
    if len(raw) != 3:
        raise ValueError("raw must be an integer triple")
    return _normalize(A.a, raw, shift)


def canonical_element(A: OrbifoldType) -> PicElement:
    """The dualizing element c - x1 - x2 - x3."""
    return pic_normalize(A, (-1, -1, -1), shift=1)


def graded_dim(A: OrbifoldType, l: PicElement) -> int:
    if l.a != A.a:
        raise ValueError("element does not belong to this orbifold")
    return l.n + 1 if l.n >= 0 else 0


def euler_pairing(A: OrbifoldType, a: PicElement, b: PicElement) -> int:
    """chi(O(a), O(b)) = dim Hom - dim Ext^1, the latter via Serre duality."""
    hom = graded_dim(A, b - a)
    ext = graded_dim(A, a - b + canonical_element(A))
    return hom - ext


@dataclass(frozen=True)
class LineBundleCollection:
    orbifold: OrbifoldType
    elements: tuple[PicElement, ...]

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def labels(self) -> list[str]:
        return [e.label() for e in self.elements]


@dataclass(frozen=True)
class EulerMatrix:
    entries: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()
    a: tuple[int, int, int] | None = None

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], **kw) -> EulerMatrix:
        return cls(entries=tuple(tuple(int(v) for v in r) for r in rows), **kw)

    @property
    def size(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def is_unitriangular(self) -> bool:
        n = self.size
        return all(self.entries[i][i] == 1 for i in range(n)) and all(
            self.entries[i][j] == 0 for i in range(n) for j in range(i))

    def to_dict(self) -> dict:
        return {"A": list(self.a) if self.a else None,
                "labels": list(self.labels),
                "matrix": self.rows()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> EulerMatrix:
        return cls.from_rows(d["matrix"], labels=tuple(d.get("labels") or ()),
                             a=tuple(d["A"]) if d.get("A") else None)

    def to_text(self) -> str:
        return format_matrix(self.entries)


def format_matrix(rows: Sequence[Sequence[int]]) -> str:
    """Right-aligned plain-text rendering, one row per line."""
    width = max((len(str(v)) for r in rows for v in r), default=1)
    return "\n".join(" ".join(str(v).rjust(width) for v in r) for r in rows)


def canonical_collection(A: OrbifoldType) -> LineBundleCollection:
    """(O, O(x1), ..., O((a1-1)x1), O(x2), ..., O((a3-1)x3), O(c))."""
    elems = [pic_normalize(A, (0, 0, 0))]
    for i, ai in enumerate(A.a):
        for j in range(1, ai):
            raw = [0, 0, 0]
            raw[i] = j
            elems.append(pic_normalize(A, raw))
    elems.append(pic_normalize(A, (0, 0, 0), shift=1))
    return LineBundleCollection(orbifold=A, elements=tuple(elems))


def canonical_collection_euler_matrix(A: OrbifoldType) -> tuple[LineBundleCollection, EulerMatrix]:
    coll = canonical_collection(A)
    rows = [[euler_pairing(A, e, f) for f in coll.elements] for e in coll.elements]
    chi = EulerMatrix.from_rows(rows, labels=tuple(coll.labels), a=A.a)
    return coll, chi
