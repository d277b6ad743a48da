"""Exact 2x2 integer matrices with determinant +-1.

Convention: a matrix acts on *row* vectors, ``(x, y) -> (x, y) @ M``.  With
``M = [[a, c], [b, d]]`` this is ``(a*x + b*y, c*x + d*y)``, which is how the
torus automorphism induced by ``M`` is defined throughout the package.
Matrices are stored row-major as ``(m11, m12, m21, m22)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import AmbiguousClass

MAX_FINITE_ORDER = 12
DEFAULT_BOUND = 10


class Policy(str, Enum):
    """Which conjugators count when deciding similarity over Z."""

    SL = "sl"  # det +1 only
    GL = "gl"  # det +1 or -1


@dataclass(frozen=True)
class UniModularMatrix:
    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not +-1: {self.rows}")

    @classmethod
    def from_rows(cls, rows) -> "UniModularMatrix":
        (p, q), (r, s) = rows
        return cls(int(p), int(q), int(r), int(s))

    @classmethod
    def from_entries(cls, entries) -> "UniModularMatrix":
        p, q, r, s = entries
        return cls(int(p), int(q), int(r), int(s))

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.m11, self.m12, self.m21, self.m22)

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.m11, self.m12), (self.m21, self.m22))

    @property
    def det(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> int:
        return self.m11 + self.m22

    def __matmul__(self, other: "UniModularMatrix") -> "UniModularMatrix":
        return multiply(self, other)

    def inverse(self) -> "UniModularMatrix":
        e = self.det  # inverse of det is det itself for +-1
        return UniModularMatrix(e * self.m22, -e * self.m12, -e * self.m21, e * self.m11)

    def power(self, k: int) -> "UniModularMatrix":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def act(self, vec):
        """Row-vector action ``vec @ M`` on an integer or real pair."""
        x, y = vec
        return (self.m11 * x + self.m21 * y, self.m12 * x + self.m22 * y)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def __str__(self):
        return f"[[{self.m11},{self.m12}],[{self.m21},{self.m22}]]"


IDENTITY = UniModularMatrix(1, 0, 0, 1)

NORMAL_FORMS: dict[str, UniModularMatrix] = {
    "A1": UniModularMatrix(-1, 0, 0, -1),
    "A2": UniModularMatrix(-1, -1, 1, 0),
    "A3": UniModularMatrix(0, 1, -1, -1),
    "A4": UniModularMatrix(0, -1, 1, 1),
    "A5": UniModularMatrix(1, 1, -1, 0),
    "A6": UniModularMatrix(0, -1, 1, 0),
    "A7": UniModularMatrix(0, 1, -1, 0),
}
A2 = NORMAL_FORMS["A2"]

PERIODIC_TAGS = ("Identity", *NORMAL_FORMS, "NotFiniteOrder")


def multiply(M: UniModularMatrix, N: UniModularMatrix) -> UniModularMatrix:
    return UniModularMatrix(
        M.m11 * N.m11 + M.m12 * N.m21,
        M.m11 * N.m12 + M.m12 * N.m22,
        M.m21 * N.m11 + M.m22 * N.m21,
        M.m21 * N.m12 + M.m22 * N.m22,
    )


def order(M: UniModularMatrix) -> Optional[int]:
    """Smallest k >= 1 with M^k = I, or None if there is none up to 12."""
    P = M
    for k in range(1, MAX_FINITE_ORDER + 1):
        if P == IDENTITY:
            return k
        P = P @ M
    return None


def _policy(policy) -> Policy:
    return policy if isinstance(policy, Policy) else Policy(policy)


def is_similar(M: UniModularMatrix, N: UniModularMatrix,
               policy=Policy.SL, bound: int = DEFAULT_BOUND) -> Optional[UniModularMatrix]:
    """Search the box ``|entries| <= bound`` for B with ``N = B M B^-1``.

    The condition is linear in B (``N B = B M``), so once the first row of B is
    fixed the second row is forced whenever N has a nonzero off-diagonal
    entry.  Enumerating all first rows (or second rows) therefore covers the
    whole box.  ``M == N`` returns the identity; otherwise candidates are
    scanned in lexicographic order and the first hit is returned.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    policy = _policy(policy)
    if M.trace != N.trace or M.det != N.det:
        return None
    if M == N:
        return IDENTITY
    dets = (1,) if policy is Policy.SL else (1, -1)
    Mm = np.array(M.rows, dtype=np.int64)
    Nn = np.array(N.rows, dtype=np.int64)

    if N.m12 == 0 and N.m21 == 0:
        # N is scalar (+-I); then M = N is forced
        return IDENTITY if M == N else None

    r = np.arange(-bound, bound + 1, dtype=np.int64)
    free = np.stack(np.meshgrid(r, r, indexing="ij"), axis=-1).reshape(-1, 2)
    if N.m12 != 0:
        # row1: b1 M = N11 b1 + N12 b2  ->  b2 = (b1 M - N11 b1) / N12
        num = free @ Mm - Nn[0, 0] * free
        ok = np.all(num % Nn[0, 1] == 0, axis=1)
        b1, b2 = free[ok], num[ok] // Nn[0, 1]
    else:
        # row2: b2 M = N21 b1 + N22 b2  ->  b1 = (b2 M - N22 b2) / N21
        num = free @ Mm - Nn[1, 1] * free
        ok = np.all(num % Nn[1, 0] == 0, axis=1)
        b1, b2 = num[ok] // Nn[1, 0], free[ok]
    B = np.stack([b1, b2], axis=1)  # (k, 2, 2), rows of B
    in_box = np.all(np.abs(B) <= bound, axis=(1, 2))
    det = B[:, 0, 0] * B[:, 1, 1] - B[:, 0, 1] * B[:, 1, 0]
    commutes = np.all(Nn @ B == B @ Mm, axis=(1, 2))
    good = in_box & commutes & np.isin(det, dets)
    if not good.any():
        return None
    cands = B[good].reshape(-1, 4)
    first = cands[np.lexsort(cands.T[::-1])[0]]
    return UniModularMatrix.from_entries(first.tolist())


@dataclass(frozen=True)
class PeriodicClass:
    tag: str
    conjugator: Optional[UniModularMatrix] = None  # B with A_tag = B M B^-1


def classify_periodic(M: UniModularMatrix, policy=Policy.SL,
                      bound: int = DEFAULT_BOUND) -> PeriodicClass:
    """Classify M against the identity and the seven periodic normal forms.

    Raises :class:`AmbiguousClass` when more than one normal form matches,
    which happens under the ``gl`` policy for the inverse pairs.
    """
    if M == IDENTITY:
        return PeriodicClass("Identity", IDENTITY)
    if order(M) is None:
        return PeriodicClass("NotFiniteOrder")
    hits = []
    for tag, A in NORMAL_FORMS.items():
        B = is_similar(M, A, policy, bound)
        if B is not None:
            hits.append((tag, B))
    if len(hits) > 1:
        raise AmbiguousClass(
            f"{M} matches {[t for t, _ in hits]} under policy {_policy(policy).value}")
    if not hits:
        # finite order but no conjugator inside the box
        raise AmbiguousClass(f"{M} has finite order but no conjugator with |entries| <= {bound}")
    return PeriodicClass(*hits[0])
