"""Free-homotopy classes of curves on the torus and the A2 action on them."""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .errors import UnsupportedEpsilon
from .intmat import A2, UniModularMatrix


@dataclass(frozen=True, order=True)
class TorusKnotClass:
    """The class <a, b> in H1(T^2) = Z^2."""

    a: int
    b: int

    @property
    def contractible(self) -> bool:
        return self.a == 0 and self.b == 0

    def __neg__(self):
        return TorusKnotClass(-self.a, -self.b)

    def __add__(self, other):
        return TorusKnotClass(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return TorusKnotClass(self.a - other.a, self.b - other.b)

    def __mul__(self, k: int):
        return TorusKnotClass(k * self.a, k * self.b)

    __rmul__ = __mul__

    def up_to_sign(self) -> "TorusKnotClass":
        """Representative of {k, -k}: the lexicographically larger one."""
        return max(self, -self)

    def as_list(self) -> list[int]:
        return [self.a, self.b]

    def __str__(self):
        return f"<{self.a},{self.b}>"


ZERO = TorusKnotClass(0, 0)


def act(k: TorusKnotClass, M: UniModularMatrix) -> TorusKnotClass:
    return TorusKnotClass(*M.act((k.a, k.b)))


def orbit3(k: TorusKnotClass, M: UniModularMatrix = A2):
    k1 = act(k, M)
    return (k, k1, act(k1, M))


def intersection_number(k1: TorusKnotClass, k2: TorusKnotClass) -> int:
    """Minimal geometric intersection number |a1 b2 - b1 a2|."""
    return abs(k1.a * k2.b - k1.b * k2.a)


def diophantine_solutions(epsilon: int) -> list[TorusKnotClass]:
    """All integer <a, b> with -a^2 + ab - b^2 = epsilon, sorted.

    Read as a quadratic in a, ``a^2 - b a + (b^2 + epsilon) = 0`` has
    discriminant ``-3 b^2 - 4 epsilon``, which bounds |b|; the form is
    symmetric in a and b, so the same bound applies to a.  No primitivity
    filter is applied.
    """
    if epsilon not in (-1, 0, 1):
        raise UnsupportedEpsilon(f"epsilon must be -1, 0 or 1, got {epsilon}")
    out = []
    b_max = isqrt(max(0, -4 * epsilon) // 3)
    for b in range(-b_max, b_max + 1):
        disc = -3 * b * b - 4 * epsilon
        if disc < 0:
            continue
        r = isqrt(disc)
        if r * r != disc:
            continue
        for num in {b + r, b - r}:
            if num % 2 == 0:
                out.append(TorusKnotClass(num // 2, b))
    return sorted(set(out))


def admissible_knot_types() -> list[TorusKnotClass]:
    """Classes that a knot K with K, g(K), g^2(K) meeting once pairwise may have."""
    return diophantine_solutions(-1)


def same_up_to_sign(k1: TorusKnotClass, k2: TorusKnotClass) -> bool:
    return k1 == k2 or k1 == -k2
