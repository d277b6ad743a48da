"""Morse-count constraints on the torus from the Lefschetz-Hopf relations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class MorseCounts:
    """Numbers of periodic points of Morse index 0 (sinks), 1 (saddles), 2 (sources)."""

    C0: int
    C1: int
    C2: int

    def __post_init__(self):
        if min(self.C0, self.C1, self.C2) < 0:
            raise ValueError(f"negative count in {self}")

    def as_tuple(self):
        return (self.C0, self.C1, self.C2)

    def mirrored(self) -> "MorseCounts":
        return MorseCounts(self.C2, self.C1, self.C0)


@dataclass(frozen=True)
class BettiVector:
    beta0: int
    beta1: int
    beta2: int

    @property
    def euler(self) -> int:
        return self.beta0 - self.beta1 + self.beta2


TORUS = BettiVector(1, 2, 1)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    clause: Optional[str] = None  # first violated condition when not passed

    def __bool__(self):
        return self.passed

    @classmethod
    def ok(cls):
        return cls(True)

    @classmethod
    def fail(cls, clause: str):
        return cls(False, clause)

    def to_json(self):
        return {"verdict": "pass" if self.passed else "fail", "clause": self.clause}


def check_lefschetz_hopf(c: MorseCounts, beta: BettiVector = TORUS) -> Verdict:
    """Check the n = 2 instance of the Morse inequalities and the alternating sum."""
    if not c.C0 >= beta.beta0:
        return Verdict.fail(f"C0 >= beta0 violated: {c.C0} < {beta.beta0}")
    if not c.C1 - c.C0 >= beta.beta1 - beta.beta0:
        return Verdict.fail(
            f"C1 - C0 >= beta1 - beta0 violated: {c.C1 - c.C0} < {beta.beta1 - beta.beta0}")
    alt = c.C0 - c.C1 + c.C2
    if alt != beta.euler:
        return Verdict.fail(f"C0 - C1 + C2 = chi violated: {alt} != {beta.euler}")
    return Verdict.ok()


_MINIMAL = {
    1: MorseCounts(1, 3, 2),
    2: MorseCounts(2, 3, 1),
    0: MorseCounts(3, 6, 3),
    3: MorseCounts(3, 6, 3),
}


def minimal_counts(i: int) -> MorseCounts:
    """Counts of the simplest diffeomorphism with i fixed sinks."""
    if i not in _MINIMAL:
        raise ValueError(f"component index must be in 0..3, got {i}")
    return _MINIMAL[i]
