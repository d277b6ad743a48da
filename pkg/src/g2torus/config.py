"""Numeric defaults shared by the simulator, the CLI and the tests."""
from __future__ import annotations

from dataclasses import dataclass, field
import math


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-3
    scheme: str = "rk4"
    # flow speed multiplier; 1/(4 pi^2) keeps Hessian eigenvalues of the
    # trigonometric potentials of order one
    rate: float = 1.0 / (4.0 * math.pi ** 2)


@dataclass(frozen=True)
class SearchConfig:
    grid: int = 64
    max_period: int = 3
    newton_tol: float = 1e-11
    newton_max_iter: int = 40
    dedup_tol: float = 1e-6
    fd_step: float = 1e-6
    seed_offset: tuple[float, float] = (0.0, 0.0)  # shifts the seed grid


@dataclass(frozen=True)
class TraceConfig:
    delta: float = 1e-6  # initial offset along the eigenvector
    node_tol: float = 1e-4
    saddle_tol: float = 1e-4
    entry_radius: float = 1e-3
    max_time: float = 1000.0


@dataclass(frozen=True)
class SimConfig:
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    trace: TraceConfig = field(default_factory=TraceConfig)


DEFAULT = SimConfig()

# conjugator search
DEFAULT_BOUND = 10
