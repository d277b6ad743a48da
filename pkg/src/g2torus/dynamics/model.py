"""Model maps ``g = A o flow_1`` and their periodic points."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import DEFAULT, IntegratorConfig, SearchConfig
from ..intmat import A2, UniModularMatrix
from . import flow
from .potential import COMETRIC, METRIC, TrigPotential, standard_potential

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelMap:
    potential: TrigPotential
    direction: int = +1  # +1 flows up the gradient, -1 down
    matrix: UniModularMatrix = A2
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if self.integrator.scheme != "rk4":
            raise ValueError(f"unsupported scheme {self.integrator.scheme!r}")

    def kernel_args(self):
        freqs, coefs, centers, heights, widths = self.potential.arrays()
        V = self.direction * self.integrator.rate * COMETRIC
        return freqs, coefs, centers, heights, widths, np.ascontiguousarray(V), METRIC.copy()

    @property
    def M(self) -> np.ndarray:
        return np.array(self.matrix.rows, dtype=np.float64)

    # lifted evaluations ---------------------------------------------------------
    def flow(self, X, T: float = 1.0) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        return flow.flow_batch(X, float(T), self.integrator.step, *self.kernel_args())

    def lift_iterates(self, X, k: int) -> np.ndarray:
        """``g^1 .. g^k`` of the lifted points; shape (k, n, 2)."""
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        return flow.map_iterates(X, int(k), self.integrator.step, self.M, *self.kernel_args())

    def lift_power(self, X, k: int) -> np.ndarray:
        return self.lift_iterates(X, k)[-1]

    def inverse(self) -> "ModelMap":
        """``g^-1``: flow backwards, then ``A^-1`` (the flow commutes with ``A``)."""
        return ModelMap(self.potential, -self.direction, self.matrix.inverse(), self.integrator)


def model_map_eval(m: ModelMap, x) -> np.ndarray:
    """``A(flow_1(x)) mod 1`` for a point or an array of points."""
    x = np.asarray(x, dtype=np.float64)
    out = m.lift_iterates(x, 1)[0] % 1.0
    return out[0] if x.ndim == 1 else out


def std_model(direction: int = +1, **kw) -> ModelMap:
    return ModelMap(standard_potential(), direction, **kw)


def wrap(x) -> np.ndarray:
    """Reduce to ``[0, 1)``, snapping values within 1e-9 below 1 to 0."""
    y = np.asarray(x, dtype=np.float64) % 1.0
    y = np.where(y > 1.0 - 1e-9, y - 1.0, y)
    return np.where(np.abs(y) < 1e-12, 0.0, y)


def min_image(d: np.ndarray) -> np.ndarray:
    return d - np.round(d)


def torus_distance(x, y) -> np.ndarray:
    return np.linalg.norm(min_image(np.asarray(x) - np.asarray(y)), axis=-1)


@dataclass(frozen=True)
class PeriodicPointRecord:
    location: tuple[float, float]
    period: int
    kind: str
    eigenvalues: tuple[complex, complex]
    eigenvectors: tuple[tuple[complex, complex], tuple[complex, complex]]  # columns, as rows
    residual: float = 0.0

    @property
    def xy(self) -> np.ndarray:
        return np.array(self.location)


@dataclass
class PeriodicSearchResult:
    points: list[PeriodicPointRecord]
    dropped: int  # Newton runs that diverged or stalled


def jacobian(m: ModelMap, x, k: int, h: float) -> np.ndarray:
    """Central-difference Jacobian of the lifted ``g^k`` (column convention)."""
    x = np.asarray(x, dtype=np.float64)
    X = np.array([x + (h, 0), x - (h, 0), x + (0, h), x - (0, h)])
    Y = m.lift_power(X, k)
    return np.column_stack([(Y[0] - Y[1]) / (2 * h), (Y[2] - Y[3]) / (2 * h)])


def classify_eigenvalues(ev, tol: float = 1e-6) -> str:
    """Kind from multiplier moduli; within ``tol`` of 1 counts as non-hyperbolic."""
    mags = sorted(abs(complex(e)) for e in ev)
    if any(abs(x - 1.0) <= tol for x in mags):
        return "nonhyperbolic"
    if mags[1] < 1.0:
        return "sink"
    if mags[0] > 1.0:
        return "source"
    return "saddle"


def _grid_seeds(cfg: SearchConfig) -> np.ndarray:
    n = cfg.grid
    ax = (np.arange(n) + 0.5) / n
    g = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)
    return (g + np.asarray(cfg.seed_offset)) % 1.0


def _local_minima(res: np.ndarray, n: int) -> np.ndarray:
    """Indices of periodic-grid cells whose residual is minimal among 8 neighbours."""
    R = res.reshape(n, n)
    keep = np.ones_like(R, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                keep &= R <= np.roll(np.roll(R, di, 0), dj, 1)
    return np.flatnonzero(keep.ravel())


def _newton(m: ModelMap, x0: np.ndarray, k: int, cfg: SearchConfig) -> Optional[np.ndarray]:
    x = x0.copy()
    for _ in range(cfg.newton_max_iter):
        r = min_image(m.lift_power(x, k)[0] - x)
        if np.linalg.norm(r) < cfg.newton_tol:
            return wrap(x)
        J = jacobian(m, x, k, cfg.fd_step) - np.eye(2)
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            return None
        if np.linalg.norm(step) > 0.25:
            step *= 0.25 / np.linalg.norm(step)
        x = x - step
    r = min_image(m.lift_power(x, k)[0] - x)
    return wrap(x) if np.linalg.norm(r) < cfg.newton_tol * 10 else None


def _solve(m: ModelMap, inv: ModelMap, x0: np.ndarray, k: int, cfg: SearchConfig):
    """Newton for ``g^k`` and, failing that, ``g^-k``; the latter copes with repellers."""
    for f in (m, inv):
        x = _newton(f, x0, k, cfg)
        if x is not None and torus_distance(x, x0) <= 3.0 / cfg.grid:
            return x
    return None


def stable_jacobian(m: ModelMap, x, k: int, h: float) -> np.ndarray:
    """Jacobian of ``g^k`` at a periodic point, inverted from ``g^-k`` when that is better conditioned."""
    J = jacobian(m, x, k, h)
    big = np.max(np.abs(np.linalg.eigvals(J)))
    if big > 100.0:
        Jb = jacobian(m.inverse(), x, k, h)
        if np.max(np.abs(np.linalg.eigvals(Jb))) < big:
            return np.linalg.inv(Jb)
    return J


def speed(m: ModelMap, X) -> np.ndarray:
    """Euclidean speed of the flow at the rows of ``X``."""
    V = m.direction * m.integrator.rate * COMETRIC
    return np.linalg.norm(m.potential.gradient(X) @ V, axis=1)


def find_periodic_points(m: ModelMap, max_period: int = 3,
                         cfg: SearchConfig = DEFAULT.search) -> PeriodicSearchResult:
    """Newton on ``g^k(x) - x`` (mod the lattice) for ``k = 1 .. max_period``.

    Seeds are the cells of the grid where the flow speed is a local minimum:
    the periodic points of ``A o flow_1`` with ``A`` of finite order are
    equilibria of the flow.  Newton falls back to ``g^-k`` near repellers,
    whose ``g^k`` multipliers are too large for it.  Each point found is
    completed to its whole orbit, then records are sorted, deduplicated and
    classified from a finite-difference Jacobian at the minimal period ``P``.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    seeds = _grid_seeds(cfg)
    cand = seeds[_local_minima(speed(m, seeds), cfg.grid)]
    found: list[np.ndarray] = []
    dropped = 0

    def add(x):
        if all(torus_distance(x, q) > cfg.dedup_tol for q in found):
            found.append(x)
            return True
        return False

    inv = m.inverse()
    for x0 in cand:
        for k in range(1, max_period + 1):
            # a miss (divergence, or a jump to some other periodic point) counts as dropped
            x = _solve(m, inv, x0, k, cfg)
            if x is None:
                dropped += 1
                continue
            if add(x):
                # complete the orbit; images are polished by Newton again
                for img in wrap(m.lift_iterates(x, max_period)[:, 0]):
                    y = _solve(m, inv, img, k, cfg)
                    if y is not None:
                        add(y)
            break
    # canonical order so the result does not depend on seeding order
    found.sort(key=lambda p: (round(p[0], 9), round(p[1], 9)))
    records = []
    for p in found:
        P = minimal_period(m, p, max_period, cfg)
        J = stable_jacobian(m, p, P, cfg.fd_step)
        ev, vec = np.linalg.eig(J)
        order = np.argsort(np.abs(ev))
        ev, vec = ev[order], vec[:, order]
        resid = min(float(torus_distance(f.lift_power(p, P)[0], p)) for f in (m, inv))
        records.append(PeriodicPointRecord(
            (float(p[0]), float(p[1])), P, classify_eigenvalues(ev),
            tuple(complex(e) for e in ev),
            tuple(tuple(complex(c) for c in vec[:, i]) for i in range(2)), resid))
    if dropped:
        log.info("periodic point search dropped %d Newton runs", dropped)
    return PeriodicSearchResult(records, dropped)


def minimal_period(m: ModelMap, p, max_period: int, cfg: SearchConfig = DEFAULT.search) -> int:
    p = np.asarray(p, dtype=np.float64)
    fwd = m.lift_iterates(p, max_period)[:, 0]
    bwd = m.inverse().lift_iterates(p, max_period)[:, 0]
    tol = max(cfg.dedup_tol, 1e3 * cfg.newton_tol)
    for k in range(1, max_period + 1):
        if min(torus_distance(fwd[k - 1], p), torus_distance(bwd[k - 1], p)) < tol:
            return k
    return max_period
