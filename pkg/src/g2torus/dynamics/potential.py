"""Trigonometric Morse potentials on the torus with compactly supported bumps.

The flows use the metric ``G`` below instead of the Euclidean one.  ``G`` is
preserved by A2 (``M G M^T = G`` for row action), so radial bumps stay radial
under symmetrization and the gradient flow commutes with the linear map.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..intmat import A2, UniModularMatrix

TWO_PI = 2.0 * math.pi

# hexagonal metric on the plane; |(1,0)| = |(0,1)| = |(1,1)| = 1
METRIC = np.array([[1.0, -0.5], [-0.5, 1.0]])
# its inverse, used to turn the differential dF into a velocity
COMETRIC = np.linalg.inv(METRIC)


@dataclass(frozen=True)
class Bump:
    """``height * phi(|x - center|_G^2 / width^2)`` with ``phi(u) = exp(1 - 1/(1-u))`` on ``u < 1``."""

    center: tuple[float, float]
    height: float
    width: float

    def __post_init__(self):
        if self.width <= 0 or self.width >= 0.5:
            raise ValueError("bump width must lie in (0, 0.5)")
        object.__setattr__(self, "center", (float(self.center[0]) % 1.0,
                                            float(self.center[1]) % 1.0))


def _canonical_freq(p: int, q: int) -> tuple[int, int]:
    return (p, q) if p > 0 or (p == 0 and q >= 0) else (-p, -q)


@dataclass(frozen=True)
class TrigPotential:
    """``F(x) = sum c_pq cos 2 pi (p x + q y) + sum of bumps``."""

    terms: tuple[tuple[tuple[int, int], float], ...]
    bumps: tuple[Bump, ...] = ()

    @classmethod
    def from_terms(cls, terms: dict, bumps=()):
        merged: dict = {}
        for (p, q), c in terms.items():
            k = _canonical_freq(int(p), int(q))
            merged[k] = merged.get(k, 0.0) + float(c)
        return cls(tuple(sorted((k, v) for k, v in merged.items() if v != 0.0)), tuple(bumps))

    def arrays(self):
        freqs = np.array([k for k, _ in self.terms], dtype=np.float64).reshape(-1, 2)
        coefs = np.array([c for _, c in self.terms], dtype=np.float64)
        centers = np.array([b.center for b in self.bumps], dtype=np.float64).reshape(-1, 2)
        heights = np.array([b.height for b in self.bumps], dtype=np.float64)
        widths = np.array([b.width for b in self.bumps], dtype=np.float64)
        return freqs, coefs, centers, heights, widths

    def negated(self) -> "TrigPotential":
        return TrigPotential(tuple((k, -c) for k, c in self.terms),
                             tuple(Bump(b.center, -b.height, b.width) for b in self.bumps))

    # -- evaluation (vectorized over rows of x) ----------------------------------
    def value(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        freqs, coefs, *_ = self.arrays()
        out = np.cos(TWO_PI * x @ freqs.T) @ coefs if len(coefs) else np.zeros(len(x))
        for b in self.bumps:
            u = _bump_u(x, b)
            inside = u < 1.0
            phi = np.zeros_like(u)
            phi[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside]))
            out = out + b.height * phi
        return out

    def gradient(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        freqs, coefs, *_ = self.arrays()
        out = np.zeros_like(x)
        if len(coefs):
            s = -TWO_PI * np.sin(TWO_PI * x @ freqs.T) * coefs
            out += s @ freqs
        for b in self.bumps:
            for d in _image_offsets(x, b):
                u = np.einsum("ni,ij,nj->n", d, METRIC, d) / b.width ** 2
                inside = u < 1.0
                dphi = np.zeros_like(u)
                ui = u[inside]
                dphi[inside] = -np.exp(1.0 - 1.0 / (1.0 - ui)) / (1.0 - ui) ** 2
                out += (b.height * dphi * 2.0 / b.width ** 2)[:, None] * (d @ METRIC)
        return out

    def to_json(self) -> dict:
        return {
            "terms": [[k[0], k[1], c] for k, c in self.terms],
            "bumps": [{"center": list(b.center), "height": b.height, "width": b.width}
                      for b in self.bumps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrigPotential":
        terms = {(int(p), int(q)): float(c) for p, q, c in data.get("terms", [])}
        bumps = [Bump(tuple(b["center"]), float(b["height"]), float(b["width"]))
                 for b in data.get("bumps", [])]
        return cls.from_terms(terms, bumps)


def _image_offsets(x, b: Bump):
    """Displacement from the nearest lattice image of the bump center (widths < 1/2)."""
    d = x - np.asarray(b.center)
    yield d - np.floor(d + 0.5)


def _bump_u(x, b: Bump):
    best = np.full(len(x), np.inf)
    for d in _image_offsets(x, b):
        best = np.minimum(best, np.einsum("ni,ij,nj->n", d, METRIC, d) / b.width ** 2)
    return best


def symmetrize(F0: TrigPotential, M: UniModularMatrix = A2, tol: float = 1e-12) -> TrigPotential:
    """Average ``F0``, ``F0 o M`` and ``F0 o M^2`` (row action)."""
    n = 3
    Mt = np.array(M.rows, dtype=np.int64).T
    terms: dict = {}
    for k, c in F0.terms:
        f = np.array(k, dtype=np.int64)
        for _ in range(n):
            key = _canonical_freq(int(f[0]), int(f[1]))
            terms[key] = terms.get(key, 0.0) + c / n
            f = f @ Mt  # cos 2pi (x M . f) = cos 2pi (x . f M^T)
    Minv = M.inverse()
    bumps: list[Bump] = []
    for b in F0.bumps:
        c = b.center
        for _ in range(n):
            _add_bump(bumps, Bump(c, b.height / n, b.width), tol)
            c = Minv.act(c)  # (F0 o M) has its bump at c M^-1
    return TrigPotential.from_terms(terms, bumps)


def _add_bump(bumps: list, new: Bump, tol: float):
    for i, b in enumerate(bumps):
        d = np.subtract(b.center, new.center)
        d -= np.round(d)
        if np.hypot(*d) < tol and abs(b.width - new.width) < tol:
            bumps[i] = Bump(b.center, b.height + new.height, b.width)
            return
    bumps.append(new)


def standard_potential() -> TrigPotential:
    """``cos 2pi x + cos 2pi y + cos 2pi (x - y)``: maximum at 0, minima at the other A2-fixed points."""
    return TrigPotential.from_terms({(1, 0): 1.0, (0, 1): 1.0, (1, -1): 1.0})


# Model with three fixed sources.  The negated standard potential has its
# minimum at the origin and maxima at the other two A2-fixed points.  Three
# symmetric bumps around the origin (on the rays towards (1/3, 2/3)) push the
# origin up into a maximum surrounded by a moat holding a period-3 orbit of
# minima and one of saddles.  The scan grid is searched in order by
# ``dynamics.search.g0_search``; G0_PARAMS is its recorded first hit.
G0_DIRECTION = (1.0 / 3.0, 2.0 / 3.0)
G0_SCAN = {
    "height": (0.4, 0.5, 0.6),
    "width": (0.2, 0.22),
    "offset": (0.1, 0.11, 0.12),  # hexagonal distance of each bump from the origin
}
G0_PARAMS = (0.4, 0.2, 0.1)


def dipped_potential(height: float, width: float, offset: float) -> TrigPotential:
    """Negated standard potential plus three bumps of the given height near the origin."""
    norm = math.sqrt(float(np.asarray(G0_DIRECTION) @ METRIC @ np.asarray(G0_DIRECTION)))
    c = tuple(offset * v / norm for v in G0_DIRECTION)
    dip = TrigPotential((), (Bump(c, -3.0 * height, width),))
    sym = symmetrize(dip)
    base = standard_potential()
    return TrigPotential(base.terms, sym.bumps).negated()


def g0_potential() -> TrigPotential:
    """Potential whose downhill model has three fixed sources (and uphill three fixed sinks)."""
    return dipped_potential(*G0_PARAMS)


def load_potential(path) -> TrigPotential:
    with open(path) as fh:
        return TrigPotential.from_json(json.load(fh))


def hessian(P: TrigPotential, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference Hessian of ``P`` at the rows of ``x``; shape (n, 2, 2)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    cols = []
    for e in np.eye(2):
        cols.append((P.gradient(x + h * e) - P.gradient(x - h * e)) / (2 * h))
    H = np.stack(cols, axis=1)
    return 0.5 * (H + np.transpose(H, (0, 2, 1)))


@dataclass(frozen=True)
class CriticalPoint:
    location: tuple[float, float]
    index: int  # number of negative Hessian eigenvalues: 0 min, 1 saddle, 2 max
    value: float


def critical_points(P: TrigPotential, grid: int = 64, tol: float = 1e-10,
                    dedup: float = 1e-6) -> list[CriticalPoint]:
    """Damped Newton on ``grad F = 0`` from every node of a ``grid x grid`` lattice."""
    ax = (np.arange(grid) + 0.5) / grid
    x = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)
    alive = np.ones(len(x), bool)
    for _ in range(100):
        g = P.gradient(x)
        H = hessian(P, x)
        det = H[:, 0, 0] * H[:, 1, 1] - H[:, 0, 1] ** 2
        alive &= np.abs(det) > 1e-12
        H[~alive] = np.eye(2)
        step = np.linalg.solve(H, g[..., None])[..., 0]
        n = np.linalg.norm(step, axis=1)
        scale = np.minimum(1.0, 0.02 / np.maximum(n, 1e-300))
        x = x - step * scale[:, None]
        if np.all(np.linalg.norm(P.gradient(x), axis=1)[alive] < tol):
            break
    ok = alive & (np.linalg.norm(P.gradient(x), axis=1) < tol)
    found = []
    for p in np.round(x[ok] % 1.0, 14) % 1.0:
        if all(np.hypot(*((p - q + 0.5) % 1.0 - 0.5)) > dedup for q in found):
            found.append(p)
    found.sort(key=lambda p: (p[0], p[1]))
    out = []
    for p in found:
        ev = np.linalg.eigvalsh(hessian(P, p)[0])
        out.append(CriticalPoint((float(p[0]), float(p[1])), int(np.sum(ev < 0)),
                                 float(P.value(p)[0])))
    return out
