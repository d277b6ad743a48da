"""Separatrix tracing and rotation numbers of fixed sinks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ..config import DEFAULT, TraceConfig
from ..errors import NoConvergence, NoSeparatrixLands, PreconditionViolated
from . import flow
from .model import ModelMap, PeriodicPointRecord, find_periodic_points, min_image
from .potential import METRIC, hessian

BRANCHES = ("u+", "u-", "s+", "s-")


@dataclass(frozen=True)
class SeparatrixTrace:
    start: tuple[float, float]  # lifted saddle position the curve emanates from
    branch: str
    path: np.ndarray  # lifted polyline, saddle end first
    target: int  # index into the periodic point list
    deck: tuple[int, int]  # end of the lifted curve minus the target's [0,1)^2 position
    entry: tuple[float, float]  # first point within the entry radius of the target, lifted
    entry_angle: float  # angle of ``entry`` seen from the target

    @property
    def displacement(self) -> np.ndarray:
        return self.path[-1] - self.path[0]


def eigen_directions(rec: PeriodicPointRecord) -> tuple[np.ndarray, np.ndarray]:
    """Unit (stable, unstable) eigenvectors of a saddle, signed so the first nonzero entry is positive."""
    out = []
    for vec in rec.eigenvectors:
        v = np.real(np.asarray(vec, dtype=complex))
        v = v / np.linalg.norm(v)
        if v[0] < -1e-12 or (abs(v[0]) <= 1e-12 and v[1] < 0):
            v = -v
        out.append(v)
    return out[0], out[1]


@dataclass(frozen=True)
class NodeChart:
    """Coordinates near a node in which its linearized flow is radial.

    With eigen-coordinates ``(a, b)`` (slow, fast) the chart is
    ``(a / r, sign(b) |b / r|^p)``, ``p = slow rate / fast rate``, where the
    scale ``r`` keeps both axes comparable at the entry radius.  Angles in this
    chart are constant along linear trajectories, so they order the curves
    entering an anisotropic node far more reliably than plain angles.
    """

    center: tuple[float, float]
    basis: np.ndarray  # columns: slow and fast eigenvectors, positively oriented
    power: float
    scale: float

    def polar(self, rel) -> tuple[float, float]:
        """Chart radius and angle of a displacement from the node."""
        a, b = np.linalg.solve(self.basis, np.asarray(rel, dtype=np.float64)) / self.scale
        c = math.copysign(abs(b) ** self.power, b)
        return math.hypot(a, c), math.atan2(c, a)

    def angle(self, rel) -> float:
        return self.polar(rel)[1]

    def offset(self, theta: float, rho: float = 1.0) -> np.ndarray:
        """Displacement from the node with chart radius ``rho`` and angle ``theta``."""
        a = rho * math.cos(theta)
        s = rho * math.sin(theta)
        b = math.copysign(abs(s) ** (1.0 / self.power), s)
        return self.scale * (self.basis @ np.array([a, b]))

    def crossing_angle(self, rel_path: np.ndarray) -> float:
        """Chart angle where a path converging to the node first crosses chart radius 1."""
        ab = np.linalg.solve(self.basis, np.asarray(rel_path, dtype=np.float64).T).T / self.scale
        c = np.sign(ab[:, 1]) * np.abs(ab[:, 1]) ** self.power
        rho = np.hypot(ab[:, 0], c)
        inside = np.flatnonzero(rho < 1.0)
        if not len(inside):
            raise NoConvergence("path never enters the node chart")
        i = int(inside[0])
        if i == 0:
            return self.polar(rel_path[0])[1]
        t = (rho[i - 1] - 1.0) / (rho[i - 1] - rho[i])
        return self.polar(rel_path[i - 1] + t * (rel_path[i] - rel_path[i - 1]))[1]


def node_chart(m: ModelMap, rec: PeriodicPointRecord, scale: float = DEFAULT.trace.entry_radius
               ) -> NodeChart:
    """Linearizing chart at a sink or source, from the Hessian of the potential."""
    if rec.kind not in ("sink", "source"):
        raise PreconditionViolated(f"{rec.location} is a {rec.kind}, not a node")
    # the flow matrix COMETRIC @ H is self-adjoint for METRIC: G-orthonormal eigenvectors
    H = hessian(m.potential, rec.xy)[0]
    ev, vec = scipy.linalg.eigh(H, METRIC)
    order = np.argsort(np.abs(ev))
    ev, vec = ev[order], vec[:, order]
    if np.linalg.det(vec) < 0:
        vec[:, 1] = -vec[:, 1]
    return NodeChart(rec.location, vec, float(abs(ev[0]) / abs(ev[1])), scale)


def _positions(points: Sequence[PeriodicPointRecord], kinds) -> tuple[np.ndarray, list[int]]:
    idx = [i for i, p in enumerate(points) if p.kind in kinds]
    arr = np.array([points[i].location for i in idx], dtype=np.float64).reshape(-1, 2)
    return arr, idx


def trace_from(m: ModelMap, start, direction, unstable: bool,
               points: Sequence[PeriodicPointRecord], own: Optional[int] = None,
               cfg: TraceConfig = DEFAULT.trace, branch: str = "") -> SeparatrixTrace:
    """Follow the separatrix leaving lifted point ``start`` along ``direction``."""
    start = np.asarray(start, dtype=np.float64)
    d = np.asarray(direction, dtype=np.float64)
    p0 = start + cfg.delta * d / np.linalg.norm(d)
    nodes, node_idx = _positions(points, ("sink",) if unstable else ("source",))
    saddles, saddle_idx = _positions(points, ("saddle",))
    own_k = saddle_idx.index(own) if own is not None and own in saddle_idx else -1
    h = m.integrator.step
    steps = int(math.ceil(cfg.max_time / h))
    path, status, k, _ = flow.trace_kernel(
        p0, 1.0 if unstable else -1.0, h, steps, nodes, cfg.node_tol, saddles,
        cfg.saddle_tol, own_k, 10 * cfg.saddle_tol, *m.kernel_args())
    if status == flow.TRACE_SADDLE:
        raise NoConvergence(
            f"separatrix {branch} from {tuple(start)} passes within {cfg.saddle_tol} of saddle "
            f"{points[saddle_idx[k]].location}: saddle connection")
    if status != flow.TRACE_NODE:
        raise NoConvergence(f"separatrix {branch} from {tuple(start)} did not reach a node")
    target = node_idx[k]
    q = np.asarray(points[target].location)
    deck = np.round(path[-1] - q)
    rel = path - (q + deck)
    dist = np.hypot(rel[:, 0], rel[:, 1])
    inside = np.flatnonzero(dist < cfg.entry_radius)
    e = path[inside[0]] if len(inside) else path[-1]
    v = e - (q + deck)
    path = np.vstack([start, path])
    return SeparatrixTrace(tuple(start), branch, path, target,
                           (int(deck[0]), int(deck[1])), tuple(e),
                           float(math.atan2(v[1], v[0])))


def trace_separatrix(m: ModelMap, saddle: PeriodicPointRecord, branch: str,
                     points: Optional[Sequence[PeriodicPointRecord]] = None,
                     cfg: TraceConfig = DEFAULT.trace) -> SeparatrixTrace:
    """Trace branch ``u+``, ``u-``, ``s+`` or ``s-`` of a saddle given in ``[0,1)^2``."""
    if saddle.kind != "saddle":
        raise PreconditionViolated(f"{saddle.location} is a {saddle.kind}, not a saddle")
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    if points is None:
        points = find_periodic_points(m).points
    own = _index_of(points, saddle)
    vs, vu = eigen_directions(saddle)
    v = vu if branch[0] == "u" else vs
    if branch[1] == "-":
        v = -v
    return trace_from(m, saddle.location, v, branch[0] == "u", points, own, cfg, branch)


def _index_of(points, rec) -> Optional[int]:
    for i, p in enumerate(points):
        if np.hypot(*min_image(np.subtract(p.location, rec.location))) < 1e-9:
            return i
    return None


def closure_class(m: ModelMap, saddle: PeriodicPointRecord,
                  points: Optional[Sequence[PeriodicPointRecord]] = None):
    """Homology class of the closed unstable manifold, or None if the branches end at different points."""
    from ..homotopy import TorusKnotClass
    if points is None:
        points = find_periodic_points(m).points
    up = trace_separatrix(m, saddle, "u+", points)
    um = trace_separatrix(m, saddle, "u-", points)
    if up.target != um.target:
        return None
    return TorusKnotClass(um.deck[0] - up.deck[0], um.deck[1] - up.deck[1])


def rotation_number_of_sink(m: ModelMap, sink: PeriodicPointRecord,
                            points: Optional[Sequence[PeriodicPointRecord]] = None,
                            strict: bool = False, cfg: TraceConfig = DEFAULT.trace) -> Fraction:
    """Cyclic shift of the separatrices entering a fixed sink under one step of ``g``.

    Entry points on a small circle around the sink are mapped by ``g`` and
    matched to the nearest entry angle; the common index shift over the
    number of entries is the rotation number.  With no separatrix landing
    the result is 0 (or ``NoSeparatrixLands`` when ``strict``).
    """
    if sink.kind != "sink" or sink.period != 1:
        raise PreconditionViolated("rotation number needs a fixed sink")
    if points is None:
        points = find_periodic_points(m).points
    me = _index_of(points, sink)
    entries = []
    for p in points:
        if p.kind != "saddle":
            continue
        for br in ("u+", "u-"):
            t = trace_separatrix(m, p, br, points, cfg)
            if t.target == me:
                entries.append(t)
    if not entries:
        if strict:
            raise NoSeparatrixLands(f"no unstable separatrix ends at {sink.location}")
        return Fraction(0)
    q = np.asarray(sink.location)
    ent = np.array([np.asarray(t.entry) - t.deck for t in entries])  # near q itself
    ang = np.arctan2(ent[:, 1] - q[1], ent[:, 0] - q[0])
    order = np.argsort(ang)
    ang = ang[order]
    ent = ent[order]
    img = m.lift_power(ent, 1)
    rel = min_image(img - q)
    img_ang = np.arctan2(rel[:, 1], rel[:, 0])
    n = len(ang)
    shifts = set()
    for k in range(n):
        diff = np.abs((ang - img_ang[k] + math.pi) % (2 * math.pi) - math.pi)
        shifts.add((int(np.argmin(diff)) - k) % n)
    if len(shifts) != 1:
        raise NoConvergence(f"inconsistent cyclic shifts {sorted(shifts)} around {sink.location}")
    return Fraction(shifts.pop(), n)
