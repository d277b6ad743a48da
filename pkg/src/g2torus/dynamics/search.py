"""Parameter scan for the potential with three fixed maxima."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from ..config import DEFAULT, SimConfig
from ..descriptor import component_id, validate_G2
from ..errors import G2Error
from .extract import Extraction, extract_descriptor
from .model import ModelMap
from .potential import G0_SCAN, METRIC, critical_points, dipped_potential, hessian

log = logging.getLogger(__name__)

FIXED = np.array([[0.0, 0.0], [1 / 3, 2 / 3], [2 / 3, 1 / 3]])


@dataclass(frozen=True)
class ScanCriteria:
    min_separation: float = 0.03  # hexagonal distance between critical points
    max_anisotropy: float = 4.0  # eigenvalue ratio of the flow at minima and maxima
    census_grid: int = 32


@dataclass
class Candidate:
    params: tuple[float, float, float]
    accepted: bool
    reason: str
    extraction: Optional[Extraction] = field(default=None, repr=False)


def _hex_dist(a, b) -> float:
    d = np.subtract(a, b)
    d -= np.round(d)
    return float(np.sqrt(d @ METRIC @ d))


def screen(params, crit: ScanCriteria = ScanCriteria()) -> str:
    """Cheap census check on the potential alone; returns "" when it passes."""
    P = dipped_potential(*params)
    cps = critical_points(P, grid=crit.census_grid)
    by_index = {i: [c for c in cps if c.index == i] for i in range(3)}
    counts = tuple(len(by_index[i]) for i in range(3))
    if counts != (3, 6, 3):
        return f"census (minima, saddles, maxima) = {counts}"
    for c in by_index[2]:
        if min(_hex_dist(c.location, f) for f in FIXED) > 1e-6:
            return f"maximum {c.location} is not an A2-fixed point"
    sep = min(_hex_dist(a.location, b.location) for a, b in itertools.combinations(cps, 2))
    if sep < crit.min_separation:
        return f"critical points {sep:.3g} apart"
    for c in by_index[0] + by_index[2]:
        ev = np.abs(scipy.linalg.eigvalsh(hessian(P, np.array(c.location))[0], METRIC))
        if ev.max() / ev.min() > crit.max_anisotropy:
            return f"node {c.location} has anisotropy {ev.max() / ev.min():.3g}"
    return ""


def evaluate(params, crit: ScanCriteria = ScanCriteria(), cfg: SimConfig = DEFAULT) -> Candidate:
    """Screen, then extract the downhill model and require component 0 with counts (3,6,3)."""
    params = tuple(float(p) for p in params)
    reason = screen(params, crit)
    if reason:
        return Candidate(params, False, reason)
    m = ModelMap(dipped_potential(*params), -1, integrator=cfg.integrator)
    try:
        ex = extract_descriptor(m, cfg)
    except G2Error as exc:  # saddle connection, stray green curve, ...
        return Candidate(params, False, f"extraction failed: {exc}")
    d = ex.descriptor
    verdict = validate_G2(d)
    if not verdict.passed:
        return Candidate(params, False, f"descriptor invalid: {verdict.clause}", ex)
    if component_id(d) != 0 or d.counts().as_tuple() != (3, 6, 3):
        return Candidate(params, False, f"component {component_id(d)}, counts {d.counts().as_tuple()}", ex)
    return Candidate(params, True, "", ex)


def scan_grid(grid: dict = G0_SCAN):
    return list(itertools.product(grid["height"], grid["width"], grid["offset"]))


def g0_search(grid: dict = G0_SCAN, crit: ScanCriteria = ScanCriteria(),
              cfg: SimConfig = DEFAULT, exhaustive: bool = False) -> list[Candidate]:
    """Walk the scan grid in order; stop at the first accepted candidate unless ``exhaustive``."""
    out = []
    for params in scan_grid(grid):
        c = evaluate(params, crit, cfg)
        log.info("g0 scan %s: %s", params, "accepted" if c.accepted else c.reason)
        out.append(c)
        if c.accepted and not exhaustive:
            break
    return out
