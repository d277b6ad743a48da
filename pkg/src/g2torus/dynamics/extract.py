"""Turn a simulated model map into a descriptor plus cell data."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import DEFAULT, SimConfig
from ..descriptor import (
    SADDLE, SINK, SOURCE, STABLE, UNSTABLE, DiffeoDescriptor, OrbitRecord,
    SeparatrixRecord, transport_deck,
)
from ..errors import NoConvergence
from ..tricolor import (
    BLUE, RED, CellData, RotationSystem, cells_from_rotation_system, face_id,
    trace_faces,
)
from .model import ModelMap, PeriodicPointRecord, find_periodic_points, torus_distance, wrap
from .separatrix import NodeChart, eigen_directions, node_chart, trace_from

PREFIX = {SINK: "w", SOURCE: "a", SADDLE: "s"}
KIND_ORDER = {SINK: 0, SOURCE: 1, SADDLE: 2}
SLOT_SIGN = {"unstable-1": +1, "unstable-2": -1, "stable-1": +1, "stable-2": -1}


@dataclass
class Extraction:
    descriptor: DiffeoDescriptor
    rotation: RotationSystem
    points: list[PeriodicPointRecord]
    point_of: dict  # (orbit id, index) -> position in ``points``
    refs: dict  # (orbit id, index) -> lifted reference position
    traces: dict  # separatrix id "orbit:index:slot" -> SeparatrixTrace
    charts: dict = field(default_factory=dict)  # node point "orbit:index" -> NodeChart
    greens: dict = field(default_factory=dict)  # green curve id -> lifted polyline
    dropped: int = 0

    def cells(self, green: str = "g") -> CellData:
        return cells_from_rotation_system(self.rotation, green)


def _group_orbits(m: ModelMap, points):
    """Orbits as lists of point indices ``[p_0, g(p_0), ...]`` with sorted representatives."""
    assigned, orbits = set(), []
    for i, p in enumerate(points):
        if i in assigned:
            continue
        members = [i]
        if p.period > 1:
            its = wrap(m.lift_iterates(p.xy, p.period - 1)[:, 0])
            for q in its:
                d = [float(torus_distance(q, r.xy)) for r in points]
                j = int(np.argmin(d))
                if d[j] > 1e-6 or points[j].kind != p.kind:
                    raise NoConvergence(f"orbit of {p.location} leaves the periodic point set")
                members.append(j)
        assigned.update(members)
        orbits.append(members)
    orbits.sort(key=lambda mem: (KIND_ORDER.get(points[mem[0]].kind, 9),
                                 points[mem[0]].period, points[mem[0]].location))
    return orbits


def extract_descriptor(m: ModelMap, cfg: SimConfig = DEFAULT,
                       green_fraction: float = 0.5) -> Extraction:
    """Locate periodic orbits, trace every separatrix and assemble the combinatorics."""
    res = find_periodic_points(m, cfg.search.max_period, cfg.search)
    points = res.points
    bad = [p.location for p in points if p.kind not in (SINK, SOURCE, SADDLE)]
    if bad:
        raise NoConvergence(f"non-hyperbolic periodic points {bad}")
    M = m.M
    counters = {SINK: 0, SOURCE: 0, SADDLE: 0}
    orbit_records, point_of, refs = [], {}, {}
    for members in _group_orbits(m, points):
        rep = points[members[0]]
        oid = f"{PREFIX[rep.kind]}{counters[rep.kind]}"
        counters[rep.kind] += 1
        ref = rep.xy.copy()
        shift = None
        if rep.period == 1:
            s = np.round(ref @ M - ref)
            shift = (int(s[0]), int(s[1]))
        for j, idx in enumerate(members):
            point_of[(oid, j)] = idx
            refs[(oid, j)] = ref.copy()
            ref = ref @ M
        orbit_records.append(OrbitRecord(oid, rep.kind, rep.period, lift_shift=shift))
    owner = {idx: key for key, idx in point_of.items()}
    om = {o.id: o for o in orbit_records}

    stub = DiffeoDescriptor(m.matrix, tuple(orbit_records), ())
    traces, seps = {}, []
    kinds, edges, darts = {}, {}, {}
    charts: dict[str, NodeChart] = {}
    for (oid, j), idx in point_of.items():
        kinds[f"{oid}:{j}"] = om[oid].kind
        darts[f"{oid}:{j}"] = []
        if om[oid].kind != SADDLE:
            charts[f"{oid}:{j}"] = node_chart(m, points[idx], cfg.trace.entry_radius)
    for o in orbit_records:
        if o.kind != SADDLE:
            continue
        vs, vu = eigen_directions(points[point_of[(o.id, 0)]])
        Mj = np.eye(2)
        first = {}
        for j in range(o.period):
            start = refs[(o.id, j)]
            for slot in UNSTABLE + STABLE:
                base = vu if slot in UNSTABLE else vs
                direction = SLOT_SIGN[slot] * (base @ Mj)
                tr = trace_from(m, start, direction, slot in UNSTABLE, points,
                                point_of[(o.id, j)], cfg.trace, f"{o.id}:{j}:{slot}")
                tkey = owner[tr.target]
                end = tr.path[-1] - refs[tkey]
                deck = np.round(end)
                if np.hypot(*(end - deck)) > 1e-3:
                    raise NoConvergence(f"separatrix {o.id}:{j}:{slot} does not end at a lattice image")
                deck = (int(deck[0]), int(deck[1]))
                sid = f"{o.id}:{j}:{slot}"
                traces[sid] = tr
                if j == 0:
                    first[slot] = (tkey, deck)
                    seps.append(SeparatrixRecord(o.id, slot, tkey[0], tkey[1], deck))
                else:
                    t0, d0 = first[slot]
                    want_idx = (t0[1] + j) % om[t0[0]].period
                    want = transport_deck(stub, d0, om[t0[0]], j)
                    if tkey != (t0[0], want_idx) or deck != want:
                        raise NoConvergence(
                            f"separatrix {sid} is not the image of {o.id}:0:{slot}: "
                            f"got {tkey}, {deck}, expected {(t0[0], want_idx)}, {want}")
                color = RED if slot in UNSTABLE else BLUE
                node = f"{tkey[0]}:{tkey[1]}"
                edges[sid] = (f"{o.id}:{j}", node, color)
                darts[f"{o.id}:{j}"].append((_angle(direction), sid))
                rel = tr.path - (refs[tkey] + np.array(deck))
                darts[node].append((charts[node].crossing_angle(rel), sid))
            Mj = Mj @ M
    rotation = {v: [sid for _, sid in sorted(ds)] for v, ds in darts.items()}
    action = {}
    for sid in edges:
        oid, j, slot = sid.split(":")
        action[sid] = f"{oid}:{(int(j) + 1) % om[oid].period}:{slot}"
    rs = RotationSystem(kinds, edges, rotation, action)
    d = DiffeoDescriptor(m.matrix, tuple(orbit_records),
                         tuple(sorted(seps, key=lambda s: (s.saddle_orbit, s.slot)))
                         ).with_derived_closures()
    ex = Extraction(d, rs, points, point_of, refs, traces, charts, dropped=res.dropped)
    ex.greens = sample_green_curves(m, ex, green_fraction, cfg)
    return ex


def _angle(v) -> float:
    return math.atan2(float(v[1]), float(v[0]))


def sample_green_curves(m: ModelMap, ex: Extraction, fraction: float = 0.5,
                        cfg: SimConfig = DEFAULT) -> dict:
    """One flow line per face, started between the face's two unstable separatrices.

    The seed sits near the face's sink at ``fraction`` of the chart angle
    between the two separatrices (see :class:`NodeChart`); it is traced back to a source, which
    must be the face's source.  Returns green curve id -> lifted polyline.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("green fraction must lie strictly between 0 and 1")
    rs = ex.rotation
    out = {}
    for face in trace_faces(rs):
        verts = [v for _, v in face]
        sink_pos = [i for i, v in enumerate(verts) if rs.kinds[v] == SINK]
        src_pos = [i for i, v in enumerate(verts) if rs.kinds[v] == SOURCE]
        if len(face) != 4 or len(sink_pos) != 1 or len(src_pos) != 1:
            continue  # reported when cells are built
        i = sink_pos[0]
        e_in, e_out = face[i - 1][0], face[i][0]
        okey = tuple(verts[i].split(":"))
        okey = (okey[0], int(okey[1]))
        q = ex.refs[okey]
        chart = ex.charts[verts[i]]
        a1 = chart.crossing_angle(_path_rel(ex, e_in, okey))
        a2 = chart.crossing_angle(_path_rel(ex, e_out, okey))
        # the face lies clockwise from the incoming edge at the sink
        sweep = (a1 - a2) % (2 * math.pi)
        theta = a1 - fraction * sweep
        off = chart.offset(theta)
        tr = trace_from(m, q + off, off, False, ex.points, None, cfg.trace, "green")
        src = [k for k, idx in ex.point_of.items() if idx == tr.target][0]
        name, k = verts[src_pos[0]].split(":")
        want = (name, int(k))
        if (src[0], src[1]) != want:
            raise NoConvergence(f"green curve of face {verts} ends at {src}, not {want}")
        out[face_id(face)] = tr.path[::-1]
    return out


def _path_rel(ex: Extraction, sid: str, node_key) -> np.ndarray:
    """Tail of a separatrix relative to the lattice image of the node it enters."""
    tr = ex.traces[sid]
    deck = np.round(tr.path[-1] - ex.refs[node_key])
    return tr.path - (ex.refs[node_key] + deck)
