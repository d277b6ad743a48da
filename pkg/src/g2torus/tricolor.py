"""Three-color graphs of gradient-like torus diffeomorphisms.

The separatrices cut the torus into quadrilateral faces ``alpha - sigma_a -
omega - sigma_b``.  A green curve from ``alpha`` to ``omega`` splits every face
into two triangles, each bounded by one stable (blue), one unstable (red) and
one green curve.  Triangles are the vertices of the graph, two triangles are
joined by an edge of color c when they share their c-curve, and the map
permutes triangles.

Cell data is built from a :class:`RotationSystem`: the cyclic (counter-
clockwise) order of separatrix ends at every periodic point together with the
action of the map on separatrices.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .descriptor import MIRROR_KIND, MIRROR_SLOT, SADDLE, UNSTABLE, DiffeoDescriptor
from .errors import InvalidDescriptor, NonTriangularRegion

GREEN, RED, BLUE = "t-green", "u-red", "s-blue"
COLORS = (GREEN, RED, BLUE)


# -- rotation systems and cells ---------------------------------------------------

@dataclass(frozen=True)
class RotationSystem:
    """Separatrix graph embedded in the torus.

    ``kinds`` maps each point to sink/source/saddle, ``edges`` maps a separatrix
    id to ``(saddle point, node point, color)``, ``rotation`` lists separatrix
    ids around each point counter-clockwise, and ``action`` sends a separatrix
    to its image under the map.
    """

    kinds: dict
    edges: dict
    rotation: dict
    action: dict

    def to_json(self) -> dict:
        return {"kinds": self.kinds,
                "edges": {k: list(v) for k, v in self.edges.items()},
                "rotation": self.rotation,
                "action": self.action}

    @classmethod
    def from_json(cls, data: dict) -> "RotationSystem":
        return cls(dict(data["kinds"]),
                   {k: tuple(v) for k, v in data["edges"].items()},
                   {k: list(v) for k, v in data["rotation"].items()},
                   dict(data["action"]))


def rotation_system_from_descriptor(d: DiffeoDescriptor, rotation: dict) -> RotationSystem:
    """Attach a cyclic order of separatrix ends (``rotation``) to a descriptor.

    Points are named ``"orbit:j"`` for the j-th image of the representative,
    separatrices ``"saddle:j:slot"``; edges and the map action follow from the
    descriptor, which transports each slot along the orbit.
    """
    om = d.orbit_map
    kinds = {f"{o.id}:{j}": o.kind for o in d.orbits for j in range(o.period)}
    edges, action = {}, {}
    for o in d.orbits_of_kind(SADDLE):
        for slot, rec in d.seps(o.id).items():
            tgt = om[rec.target_orbit]
            for j in range(o.period):
                sid = f"{o.id}:{j}:{slot}"
                node = f"{tgt.id}:{(rec.target_index + j) % tgt.period}"
                edges[sid] = (f"{o.id}:{j}", node, RED if slot in UNSTABLE else BLUE)
                action[sid] = f"{o.id}:{(j + 1) % o.period}:{slot}"
    ends = defaultdict(set)
    for sid, (a, b, _) in edges.items():
        ends[a].add(sid)
        ends[b].add(sid)
    for v in kinds:
        if set(rotation.get(v, ())) != ends[v] or len(rotation.get(v, ())) != len(ends[v]):
            raise InvalidDescriptor(f"rotation at {v} does not list exactly its separatrix ends")
    return RotationSystem(kinds, edges, {v: list(rotation[v]) for v in kinds}, action)


def relabel_rotation_system(rs: RotationSystem, names: dict, shifts: dict,
                            periods: dict) -> RotationSystem:
    """Rename orbits and move representatives forward, as ``descriptor.relabel`` does."""
    def pt(v):
        o, j = v.split(":")
        return f"{names[o]}:{(int(j) - shifts.get(o, 0)) % periods[o]}"

    def sid(e):
        o, j, slot = e.split(":")
        return f"{pt(o + ':' + j)}:{slot}"
    return RotationSystem(
        {pt(v): k for v, k in rs.kinds.items()},
        {sid(e): (pt(a), pt(b), c) for e, (a, b, c) in rs.edges.items()},
        {pt(v): [sid(e) for e in rot] for v, rot in rs.rotation.items()},
        {sid(e): sid(f) for e, f in rs.action.items()})


def mirror_rotation_system(rs: RotationSystem) -> RotationSystem:
    """Time reversal: same curves and action, sinks and sources swapped, stable and unstable swapped."""
    def sid(e):
        o, j, slot = e.split(":")
        return f"{o}:{j}:{MIRROR_SLOT[slot]}"
    swap = {RED: BLUE, BLUE: RED}
    return RotationSystem(
        {v: MIRROR_KIND[k] for v, k in rs.kinds.items()},
        {sid(e): (a, b, swap[c]) for e, (a, b, c) in rs.edges.items()},
        {v: [sid(e) for e in rot] for v, rot in rs.rotation.items()},
        {sid(e): sid(f) for e, f in rs.action.items()})


def trace_faces(rs: RotationSystem) -> list[list[tuple[str, str]]]:
    """Faces as closed walks of ``(separatrix, start point)`` half-edges."""
    def other(e, v):
        a, b, _ = rs.edges[e]
        return b if v == a else a

    pos = {v: {e: i for i, e in enumerate(rot)} for v, rot in rs.rotation.items()}
    seen = set()
    faces = []
    for e in sorted(rs.edges):
        for v in rs.edges[e][:2]:
            if (e, v) in seen:
                continue
            walk = []
            he = (e, v)
            while he not in seen:
                seen.add(he)
                walk.append(he)
                edge, frm = he
                to = other(edge, frm)
                rot = rs.rotation[to]
                nxt = rot[(pos[to][edge] - 1) % len(rot)]
                he = (nxt, to)
            if he != walk[0]:
                raise InvalidDescriptor("rotation system does not close up into faces")
            faces.append(walk)
    return faces


def face_id(face) -> str:
    """Name of a face: its smallest half-edge (each half-edge bounds one face)."""
    e, v = min(face)
    return f"{e}@{v}"


@dataclass(frozen=True)
class Region:
    id: str
    boundary: tuple[tuple[str, str], ...]  # (curve id, color)


@dataclass(frozen=True)
class CellData:
    regions: tuple[Region, ...]
    permutation: dict  # region id -> region id

    def to_json(self) -> dict:
        return {"regions": [{"id": r.id, "boundary": [list(b) for b in r.boundary]}
                            for r in self.regions],
                "permutation": dict(self.permutation)}

    @classmethod
    def from_json(cls, data: dict) -> "CellData":
        regions = tuple(Region(r["id"], tuple(tuple(b) for b in r["boundary"]))
                        for r in data["regions"])
        return cls(regions, dict(data["permutation"]))


def cells_from_rotation_system(rs: RotationSystem, green: str = "g") -> CellData:
    """Split every face by a green diagonal; ``green`` only tags the curve names."""
    faces = trace_faces(rs)
    n_points = len(rs.kinds)
    if len(faces) != len(rs.edges) - n_points:
        raise InvalidDescriptor(
            f"{len(faces)} faces from {len(rs.edges)} separatrices and {n_points} points; "
            "the embedding is not a torus")
    regions = []
    for face in faces:
        verts = [v for _, v in face]
        kinds = [rs.kinds[v] for v in verts]
        if len(face) != 4 or sorted(kinds) != ["saddle", "saddle", "sink", "source"]:
            raise NonTriangularRegion(f"face {verts} is not a source-saddle-sink-saddle quadrilateral")
        gid = f"{green}:{face_id(face)}"
        # each saddle corner holds one stable and one unstable separatrix
        for i, v in enumerate(verts):
            if rs.kinds[v] != "saddle":
                continue
            e_in = face[i - 1][0]
            e_out = face[i][0]
            pair = {rs.edges[e_in][2]: e_in, rs.edges[e_out][2]: e_out}
            if set(pair) != {RED, BLUE}:
                raise NonTriangularRegion(f"saddle corner at {v} lacks a red or blue side")
            regions.append(Region(_region_id(pair[BLUE], pair[RED]),
                                  ((pair[BLUE], BLUE), (pair[RED], RED), (gid, GREEN))))
    ids = {r.id for r in regions}
    perm = {}
    for r in regions:
        b, rd = r.boundary[0][0], r.boundary[1][0]
        img = _region_id(rs.action[b], rs.action[rd])
        if img not in ids:
            raise InvalidDescriptor(f"image of region {r.id} is not a region")
        perm[r.id] = img
    return CellData(tuple(sorted(regions, key=lambda r: r.id)), perm)


def _region_id(blue: str, red: str) -> str:
    return f"{blue}|{red}"


# -- the graph ------------------------------------------------------------------------

@dataclass(frozen=True)
class TricolorGraph:
    vertices: tuple
    edges: tuple  # (v, w, color)
    permutation: dict
    _adj: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        adj = defaultdict(dict)
        for v, w, c in self.edges:
            if c not in COLORS:
                raise ValueError(f"unknown color {c!r}")
            for a, b in ((v, w), (w, v)):
                if c in adj[a]:
                    raise NonTriangularRegion(f"vertex {a} has two {c} edges")
                adj[a][c] = b
        for v in self.vertices:
            if set(adj[v]) != set(COLORS):
                raise NonTriangularRegion(f"vertex {v} lacks an edge of some color")
        if sorted(self.permutation, key=repr) != sorted(self.vertices, key=repr) or \
                len(set(self.permutation.values())) != len(self.vertices):
            raise ValueError("permutation is not a bijection on the vertices")
        for v, w, c in self.edges:
            if adj[self.permutation[v]][c] != self.permutation[w]:
                raise ValueError(f"permutation does not preserve the {c} edge {v}-{w}")
        object.__setattr__(self, "_adj", dict(adj))

    def neighbor(self, v, color):
        return self._adj[v][color]

    def relabel(self, names: dict) -> "TricolorGraph":
        return TricolorGraph(tuple(names[v] for v in self.vertices),
                             tuple((names[v], names[w], c) for v, w, c in self.edges),
                             {names[v]: names[w] for v, w in self.permutation.items()})

    def two_color_cycles(self, c1: str, c2: str) -> list[list]:
        """Cycles alternating colors ``c1`` and ``c2``, as vertex lists."""
        seen, out = set(), []
        for v in self.vertices:
            if v in seen:
                continue
            cyc, x, col = [], v, c1
            while True:
                cyc.append(x)
                seen.add(x)
                x = self.neighbor(x, col)
                col = c2 if col == c1 else c1
                if x == v:
                    break
            out.append(cyc)
        return out

    def components(self) -> list[set]:
        seen, out = set(), []
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = {v}, [v]
            while stack:
                x = stack.pop()
                for w in self._adj[x].values():
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            out.append(comp)
        return out

    def cycle_length(self, v) -> int:
        n, x = 1, self.permutation[v]
        while x != v:
            x = self.permutation[x]
            n += 1
        return n

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [list(e) for e in self.edges],
                "permutation": dict(self.permutation)}


def build_tricolor(cells: CellData) -> TricolorGraph:
    """One vertex per triangular region, an edge per shared boundary curve."""
    by_curve = defaultdict(list)
    for r in cells.regions:
        colors = sorted(c for _, c in r.boundary)
        if colors != sorted(COLORS):
            raise NonTriangularRegion(
                f"region {r.id} needs exactly one boundary of each color, has {colors}")
        for curve, color in r.boundary:
            by_curve[(curve, color)].append(r.id)
    edges = []
    for (curve, color), regs in sorted(by_curve.items()):
        if len(regs) != 2:
            raise NonTriangularRegion(f"curve {curve} bounds {len(regs)} regions, expected 2")
        edges.append((regs[0], regs[1], color))
    return TricolorGraph(tuple(r.id for r in cells.regions), tuple(edges), dict(cells.permutation))


# -- equivalence ------------------------------------------------------------------------

def _profile(G: TricolorGraph) -> dict:
    """Vertex invariants: permutation cycle length and the three two-color cycle lengths."""
    prof = {v: [G.cycle_length(v)] for v in G.vertices}
    for c1, c2 in ((RED, GREEN), (BLUE, GREEN), (RED, BLUE)):
        for cyc in G.two_color_cycles(c1, c2):
            for v in cyc:
                prof[v].append(len(cyc))
    return {v: tuple(p) for v, p in prof.items()}


def tricolor_equivalent(G: TricolorGraph, H: TricolorGraph) -> tuple[bool, Optional[dict]]:
    """Search for a color-preserving isomorphism ``h`` with ``h o pi_G = pi_H o h``.

    Vertices are first partitioned by invariant profiles; a choice for one
    vertex then forces its whole color component and permutation images, so
    backtracking happens only across components.
    """
    if len(G.vertices) != len(H.vertices) or len(G.edges) != len(H.edges):
        return False, None
    pg, ph = _profile(G), _profile(H)
    if sorted(pg.values()) != sorted(ph.values()):
        return False, None
    order = sorted(G.vertices, key=repr)

    def extend(h: dict, inv: dict, v, w):
        h, inv = dict(h), dict(inv)
        queue = [(v, w)]
        while queue:
            a, b = queue.pop()
            if a in h or b in inv:
                if h.get(a) != b or inv.get(b) != a:
                    return None
                continue
            if pg[a] != ph[b]:
                return None
            h[a], inv[b] = b, a
            for c in COLORS:
                queue.append((G.neighbor(a, c), H.neighbor(b, c)))
            queue.append((G.permutation[a], H.permutation[b]))
        return h, inv

    def search(h, inv):
        free = [v for v in order if v not in h]
        if not free:
            return h
        v = free[0]
        for w in sorted((w for w in H.vertices if w not in inv and ph[w] == pg[v]), key=repr):
            nxt = extend(h, inv, v, w)
            if nxt is not None:
                res = search(*nxt)
                if res is not None:
                    return res
        return None

    h = search({}, {})
    return (h is not None), h


def load_cells(path) -> CellData:
    with open(path) as fh:
        data = json.load(fh)
    if "cells" in data:
        data = data["cells"]
    return CellData.from_json(data)
