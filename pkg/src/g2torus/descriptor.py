"""Combinatorial model of a gradient-like torus diffeomorphism.

A :class:`DiffeoDescriptor` stores orbits rather than points: an orbit of
period ``P`` stands for points ``p_0 .. p_{P-1}`` with ``g(p_j) = p_{j+1}``.
Separatrices are recorded for the representative ``p_0`` of each saddle orbit;
those of ``p_j`` are their images under ``g^j`` and keep the same slot name.

Homotopy bookkeeping uses lifts to the plane.  The lift of a free orbit point
is ``ref(p_j) = ref(p_0) @ M^j`` (exact, since ``M^3 = I``), and a fixed point
with lift ``q`` carries ``lift_shift = q @ M - q``.  A separatrix ``deck``
``d`` means the lifted separatrix starting at ``ref(saddle)`` ends at
``ref(target) + d``.  With these conventions every deck of every point of an
orbit follows from the representative's (see :func:`point_separatrices`).
"""
from __future__ import annotations

import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .constraints import MorseCounts, Verdict, check_lefschetz_hopf
from .errors import InvalidDescriptor, MissingHomotopyData, NotASink
from .homotopy import TorusKnotClass, act
from .intmat import A2, UniModularMatrix, is_similar

SCHEMA_VERSION = "1"

SINK, SOURCE, SADDLE = "sink", "source", "saddle"
KINDS = (SINK, SOURCE, SADDLE)
UNSTABLE = ("unstable-1", "unstable-2")
STABLE = ("stable-1", "stable-2")
SLOTS = UNSTABLE + STABLE
MIRROR_KIND = {SINK: SOURCE, SOURCE: SINK, SADDLE: SADDLE}
MIRROR_SLOT = dict(zip(UNSTABLE + STABLE, STABLE + UNSTABLE))

Vec = tuple[int, int]


@dataclass(frozen=True)
class OrbitRecord:
    id: str
    kind: str
    period: int
    orientation_type: str = "positive"
    lift_shift: Optional[Vec] = None  # fixed orbits only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.period < 1:
            raise ValueError("period must be >= 1")


@dataclass(frozen=True)
class SeparatrixRecord:
    saddle_orbit: str
    slot: str
    target_orbit: str
    target_index: int = 0
    deck: Optional[Vec] = None

    @property
    def unstable(self) -> bool:
        return self.slot in UNSTABLE


@dataclass(frozen=True)
class SaddleClosureClass:
    saddle_orbit: str
    knot_class: Optional[TorusKnotClass]


@dataclass(frozen=True)
class DiffeoDescriptor:
    matrix: UniModularMatrix
    orbits: tuple[OrbitRecord, ...]
    separatrices: tuple[SeparatrixRecord, ...]
    closures: tuple[SaddleClosureClass, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        object.__setattr__(self, "separatrices", tuple(self.separatrices))
        object.__setattr__(self, "closures", tuple(self.closures))

    # -- lookup -------------------------------------------------------------
    @property
    def orbit_map(self) -> dict[str, OrbitRecord]:
        return {o.id: o for o in self.orbits}

    def orbit(self, oid: str) -> OrbitRecord:
        try:
            return self.orbit_map[oid]
        except KeyError:
            raise InvalidDescriptor(f"unknown orbit id {oid!r}") from None

    def orbits_of_kind(self, kind: str) -> list[OrbitRecord]:
        return [o for o in self.orbits if o.kind == kind]

    def seps(self, saddle_orbit: str) -> dict[str, SeparatrixRecord]:
        return {s.slot: s for s in self.separatrices if s.saddle_orbit == saddle_orbit}

    def closure(self, saddle_orbit: str) -> Optional[TorusKnotClass]:
        for c in self.closures:
            if c.saddle_orbit == saddle_orbit:
                return c.knot_class
        return None

    def counts(self) -> MorseCounts:
        tally = Counter()
        for o in self.orbits:
            tally[o.kind] += o.period
        return MorseCounts(tally[SINK], tally[SADDLE], tally[SOURCE])

    @property
    def has_decks(self) -> bool:
        return all(s.deck is not None for s in self.separatrices)

    def with_derived_closures(self) -> "DiffeoDescriptor":
        """Recompute closure classes from separatrix decks (when available)."""
        return replace(self, closures=tuple(derive_closures(self)))

    def to_json(self) -> dict:
        return descriptor_to_json(self)


def derive_closures(d: DiffeoDescriptor) -> list[SaddleClosureClass]:
    out = []
    for o in d.orbits_of_kind(SADDLE):
        seps = d.seps(o.id)
        u1, u2 = seps.get("unstable-1"), seps.get("unstable-2")
        cls = None
        if u1 and u2 and (u1.target_orbit, u1.target_index) == (u2.target_orbit, u2.target_index):
            if u1.deck is not None and u2.deck is not None:
                cls = TorusKnotClass(u2.deck[0] - u1.deck[0], u2.deck[1] - u1.deck[1])
            else:
                cls = d.closure(o.id)
        out.append(SaddleClosureClass(o.id, cls))
    return out


# -- point-level expansion -----------------------------------------------------

def _vec_act(v: Vec, M: UniModularMatrix) -> Vec:
    return M.act(v)


def _vec_add(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def fixed_shift_power(shift: Vec, M: UniModularMatrix, j: int) -> Vec:
    """``q M^j - q`` for a fixed point lift ``q`` with ``q M - q = shift``."""
    out, term = (0, 0), shift
    for _ in range(j):
        out = _vec_add(out, term)
        term = _vec_act(term, M)
    return out


def transport_deck(d: DiffeoDescriptor, deck: Optional[Vec], target: OrbitRecord,
                   j: int) -> Optional[Vec]:
    """Deck of the image under ``g^j`` of a separatrix with deck ``deck``."""
    if deck is None:
        return None
    out = deck
    for _ in range(j):
        out = _vec_act(out, d.matrix)
    if target.period == 1:
        if target.lift_shift is None:
            return None
        out = _vec_add(out, fixed_shift_power(target.lift_shift, d.matrix, j))
    return out


@dataclass(frozen=True)
class PointSeparatrix:
    saddle: tuple[str, int]
    slot: str
    target: tuple[str, int]
    deck: Optional[Vec]


def point_separatrices(d: DiffeoDescriptor) -> list[PointSeparatrix]:
    om = d.orbit_map
    out = []
    for s in d.separatrices:
        sad = om[s.saddle_orbit]
        tgt = om[s.target_orbit]
        for j in range(sad.period):
            out.append(PointSeparatrix(
                (sad.id, j), s.slot,
                (tgt.id, (s.target_index + j) % tgt.period),
                transport_deck(d, s.deck, tgt, j)))
    return out


# -- validation ----------------------------------------------------------------

def check_well_formed(d: DiffeoDescriptor) -> Verdict:
    ids = [o.id for o in d.orbits]
    if len(set(ids)) != len(ids):
        return Verdict.fail("duplicate orbit ids")
    om = d.orbit_map
    by_saddle = defaultdict(list)
    for s in d.separatrices:
        if s.saddle_orbit not in om or s.target_orbit not in om:
            return Verdict.fail(f"separatrix references unknown orbit: {s}")
        if om[s.saddle_orbit].kind != SADDLE:
            return Verdict.fail(f"separatrix attached to non-saddle {s.saddle_orbit}")
        if s.slot not in SLOTS:
            return Verdict.fail(f"unknown slot {s.slot!r}")
        want = SINK if s.unstable else SOURCE
        tgt = om[s.target_orbit]
        if tgt.kind != want:
            return Verdict.fail(f"{s.slot} of {s.saddle_orbit} targets a {tgt.kind}, expected {want}")
        if not 0 <= s.target_index < tgt.period:
            return Verdict.fail(f"target index {s.target_index} out of range for {tgt.id}")
        by_saddle[s.saddle_orbit].append(s.slot)
    for o in d.orbits_of_kind(SADDLE):
        if sorted(by_saddle.get(o.id, [])) != sorted(SLOTS):
            return Verdict.fail(f"saddle orbit {o.id} does not have exactly four separatrices")
    for c in d.closures:
        if c.saddle_orbit not in om or om[c.saddle_orbit].kind != SADDLE:
            return Verdict.fail(f"closure references non-saddle {c.saddle_orbit}")
        seps = d.seps(c.saddle_orbit)
        u1, u2 = seps["unstable-1"], seps["unstable-2"]
        circle = (u1.target_orbit, u1.target_index) == (u2.target_orbit, u2.target_index)
        if circle != (c.knot_class is not None):
            return Verdict.fail(f"closure class of {c.saddle_orbit} inconsistent with its targets")
        if circle and u1.deck is not None and u2.deck is not None:
            diff = TorusKnotClass(u2.deck[0] - u1.deck[0], u2.deck[1] - u1.deck[1])
            if diff != c.knot_class:
                return Verdict.fail(f"closure class of {c.saddle_orbit} disagrees with decks")
    return Verdict.ok()


def validate_G2(d: DiffeoDescriptor) -> Verdict:
    """Check the structure every diffeomorphism inducing a conjugate of A2 has."""
    v = check_well_formed(d)
    if not v:
        return v
    if is_similar(d.matrix, A2) is None:
        return Verdict.fail(f"matrix {d.matrix} is not similar to A2")
    fixed = [o for o in d.orbits if o.period == 1]
    if len(fixed) != 3:
        return Verdict.fail(f"expected exactly three fixed points, found {len(fixed)}")
    if any(o.kind == SADDLE for o in fixed):
        return Verdict.fail("a fixed point is a saddle; fixed points must be nodal")
    bad = [o.id for o in d.orbits if o.period not in (1, 3)]
    if bad:
        return Verdict.fail(f"orbits {bad} have period other than 1 or 3")
    if not d.orbits_of_kind(SADDLE):
        return Verdict.fail("no saddle orbit")
    neg = [o.id for o in d.orbits_of_kind(SADDLE) if o.orientation_type != "positive"]
    if neg:
        return Verdict.fail(f"saddles {neg} have negative orientation type")
    lh = check_lefschetz_hopf(d.counts())
    if not lh:
        return Verdict.fail("Lefschetz-Hopf: " + lh.clause)
    return Verdict.ok()


def component_id(d: DiffeoDescriptor) -> int:
    v = validate_G2(d)
    if not v:
        raise InvalidDescriptor(v.clause)
    return sum(1 for o in d.orbits if o.period == 1 and o.kind == SINK)


# -- mirror and relabeling -----------------------------------------------------

def mirror(d: DiffeoDescriptor) -> DiffeoDescriptor:
    """Swap sinks with sources and stable with unstable separatrices."""
    orbits = tuple(replace(o, kind=MIRROR_KIND[o.kind]) for o in d.orbits)
    seps = tuple(replace(s, slot=MIRROR_SLOT[s.slot]) for s in d.separatrices)
    out = DiffeoDescriptor(d.matrix, orbits, _sorted_seps(seps), ())
    if out.has_decks:
        return out.with_derived_closures()
    return replace(out, closures=tuple(SaddleClosureClass(o.id, None)
                                       for o in out.orbits_of_kind(SADDLE)))


def _sorted_seps(seps: Iterable[SeparatrixRecord]) -> tuple[SeparatrixRecord, ...]:
    return tuple(sorted(seps, key=lambda s: (s.saddle_orbit, SLOTS.index(s.slot))))


def relabel(d: DiffeoDescriptor, names: dict[str, str],
            shifts: Optional[dict[str, int]] = None) -> DiffeoDescriptor:
    """Rename orbits and move each orbit's representative forward by ``shifts[id]``."""
    shifts = shifts or {}
    om = d.orbit_map
    seps = []
    for s in d.separatrices:
        k_s = shifts.get(s.saddle_orbit, 0) % om[s.saddle_orbit].period
        tgt = om[s.target_orbit]
        k_t = shifts.get(tgt.id, 0) % tgt.period
        seps.append(SeparatrixRecord(
            names[s.saddle_orbit], s.slot, names[tgt.id],
            (s.target_index + k_s - k_t) % tgt.period,
            transport_deck(d, s.deck, tgt, k_s)))
    closures = []
    for c in d.closures:
        k = shifts.get(c.saddle_orbit, 0) % om[c.saddle_orbit].period
        cls = c.knot_class
        if cls is not None:
            for _ in range(k):
                cls = act(cls, d.matrix)
        closures.append(SaddleClosureClass(names[c.saddle_orbit], cls))
    orbits = tuple(replace(o, id=names[o.id]) for o in d.orbits)
    return DiffeoDescriptor(d.matrix, orbits, _sorted_seps(seps),
                            tuple(sorted(closures, key=lambda c: c.saddle_orbit)))


def _structure_key(d: DiffeoDescriptor):
    """Relabeling-sensitive summary used by the isomorphism search."""
    key = []
    for o in sorted(d.orbits, key=lambda o: o.id):
        key.append(("orbit", o.id, o.kind, o.period, o.orientation_type))
    for o in d.orbits_of_kind(SADDLE):
        seps = d.seps(o.id)
        u = tuple(sorted((seps[s].target_orbit, seps[s].target_index) for s in UNSTABLE))
        st = tuple(sorted((seps[s].target_orbit, seps[s].target_index) for s in STABLE))
        cls = d.closure(o.id)
        key.append(("saddle", o.id, u, st, None if cls is None else cls.up_to_sign()))
    return sorted(key, key=repr)


def find_isomorphism(d1: DiffeoDescriptor, d2: DiffeoDescriptor):
    """Exhaustive orbit matching: return ``(names, shifts)`` or None.

    Orbits are matched within (kind, period) groups and each orbit's
    representative may be moved along its orbit.  Closure classes are compared
    up to sign; separatrix decks are not compared.
    """
    if d1.matrix != d2.matrix:
        return None
    g1, g2 = defaultdict(list), defaultdict(list)
    for o in d1.orbits:
        g1[(o.kind, o.period)].append(o.id)
    for o in d2.orbits:
        g2[(o.kind, o.period)].append(o.id)
    if {k: len(v) for k, v in g1.items()} != {k: len(v) for k, v in g2.items()}:
        return None
    target = _structure_key(d2)
    groups = sorted(g1)
    perms = [list(itertools.permutations(g2[k])) for k in groups]
    periods = {o.id: o.period for o in d1.orbits}
    for choice in itertools.product(*perms):
        names = {}
        for k, perm in zip(groups, choice):
            names.update(zip(g1[k], perm))
        ids = [o.id for o in d1.orbits if periods[o.id] > 1]
        for ks in itertools.product(*[range(periods[i]) for i in ids]):
            shifts = dict(zip(ids, ks))
            if _structure_key(relabel(d1, names, shifts)) == target:
                return names, shifts
    return None


def descriptors_isomorphic(d1: DiffeoDescriptor, d2: DiffeoDescriptor) -> bool:
    return find_isomorphism(d1, d2) is not None


# -- canonical simplest descriptors -----------------------------------------------

def _sep(saddle, slot, target, index=0, deck=(0, 0)):
    return SeparatrixRecord(saddle, slot, target, index, deck)


def _canonical_g1() -> DiffeoDescriptor:
    # Traced from the uphill gradient flow of cos2πx + cos2πy + cos2π(x-y):
    # sink at 0, sources at (1/3,2/3), (2/3,1/3), saddle representative (1/2,0).
    orbits = (
        OrbitRecord("w", SINK, 1, lift_shift=(0, 0)),
        OrbitRecord("a1", SOURCE, 1, lift_shift=(0, -1)),
        OrbitRecord("a2", SOURCE, 1, lift_shift=(-1, -1)),
        OrbitRecord("s", SADDLE, 3),
    )
    seps = (
        _sep("s", "unstable-1", "w", deck=(1, 0)),
        _sep("s", "unstable-2", "w", deck=(0, 0)),
        _sep("s", "stable-1", "a1", deck=(0, -1)),
        _sep("s", "stable-2", "a2", deck=(0, 0)),
    )
    return DiffeoDescriptor(A2, orbits, seps).with_derived_closures()


def _canonical_g0() -> DiffeoDescriptor:
    # Traced from the downhill flow of the g0 search potential
    # (dynamics.potential.g0_potential): sources at the three A2-fixed points,
    # sink representative near (0.051, 0.101), saddle representatives (0, 1/2)
    # and near (0.070, 0.035).
    orbits = (
        OrbitRecord("a0", SOURCE, 1, lift_shift=(0, 0)),
        OrbitRecord("a1", SOURCE, 1, lift_shift=(0, -1)),
        OrbitRecord("a2", SOURCE, 1, lift_shift=(-1, -1)),
        OrbitRecord("w", SINK, 3),
        OrbitRecord("s", SADDLE, 3),
        OrbitRecord("t", SADDLE, 3),
    )
    seps = (
        _sep("s", "stable-1", "a1", 0, (0, 0)),
        _sep("s", "stable-2", "a2", 0, (-1, 0)),
        _sep("s", "unstable-1", "w", 1, (0, 1)),
        _sep("s", "unstable-2", "w", 0, (0, 0)),
        _sep("t", "stable-1", "a2", 0, (0, 0)),
        _sep("t", "stable-2", "a0", 0, (0, 0)),
        _sep("t", "unstable-1", "w", 1, (0, 0)),
        _sep("t", "unstable-2", "w", 0, (0, 0)),
    )
    return DiffeoDescriptor(A2, orbits, seps).with_derived_closures()


def canonical_descriptor(i: int) -> DiffeoDescriptor:
    """The simplest descriptor with ``i`` fixed sinks."""
    if i == 1:
        return _canonical_g1()
    if i == 2:
        return mirror(_canonical_g1())
    if i == 0:
        return _canonical_g0()
    if i == 3:
        return mirror(_canonical_g0())
    raise ValueError(f"component index must be in 0..3, got {i}")


# -- the complex Gamma_omega ------------------------------------------------------

@dataclass(frozen=True)
class GammaEdge:
    id: int
    saddle: tuple[str, int]
    tail: tuple[str, int]  # endpoint of unstable-1
    head: tuple[str, int]  # endpoint of unstable-2
    knot_class: Optional[TorusKnotClass]


@dataclass(frozen=True)
class GammaComplex:
    sink: tuple[str, int]
    vertices: tuple[tuple[str, int], ...]
    edges: tuple[GammaEdge, ...]

    def edge(self, eid: int) -> GammaEdge:
        return self.edges[eid]

    def fundamental_cycles(self) -> list[list[tuple[int, int]]]:
        """One cycle per non-tree edge of a spanning forest, as ``(edge, sign)`` walks."""
        parent: dict = {}
        adj = defaultdict(list)
        for e in self.edges:
            adj[e.tail].append((e.id, +1, e.head))
            adj[e.head].append((e.id, -1, e.tail))
        tree = set()
        for root in self.vertices:
            if root in parent:
                continue
            parent[root] = None
            stack = [root]
            while stack:
                v = stack.pop()
                for eid, sgn, w in adj[v]:
                    if w not in parent:
                        parent[w] = (v, eid, sgn)
                        tree.add(eid)
                        stack.append(w)

        def path_to_root(v):
            out = []
            while parent[v] is not None:
                u, eid, sgn = parent[v]
                out.append((eid, -sgn))  # walk from v up to u
                v = u
            return out

        cycles = []
        for e in self.edges:
            if e.id in tree:
                continue
            # head -> root, root -> tail, then the edge tail -> head
            up = path_to_root(e.head)
            down = [(eid, -sgn) for eid, sgn in reversed(path_to_root(e.tail))]
            cycles.append(up + down + [(e.id, +1)])
        return cycles


def gamma_complex(d: DiffeoDescriptor, sink_orbit: str, index: int = 0,
                  scope: str = "orbit") -> GammaComplex:
    """Union of unstable closures of saddles having the sink point in their closure.

    With ``scope="orbit"`` each saddle orbit contributes one edge, from its
    first point whose closure contains the sink; ``scope="points"`` keeps
    every saddle point.
    """
    if scope not in ("orbit", "points"):
        raise ValueError(f"unknown scope {scope!r}")
    o = d.orbit(sink_orbit)
    if o.kind != SINK:
        raise NotASink(f"{sink_orbit} is a {o.kind}")
    sink = (sink_orbit, index % o.period)
    by_point = defaultdict(dict)
    for ps in point_separatrices(d):
        if ps.slot in UNSTABLE:
            by_point[ps.saddle][ps.slot] = ps
    edges, verts, seen = [], {sink}, set()
    for saddle in sorted(by_point):
        u1, u2 = by_point[saddle]["unstable-1"], by_point[saddle]["unstable-2"]
        if sink not in (u1.target, u2.target):
            continue
        if scope == "orbit":
            if saddle[0] in seen:
                continue
            seen.add(saddle[0])
        cls = None
        if u1.deck is not None and u2.deck is not None:
            cls = TorusKnotClass(u2.deck[0] - u1.deck[0], u2.deck[1] - u1.deck[1])
        elif u1.target == u2.target:
            cls = d.closure(saddle[0])
            if cls is not None:
                for _ in range(saddle[1]):
                    cls = act(cls, d.matrix)
        edges.append(GammaEdge(len(edges), saddle, u1.target, u2.target, cls))
        verts.update((u1.target, u2.target))
    return GammaComplex(sink, tuple(sorted(verts)), tuple(edges))


def loop_class(complex_: GammaComplex, cycle) -> TorusKnotClass:
    """Signed sum of edge classes along a closed walk ``[(edge_id, +-1), ...]``."""
    if not cycle:
        raise ValueError("empty cycle")
    total = TorusKnotClass(0, 0)
    start = None
    at = None
    for eid, sgn in cycle:
        e = complex_.edge(eid)
        a, b = (e.tail, e.head) if sgn > 0 else (e.head, e.tail)
        if start is None:
            start = a
        elif a != at:
            raise ValueError(f"walk is not connected at edge {eid}")
        at = b
        if e.knot_class is None:
            raise MissingHomotopyData(f"edge {eid} (saddle {e.saddle}) has no homotopy data")
        total = total + e.knot_class * sgn
    if at != start:
        raise ValueError("walk is not closed")
    return total


# -- JSON ---------------------------------------------------------------------

def descriptor_to_json(d: DiffeoDescriptor) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "matrix": list(d.matrix.entries),
        "orbits": [
            {k: v for k, v in {
                "id": o.id, "kind": o.kind, "period": o.period,
                "orientation_type": o.orientation_type,
                "lift_shift": None if o.lift_shift is None else list(o.lift_shift),
            }.items() if v is not None}
            for o in d.orbits
        ],
        "separatrices": [
            {"saddle_orbit": s.saddle_orbit, "slot": s.slot, "target_orbit": s.target_orbit,
             "target_index": s.target_index,
             "deck": None if s.deck is None else list(s.deck)}
            for s in d.separatrices
        ],
        "closures": [
            {"saddle_orbit": c.saddle_orbit,
             "knot_class": None if c.knot_class is None else c.knot_class.as_list()}
            for c in d.closures
        ],
    }


def descriptor_from_json(data: dict) -> DiffeoDescriptor:
    try:
        matrix = UniModularMatrix.from_entries(data["matrix"])
        orbits = tuple(
            OrbitRecord(o["id"], o["kind"], int(o["period"]),
                        o.get("orientation_type", "positive"),
                        tuple(o["lift_shift"]) if o.get("lift_shift") is not None else None)
            for o in data["orbits"])
        seps = tuple(
            SeparatrixRecord(s["saddle_orbit"], s["slot"], s["target_orbit"],
                             int(s.get("target_index", 0)),
                             tuple(s["deck"]) if s.get("deck") is not None else None)
            for s in data["separatrices"])
        closures = tuple(
            SaddleClosureClass(c["saddle_orbit"],
                               TorusKnotClass(*c["knot_class"]) if c.get("knot_class") is not None
                               else None)
            for c in data.get("closures", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDescriptor(f"malformed descriptor JSON: {exc}") from exc
    return DiffeoDescriptor(matrix, orbits, seps, closures)


def load_descriptor(path) -> DiffeoDescriptor:
    with open(path) as fh:
        data = json.load(fh)
    # files written by `simulate` wrap the descriptor next to the cell data
    if "descriptor" in data and "orbits" not in data:
        data = data["descriptor"]
    return descriptor_from_json(data)
