"""Combinatorial surgery on descriptors: saddle-node cancellations and their inverses.

Every reducing move cancels a period-3 saddle orbit ``S`` against a period-3
nodal orbit ``N`` joined to it by exactly one separatrix per point.  Other
separatrices ending at ``N`` are rerouted to the far end of ``S``'s other
separatrix on the same side; decks are carried along the lifted path.

* ``collapse-disk``: ``N`` is reached only from ``S``.  The arc
  ``N - S - (other end)`` is contractible and shrinks into a single node.
* ``confluence-annulus``: ``N`` is also reached by exactly one other saddle
  orbit ``R``, and the separatrices of ``S`` and ``R`` on the opposite side
  have the same ends and the same span up to sign (equal closure classes when
  they are circles), so they cobound an annulus (or a strip) holding ``N``.

The expansions are the inverse insertions.  ``expand-disk`` drops a new
saddle and node into a face ``alpha - sigma - omega``; ``expand-annulus``
splits a separatrix of ``sigma`` by a new node and a new saddle whose
opposite-side separatrices copy those of ``sigma``.  ``expand-disk`` keeps
every closure class.  ``expand-annulus`` on the sink side turns the circle
through ``sigma`` into a chain through the new node and saddle, so that
saddle loses its own closure class while the loop classes of the sink's
complex stay the same up to sign.  Both use period 3, so fixed points (hence
the component) are untouched.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from typing import Optional

from .descriptor import (
    SADDLE, SINK, SOURCE, STABLE, UNSTABLE, DiffeoDescriptor, OrbitRecord,
    SeparatrixRecord, _sorted_seps, canonical_descriptor, point_separatrices, component_id,
    descriptors_isomorphic, transport_deck, validate_G2,
)
from .errors import PreconditionViolated, StuckDescriptor

COLLAPSE, CONFLUENCE = "collapse-disk", "confluence-annulus"
EXPAND_DISK, EXPAND_ANNULUS = "expand-disk", "expand-annulus"
KINDS = (COLLAPSE, CONFLUENCE, EXPAND_DISK, EXPAND_ANNULUS)
SIDE_SLOTS = {SINK: UNSTABLE, SOURCE: STABLE}
OTHER = {SINK: SOURCE, SOURCE: SINK}


@dataclass(frozen=True)
class Move:
    """One surgery step.

    For reducing moves ``saddle`` and ``node`` are the orbits removed.  For
    expansions ``saddle`` is the existing saddle orbit locating the insertion,
    ``slots`` the separatrices of it that bound the face (expand-disk: one
    unstable and one stable) or the one that is split (expand-annulus),
    ``side`` the kind of the new node and ``new_saddle``/``node`` the new ids.
    """

    kind: str
    saddle: str
    node: str
    slots: tuple[str, ...] = ()
    side: str = ""
    new_saddle: str = ""

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v not in ("", ())}
        if "slots" in out:
            out["slots"] = list(out["slots"])
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Move":
        data = dict(data)
        data["slots"] = tuple(data.get("slots", ()))
        return cls(**data)


# -- helpers -------------------------------------------------------------------------

def _sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def _add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def _require_decks(d: DiffeoDescriptor):
    if not d.has_decks:
        raise PreconditionViolated("surgery needs separatrix decks on every record")


def _fresh(d: DiffeoDescriptor, prefix: str) -> str:
    used = {o.id for o in d.orbits}
    n = 0
    while f"{prefix}{n}" in used:
        n += 1
    return f"{prefix}{n}"


def _rebuild(d: DiffeoDescriptor, orbits, seps) -> DiffeoDescriptor:
    return DiffeoDescriptor(d.matrix, tuple(orbits), _sorted_seps(seps)).with_derived_closures()


# -- cancellation ------------------------------------------------------------------------

def _incoming(d: DiffeoDescriptor, node: str) -> list[SeparatrixRecord]:
    return [s for s in d.separatrices if s.target_orbit == node]


def cancellation_clause(d: DiffeoDescriptor, saddle: str, node: str) -> Optional[str]:
    """Why ``saddle`` and ``node`` cannot cancel, or None when they can."""
    om = d.orbit_map
    if saddle not in om or node not in om:
        return f"unknown orbit {saddle if saddle not in om else node!r}"
    S, N = om[saddle], om[node]
    if S.kind != SADDLE:
        return f"{saddle} is not a saddle"
    if N.kind not in (SINK, SOURCE):
        return f"{node} is not a nodal orbit"
    if N.period == 1:
        return f"{node} is fixed; fixed nodes carry the component and are never cancelled"
    if S.period != N.period:
        return f"periods of {saddle} and {node} differ"
    hits = [s for s in d.seps(saddle).values() if s.target_orbit == node]
    if len(hits) != 1:
        return f"{saddle} has {len(hits)} separatrices into {node}, cancellation needs exactly one"
    return None


def _cancel(d: DiffeoDescriptor, saddle: str, node: str) -> DiffeoDescriptor:
    om = d.orbit_map
    N = om[node]
    slots = SIDE_SLOTS[N.kind]
    seps = d.seps(saddle)
    into = next(seps[s] for s in slots if seps[s].target_orbit == node)
    other = next(seps[s] for s in slots if s != into.slot)
    T = om[other.target_orbit]
    out = []
    for s in d.separatrices:
        if s.saddle_orbit == saddle:
            continue
        if s.target_orbit != node:
            out.append(s)
            continue
        # the point of the saddle orbit that reaches N_i, then its other separatrix
        j = next(j for j in range(N.period) if (into.target_index + j) % N.period == s.target_index)
        far = transport_deck(d, other.deck, T, j)
        near = transport_deck(d, into.deck, N, j)
        out.append(SeparatrixRecord(s.saddle_orbit, s.slot, T.id,
                                    (other.target_index + j) % T.period,
                                    _add(s.deck, _sub(far, near))))
    orbits = [o for o in d.orbits if o.id not in (saddle, node)]
    return _rebuild(d, orbits, out)


def _collapse_clause(d, m: Move) -> Optional[str]:
    why = cancellation_clause(d, m.saddle, m.node)
    if why:
        return why
    others = {s.saddle_orbit for s in _incoming(d, m.node)} - {m.saddle}
    if others:
        return (f"{m.node} is also reached from {sorted(others)}; the sub-complex is not a "
                "disk around a contractible arc")
    return None


def _cross_span(d: DiffeoDescriptor, saddle: str, j: int, kind: str):
    """Endpoints and span of the two ``kind``-side separatrices at point ``j`` of ``saddle``.

    The span is the lifted displacement between the two ends; for a closed
    circle it is the circle's class.  Returned up to orientation.
    """
    ends = {ps.slot: ps for ps in point_separatrices(d)
            if ps.saddle == (saddle, j) and ps.slot in SIDE_SLOTS[kind]}
    a, b = (ends[s] for s in SIDE_SLOTS[kind])
    span = _sub(b.deck, a.deck)
    return frozenset((a.target, b.target)), frozenset((span, (-span[0], -span[1])))


def _confluence_clause(d, m: Move) -> Optional[str]:
    why = cancellation_clause(d, m.saddle, m.node)
    if why:
        return why
    inc = _incoming(d, m.node)
    others = sorted({s.saddle_orbit for s in inc} - {m.saddle})
    if len(inc) != 2 or len(others) != 1:
        return f"{m.node} must be reached by exactly one separatrix from one other saddle orbit"
    N = d.orbit(m.node)
    kind = OTHER[N.kind]
    # the two saddle points adjacent to the node point N_0
    pts = {}
    for rec in inc:
        P = d.orbit(rec.saddle_orbit).period
        pts[rec.saddle_orbit] = (-rec.target_index) % P
    e1, s1 = _cross_span(d, m.saddle, pts[m.saddle], kind)
    e2, s2 = _cross_span(d, others[0], pts[others[0]], kind)
    if e1 != e2 or s1 != s2:
        return (f"the {kind}-side curves of {m.saddle} and {others[0]} differ; "
                "they do not cobound an annulus around the node")
    return None


# -- expansions ------------------------------------------------------------------------------

def _expand_disk(d: DiffeoDescriptor, m: Move) -> DiffeoDescriptor:
    S = d.orbit(m.saddle)
    if S.kind != SADDLE:
        raise PreconditionViolated(f"{m.saddle} is not a saddle")
    if m.side not in (SINK, SOURCE):
        raise PreconditionViolated(f"side must be sink or source, got {m.side!r}")
    if len(m.slots) != 2 or {m.slots[0] in UNSTABLE, m.slots[1] in UNSTABLE} != {True, False}:
        raise PreconditionViolated("expand-disk needs one unstable and one stable slot")
    seps = d.seps(m.saddle)
    near = seps[next(s for s in m.slots if s in SIDE_SLOTS[m.side])]
    far = seps[next(s for s in m.slots if s not in SIDE_SLOTS[m.side])]
    same, cross = SIDE_SLOTS[m.side], SIDE_SLOTS[OTHER[m.side]]
    new = [
        SeparatrixRecord(m.new_saddle, same[0], near.target_orbit, near.target_index, near.deck),
        SeparatrixRecord(m.new_saddle, same[1], m.node, 0, (0, 0)),
        SeparatrixRecord(m.new_saddle, cross[0], far.target_orbit, far.target_index, far.deck),
        SeparatrixRecord(m.new_saddle, cross[1], far.target_orbit, far.target_index, far.deck),
    ]
    orbits = list(d.orbits) + [OrbitRecord(m.node, m.side, S.period),
                               OrbitRecord(m.new_saddle, SADDLE, S.period)]
    return _rebuild(d, orbits, list(d.separatrices) + new)


def _expand_annulus(d: DiffeoDescriptor, m: Move) -> DiffeoDescriptor:
    S = d.orbit(m.saddle)
    if S.kind != SADDLE:
        raise PreconditionViolated(f"{m.saddle} is not a saddle")
    if len(m.slots) != 1 or m.slots[0] not in SIDE_SLOTS.get(m.side, ()):
        raise PreconditionViolated("expand-annulus splits one separatrix on the side of the new node")
    seps = d.seps(m.saddle)
    split = seps[m.slots[0]]
    same, cross = SIDE_SLOTS[m.side], SIDE_SLOTS[OTHER[m.side]]
    out = [s for s in d.separatrices if not (s.saddle_orbit == m.saddle and s.slot == split.slot)]
    out.append(SeparatrixRecord(m.saddle, split.slot, m.node, 0, (0, 0)))
    out += [
        SeparatrixRecord(m.new_saddle, same[0], m.node, 0, (0, 0)),
        SeparatrixRecord(m.new_saddle, same[1], split.target_orbit, split.target_index, split.deck),
        SeparatrixRecord(m.new_saddle, cross[0], seps[cross[0]].target_orbit,
                         seps[cross[0]].target_index, seps[cross[0]].deck),
        SeparatrixRecord(m.new_saddle, cross[1], seps[cross[1]].target_orbit,
                         seps[cross[1]].target_index, seps[cross[1]].deck),
    ]
    orbits = list(d.orbits) + [OrbitRecord(m.node, m.side, S.period),
                               OrbitRecord(m.new_saddle, SADDLE, S.period)]
    return _rebuild(d, orbits, out)


# -- public operations -------------------------------------------------------------------

def move_clause(d: DiffeoDescriptor, m: Move) -> Optional[str]:
    """The failed precondition of ``m`` on ``d``, or None."""
    if m.kind == COLLAPSE:
        return _collapse_clause(d, m)
    if m.kind == CONFLUENCE:
        return _confluence_clause(d, m)
    if m.kind in (EXPAND_DISK, EXPAND_ANNULUS):
        if not m.node or not m.new_saddle:
            return "expansion needs ids for the new orbits"
        used = {o.id for o in d.orbits}
        if m.node in used or m.new_saddle in used or m.node == m.new_saddle:
            return "new orbit ids collide with existing ones"
        return None
    return f"unknown move kind {m.kind!r}"


def apply_move(d: DiffeoDescriptor, m: Move) -> DiffeoDescriptor:
    """Apply ``m``; raises PreconditionViolated naming the failed clause."""
    _require_decks(d)
    why = move_clause(d, m)
    if why:
        raise PreconditionViolated(f"{m.kind}: {why}")
    if m.kind in (COLLAPSE, CONFLUENCE):
        out = _cancel(d, m.saddle, m.node)
    elif m.kind == EXPAND_DISK:
        out = _expand_disk(d, m)
    else:
        out = _expand_annulus(d, m)
    verdict = validate_G2(out)
    if validate_G2(d) and not verdict:
        raise PreconditionViolated(f"{m.kind} would break the descriptor: {verdict.clause}")
    return out


def applicable_moves(d: DiffeoDescriptor) -> list[Move]:
    """Reducing moves available on ``d``: confluences first, then collapses, by orbit id."""
    out = []
    for kind in (CONFLUENCE, COLLAPSE):
        for node in sorted(o.id for o in d.orbits if o.kind in (SINK, SOURCE) and o.period > 1):
            for saddle in sorted(o.id for o in d.orbits_of_kind(SADDLE)):
                m = Move(kind, saddle, node)
                if move_clause(d, m) is None:
                    out.append(m)
    return out


def random_expansion(d: DiffeoDescriptor, kind: str, rng: random.Random,
                     side: Optional[str] = None) -> Move:
    """A uniformly chosen placement for an expansion of the given kind."""
    if kind not in (EXPAND_DISK, EXPAND_ANNULUS):
        raise ValueError(f"expansion kind must be {EXPAND_DISK} or {EXPAND_ANNULUS}")
    if side not in (None, SINK, SOURCE):
        raise ValueError(f"side must be sink or source, got {side!r}")
    saddle = rng.choice(sorted(o.id for o in d.orbits_of_kind(SADDLE)))
    side = side or rng.choice((SINK, SOURCE))
    if kind == EXPAND_DISK:
        slots = (rng.choice(UNSTABLE), rng.choice(STABLE))
    else:
        slots = (rng.choice(SIDE_SLOTS[side]),)
    node = _fresh(d, "w" if side == SINK else "a")
    probe = DiffeoDescriptor(d.matrix, d.orbits + (OrbitRecord(node, side, 3),), ())
    return Move(kind, saddle, node, slots, side, _fresh(probe, "s"))


def expand(d: DiffeoDescriptor, kind: str, seed: int, side: Optional[str] = None
           ) -> DiffeoDescriptor:
    """Insert a cancellable saddle/node pair of period 3 at a seeded random place."""
    return apply_move(d, random_expansion(d, kind, random.Random(seed), side))


def reduce_to_simplest(d: DiffeoDescriptor, max_moves: Optional[int] = None
                       ) -> tuple[DiffeoDescriptor, list[Move]]:
    """Cancel pairs until none is left; the result must be the canonical descriptor."""
    verdict = validate_G2(d)
    if not verdict:
        raise PreconditionViolated(f"descriptor is not valid: {verdict.clause}")
    _require_decks(d)
    i = component_id(d)
    limit = len(d.orbits_of_kind(SADDLE)) if max_moves is None else max_moves
    moves: list[Move] = []
    while True:
        avail = applicable_moves(d)
        if not avail:
            break
        if len(moves) >= limit:
            raise StuckDescriptor(f"no canonical form within {limit} moves")
        m = avail[0]
        d = apply_move(d, m)
        moves.append(m)
    if not descriptors_isomorphic(d, canonical_descriptor(i)):
        raise StuckDescriptor(
            f"no move applies but the descriptor (counts {d.counts().as_tuple()}) is not canonical")
    return d, moves


def replay(d: DiffeoDescriptor, moves) -> DiffeoDescriptor:
    for m in moves:
        d = apply_move(d, m if isinstance(m, Move) else Move.from_json(m))
    return d
