import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from g2torus.canonical import (
    ROTATION_G1, canonical_cells, canonical_rotation_system, canonical_tricolor,
)
from g2torus.descriptor import canonical_descriptor
from g2torus.errors import InvalidDescriptor, NonTriangularRegion
from g2torus.tricolor import (
    BLUE, GREEN, RED, CellData, Region, RotationSystem, TricolorGraph, build_tricolor,
    cells_from_rotation_system, mirror_rotation_system, relabel_rotation_system,
    rotation_system_from_descriptor, trace_faces, tricolor_equivalent,
)


def shuffled(G: TricolorGraph, seed: int) -> TricolorGraph:
    rnd = random.Random(seed)
    fresh = [f"v{n}" for n in range(len(G.vertices))]
    rnd.shuffle(fresh)
    return G.relabel(dict(zip(G.vertices, fresh)))


def is_witness(G, H, h) -> bool:
    if sorted(h) != sorted(G.vertices) or sorted(h.values()) != sorted(H.vertices):
        return False
    for v in G.vertices:
        if h[G.permutation[v]] != H.permutation[h[v]]:
            return False
        for c in (GREEN, RED, BLUE):
            if h[G.neighbor(v, c)] != H.neighbor(h[v], c):
                return False
    return True


def test_canonical_g1_red_green_single_cycle():
    G = canonical_tricolor(1)
    assert len(G.vertices) == 12
    [cycle] = G.two_color_cycles(RED, GREEN)
    assert len(cycle) == 12


def test_canonical_g1_permutation_rotates_by_a_third():
    G = canonical_tricolor(1)
    [cycle] = G.two_color_cycles(RED, GREEN)
    pos = {v: i for i, v in enumerate(cycle)}
    n = len(cycle)
    shifts = {(pos[G.permutation[v]] - pos[v]) % n for v in cycle}
    assert len(shifts) == 1
    assert shifts.pop() in (n // 3, 2 * n // 3)


def test_canonical_g1_euler_count():
    # 6 points, 12 separatrices, so 6 faces and 12 triangles
    rs = canonical_rotation_system(1)
    assert len(rs.kinds) == 6 and len(rs.edges) == 12
    assert len(trace_faces(rs)) == 6
    assert len(canonical_cells(1).regions) == 12


@pytest.mark.parametrize("i,red_green,blue_green", [
    (0, [8, 8, 8], [6, 6, 12]), (1, [12], [6, 6]), (2, [6, 6], [12]), (3, [6, 6, 12], [8, 8, 8]),
])
def test_canonical_cycle_census(i, red_green, blue_green):
    G = canonical_tricolor(i)
    assert sorted(map(len, G.two_color_cycles(RED, GREEN))) == red_green
    assert sorted(map(len, G.two_color_cycles(BLUE, GREEN))) == blue_green


def test_canonical_graphs_pairwise_distinct():
    graphs = [canonical_tricolor(i) for i in range(4)]
    for i, j in itertools.combinations(range(4), 2):
        assert not tricolor_equivalent(graphs[i], graphs[j])[0], (i, j)


def test_g1_g0_vertex_counts_differ():
    assert len(canonical_tricolor(1).vertices) != len(canonical_tricolor(0).vertices)


@pytest.mark.parametrize("i", range(4))
def test_self_equivalent_with_witness(i):
    G = canonical_tricolor(i)
    ok, h = tricolor_equivalent(G, G)
    assert ok and is_witness(G, G, h)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 3), st.integers(0, 10**6))
def test_random_relabel_detected(i, seed):
    G = canonical_tricolor(i)
    H = shuffled(G, seed)
    ok, h = tricolor_equivalent(G, H)
    assert ok and is_witness(G, H, h)


def test_permutation_is_part_of_the_invariant():
    # same colored graph with the identity in place of the map's permutation
    G = canonical_tricolor(1)
    H = TricolorGraph(G.vertices, G.edges, {v: v for v in G.vertices})
    assert not tricolor_equivalent(G, H)[0]


@pytest.mark.parametrize("i", range(4))
def test_green_selection_does_not_matter(i):
    G = build_tricolor(canonical_cells(i, green="g"))
    H = build_tricolor(canonical_cells(i, green="h"))
    assert tricolor_equivalent(G, H)[0]


def test_equivalence_relation_on_pool():
    pool = []
    for i in range(4):
        G = canonical_tricolor(i)
        pool += [G, shuffled(G, 1), shuffled(G, 2)]
    assert all(len(G.vertices) <= 24 for G in pool)
    eq = {(a, b): tricolor_equivalent(pool[a], pool[b])[0]
          for a in range(len(pool)) for b in range(len(pool))}
    n = len(pool)
    assert all(eq[a, a] for a in range(n))
    assert all(eq[a, b] == eq[b, a] for a in range(n) for b in range(n))
    for a, b, c in itertools.product(range(n), repeat=3):
        if eq[a, b] and eq[b, c]:
            assert eq[a, c]
    # classes are exactly the components
    for a, b in itertools.product(range(n), repeat=2):
        assert eq[a, b] == (a // 3 == b // 3)


def test_relabeled_rotation_system_gives_equivalent_graph():
    d = canonical_descriptor(0)
    rs = canonical_rotation_system(0)
    names = {o.id: o.id.upper() for o in d.orbits}
    shifts = {"w": 1, "s": 2, "t": 1}
    periods = {o.id: o.period for o in d.orbits}
    rs2 = relabel_rotation_system(rs, names, shifts, periods)
    G = build_tricolor(cells_from_rotation_system(rs))
    H = build_tricolor(cells_from_rotation_system(rs2))
    assert tricolor_equivalent(G, H)[0]


def test_mirror_rotation_system_swaps_colors():
    rs = canonical_rotation_system(1)
    m = mirror_rotation_system(rs)
    assert mirror_rotation_system(m) == rs
    assert {c for _, _, c in m.edges.values()} == {RED, BLUE}
    sinks = [v for v, k in m.kinds.items() if k == "sink"]
    assert len(sinks) == 2


def test_rotation_system_must_list_all_ends():
    bad = dict(ROTATION_G1)
    bad["w:0"] = bad["w:0"][:-1]
    with pytest.raises(InvalidDescriptor):
        rotation_system_from_descriptor(canonical_descriptor(1), bad)


def test_rotation_system_json_round_trip():
    rs = canonical_rotation_system(0)
    assert RotationSystem.from_json(rs.to_json()) == rs


def test_cells_json_round_trip():
    c = canonical_cells(1)
    assert CellData.from_json(c.to_json()) == c


def test_region_missing_a_color():
    c = canonical_cells(1)
    r0 = c.regions[0]
    broken = Region(r0.id, (r0.boundary[0], r0.boundary[1], (r0.boundary[1][0] + "x", RED)))
    cells = CellData((broken,) + c.regions[1:], c.permutation)
    with pytest.raises(NonTriangularRegion):
        build_tricolor(cells)


def test_two_disjoint_copies_disconnected():
    c = canonical_cells(1)

    def tag(x, k):
        return f"{k}/{x}"
    regions, perm = [], {}
    for k in ("A", "B"):
        for r in c.regions:
            regions.append(Region(tag(r.id, k), tuple((tag(cv, k), col) for cv, col in r.boundary)))
        perm.update({tag(a, k): tag(b, k) for a, b in c.permutation.items()})
    G = build_tricolor(CellData(tuple(regions), perm))
    assert len(G.components()) == 2
    assert len(canonical_tricolor(1).components()) == 1
    assert not tricolor_equivalent(G, canonical_tricolor(1))[0]
