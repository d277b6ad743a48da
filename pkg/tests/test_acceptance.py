"""Acceptance suite: one test per criterion, one PASS/FAIL line each in the pytest summary.

Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""
import itertools
import random
import sys
import time
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from g2torus.canonical import canonical_tricolor
from g2torus.config import DEFAULT
from g2torus.constraints import MorseCounts, check_lefschetz_hopf
from g2torus.descriptor import (
    SADDLE, SINK, SOURCE, canonical_descriptor, component_id, descriptors_isomorphic,
    validate_G2,
)
from g2torus.dynamics.extract import extract_descriptor
from g2torus.dynamics.model import ModelMap, find_periodic_points, std_model, torus_distance
from g2torus.dynamics.potential import G0_SCAN, critical_points, dipped_potential, standard_potential
from g2torus.dynamics.search import g0_search
from g2torus.dynamics.separatrix import rotation_number_of_sink, trace_separatrix
from g2torus.homotopy import (
    TorusKnotClass as K, admissible_knot_types, diophantine_solutions, intersection_number,
    orbit3,
)
from g2torus.intmat import IDENTITY, NORMAL_FORMS, UniModularMatrix, classify_periodic
from g2torus.surgery import EXPAND_ANNULUS, EXPAND_DISK, apply_move, random_expansion, reduce_to_simplest
from g2torus.tricolor import BLUE, GREEN, RED, build_tricolor, tricolor_equivalent

FIXED = [(0.0, 0.0), (1 / 3, 2 / 3), (2 / 3, 1 / 3)]
HALF = [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]


def near(p, q, tol):
    return float(torus_distance(np.asarray(p), np.asarray(q))) <= tol


def random_sl2(rng, bound):
    while True:
        e = [rng.randint(-bound, bound) for _ in range(4)]
        if e[0] * e[3] - e[1] * e[2] == 1:
            return UniModularMatrix.from_entries(e)


@pytest.mark.criterion(1, "periodic matrix classes recovered for normal forms and 200 conjugates")
def test_criterion_1_matrix_classification():
    t0 = time.perf_counter()
    for tag, A in NORMAL_FORMS.items():
        assert classify_periodic(A).tag == tag
    rng = random.Random(20240601)
    conj = [random_sl2(rng, 5) for _ in range(200)]
    for B in conj:
        for tag, A in NORMAL_FORMS.items():
            assert classify_periodic(B @ A @ B.inverse()).tag == tag
    # a wider box must not find classes the default box missed
    for B in conj[:20]:
        for tag, A in NORMAL_FORMS.items():
            assert classify_periodic(B @ A @ B.inverse(), bound=20).tag == tag
    assert time.perf_counter() - t0 < 5.0


@pytest.mark.criterion(2, "diophantine admissibility: six classes for -1, none for +1")
def test_criterion_2_diophantine():
    want = sorted({K(1, 0), K(-1, 0), K(1, 1), K(-1, -1), K(0, 1), K(0, -1)})
    assert diophantine_solutions(-1) == want
    assert diophantine_solutions(1) == []
    for eps in (-1, 1):
        brute = sorted(K(a, b) for a in range(-50, 51) for b in range(-50, 51)
                       if -a * a + a * b - b * b == eps)
        assert diophantine_solutions(eps) == brute
    assert len({k.b for k in want}) == 3


@pytest.mark.criterion(3, "orbit3 of <1,0> and pairwise intersection numbers")
def test_criterion_3_knot_orbit():
    triple = orbit3(K(1, 0))
    assert triple == (K(1, 0), K(-1, -1), K(0, 1))
    for a, b in itertools.combinations(triple, 2):
        assert intersection_number(a, b) == 1


@pytest.mark.criterion(4, "standard potential census for both directions")
def test_criterion_4_census():
    t0 = time.perf_counter()
    for direction, sinks, sources in ((+1, 1, 2), (-1, 2, 1)):
        pts = find_periodic_points(std_model(direction)).points
        fixed = [p for p in pts if p.period == 1]
        assert len(fixed) == 3
        assert sum(p.kind == SINK for p in fixed) == sinks
        assert sum(p.kind == SOURCE for p in fixed) == sources
        for q in FIXED:
            assert sum(near(p.location, q, 1e-8) for p in fixed) == 1
        saddles = [p for p in pts if p.kind == SADDLE]
        assert len(saddles) == 3 and all(p.period == 3 for p in saddles)
        for q in HALF:
            assert sum(near(p.location, q, 1e-8) for p in saddles) == 1
        assert len(pts) == 6
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.criterion(5, "closure classes of the g1 saddles from lifted separatrices")
def test_criterion_5_knot_classes_from_numerics():
    m = std_model(+1)
    pts = find_periodic_points(m).points
    classes = []
    for q in HALF:
        s = next(p for p in pts if near(p.location, q, 1e-8))
        ends = []
        for br in ("u+", "u-"):
            tr = trace_separatrix(m, s, br, pts)
            target = np.asarray(pts[tr.target].location)
            lift = tr.path[-1] - target
            assert np.max(np.abs(lift - np.round(lift))) < 1e-3
            ends.append((tr.target, np.round(lift).astype(int)))
        assert ends[0][0] == ends[1][0]
        d = ends[1][1] - ends[0][1]
        classes.append(K(int(d[0]), int(d[1])))
    adm = {k.up_to_sign() for k in admissible_knot_types()}
    assert all(c.up_to_sign() in adm for c in classes)
    assert {c.up_to_sign() for c in classes} == {k.up_to_sign() for k in orbit3(classes[0])}


@pytest.mark.criterion(6, "rotation numbers of fixed sinks are 1/3 or 2/3; pure gradient gives 0")
def test_criterion_6_rotation_numbers():
    for direction in (+1, -1):
        m = std_model(direction)
        pts = find_periodic_points(m).points
        sinks = [p for p in pts if p.kind == SINK and p.period == 1]
        assert len(sinks) == (1 if direction == 1 else 2)
        for s in sinks:
            assert rotation_number_of_sink(m, s, pts) in (Fraction(1, 3), Fraction(2, 3))
    control = ModelMap(standard_potential(), +1, IDENTITY)
    pts = find_periodic_points(control).points
    for s in (p for p in pts if p.kind == SINK):
        assert rotation_number_of_sink(control, s, pts) == 0


@pytest.mark.criterion(7, "component invariance and reduction over 4 x 50 random expansions")
def test_criterion_7_surgery():
    t0 = time.perf_counter()
    for i in range(4):
        base = canonical_descriptor(i)
        for seq in range(50):
            rng = random.Random(1000 * i + seq)
            d = base
            for _ in range(rng.randint(1, 5)):
                kind = rng.choice((EXPAND_DISK, EXPAND_ANNULUS))
                d = apply_move(d, random_expansion(d, kind, rng))
                assert validate_G2(d).passed
                assert check_lefschetz_hopf(d.counts()).passed
                assert component_id(d) == i
            r, moves = reduce_to_simplest(d)
            cur = d
            for m in moves:
                cur = apply_move(cur, m)
                assert validate_G2(cur).passed and component_id(cur) == i
            assert descriptors_isomorphic(r, base)
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.criterion(8, "tricolor graphs: independent g1 runs agree, g1 differs from g2, canonical g1 cycle")
def test_criterion_8_tricolor():
    ex1 = extract_descriptor(std_model(+1))
    cfg = replace(DEFAULT,
                  integrator=replace(DEFAULT.integrator, step=5e-4),
                  search=replace(DEFAULT.search, grid=48, seed_offset=(0.0071, 0.0043)))
    ex2 = extract_descriptor(ModelMap(standard_potential(), +1, integrator=cfg.integrator), cfg,
                             green_fraction=0.3)
    G1 = build_tricolor(ex1.cells("g"))
    G1b = build_tricolor(ex2.cells("h"))
    assert tricolor_equivalent(G1, G1b)[0]
    G2 = build_tricolor(extract_descriptor(std_model(-1)).cells())
    assert not tricolor_equivalent(G1, G2)[0]

    C = canonical_tricolor(1)
    assert tricolor_equivalent(G1, C)[0]
    [cycle] = C.two_color_cycles(RED, GREEN)
    assert len(cycle) == len(C.vertices)
    pos = {v: k for k, v in enumerate(cycle)}
    n = len(cycle)
    shifts = {(pos[C.permutation[v]] - pos[v]) % n for v in cycle}
    assert shifts in ({n // 3}, {2 * n // 3})
    assert len(C.two_color_cycles(BLUE, GREEN)) == 2


@pytest.mark.criterion(9, "g0 search: three fixed maxima, two saddle orbits, one minimum orbit, component 0")
def test_criterion_9_g0_search():
    t0 = time.perf_counter()
    found = g0_search(G0_SCAN)
    hit = next(c for c in found if c.accepted)
    P = dipped_potential(*hit.params)
    cps = critical_points(P)
    maxima = [c for c in cps if c.index == 2]
    assert len(maxima) == 3
    for q in FIXED:
        assert sum(near(c.location, q, 1e-8) for c in maxima) == 1
    assert sum(c.index == 1 for c in cps) == 6
    assert sum(c.index == 0 for c in cps) == 3
    # extraction traced every separatrix without passing near another saddle
    ex = hit.extraction
    d = ex.descriptor
    orbits = sorted((o.kind, o.period) for o in d.orbits)
    assert orbits == [(SADDLE, 3), (SADDLE, 3), (SINK, 3), (SOURCE, 1), (SOURCE, 1), (SOURCE, 1)]
    assert validate_G2(d).passed
    assert component_id(d) == 0
    assert d.counts().as_tuple() == (3, 6, 3)
    assert descriptors_isomorphic(d, canonical_descriptor(0))
    assert time.perf_counter() - t0 < 300.0


@pytest.mark.criterion(10, "Lefschetz-Hopf verdicts and first violated relation")
def test_criterion_10_lefschetz_hopf():
    assert check_lefschetz_hopf(MorseCounts(1, 3, 2)).passed
    assert check_lefschetz_hopf(MorseCounts(3, 6, 3)).passed
    v = check_lefschetz_hopf(MorseCounts(1, 1, 1))
    assert not v.passed and v.clause.startswith("C1 - C0 >= beta1 - beta0")
    v = check_lefschetz_hopf(MorseCounts(0, 1, 2))
    assert not v.passed and v.clause.startswith("C0 >= beta0")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
