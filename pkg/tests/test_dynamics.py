"""Numerical model maps: potentials, periodic points, separatrices and extraction."""
import itertools
import re
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from g2torus.canonical import canonical_tricolor
from g2torus.config import DEFAULT
from g2torus.descriptor import (
    canonical_descriptor, component_id, descriptors_isomorphic, mirror, validate_G2,
)
from g2torus.dynamics.extract import extract_descriptor
from g2torus.dynamics.model import (
    ModelMap, classify_eigenvalues, find_periodic_points, min_image, model_map_eval,
    stable_jacobian, std_model, torus_distance,
)
from g2torus.dynamics.potential import (
    G0_PARAMS, Bump, TrigPotential, dipped_potential, g0_potential, standard_potential, symmetrize,
)
from g2torus.dynamics.render import portrait_svg
from g2torus.dynamics.search import evaluate, g0_search
from g2torus.dynamics.separatrix import (
    closure_class, rotation_number_of_sink, trace_separatrix,
)
from g2torus.errors import NoSeparatrixLands, PreconditionViolated
from g2torus.homotopy import TorusKnotClass as K, admissible_knot_types, intersection_number, orbit3
from g2torus.intmat import A2, IDENTITY
from g2torus.tricolor import build_tricolor, mirror_rotation_system, tricolor_equivalent
from g2torus.tricolor import cells_from_rotation_system

FIXED = [(0.0, 0.0), (1 / 3, 2 / 3), (2 / 3, 1 / 3)]
HALF = [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]


def grid(n=32):
    ax = (np.arange(n) + 0.5) / n
    return np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)


def near(p, q, tol):
    return float(torus_distance(np.asarray(p), np.asarray(q))) <= tol


def by_kind(points, kind, period=None):
    return [p for p in points if p.kind == kind and (period is None or p.period == period)]


@pytest.fixture(scope="module")
def g1():
    m = std_model(+1)
    return m, extract_descriptor(m)


@pytest.fixture(scope="module")
def g2():
    m = std_model(-1)
    return m, extract_descriptor(m)


@pytest.fixture(scope="module")
def g0():
    m = ModelMap(g0_potential(), -1)
    return m, extract_descriptor(m)


def empty_model():
    # a single bump, no saddle: the identity matrix keeps it a pure gradient map
    P = TrigPotential((), (Bump((0.5, 0.5), 1.0, 0.3),))
    return ModelMap(P, +1, IDENTITY)


# outside the bump the potential is flat and every point is a (non-hyperbolic)
# fixed point, so a coarse seed grid keeps the search short
EMPTY_CFG = replace(DEFAULT, search=replace(DEFAULT.search, grid=16))


# -- potentials --------------------------------------------------------------------

def test_symmetrize_single_cosine():
    F = symmetrize(TrigPotential.from_terms({(1, 0): 1.0}))
    assert dict(F.terms).keys() == {(1, 0), (0, 1), (1, -1)}
    assert all(abs(c - 1 / 3) < 1e-15 for _, c in F.terms)


def test_symmetrize_is_idempotent_on_invariant():
    F = standard_potential()
    G = symmetrize(F)
    assert dict(G.terms).keys() == dict(F.terms).keys()
    for k, c in F.terms:
        assert abs(dict(G.terms)[k] - c) < 1e-12


def test_symmetrize_fixed_bump():
    F = symmetrize(TrigPotential((), (Bump((1 / 3, 2 / 3), 0.7, 0.1),)))
    assert len(F.bumps) == 1
    b = F.bumps[0]
    assert near(b.center, (1 / 3, 2 / 3), 1e-12) and abs(b.height - 0.7) < 1e-12


@pytest.mark.parametrize("P", [standard_potential(), g0_potential(),
                               symmetrize(TrigPotential.from_terms({(2, 1): 0.3, (1, 0): -1.0}))],
                         ids=["std", "g0", "mixed"])
def test_potential_invariance(P):
    X = grid(64)
    assert np.max(np.abs(P.value(X) - P.value(X @ A2.as_array()))) <= 1e-12


def central_difference(P, X, h):
    return np.column_stack([(P.value(X + (h, 0)) - P.value(X - (h, 0))) / (2 * h),
                            (P.value(X + (0, h)) - P.value(X - (0, h))) / (2 * h)])


def test_gradient_matches_finite_differences():
    P = standard_potential()
    X = grid(32)
    assert np.max(np.abs(P.gradient(X) - central_difference(P, X, 1e-5))) <= 1e-7


def test_gradient_with_bumps_matches_extrapolated_differences():
    # the bumps' third derivatives are large, so plain differences at 1e-5 carry
    # an O(h^2) error of a few 1e-7; one Richardson step removes it
    P = g0_potential()
    X = grid(32)
    fd = (4 * central_difference(P, X, 5e-6) - central_difference(P, X, 1e-5)) / 3
    assert np.max(np.abs(P.gradient(X) - fd)) <= 1e-7


def test_potential_json_round_trip():
    P = g0_potential()
    assert TrigPotential.from_json(P.to_json()) == P


# -- model map ---------------------------------------------------------------------

@pytest.mark.parametrize("P", [standard_potential(), g0_potential()], ids=["std", "g0"])
def test_flow_commutes_with_matrix(P):
    m = ModelMap(P, +1)
    X = grid(32)
    M = A2.as_array()
    a = m.flow(X) @ M
    b = m.flow(X @ M)
    assert np.max(np.abs(min_image(a - b))) <= 1e-8


@pytest.mark.parametrize("direction", [+1, -1])
def test_model_map_eval_examples(direction):
    m = std_model(direction)
    for p in FIXED:
        assert near(model_map_eval(m, p), p, 1e-12)
    assert near(model_map_eval(m, (0.5, 0.0)), (0.5, 0.5), 1e-12)
    out = model_map_eval(m, np.array(HALF))
    for p, q in zip(out, [(0.5, 0.5), (0.5, 0.0), (0.0, 0.5)]):
        assert near(p, q, 1e-12)


def test_inverse_map_undoes_the_map():
    m = std_model(+1)
    X = grid(8)
    Y = m.lift_power(m.inverse().lift_power(X, 1), 1)
    assert np.max(np.abs(Y - X)) < 1e-9


def test_classify_eigenvalues():
    assert classify_eigenvalues([0.2, 0.5]) == "sink"
    assert classify_eigenvalues([2.0, 5.0]) == "source"
    assert classify_eigenvalues([0.5, 3.0]) == "saddle"
    assert classify_eigenvalues([1.0, 3.0]) == "nonhyperbolic"


# -- periodic points ---------------------------------------------------------------

@pytest.mark.parametrize("direction,sink,source", [(+1, 1, 2), (-1, 2, 1)])
def test_standard_census(direction, sink, source):
    pts = find_periodic_points(std_model(direction)).points
    fixed = [p for p in pts if p.period == 1]
    assert len(fixed) == 3 and len(pts) == 6
    assert len(by_kind(pts, "sink", 1)) == sink and len(by_kind(pts, "source", 1)) == source
    for p in fixed:
        assert any(near(p.location, q, 1e-8) for q in FIXED)
    saddles = by_kind(pts, "saddle", 3)
    assert len(saddles) == 3
    for q in HALF:
        assert any(near(p.location, q, 1e-8) for p in saddles)
    # the origin is the maximum of the standard potential
    origin = next(p for p in fixed if near(p.location, (0, 0), 1e-8))
    assert origin.kind == ("sink" if direction == 1 else "source")


def test_periodic_points_close_up(g0):
    m, ex = g0
    for p in ex.points:
        assert float(torus_distance(m.lift_power(p.xy, p.period)[0], p.xy)) <= 1e-8 or \
            p.residual <= 1e-8
    # among nodes, exactly the three A2-fixed points are fixed by g
    fixed_nodes = [p for p in ex.points if p.period == 1]
    assert len(fixed_nodes) == 3
    assert all(any(near(p.location, q, 1e-8) for q in FIXED) for p in fixed_nodes)


def test_classification_stable_under_step_halving():
    for P, d in ((standard_potential(), +1), (g0_potential(), -1)):
        m = ModelMap(P, d)
        for p in find_periodic_points(m).points:
            for h in (1e-6, 5e-7):
                ev = np.linalg.eigvals(stable_jacobian(m, p.xy, p.period, h))
                assert classify_eigenvalues(ev) == p.kind


def test_identity_matrix_fixes_every_critical_point():
    pts = find_periodic_points(ModelMap(standard_potential(), +1, IDENTITY)).points
    assert len(pts) == 6 and all(p.period == 1 for p in pts)


# -- separatrices -------------------------------------------------------------------

def test_g1_unstable_separatrices_reach_the_sink(g1):
    m, ex = g1
    sink = by_kind(ex.points, "sink", 1)[0]
    assert near(sink.location, (0, 0), 1e-8)
    me = ex.points.index(sink)
    for s in by_kind(ex.points, "saddle"):
        for br in ("u+", "u-"):
            assert trace_separatrix(m, s, br, ex.points).target == me


def test_trace_rejects_nodes(g1):
    m, ex = g1
    with pytest.raises(PreconditionViolated):
        trace_separatrix(m, by_kind(ex.points, "sink")[0], "u+", ex.points)


def test_g1_closure_classes(g1):
    m, ex = g1
    saddles = [next(p for p in ex.points if near(p.location, q, 1e-8)) for q in HALF]
    classes = [closure_class(m, s, ex.points) for s in saddles]
    adm = {k.up_to_sign() for k in admissible_knot_types()}
    assert all(c is not None and c.up_to_sign() in adm for c in classes)
    for a, b in itertools.combinations(classes, 2):
        assert intersection_number(a, b) == 1
    # the three classes are an orbit3 triple up to sign
    triple = {k.up_to_sign() for k in orbit3(classes[0])}
    assert {c.up_to_sign() for c in classes} == triple


@pytest.mark.parametrize("fix", ["g1", "g2"])
def test_rotation_numbers_of_fixed_sinks(fix, request):
    m, ex = request.getfixturevalue(fix)
    sinks = by_kind(ex.points, "sink", 1)
    assert sinks
    for s in sinks:
        assert rotation_number_of_sink(m, s, ex.points) in (Fraction(1, 3), Fraction(2, 3))


def test_rotation_number_pure_gradient():
    m = ModelMap(standard_potential(), +1, IDENTITY)
    pts = find_periodic_points(m).points
    sink = by_kind(pts, "sink")[0]
    assert rotation_number_of_sink(m, sink, pts) == 0


def test_rotation_number_without_landing_separatrices():
    m = empty_model()
    pts = find_periodic_points(m, 3, EMPTY_CFG.search).points
    sink = by_kind(pts, "sink")[0]
    assert rotation_number_of_sink(m, sink, pts) == 0
    with pytest.raises(NoSeparatrixLands):
        rotation_number_of_sink(m, sink, pts, strict=True)


# -- extraction ---------------------------------------------------------------------

@pytest.mark.parametrize("fix,i", [("g1", 1), ("g2", 2), ("g0", 0)])
def test_extracted_component(fix, i, request):
    _, ex = request.getfixturevalue(fix)
    d = ex.descriptor
    assert validate_G2(d).passed
    assert component_id(d) == i
    assert descriptors_isomorphic(d, canonical_descriptor(i))
    G = build_tricolor(ex.cells())
    assert tricolor_equivalent(G, canonical_tricolor(i))[0]


def test_g0_counts(g0):
    _, ex = g0
    assert ex.descriptor.counts().as_tuple() == (3, 6, 3)


def test_g3_is_uphill_g0():
    ex = extract_descriptor(ModelMap(g0_potential(), +1))
    assert component_id(ex.descriptor) == 3
    assert tricolor_equivalent(build_tricolor(ex.cells()), canonical_tricolor(3))[0]


def test_time_reversal_mirror(g1, g2):
    _, up = g1
    _, down = g2
    assert descriptors_isomorphic(down.descriptor, mirror(up.descriptor))
    G = build_tricolor(down.cells())
    H = build_tricolor(cells_from_rotation_system(mirror_rotation_system(up.rotation)))
    assert tricolor_equivalent(G, H)[0]


def test_independent_runs_agree(g1):
    _, ex1 = g1
    cfg = replace(DEFAULT,
                  integrator=replace(DEFAULT.integrator, step=5e-4),
                  search=replace(DEFAULT.search, grid=48, seed_offset=(0.0071, 0.0043)))
    m2 = ModelMap(standard_potential(), +1, integrator=cfg.integrator)
    ex2 = extract_descriptor(m2, cfg, green_fraction=0.3)
    assert descriptors_isomorphic(ex1.descriptor, ex2.descriptor)
    G = build_tricolor(ex1.cells("g"))
    H = build_tricolor(ex2.cells("h"))
    assert tricolor_equivalent(G, H)[0]
    assert not tricolor_equivalent(G, canonical_tricolor(2))[0]


def test_green_curves_join_source_to_sink(g1):
    _, ex = g1
    assert len(ex.greens) == 6
    sources = [p.xy for p in by_kind(ex.points, "source")]
    sink = by_kind(ex.points, "sink")[0].xy
    for path in ex.greens.values():
        assert min(float(torus_distance(path[0], s)) for s in sources) < 1e-2
        assert float(torus_distance(path[-1], sink)) < 1e-2


def test_green_fraction_range(g1):
    from g2torus.dynamics.extract import sample_green_curves
    m, ex = g1
    with pytest.raises(ValueError):
        sample_green_curves(m, ex, 1.0)


# -- g0 search ------------------------------------------------------------------------

def test_g0_search_finds_recorded_parameters():
    found = g0_search()
    hit = found[-1]
    assert hit.accepted and hit.params == G0_PARAMS
    assert component_id(hit.extraction.descriptor) == 0


def test_g0_search_rejects_flat_bumps():
    # without the dip the origin stays a minimum of the negated potential
    c = evaluate((0.0, 0.2, 0.1))
    assert not c.accepted and "census" in c.reason


def test_dipped_potential_has_fixed_maxima():
    P = dipped_potential(*G0_PARAMS)
    h = 1e-4
    for q in FIXED:
        q = np.array(q)
        around = [q + h * np.array(d) for d in ((1, 0), (-1, 0), (0, 1), (0, -1))]
        assert all(P.value(np.atleast_2d(a))[0] < P.value(np.atleast_2d(q))[0] for a in around)


# -- rendering -----------------------------------------------------------------------

def test_render_g1(g1):
    m, ex = g1
    svg = portrait_svg(m, ex)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    labels = re.findall(r"<text[^>]*>([^<]*)</text>", svg)
    assert len(labels) == 3
    assert {K(*map(int, t.strip("<>").split(","))).up_to_sign() for t in
            [lab.replace("&lt;", "<").replace("&gt;", ">") for lab in labels]} == \
        {K(1, 0), K(0, 1), K(1, 1)}
    assert svg.count("<polyline") >= 12


def test_render_g0_sink_orbit(g0):
    m, ex = g0
    svg = portrait_svg(m, ex)
    assert len(re.findall(r"<title>sink period 3", svg)) == 3
    assert len(re.findall(r"<title>source period 1", svg)) == 3


def test_render_empty_model(tmp_path):
    from g2torus.dynamics.render import render_phase_portrait
    out = tmp_path / "empty.svg"
    svg = render_phase_portrait(empty_model(), out, cfg=EMPTY_CFG)
    assert out.read_text() == svg
    assert "<polyline" not in svg and "<text" not in svg
    assert svg.count("<circle") >= 1
