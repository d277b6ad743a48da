"""Command-line entry point: ``g2torus <subcommand> ...``.

Every subcommand prints JSON to stdout.  Exit status is 0 on success, 1 for
domain errors and failed validations (the body then carries an ``error`` or a
failing verdict) and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import replace
from typing import Optional

from . import __version__
from .config import DEFAULT, DEFAULT_BOUND, SimConfig
from .constraints import MorseCounts, check_lefschetz_hopf
from .descriptor import (
    SCHEMA_VERSION, component_id, descriptor_to_json, load_descriptor, validate_G2,
)
from .errors import G2Error, InvalidDescriptor, NoConvergence
from .homotopy import TorusKnotClass, diophantine_solutions, orbit3
from .intmat import A2, Policy, UniModularMatrix, classify_periodic
from .surgery import Move, reduce_to_simplest, replay
from .tricolor import CellData, build_tricolor, tricolor_equivalent

log = logging.getLogger("g2torus")


def _ints(text: str, n: int) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers, got {text!r}")
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers, got {text!r}")
    return vals


def _matrix(text: str) -> UniModularMatrix:
    try:
        return UniModularMatrix.from_entries(_ints(text, 4))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _pair(text: str) -> TorusKnotClass:
    return TorusKnotClass(*_ints(text, 2))


def _count(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"counts are non-negative, got {n}")
    return n


def _direction(text: str) -> int:
    if text not in ("+1", "1", "-1"):
        raise argparse.ArgumentTypeError("direction must be +1 or -1")
    return int(text)


def _dump(obj, out=None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _with_schema(body: dict) -> dict:
    return {"schema": SCHEMA_VERSION, **body}


# -- algebra -----------------------------------------------------------------

def cmd_classify_matrix(args) -> int:
    res = classify_periodic(args.entries, Policy(args.policy), args.bound)
    body = {"class": res.tag}
    if res.conjugator is not None:
        body["conjugator"] = list(res.conjugator.entries)
    _dump(_with_schema(body))
    return 0


def cmd_knot_orbit(args) -> int:
    k = args.knot_class
    _dump([c.as_list() for c in orbit3(k, args.matrix)])
    return 0


def cmd_diophantine(args) -> int:
    _dump([c.as_list() for c in diophantine_solutions(args.epsilon)])
    return 0


def cmd_check_counts(args) -> int:
    c = MorseCounts(args.c0, args.c1, args.c2)
    v = check_lefschetz_hopf(c)
    _dump(_with_schema({**v.to_json(), "counts": list(c.as_tuple())}))
    return 0 if v.passed else 1


# -- descriptors -------------------------------------------------------------

def cmd_component(args) -> int:
    d = load_descriptor(args.descriptor)
    v = validate_G2(d)
    if not v.passed:
        _dump(_with_schema(v.to_json()))
        return 1
    _dump(_with_schema({"component": component_id(d), "counts": list(d.counts().as_tuple())}))
    return 0


def _load_cells(source: str) -> CellData:
    if source.startswith("canonical:"):
        from .canonical import canonical_cells
        return canonical_cells(int(source.split(":", 1)[1]))
    with open(source) as fh:
        data = json.load(fh)
    if "cells" in data:
        data = data["cells"]
    if "regions" not in data:
        raise InvalidDescriptor(f"{source} holds no cell data (write it with `simulate --descriptor`)")
    return CellData.from_json(data)


def cmd_graph_eq(args) -> int:
    G = build_tricolor(_load_cells(args.left))
    H = build_tricolor(_load_cells(args.right))
    same, h = tricolor_equivalent(G, H)
    body = {"equivalent": same, "vertices": [len(G.vertices), len(H.vertices)]}
    if args.show_map and h is not None:
        body["map"] = h
    _dump(_with_schema(body))
    return 0


def cmd_reduce(args) -> int:
    d = load_descriptor(args.descriptor)
    if args.replay:
        with open(args.replay) as fh:
            moves = [Move.from_json(m) for m in json.load(fh)["moves"]]
        d = replay(d, moves)
    else:
        d, moves = reduce_to_simplest(d, args.max_moves)
    trace = [m.to_json() for m in moves]
    if args.trace:
        _dump(_with_schema({"moves": trace}), args.trace)
    _dump(_with_schema({"component": component_id(d), "moves": trace,
                        "descriptor": descriptor_to_json(d)}))
    return 0


# -- simulation --------------------------------------------------------------

def _sim_config(args) -> SimConfig:
    cfg = DEFAULT
    integ = replace(cfg.integrator, step=args.step)
    search = replace(cfg.search, grid=args.grid, seed_offset=(args.seed_offset / args.grid,) * 2)
    return replace(cfg, integrator=integ, search=search)


def _model_and_extraction(args, cfg: SimConfig, need_extraction: bool):
    from .dynamics.extract import extract_descriptor
    from .dynamics.model import ModelMap
    from .dynamics.potential import dipped_potential, load_potential, standard_potential
    from .dynamics.search import g0_search

    ex = None
    if args.potential == "std":
        P = standard_potential()
    elif args.potential == "g0-search":
        found = [c for c in g0_search(cfg=cfg) if c.accepted]
        if not found:
            raise NoConvergence("no scanned potential produced a model with three fixed sources")
        log.info("g0 search accepted parameters %s", found[0].params)
        P = dipped_potential(*found[0].params)
        if args.direction == -1:
            ex = found[0].extraction
    else:
        P = load_potential(args.potential)
    m = ModelMap(P, args.direction, integrator=cfg.integrator)
    if need_extraction and ex is None:
        ex = extract_descriptor(m, cfg)
    return m, ex


def cmd_simulate(args) -> int:
    from .dynamics.render import render_phase_portrait

    cfg = _sim_config(args)
    m, ex = _model_and_extraction(args, cfg, True)
    d = ex.descriptor
    v = validate_G2(d)
    result = _with_schema({"descriptor": descriptor_to_json(d), "cells": ex.cells().to_json()})
    if args.render:
        render_phase_portrait(m, args.render, ex, cfg)
    if args.descriptor:
        _dump(result, args.descriptor)
    summary = {"counts": list(d.counts().as_tuple()), "verdict": v.to_json()}
    if v.passed:
        summary["component"] = component_id(d)
    if not args.descriptor:
        summary.update(result)
    _dump(_with_schema(summary))
    return 0 if v.passed else 1


def cmd_render(args) -> int:
    from .dynamics.render import render_phase_portrait

    cfg = _sim_config(args)
    m, ex = _model_and_extraction(args, cfg, not args.points_only)
    render_phase_portrait(m, args.out, ex, cfg)
    _dump(_with_schema({"svg": args.out}))
    return 0


# -- parser ------------------------------------------------------------------

def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--potential", default="std",
                   help="'std', 'g0-search' or a potential JSON file")
    p.add_argument("--direction", type=_direction, default=+1,
                   help="+1 flows up the potential gradient, -1 down")
    p.add_argument("--step", type=float, default=DEFAULT.integrator.step, help="RK4 step")
    p.add_argument("--grid", type=int, default=DEFAULT.search.grid,
                   help="seed grid size per axis for the periodic point search")
    p.add_argument("--seed-offset", type=float, default=0.0,
                   help="shift of the seed grid (both axes, in cells)")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    ap = argparse.ArgumentParser(prog="g2torus", description=__doc__.splitlines()[0],
                                 formatter_class=fmt)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("classify-matrix", formatter_class=fmt,
                       help="periodic class tag of an integer matrix")
    p.add_argument("--entries", type=_matrix, required=True,
                   help="row-major entries a,b,c,d of [[a,b],[c,d]]")
    p.add_argument("--policy", choices=[x.value for x in Policy], default=Policy.SL.value,
                   help="conjugators with det +1 only (sl) or det +-1 (gl)")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND,
                   help="max |entry| of a searched conjugator")
    p.set_defaults(func=cmd_classify_matrix)

    p = sub.add_parser("knot-orbit", formatter_class=fmt,
                       help="the classes k, M k, M^2 k")
    p.add_argument("--class", dest="knot_class", type=_pair, required=True, help="a,b")
    p.add_argument("--matrix", type=_matrix, default=A2,
                   help="row-major entries of the acting matrix")
    p.set_defaults(func=cmd_knot_orbit)

    p = sub.add_parser("diophantine", formatter_class=fmt,
                       help="integer solutions of -a^2 + ab - b^2 = epsilon")
    p.add_argument("--epsilon", type=int, required=True, help="-1, 0 or 1")
    p.set_defaults(func=cmd_diophantine)

    p = sub.add_parser("check-counts", formatter_class=fmt,
                       help="Morse inequalities and Euler characteristic on the torus")
    p.add_argument("--c0", type=_count, required=True, help="number of sinks")
    p.add_argument("--c1", type=_count, required=True, help="number of saddles")
    p.add_argument("--c2", type=_count, required=True, help="number of sources")
    p.set_defaults(func=cmd_check_counts)

    p = sub.add_parser("component", formatter_class=fmt,
                       help="validate a descriptor and report its component index")
    p.add_argument("--descriptor", required=True, help="descriptor JSON (or simulate output)")
    p.set_defaults(func=cmd_component)

    p = sub.add_parser("graph-eq", formatter_class=fmt,
                       help="equivalence of the tricolor graphs of two cell decompositions")
    p.add_argument("--left", required=True,
                   help="cell JSON, simulate output, or canonical:<i>")
    p.add_argument("--right", required=True,
                   help="cell JSON, simulate output, or canonical:<i>")
    p.add_argument("--show-map", action="store_true", help="include the vertex map")
    p.set_defaults(func=cmd_graph_eq)

    p = sub.add_parser("reduce", formatter_class=fmt,
                       help="cancel saddle/node pairs down to the simplest descriptor")
    p.add_argument("--descriptor", required=True, help="descriptor JSON")
    p.add_argument("--trace", default=None, help="write the move list to this file")
    p.add_argument("--replay", default=None,
                   help="apply the moves of a trace file instead of reducing")
    p.add_argument("--max-moves", type=int, default=None,
                   help="give up after this many moves (default: number of saddle orbits)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", formatter_class=fmt,
                       help="simulate a model map and extract its descriptor and cells")
    _add_sim_flags(p)
    p.add_argument("--render", default=None, help="also write a phase portrait SVG here")
    p.add_argument("--descriptor", default=None,
                   help="write {descriptor, cells} JSON here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", formatter_class=fmt,
                       help="phase portrait of a model map as SVG")
    _add_sim_flags(p)
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--points-only", action="store_true",
                   help="draw periodic points without tracing separatrices")
    p.set_defaults(func=cmd_render)
    return ap


_NUMBERS = re.compile(r"^-[\d.]+(,-?[\d.]+)*$")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--entries -1,-1,1,0`` through: argparse would read the value as a flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NUMBERS.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except G2Error as exc:
        _dump(_with_schema(exc.to_json()))
        return 1
    except OSError as exc:
        _dump(_with_schema({"error": "io-error", "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
