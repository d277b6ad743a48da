"""Render phase portraits of g1, g2 and g0 into a directory of SVG files."""
import argparse
from pathlib import Path

from g2torus.descriptor import component_id
from g2torus.dynamics.extract import extract_descriptor
from g2torus.dynamics.model import ModelMap
from g2torus.dynamics.potential import g0_potential, standard_potential
from g2torus.dynamics.render import render_phase_portrait

MODELS = {
    "g1": (standard_potential, +1),
    "g2": (standard_potential, -1),
    "g0": (g0_potential, -1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="portraits", help="output directory")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (make, direction) in MODELS.items():
        m = ModelMap(make(), direction)
        ex = extract_descriptor(m)
        path = out / f"{name}.svg"
        render_phase_portrait(m, path, ex)
        print(f"{name}: component {component_id(ex.descriptor)} -> {path}")


if __name__ == "__main__":
    main()
