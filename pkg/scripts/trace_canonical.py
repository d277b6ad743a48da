"""Regenerate the canonical descriptors and rotation tables from the simulator.

Prints Python literals for ``g2torus.canonical``: the g1 table comes from the
uphill standard model, the g0 table from the downhill g0 model.  Orbit ids are
renamed to the canonical ones and the g1 saddle representative is moved to
(1/2, 0).
"""
from pprint import pformat

from g2torus.descriptor import canonical_descriptor, relabel
from g2torus.dynamics.extract import extract_descriptor
from g2torus.dynamics.model import ModelMap, std_model
from g2torus.dynamics.potential import g0_potential
from g2torus.tricolor import relabel_rotation_system

CASES = {
    1: (lambda: std_model(+1), {"w0": "w", "a0": "a1", "a1": "a2", "s0": "s"}, {"s0": 1}),
    0: (lambda: ModelMap(g0_potential(), -1),
        {"w0": "w", "a0": "a0", "a1": "a1", "a2": "a2", "s0": "s", "s1": "t"}, {}),
}


def main():
    for i, (make, names, shifts) in CASES.items():
        ex = extract_descriptor(make())
        d = relabel(ex.descriptor, names, shifts)
        periods = {o.id: o.period for o in ex.descriptor.orbits}
        rs = relabel_rotation_system(ex.rotation, names, shifts, periods)
        c = canonical_descriptor(i)
        same = (set(d.orbits), set(d.separatrices)) == (set(c.orbits), set(c.separatrices))
        print(f"# component {i}: traced descriptor equals canonical_descriptor({i}): {same}")
        for s in d.separatrices:
            print("#  ", s)
        print(f"ROTATION_G{i} = {pformat(dict(sorted(rs.rotation.items())), width=100)}\n")


if __name__ == "__main__":
    main()
