"""Exhaustive scan of the dipped-potential grid for three-fixed-source models.

Prints one line per parameter triple with the verdict, so the whole accepted
region can be inspected rather than just the first hit.
"""
import argparse
import logging

from g2torus.descriptor import component_id
from g2torus.dynamics.potential import G0_SCAN
from g2torus.dynamics.search import g0_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--first-only", action="store_true", help="stop at the first accepted triple")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    found = g0_search(G0_SCAN, exhaustive=not args.first_only)
    for c in found:
        h, w, o = c.params
        if c.accepted:
            d = c.extraction.descriptor
            tail = f"accepted  counts={d.counts().as_tuple()} component={component_id(d)}"
        else:
            tail = f"rejected  {c.reason}"
        print(f"height={h:<5} width={w:<5} offset={o:<5} {tail}")
    print(f"{sum(c.accepted for c in found)} of {len(found)} accepted")


if __name__ == "__main__":
    main()
