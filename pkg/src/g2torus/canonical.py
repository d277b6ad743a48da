"""Cell data of the simplest diffeomorphisms.

The rotation tables list, counter-clockwise, the separatrix ends at every
point of the canonical descriptors.  They were read off the simulated models
by ``scripts/trace_canonical.py``; the components with fixed sinks swapped for
sources are time reversals and reuse the same tables.
"""
from __future__ import annotations

from .descriptor import canonical_descriptor
from .tricolor import (
    CellData, RotationSystem, TricolorGraph, build_tricolor, cells_from_rotation_system,
    mirror_rotation_system, rotation_system_from_descriptor,
)

ROTATION_G1 = {
    "a1:0": ["s:0:stable-1", "s:2:stable-1", "s:1:stable-1"],
    "a2:0": ["s:1:stable-2", "s:0:stable-2", "s:2:stable-2"],
    "s:0": ["s:0:unstable-2", "s:0:stable-1", "s:0:unstable-1", "s:0:stable-2"],
    "s:1": ["s:1:unstable-1", "s:1:stable-2", "s:1:unstable-2", "s:1:stable-1"],
    "s:2": ["s:2:stable-2", "s:2:unstable-2", "s:2:stable-1", "s:2:unstable-1"],
    "w:0": ["s:1:unstable-2", "s:2:unstable-1", "s:0:unstable-2",
            "s:1:unstable-1", "s:2:unstable-2", "s:0:unstable-1"],
}

ROTATION_G0 = {
    "a0:0": ["t:0:stable-2", "t:2:stable-2", "t:1:stable-2"],
    "a1:0": ["s:1:stable-1", "s:0:stable-1", "s:2:stable-1"],
    "a2:0": ["s:2:stable-2", "t:0:stable-1", "s:1:stable-2",
             "t:2:stable-1", "s:0:stable-2", "t:1:stable-1"],
    "s:0": ["s:0:stable-2", "s:0:unstable-2", "s:0:stable-1", "s:0:unstable-1"],
    "s:1": ["s:1:unstable-2", "s:1:stable-1", "s:1:unstable-1", "s:1:stable-2"],
    "s:2": ["s:2:unstable-1", "s:2:stable-2", "s:2:unstable-2", "s:2:stable-1"],
    "t:0": ["t:0:stable-2", "t:0:unstable-1", "t:0:stable-1", "t:0:unstable-2"],
    "t:1": ["t:1:unstable-1", "t:1:stable-1", "t:1:unstable-2", "t:1:stable-2"],
    "t:2": ["t:2:unstable-2", "t:2:stable-2", "t:2:unstable-1", "t:2:stable-1"],
    "w:0": ["s:0:unstable-2", "t:2:unstable-1", "t:0:unstable-2", "s:2:unstable-1"],
    "w:1": ["s:1:unstable-2", "t:0:unstable-1", "t:1:unstable-2", "s:0:unstable-1"],
    "w:2": ["s:2:unstable-2", "t:1:unstable-1", "t:2:unstable-2", "s:1:unstable-1"],
}


def canonical_rotation_system(i: int) -> RotationSystem:
    if i in (1, 2):
        rs = rotation_system_from_descriptor(canonical_descriptor(1), ROTATION_G1)
    elif i in (0, 3):
        rs = rotation_system_from_descriptor(canonical_descriptor(0), ROTATION_G0)
    else:
        raise ValueError(f"component index must be in 0..3, got {i}")
    return mirror_rotation_system(rs) if i in (2, 3) else rs


def canonical_cells(i: int, green: str = "g") -> CellData:
    return cells_from_rotation_system(canonical_rotation_system(i), green)


def canonical_tricolor(i: int) -> TricolorGraph:
    return build_tricolor(canonical_cells(i))
