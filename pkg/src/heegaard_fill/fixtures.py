"""Built-in triangulations."""

from __future__ import annotations

from .tri_kernel import Triangulation3, parse_gluing_table

# Minimal layered genus-2 handlebody; all nine edges lie on the boundary.
EHUGABDES_TABLE = """\
tet 0: bdry 1(023) bdry 1(132)
tet 1: 2(013) 3(012) 0(013) 0(132)
tet 2: 3(301) 1(012) bdry bdry
tet 3: 1(013) 2(120) bdry bdry
"""


def ehugabdes() -> Triangulation3:
    return parse_gluing_table(EHUGABDES_TABLE)
