"""Independent brute-force references used by the test-suite."""

from __future__ import annotations

import itertools

from heegaard_fill.bouquet import ArcCoordinates


def quad_crossings(face0: ArcCoordinates, face1: ArcCoordinates) -> tuple[int, int]:
    """Count crossings of the other diagonal by rebuilding the arcs of a quad.

    Corners of face ``i`` are indexed (A, B, X_i) with AB the shared edge.
    Returns (crossings, pieces running apex to apex).
    """
    halves = []
    for fa in (face0, face1):
        n, r = fa.n, fa.r
        # points on AB from A: arcs around A inner first, apex rooted arcs, arcs around B
        halves.append(["A"] * n[0] + ["X"] * r[2] + ["B"] * n[1])
    assert len(halves[0]) == len(halves[1]), "weights on the shared edge differ"
    crossings = 0
    through = 0
    for h0, h1 in zip(*halves):
        if {h0, h1} == {"A", "B"}:
            crossings += 1
        if h0 == h1 == "X":
            through += 1
    for fa in (face0, face1):
        # arcs around the apex, and rooted arcs from A or B, join the two halves
        crossings += fa.n[2] + fa.r[0] + fa.r[1]
    return crossings, through


def meridian_steps(a: int, b: int) -> tuple[int, int]:
    """Slowed Euclid on the slope triple (a, b, a+b) down to a (0, 1, 1) type.

    Returns (steps, |torsion|), tracking the meridian (1, 2, 3) triple
    through the same flips."""
    fill = [a, b, a + b]
    mer = [1, 2, 3]
    steps = 0
    while sorted(fill) != [0, 1, 1]:
        i = max(range(3), key=lambda k: fill[k])
        x, y = (fill[j] for j in range(3) if j != i)
        mx, my = (mer[j] for j in range(3) if j != i)
        fill[i] = abs(x - y)
        mer[i] = mx + my if mer[i] == abs(mx - my) else abs(mx - my)
        steps += 1
    return steps, mer[fill.index(0)]


def all_arc_solutions(limit: int) -> dict[tuple[int, int, int], list[ArcCoordinates]]:
    """Every admissible arc configuration with weight sum at most ``limit``,
    grouped by the weights it produces."""
    table: dict[tuple[int, int, int], list[ArcCoordinates]] = {}
    for n in itertools.product(range(limit // 2 + 1), repeat=3):
        spare = limit - 2 * sum(n)
        if spare < 0:
            continue
        configs = [(0, 0, 0)]
        for i in range(3):
            if n[i] == 0:
                configs += [tuple(k if j == i else 0 for j in range(3)) for k in range(1, spare + 1)]
        for r in configs:
            coords = ArcCoordinates(n, r)
            table.setdefault(coords.weights(), []).append(coords)
    return table
