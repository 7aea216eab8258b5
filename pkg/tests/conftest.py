import random

import pytest

from heegaard_fill import build_minimal_layered_handlebody, ehugabdes
from heegaard_fill.tri_kernel import ALL_PERMS, Triangulation3, TriangulationEditor, relabel


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240611, help="seed for randomised tests")


@pytest.fixture
def rng(request):
    return random.Random(request.config.getoption("--seed"))


@pytest.fixture(scope="session")
def ehu():
    return ehugabdes()


@pytest.fixture(scope="session")
def solid_torus():
    return build_minimal_layered_handlebody(1)


def shuffled(tri: Triangulation3, rng: random.Random):
    """A random relabelling and the map sending old edge classes to new ones."""
    order = list(range(tri.size))
    rng.shuffle(order)
    perms = [rng.choice(ALL_PERMS) for _ in range(tri.size)]
    new = relabel(tri, order, perms)
    position = {old: i for i, old in enumerate(order)}
    from heegaard_fill.tri_kernel import EDGE_VERTICES, edge_slot

    edge_map = {}
    for e in range(tri.skeleton.num_edges):
        t, s = tri.skeleton.edge_rep(e)
        a, b = EDGE_VERTICES[s]
        p = perms[t]
        edge_map[e] = new.skeleton.edge_of[position[t]][edge_slot(p[a], p[b])]
    return new, edge_map


def random_triangulation(rng: random.Random, n: int, open_faces: int = 0) -> Triangulation3:
    """Random connected face pairing of ``n`` tetrahedra."""
    from heegaard_fill.tri_kernel import face_opposite

    while True:
        ed = TriangulationEditor()
        for _ in range(n):
            ed.add_tetrahedron()
        slots = [(t, f) for t in range(n) for f in range(4)]
        rng.shuffle(slots)
        keep = slots[open_faces:] if open_faces else slots
        if len(keep) % 2:
            keep = keep[1:]
        for i in range(0, len(keep), 2):
            (t1, f1), (t2, f2) = keep[i], keep[i + 1]
            while True:
                perm = rng.choice(ALL_PERMS)
                if face_opposite(perm[3 - f1]) == f2:
                    break
            ed.join(t1, f1, t2, perm)
        tri = ed.freeze()
        if tri.size == n and _connected(tri):
            return tri


def _connected(tri: Triangulation3) -> bool:
    seen, stack = {0}, [0]
    while stack:
        t = stack.pop()
        for f in range(4):
            g = tri.gluing(t, f)
            if g is not None and g.tet not in seen:
                seen.add(g.tet)
                stack.append(g.tet)
    return len(seen) == tri.size


def random_quad(rng, max_weight=6):
    """Two arc-coordinate faces sharing edge AB (corner order A, B, apex)."""
    from heegaard_fill.bouquet import arc_coordinates

    while True:
        w0 = [rng.randint(0, max_weight) for _ in range(3)]
        face0 = arc_coordinates(*w0)
        if not face0:
            continue
        for _ in range(50):
            face1 = arc_coordinates(rng.randint(0, max_weight), rng.randint(0, max_weight), w0[2])
            if face1:
                return face0, face1


def random_multigraph(rng, max_vertices=7):
    """Random multigraph with parallel edges and the odd loop."""
    from heegaard_fill.tri_kernel import Multigraph

    n = rng.randint(1, max_vertices)
    edges = []
    if n > 1:
        for _ in range(rng.randint(0, 2 * n)):
            u, v = rng.sample(range(n), 2)
            edges += [(u, v)] * rng.choice([1, 1, 2, 3])
    loops = tuple(v for v in range(n) if rng.random() < 0.1)
    return Multigraph(n, tuple(edges), loops)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
