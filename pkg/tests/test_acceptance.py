"""Acceptance suite: one PASS/FAIL line per criterion, with its runtime.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import random
import sys
import time
from contextlib import contextmanager

from conftest import random_multigraph, random_quad
from oracles import all_arc_solutions, meridian_steps, quad_crossings
from heegaard_fill import fill
from heegaard_fill.analysis import brute_force_cutwidth, census_inputs, enumerate_census, exact_cutwidth
from heegaard_fill.bouquet import arc_coordinates, quad_flip_weight, reducible_edges, validate
from heegaard_fill.errors import BouquetError
from heegaard_fill.filler import FillState, Strategy, resolution_path
from heegaard_fill.fixtures import ehugabdes
from heegaard_fill.homology import AbelianGroup
from heegaard_fill.moves import build_minimal_layered_handlebody, handlebody_edge_roles
from heegaard_fill.tri_kernel import dual_multigraph, h1, status, vertex_link

SEED = 20240611
RESULTS: dict[int, str] = {}


@contextmanager
def criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        fast = elapsed < limit
        verdict = "PASS" if ok and fast else "FAIL"
        note = "" if fast else f", over the {limit:g}s limit"
        line = f"{verdict} criterion {number}: {title} ({elapsed:.2f}s{note})"
        RESULTS[number] = line
        print(line)
    assert fast, line


def closed_one_vertex(tri) -> bool:
    st = status(tri)
    return (st.is_closed and st.is_valid and st.is_orientable and st.is_one_vertex
            and vertex_link(tri, 0).is_sphere)


def test_criterion_01_fixture_integrity():
    with criterion(1, "eHuGabdes fixture integrity", 0.1):
        tri = ehugabdes()
        st = status(tri)
        assert st.is_valid and st.is_orientable and st.is_one_vertex
        assert tri.size == 4
        (comp,) = tri.boundary.components
        assert comp.genus == 2
        assert len(tri.skeleton.boundary_edges) == 9
        assert tri.boundary.num_faces == 6


def test_criterion_02_sphere():
    tri = ehugabdes()
    with criterion(2, "S^3 fill", 1.0):
        result = fill(tri, (0, 0, 0, 0, 0, 0, 0, 0, 1), (4,), "greedy")
        assert closed_one_vertex(result.tri)
        assert h1(result.tri) == AbelianGroup(0)
        assert result.report["order_width"] <= 6


def test_criterion_03_connected_sum():
    tri = ehugabdes()
    with criterion(3, "connected-sum fill has H1 = Z^2", 1.0):
        result = fill(tri, (0, 2, 1, 1, 0, 0, 1, 1, 2), ())
        assert closed_one_vertex(result.tri)
        assert h1(result.tri) == AbelianGroup(2)


def test_criterion_04_lens_space():
    tri = ehugabdes()
    with criterion(4, "lens-space fill has H1 = Z/3", 1.0):
        result = fill(tri, (0, 0, 0, 0, 0, 1, 0, 1, 1), (4,))
        assert closed_one_vertex(result.tri)
        assert h1(result.tri) == AbelianGroup(0, (3,))


def test_criterion_05_hyperbolic_row():
    tri = ehugabdes()
    with criterion(5, "hyperbolic-row smoke test", 1.0):
        result = fill(tri, (2, 1, 0, 3, 2, 3, 1, 1, 1), ())
        rep = result.report
        assert closed_one_vertex(result.tri)
        assert rep["order_width"] <= 6
        added = rep["added"]
        assert rep["tets"] <= 4 + 14 + added["quad-isolator"] + added["ball-filler"]
        # regression baseline
        assert (rep["tets"], rep["h1"], rep["order_width"]) == (14, "Z/5 + Z/5", 6)


def test_criterion_06_flip_weight_oracle():
    rng = random.Random(SEED)
    with criterion(6, "flip weight matches arc reconstruction on 2000 quads", 5.0):
        for _ in range(2000):
            face0, face1 = random_quad(rng, 8)
            bd = quad_flip_weight([face0.n, face1.n], [face0.r, face1.r])
            assert bd.weight == quad_crossings(face0, face1)[0]


def test_criterion_07_arc_coordinates():
    with criterion(7, "arc coordinates unique for weight sums up to 30", 5.0):
        table = all_arc_solutions(30)
        for w in itertools.product(range(31), repeat=3):
            if sum(w) > 30:
                continue
            found = table.get(w, [])
            assert len(found) <= 1
            got = arc_coordinates(*w)
            assert (got if got else None) == (found[0] if found else None)
        assert not arc_coordinates(1, 1, 1)


def test_criterion_08_monotone_resolution():
    tri = ehugabdes()
    with criterion(8, "Petal-Resolver strictly decreases weight (genus 2, weight <= 8)", 120.0):
        valid = 0
        for weights, resolved in census_inputs(tri, 8):
            try:
                bouquet = validate(tri, weights, resolved)
            except BouquetError:
                continue
            valid += 1
            taus = [s.total_weight for s in resolution_path(FillState.start(bouquet))]
            assert all(a > b for a, b in zip(taus, taus[1:])), (weights, resolved)
            assert len(taus) - 1 <= bouquet.total_weight
        assert valid == 2663


def test_criterion_09_strategy_invariance():
    tri = ehugabdes()
    with criterion(9, "H1 independent of strategy (genus 2, weight <= 6)", 300.0):
        valid = 0
        for weights, resolved in census_inputs(tri, 6):
            try:
                greedy = fill(tri, weights, resolved, Strategy.GREEDY)
            except BouquetError:
                continue
            valid += 1
            first = fill(tri, weights, resolved, Strategy.FIRST)
            every = fill(tri, weights, resolved, Strategy.ALL)
            groups = {greedy.report["h1"], first.report["h1"]}
            groups |= {str(h1(b.tri)) for b in every.branches}
            assert len(groups) == 1, (weights, resolved, groups)
        assert valid == 1200


def test_criterion_10_cutwidth_bound():
    rng = random.Random(SEED)
    with criterion(10, "exact cutwidth <= order width <= 4g-2", 120.0):
        for tri, genus, max_weight in ((ehugabdes(), 2, 8),
                                       (build_minimal_layered_handlebody(3).tri, 3, 2)):
            filled = 0
            for rec in enumerate_census(tri, max_weight, with_cutwidth=True):
                if rec.filled:
                    filled += 1
                    assert rec.exact_cutwidth <= rec.order_width <= 4 * genus - 2, rec
            assert filled
        for _ in range(200):
            g = random_multigraph(rng, 7)
            assert exact_cutwidth(g) == brute_force_cutwidth(g)
        # the dual graph of a fill is one concrete multigraph with parallel edges
        dual = dual_multigraph(fill(ehugabdes(), (0, 0, 0, 0, 0, 0, 0, 0, 1), (4,)).tri)
        assert exact_cutwidth(dual) == brute_force_cutwidth(dual)


def test_criterion_11_solid_torus():
    lt = build_minimal_layered_handlebody(1)
    roles = handlebody_edge_roles(lt)
    with criterion(11, "solid-torus fills follow slowed Euclid", 30.0):
        pairs = [(a, n - a) for n in range(2, 21) for a in range(1, n) if math.gcd(a, n - a) == 1]
        assert len(pairs) == 127
        for a, b in pairs:
            weights = [0] * 3
            weights[roles["spine_interior"]] = a - 1
            weights[roles["spine_boundary"]] = b - 1
            weights[roles["flip"]] = a + b - 1
            path = list(resolution_path(FillState.start(validate(lt.tri, weights))))
            for state in path[:-1]:
                assert len(reducible_edges(state.tri, state.weights)) == 1, (a, b)
            result = fill(lt, weights)
            assert closed_one_vertex(result.tri)
            steps, torsion = meridian_steps(a, b)
            expected = AbelianGroup(1) if torsion == 0 else AbelianGroup(0, (torsion,) if torsion > 1 else ())
            assert h1(result.tri) == expected, (a, b)
            assert result.report["added"]["petal-resolver"] == len(path) - 1 == steps, (a, b)


if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_criterion_")]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
