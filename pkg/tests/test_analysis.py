import io

import pytest

from conftest import random_multigraph
from heegaard_fill import fill
from heegaard_fill.analysis import (
    CSV_COLUMNS,
    brute_force_cutwidth,
    census_inputs,
    census_record,
    enumerate_census,
    exact_cutwidth,
    order_width,
    weight_vectors,
    write_census_csv,
)
from heegaard_fill.errors import BadOrder, TooLarge
from heegaard_fill.tri_kernel import Multigraph, dual_multigraph, parse_gluing_table


def test_order_width_small_cases():
    one = parse_gluing_table("tet 0: bdry bdry bdry bdry\n")
    assert order_width(one).width == 0
    two = parse_gluing_table("tet 0: 1(012) bdry bdry bdry\ntet 1: 0(012) bdry bdry bdry\n")
    result = order_width(two)
    assert result.width == 1 and result.cutsets == (1,)


def test_order_width_rejects_bad_orders(ehu):
    with pytest.raises(BadOrder):
        order_width(ehu, [0, 1, 2])
    with pytest.raises(BadOrder):
        order_width(ehu, [0, 1, 2, 2])


def test_order_width_of_fills(ehu):
    result = fill(ehu, (2, 1, 0, 3, 2, 3, 1, 1, 1))
    ow = order_width(result.tri, result.log.order)
    assert ow.width == result.report["order_width"] <= 6
    assert exact_cutwidth(dual_multigraph(result.tri)) <= ow.width


def test_exact_cutwidth_examples():
    assert exact_cutwidth(Multigraph(1, ())) == 0
    assert exact_cutwidth(Multigraph(3, ((0, 1), (1, 2)))) == 1
    assert exact_cutwidth(Multigraph(2, ((0, 1),) * 3)) == 3
    # a star: the centre goes in the middle
    assert exact_cutwidth(Multigraph(5, tuple((0, i) for i in range(1, 5)))) == 2
    with pytest.raises(TooLarge):
        exact_cutwidth(Multigraph(23, ()))


def test_exact_cutwidth_matches_brute_force(rng):
    for _ in range(200):
        g = random_multigraph(rng)
        assert exact_cutwidth(g) == brute_force_cutwidth(g)


def test_weight_vectors():
    vecs = list(weight_vectors(3, 2))
    assert vecs[0] == (0, 0, 0)
    assert len(vecs) == 1 + 3 + 6
    assert all(sum(v) <= 2 for v in vecs)
    assert len(set(vecs)) == len(vecs)


def test_census_inputs_complete_the_petal_count(ehu):
    for weights, resolved in census_inputs(ehu, 2):
        assert all(weights[e] == 0 for e in resolved)
        assert len(resolved) <= 2


def census_text(tri, max_total, workers=1):
    buf = io.StringIO()
    summary = write_census_csv(enumerate_census(tri, max_total, workers=workers), buf)
    return buf.getvalue(), summary


def test_census_csv_is_deterministic(ehu):
    first, summary = census_text(ehu, 2)
    second, _ = census_text(ehu, 2)
    assert first == second
    assert first.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert summary.filled == 118
    assert summary.as_dict()["distinct_h1"].get("Z") == 10


def test_parallel_census_matches_serial(ehu):
    serial, _ = census_text(ehu, 1)
    parallel, _ = census_text(ehu, 1, workers=2)
    assert serial == parallel


def test_known_census_rows(ehu):
    for weights in [(0, 0, 0, 0, 1, 0, 1, 0, 0), (0, 0, 1, 0, 0, 1, 1, 0, 0)]:
        rec = census_record(ehu, weights, ())
        assert rec.filled and rec.h1 == "Z"
        assert rec.csv_row()[2] == "filled"
    rejected = census_record(ehu, (0, 0, 0, 0, 0, 0, 0, 0, 2), ())
    assert rejected.verdict == "Separating" and rejected.csv_row()[3] == ""
