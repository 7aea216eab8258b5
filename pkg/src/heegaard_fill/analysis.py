"""Cutwidth of dual graphs and the weight-vector census."""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BadOrder, BouquetError, HeegaardFillError, TooLarge
from .tri_kernel import Multigraph, Triangulation3, dual_multigraph

EXACT_CUTWIDTH_LIMIT = 22


@dataclass(frozen=True)
class OrderWidthResult:
    width: int
    cutsets: tuple[int, ...]
    order: tuple[int, ...]


def order_width(tri: Triangulation3, order: Sequence[int] | None = None) -> OrderWidthResult:
    """Largest number of face gluings crossing a prefix cut of ``order``."""
    order = tuple(range(tri.size)) if order is None else tuple(order)
    if sorted(order) != list(range(tri.size)):
        raise BadOrder(f"order must be a permutation of the {tri.size} tetrahedra")
    pos = {t: i for i, t in enumerate(order)}
    g = dual_multigraph(tri)
    # an edge joining positions i < j crosses the cuts i+1 .. j
    delta = [0] * (tri.size + 1)
    for u, v in g.edges:
        i, j = sorted((pos[u], pos[v]))
        delta[i + 1] += 1
        delta[j + 1] -= 1
    cuts = list(itertools.accumulate(delta[1:tri.size]))
    return OrderWidthResult(max(cuts, default=0), tuple(cuts), order)


def _edge_list(graph: Multigraph) -> list[tuple[int, int]]:
    return [(u, v) for u, v in graph.edges if u != v]


def exact_cutwidth(graph: Multigraph) -> int:
    """Minimum over vertex orderings of the largest prefix cut.

    Dynamic programming over vertex subsets; parallel edges each count.
    """
    n = graph.num_vertices
    if n > EXACT_CUTWIDTH_LIMIT:
        raise TooLarge(f"exact cutwidth is limited to {EXACT_CUTWIDTH_LIMIT} vertices, got {n}")
    if n <= 1:
        return 0
    subsets = np.arange(1 << n, dtype=np.int64)
    cut = np.zeros(1 << n, dtype=np.int32)
    for u, v in _edge_list(graph):
        cut += (((subsets >> u) ^ (subsets >> v)) & 1).astype(np.int32)
    popcount = np.zeros(1 << n, dtype=np.int8)
    for v in range(n):
        popcount += ((subsets >> v) & 1).astype(np.int8)
    big = np.iinfo(np.int32).max
    best = np.full(1 << n, big, dtype=np.int32)
    best[0] = 0
    for size in range(1, n + 1):
        layer = subsets[popcount == size]
        low = np.full(layer.shape, big, dtype=np.int32)
        for v in range(n):
            bit = 1 << v
            has = (layer & bit) != 0
            low[has] = np.minimum(low[has], best[layer[has] ^ bit])
        best[layer] = np.maximum(low, cut[layer])
    return int(best[-1])


def brute_force_cutwidth(graph: Multigraph) -> int:
    """Cutwidth by trying every ordering; only for tiny graphs."""
    n = graph.num_vertices
    edges = _edge_list(graph)
    best = None
    for perm in itertools.permutations(range(n)):
        pos = {v: i for i, v in enumerate(perm)}
        width = 0
        for cut in range(1, n):
            width = max(width, sum(1 for u, v in edges if (pos[u] < cut) != (pos[v] < cut)))
        best = width if best is None else min(best, width)
    return best or 0


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("weights", "resolved", "verdict", "tets", "h1", "signature", "orderWidth", "strategy")


@dataclass(frozen=True)
class CensusRecord:
    weights: tuple[int, ...]
    resolved: tuple[int, ...]
    verdict: str
    strategy: str
    tets: int | None = None
    h1: str | None = None
    signature: str | None = None
    order_width: int | None = None
    tau: int | None = None
    resolver_layers: int | None = None
    exact_cutwidth: int | None = None

    @property
    def filled(self) -> bool:
        return self.verdict == "filled"

    def csv_row(self) -> list[str]:
        def opt(x):
            return "" if x is None else str(x)
        return [
            " ".join(map(str, self.weights)),
            " ".join(map(str, self.resolved)),
            self.verdict,
            opt(self.tets),
            opt(self.h1),
            opt(self.signature),
            opt(self.order_width),
            self.strategy,
        ]


def weight_vectors(num_edges: int, max_total: int, min_total: int = 0) -> Iterator[tuple[int, ...]]:
    """All weight vectors by total, each total in lexicographic order."""
    def rec(n, total):
        if n == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in rec(n - 1, total - first):
                yield (first,) + rest
    for total in range(min_total, max_total + 1):
        yield from rec(num_edges, total)


def census_inputs(tri: Triangulation3, max_total: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Candidate (weights, resolved) pairs.

    Resolved sets are subsets of weight-free boundary edges whose size
    completes the petal count; other subsets fail validation anyway.
    """
    from .bouquet import INCOMPATIBLE, arc_coordinates, boundary_genus

    sk = tri.skeleton
    bs = tri.boundary
    genus = boundary_genus(tri)
    bdry = list(sk.boundary_edges)
    for sub in weight_vectors(len(bdry), max_total):
        weights = [0] * sk.num_edges
        for e, w in zip(bdry, sub):
            weights[e] = w
        rooted = 0
        for k in range(bs.num_faces):
            coords = arc_coordinates(*(weights[bs.side_edge[k][x]] for x in bs.labels(k)))
            if coords is INCOMPATIBLE:
                rooted = None
                break
            rooted += coords.rooted
        if rooted is None or rooted % 2 or rooted // 2 > genus:
            yield tuple(weights), ()
            continue
        free = [e for e in bdry if not weights[e]]
        for resolved in itertools.combinations(free, genus - rooted // 2):
            yield tuple(weights), resolved


def census_record(tri: Triangulation3, weights, resolved, strategy: str = "greedy",
                  with_cutwidth: bool = False) -> CensusRecord:
    from .filler import fill

    try:
        result = fill(tri, weights, resolved, strategy)
    except BouquetError as err:
        return CensusRecord(tuple(weights), tuple(resolved), type(err).__name__, strategy)
    rep = result.report
    cw = exact_cutwidth(dual_multigraph(result.tri)) if with_cutwidth else None
    return CensusRecord(
        tuple(weights), tuple(resolved), "filled", strategy,
        tets=result.tri.size, h1=rep["h1"], signature=rep["signature"],
        order_width=rep["order_width"], tau=rep["tau"],
        resolver_layers=rep["added"]["petal-resolver"], exact_cutwidth=cw,
    )


def _record_job(args) -> CensusRecord:
    return census_record(*args)


def enumerate_census(tri: Triangulation3, max_total: int, strategy: str = "greedy",
                     workers: int = 1, with_cutwidth: bool = False) -> Iterator[CensusRecord]:
    """Fill every candidate bouquet up to ``max_total``, in input order."""
    if hasattr(tri, "tri"):
        tri = tri.tri
    jobs = ((tri, w, r, strategy, with_cutwidth) for w, r in census_inputs(tri, max_total))
    if workers <= 1:
        yield from map(_record_job, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_record_job, jobs, chunksize=16)


@dataclass
class CensusSummary:
    records: int = 0
    filled: int = 0
    verdicts: dict[str, int] = field(default_factory=dict)
    signatures: set[str] = field(default_factory=set)
    groups: dict[str, int] = field(default_factory=dict)
    max_order_width: int = 0

    def add(self, rec: CensusRecord) -> None:
        self.records += 1
        self.verdicts[rec.verdict] = self.verdicts.get(rec.verdict, 0) + 1
        if rec.filled:
            self.filled += 1
            self.signatures.add(rec.signature)
            self.groups[rec.h1] = self.groups.get(rec.h1, 0) + 1
            self.max_order_width = max(self.max_order_width, rec.order_width)

    def as_dict(self) -> dict:
        return {
            "records": self.records,
            "filled": self.filled,
            "verdicts": dict(sorted(self.verdicts.items())),
            "distinct_signatures": len(self.signatures),
            "distinct_h1": dict(sorted(self.groups.items())),
            "max_order_width": self.max_order_width,
        }


def write_census_csv(records: Iterable[CensusRecord], out: io.TextIOBase) -> CensusSummary:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    summary = CensusSummary()
    for rec in records:
        writer.writerow(rec.csv_row())
        summary.add(rec)
    return summary
