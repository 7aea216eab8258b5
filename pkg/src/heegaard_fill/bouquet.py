"""Rooted normal curves on the boundary, stored as edge weights.

Inside a boundary triangle, arcs are counted per corner: ``n[c]`` normal
arcs cut off corner ``c`` and ``r[c]`` rooted arcs run from corner ``c`` to
the opposite side.  Along a side, intersection points are ordered from its
lower-labelled end: arcs around that end's corner (innermost first), then
rooted arcs from the opposite corner, then arcs around the far corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    BouquetError,
    MatchingError,
    NonBoundaryWeight,
    NotBoundary,
    Separating,
    TransversePetals,
    UnrootedCurve,
    WrongPetalCount,
)
from .moves import edge_quad
from .tri_kernel import Triangulation3


# ---------------------------------------------------------------------------
# Arc coordinates of a single triangle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArcCoordinates:
    """``n[i]`` normal arcs opposite edge i, ``r[i]`` rooted arcs through it."""

    n: tuple[int, int, int]
    r: tuple[int, int, int]

    def weights(self) -> tuple[int, int, int]:
        n, r = self.n, self.r
        return tuple(r[i] + n[(i + 1) % 3] + n[(i + 2) % 3] for i in range(3))  # type: ignore[return-value]

    @property
    def rooted(self) -> int:
        return sum(self.r)


class Incompatible:
    """Marker for weight triples that no rooted normal arcs realise."""

    _instance: Incompatible | None = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INCOMPATIBLE"

    def __bool__(self) -> bool:
        return False


INCOMPATIBLE = Incompatible()


def arc_coordinates(w0: int, w1: int, w2: int) -> ArcCoordinates | Incompatible:
    w = (w0, w1, w2)
    if min(w) < 0:
        raise ValueError("edge weights must be non-negative")
    top = max(range(3), key=lambda i: (w[i], -i))
    others = [i for i in range(3) if i != top]
    excess = w[top] - w[others[0]] - w[others[1]]
    n = [0, 0, 0]
    r = [0, 0, 0]
    if excess > 0:
        r[top] = excess
        n[others[0]] = w[others[1]]
        n[others[1]] = w[others[0]]
        return ArcCoordinates(tuple(n), tuple(r))  # type: ignore[arg-type]
    if sum(w) % 2:
        return INCOMPATIBLE
    for i in range(3):
        n[i] = (w[(i + 1) % 3] + w[(i + 2) % 3] - w[i]) // 2
    return ArcCoordinates(tuple(n), (0, 0, 0))  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Curves on the boundary surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaceArcs:
    """Arc counts of one boundary face keyed by corner label."""

    n: Mapping[int, int]
    r: Mapping[int, int]

    @property
    def rooted_corner(self) -> int | None:
        return next((c for c, k in self.r.items() if k), None)


class CurveSystem:
    """Arcs reconstructed from weights on the boundary of a triangulation."""

    def __init__(self, tri: Triangulation3, weights: Sequence[int]):
        self.tri = tri
        self.weights = tuple(weights)
        bs = self.bs = tri.boundary
        faces: list[FaceArcs] = []
        for k in range(bs.num_faces):
            labels = bs.labels(k)
            ws = [self.weights[bs.side_edge[k][x]] for x in labels]
            coords = arc_coordinates(*ws)
            if coords is INCOMPATIBLE:
                raise MatchingError(k)
            faces.append(FaceArcs(dict(zip(labels, coords.n)), dict(zip(labels, coords.r))))
        self.faces = faces

    # -- geometry of intersection points --------------------------------

    def side_weight(self, k: int, x: int) -> int:
        return self.weights[self.bs.side_edge[k][x]]

    def side_ends(self, k: int, x: int) -> tuple[int, int]:
        p, q = sorted(y for y in self.bs.labels(k) if y != x)
        return p, q

    def normal_position(self, k: int, x: int, corner: int, idx: int) -> int:
        """Position on side ``x`` of the ``idx``-th arc around ``corner``."""
        p, _ = self.side_ends(k, x)
        return idx if corner == p else self.side_weight(k, x) + 1 - idx

    def rooted_position(self, k: int, x: int, m: int) -> int:
        p, _ = self.side_ends(k, x)
        return self.faces[k].n[p] + m

    def across(self, k: int, x: int, pos: int) -> tuple[int, int, int]:
        """The same point seen from the face on the other side."""
        glue = self.bs.sides[k][x]
        k2 = glue.face
        p, _ = self.side_ends(k, x)
        labels2 = self.bs.labels(k2)
        p2 = glue.image(p)
        x2 = next(y for y in labels2 if y not in (p2, glue.image(self.side_ends(k, x)[1])))
        lower2 = min(y for y in labels2 if y != x2)
        w = self.side_weight(k, x)
        return k2, x2, (pos if p2 == lower2 else w + 1 - pos)

    def point_owner(self, k: int, x: int, pos: int) -> tuple:
        """The arc of face ``k`` through point ``pos`` of side ``x``."""
        fa = self.faces[k]
        p, q = self.side_ends(k, x)
        if pos <= fa.n[p]:
            return ("n", k, p, pos)
        pos -= fa.n[p]
        if pos <= fa.r[x]:
            return ("r", k, x, pos)
        pos -= fa.r[x]
        return ("n", k, q, fa.n[q] + 1 - pos)

    # -- tracing ------------------------------------------------------------

    def trace(self) -> tuple[list[list[tuple]], list[list[tuple]]]:
        """Split all arcs into petals (paths between two rooted arcs) and
        closed normal curves.  Each petal lists its arcs in order."""
        arcs: list[tuple] = []
        for k, fa in enumerate(self.faces):
            for c, cnt in fa.n.items():
                arcs += [("n", k, c, i) for i in range(1, cnt + 1)]
            for c, cnt in fa.r.items():
                arcs += [("r", k, c, m) for m in range(1, cnt + 1)]

        def endpoints(arc) -> list[tuple[int, int, int]]:
            kind, k, c, i = arc
            if kind == "r":
                return [(k, c, self.rooted_position(k, c, i))]
            return [(k, x, self.normal_position(k, x, c, i))
                    for x in self.bs.labels(k) if x != c]

        def neighbour(arc, end):
            k2, x2, pos2 = self.across(*end)
            return self.point_owner(k2, x2, pos2), (k2, x2, pos2)

        seen: set[tuple] = set()
        petals: list[list[tuple]] = []
        loops: list[list[tuple]] = []
        for start in arcs:
            if start in seen or start[0] != "r":
                continue
            path = [start]
            seen.add(start)
            arc, (end,) = start, endpoints(start)
            while True:
                nxt, entry = neighbour(arc, end)
                path.append(nxt)
                seen.add(nxt)
                if nxt[0] == "r":
                    break
                end = next(e for e in endpoints(nxt) if e != entry)
                arc = nxt
            petals.append(path)
        for start in arcs:
            if start in seen:
                continue
            loop = [start]
            seen.add(start)
            arc, end = start, endpoints(start)[0]
            while True:
                nxt, entry = neighbour(arc, end)
                if nxt == start:
                    break
                loop.append(nxt)
                seen.add(nxt)
                end = next(e for e in endpoints(nxt) if e != entry)
                arc = nxt
            loops.append(loop)
        return petals, loops

    # -- regions --------------------------------------------------------------

    def segment_region(self, k: int, x: int, s: int) -> tuple:
        """Region of face ``k`` touching segment ``s`` of side ``x``."""
        fa = self.faces[k]
        p, q = self.side_ends(k, x)
        if s < fa.n[p]:
            return ("tip", p) if s == 0 else ("strip", p, s)
        t = s - fa.n[p]
        if t <= fa.r[x]:
            j = fa.rooted_corner
            if j is None:
                return ("centre",)
            if j == x:
                return ("wedge", t)
            # side through the rooted corner: first or last wedge
            pj = min(y for y in self.bs.labels(k) if y != j)
            return ("wedge", 0) if x != pj else ("wedge", fa.r[j])
        u = t - fa.r[x]
        nq = fa.n[q]
        return ("tip", q) if u == nq else ("strip", q, nq - u)

    def complement_components(self, cut_edges: set[int], cut_arcs: set[tuple]) -> int:
        """Connected pieces after cutting along the given edges and arcs."""
        parent: dict[tuple, tuple] = {}

        def find(u):
            parent.setdefault(u, u)
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        # Arcs not being cut are erased: merge the two regions they separate.
        for k, fa in enumerate(self.faces):
            for x in self.bs.labels(k):
                w = self.side_weight(k, x)
                for s in range(w + 1):
                    find((k, self.segment_region(k, x, s)))
                for pos in range(1, w + 1):
                    arc = self.point_owner(k, x, pos)
                    if arc not in cut_arcs:
                        union((k, self.segment_region(k, x, pos - 1)),
                              (k, self.segment_region(k, x, pos)))
                if self.bs.side_edge[k][x] in cut_edges:
                    continue
                glue = self.bs.sides[k][x]
                k2 = glue.face
                x2 = next(y for y in self.bs.labels(k2)
                          if y not in {glue.image(c) for c in self.side_ends(k, x)})
                same = self._same_direction(k, x)
                for s in range(w + 1):
                    union((k, self.segment_region(k, x, s)),
                          (k2, self.segment_region(k2, x2, s if same else w - s)))
        return len({find(u) for u in list(parent)})

    def _same_direction(self, k: int, x: int) -> bool:
        glue = self.bs.sides[k][x]
        p, q = self.side_ends(k, x)
        p2, q2 = glue.image(p), glue.image(q)
        return p2 < q2

    # -- vertex order ---------------------------------------------------------

    def vertex_events(self, v: int, resolved: set[int],
                      rooted_label: Mapping[tuple, object]) -> list[object]:
        """Petal ends met walking once around boundary vertex ``v``."""
        events: list[object] = []
        for k, x, entry, exit_ in self.bs.vertex_cycle(v):
            cnt = self.faces[k].r[x]
            if cnt:
                p, q = self.side_ends(k, x)
                # arc 1 hugs the side joining x to p, i.e. the side opposite q
                order = range(1, cnt + 1) if entry == q else range(cnt, 0, -1)
                events += [rooted_label[("r", k, x, m)] for m in order]
            e = self.bs.side_edge[k][exit_]
            if e in resolved:
                events.append(("edge", e))
        return events


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FillingBouquet:
    tri: Triangulation3
    weights: tuple[int, ...]
    resolved: frozenset[int]
    genus: int
    rooted_arcs: int

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def unresolved_petals(self) -> int:
        return self.rooted_arcs // 2

    def to_json(self) -> dict:
        return {"weights": list(self.weights), "resolved": sorted(self.resolved)}


def _petal_name(label) -> str:
    if isinstance(label, tuple) and label[0] == "edge":
        return str(label[1])
    return f"p{label}"


def _check_shape(tri: Triangulation3, weights: Sequence[int], resolved) -> tuple[tuple[int, ...], frozenset[int]]:
    sk = tri.skeleton
    weights = tuple(int(w) for w in weights)
    if len(weights) != sk.num_edges:
        raise BouquetError(f"Given {len(weights)} edge weights, but there are {sk.num_edges} edges")
    if any(w < 0 for w in weights):
        raise BouquetError("Edge weights must be non-negative")
    resolved = frozenset(int(e) for e in resolved)
    for e, w in enumerate(weights):
        if w and not sk.edge_is_boundary[e]:
            raise NonBoundaryWeight(e, w)
    for e in resolved:
        if not 0 <= e < sk.num_edges or not sk.edge_is_boundary[e]:
            raise NonBoundaryWeight(e, 0) if 0 <= e < sk.num_edges else BouquetError(
                f"Resolved edge {e} does not exist")
    return weights, resolved


def boundary_genus(tri: Triangulation3) -> int:
    comps = tri.boundary.components
    if len(comps) != 1:
        raise BouquetError(f"expected one boundary component, found {len(comps)}")
    return comps[0].genus


def validate(tri: Triangulation3, weights: Sequence[int], resolved=()) -> FillingBouquet:
    weights, resolved = _check_shape(tri, weights, resolved)
    curves = CurveSystem(tri, weights)
    genus = boundary_genus(tri)
    rooted = sum(sum(fa.r.values()) for fa in curves.faces)
    if rooted % 2 or len(resolved) + rooted // 2 != genus:
        raise WrongPetalCount(len(resolved) + rooted / 2 if rooted % 2 else len(resolved) + rooted // 2, genus)

    petals, loops = curves.trace()
    label_of: dict[tuple, object] = {}
    for i, path in enumerate(petals):
        for arc in path:
            label_of[arc] = i
    for i, loop in enumerate(loops):
        for arc in loop:
            label_of[arc] = f"loop{i}"

    # resolved petals are edges; any weight on them is a transverse crossing
    for e in sorted(resolved):
        if weights[e]:
            k, x = tri.boundary.edge_sides(e)[0]
            other = label_of[curves.point_owner(k, x, 1)]
            raise TransversePetals(str(e), _petal_name(other))

    for v in range(tri.boundary.num_vertices):
        events = curves.vertex_events(v, set(resolved), label_of)
        counts: dict[object, int] = {}
        for ev in events:
            counts[ev] = counts.get(ev, 0) + 1
        stack: list[object] = []
        for ev in events:
            if counts[ev] != 2:
                continue
            if stack and stack[-1] == ev:
                stack.pop()
            elif ev in stack:
                raise TransversePetals(_petal_name(stack[-1]), _petal_name(ev))
            else:
                stack.append(ev)

    petal_arcs = {arc for path in petals for arc in path}
    pieces = curves.complement_components(set(resolved), petal_arcs)
    if pieces != 1:
        raise Separating(pieces)
    if loops:
        raise UnrootedCurve()
    return FillingBouquet(tri, weights, resolved, genus, rooted)


# ---------------------------------------------------------------------------
# Flips
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlipWeightBreakdown:
    N: int
    R: int
    X: int
    n: tuple[tuple[int, int, int], tuple[int, int, int]]
    r: tuple[tuple[int, int, int], tuple[int, int, int]]
    resolving: int = 0

    @property
    def weight(self) -> int:
        return self.N + self.R + self.X


def quad_flip_weight(n: Sequence[Sequence[int]], r: Sequence[Sequence[int]]) -> FlipWeightBreakdown:
    """Weight of the other diagonal of a quad.

    ``n[i][j]``, ``r[i][j]`` are the arc counts at corner ``j`` of face ``i``:
    corners 0 and 1 are the start and end of the diagonal, corner 2 is
    opposite it.
    """
    N = n[0][2] + n[1][2]
    R = r[0][0] + r[0][1] + r[1][0] + r[1][1]
    best, bi, bj = -1, 0, 0
    for i in (0, 1):
        for j in (0, 1):
            if n[i][j] > best:
                best, bi, bj = n[i][j], i, j
    X = max(0, n[bi][bj] - n[1 - bi][bj] - r[1 - bi][2])
    # rooted arcs from both apexes meeting on the diagonal become a new edge
    lo = max(n[0][0], n[1][0])
    hi = min(n[0][0] + r[0][2], n[1][0] + r[1][2])
    return FlipWeightBreakdown(
        N, R, X,
        tuple(tuple(row) for row in n),  # type: ignore[arg-type]
        tuple(tuple(row) for row in r),  # type: ignore[arg-type]
        resolving=max(0, hi - lo),
    )


def quad_arcs(curves: CurveSystem, e: int):
    quad = edge_quad(curves.tri, e)
    n, r = [], []
    for k, labels in zip(quad.faces, quad.labels):
        fa = curves.faces[k]
        n.append(tuple(fa.n[c] for c in labels))
        r.append(tuple(fa.r[c] for c in labels))
    return n, r


def flip_weight(tri: Triangulation3, weights: Sequence[int], e: int,
                curves: CurveSystem | None = None) -> tuple[int, FlipWeightBreakdown]:
    if not tri.skeleton.edge_is_boundary[e]:
        raise NotBoundary(f"edge {e} is not a boundary edge")
    curves = curves or CurveSystem(tri, weights)
    n, r = quad_arcs(curves, e)
    bd = quad_flip_weight(n, r)
    return bd.weight, bd


def reducible_edges(tri: Triangulation3, weights: Sequence[int],
                    curves: CurveSystem | None = None) -> list[tuple[int, int, int]]:
    curves = curves or CurveSystem(tri, weights)
    out = []
    for e in tri.skeleton.boundary_edges:
        w = weights[e]
        if not w:
            continue
        sides = tri.boundary.edge_sides(e)
        if sides[0][0] == sides[1][0]:
            continue
        new, _ = flip_weight(tri, weights, e, curves)
        if new < w:
            out.append((e, w, new))
    return out
