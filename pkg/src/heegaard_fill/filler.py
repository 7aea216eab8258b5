"""Combinatorial filling: close a one-vertex handlebody-like triangulation
along a filling bouquet using only layering and folding.

The run has four phases.  Petal-Resolver layers until every petal is a
boundary edge; Quad-Isolator layers until those edges are diagonals of
disjoint quadrilaterals; Wedge-Folder layers over each petal and folds it
shut; Ball-Filler folds the remaining pinched sphere closed.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

from .analysis import order_width
from .bouquet import CurveSystem, FillingBouquet, boundary_genus, flip_weight, reducible_edges, validate
from .errors import InvalidTriangulation, NoReducibleEdge, PreconditionError, UnrootedCurve
from .moves import (
    NEW_EDGE_SLOT,
    EdgeRef,
    LoggedTriangulation,
    edge_class,
    edge_quad,
    edge_realises_closed_curve,
    edge_ref,
    off_diagonal_realises_closed_curve,
)
from .tri_kernel import Triangulation3, canonical_signature, h1, status, triangulation_to_json, vertex_link


class Strategy(str, enum.Enum):
    FIRST = "first"
    GREEDY = "greedy"
    ALL = "all"

    @classmethod
    def parse(cls, value: Strategy | str) -> Strategy:
        return value if isinstance(value, Strategy) else cls(str(value).lower())


PHASES = ("petal-resolver", "quad-isolator", "wedge-folder", "ball-filler")


@dataclass(frozen=True)
class FillState:
    """A triangulation in the middle of a fill.

    ``weights`` is indexed by the current edge classes and only meaningful
    while petals are being resolved.  Resolved petals are kept as edge
    references so they survive folds.
    """

    lt: LoggedTriangulation
    weights: tuple[int, ...]
    resolved: tuple[EdgeRef, ...]
    genus: int
    phase: str = "input"
    choices: tuple[int, ...] = ()

    @property
    def tri(self) -> Triangulation3:
        return self.lt.tri

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def resolved_classes(self) -> list[int]:
        return [edge_class(self.tri, ref) for ref in self.resolved]

    @classmethod
    def start(cls, bouquet: FillingBouquet, lt: LoggedTriangulation | None = None) -> FillState:
        lt = lt or LoggedTriangulation.seeded(bouquet.tri)
        refs = tuple(edge_ref(bouquet.tri, e) for e in sorted(bouquet.resolved))
        return cls(lt, bouquet.weights, refs, bouquet.genus)


# ---------------------------------------------------------------------------
# Petal-Resolver
# ---------------------------------------------------------------------------


def _resolve_step(state: FillState, e: int, curves: CurveSystem) -> FillState:
    new_weight, bd = flip_weight(state.tri, state.weights, e, curves)
    lt, tet = state.lt.layer(e, phase=PHASES[0])
    weights = list(state.weights)
    weights[e] = 0
    weights.append(new_weight)
    if len(weights) != lt.tri.skeleton.num_edges:
        raise AssertionError("layering changed more than one edge class")
    resolved = state.resolved
    if bd.resolving:
        resolved += ((tet, NEW_EDGE_SLOT),)
    rooted_before = sum(sum(fa.r.values()) for fa in curves.faces)
    out = replace(state, lt=lt, weights=tuple(weights), resolved=resolved,
                  choices=state.choices + (e,))
    if __debug__:
        after = CurveSystem(lt.tri, out.weights)
        rooted_after = sum(sum(fa.r.values()) for fa in after.faces)
        assert rooted_after == rooted_before - 2 * bd.resolving, "rooted arc count drifted"
    return out


def _candidates(state: FillState, strategy: Strategy) -> tuple[list[int], CurveSystem]:
    curves = CurveSystem(state.tri, state.weights)
    red = reducible_edges(state.tri, state.weights, curves)
    if not red:
        rooted = sum(sum(fa.r.values()) for fa in curves.faces)
        if rooted == 0:
            raise UnrootedCurve()
        raise NoReducibleEdge(f"no reducible edge although the total weight is {state.total_weight}")
    if strategy is Strategy.FIRST:
        return [red[0][0]], curves
    if strategy is Strategy.GREEDY:
        best = max(w - nw for _, w, nw in red)
        return [next(e for e, w, nw in red if w - nw == best)], curves
    return [e for e, _, _ in red], curves


def resolution_path(state: FillState, strategy: Strategy | str = Strategy.GREEDY) -> Iterator[FillState]:
    """The start state and every state after a resolving layering."""
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.ALL:
        raise ValueError("resolution_path follows a single branch")
    yield state
    while state.total_weight:
        (e,), curves = _candidates(state, strategy)
        state = _resolve_step(state, e, curves)
        yield state


def petal_resolver(state: FillState, strategy: Strategy | str = Strategy.GREEDY,
                   max_branches: int = 10_000) -> FillState | list[FillState]:
    """Layer over reducible edges until the total weight is zero.

    With ``Strategy.ALL`` every sequence of reducible choices is explored
    and the list of terminal states is returned, ordered by choice sequence.
    """
    strategy = Strategy.parse(strategy)
    if strategy is not Strategy.ALL:
        for state in resolution_path(state, strategy):
            pass
        return replace(state, phase=PHASES[0])

    done: list[FillState] = []
    stack = [state]
    while stack:
        cur = stack.pop()
        if not cur.total_weight:
            done.append(replace(cur, phase=PHASES[0]))
            if len(done) > max_branches:
                raise PreconditionError(f"more than {max_branches} resolution branches")
            continue
        edges, curves = _candidates(cur, strategy)
        stack.extend(_resolve_step(cur, e, curves) for e in reversed(edges))
    return sorted(done, key=lambda s: s.choices)


# ---------------------------------------------------------------------------
# Quad-Isolator
# ---------------------------------------------------------------------------


def isolation_labels(tri: Triangulation3, resolved: Sequence[int]) -> dict[int, int]:
    """Depth labels: 0 on petals, then i on the third side of every boundary
    triangle whose other two sides were labelled in earlier rounds."""
    bs = tri.boundary
    labels = {e: 0 for e in resolved}
    i = 1
    while True:
        fresh = {}
        for k in range(bs.num_faces):
            sides = [bs.side_edge[k][x] for x in bs.labels(k)]
            marked = [e in labels for e in sides]
            if sum(marked) == 2:
                third = sides[marked.index(False)]
                fresh.setdefault(third, i)
        if not fresh:
            return labels
        labels.update(fresh)
        i += 1


def petals_isolated(tri: Triangulation3, resolved: Sequence[int]) -> bool:
    """Whether the petals are diagonals of quads with disjoint interiors."""
    seen: set[int] = set()
    for e in resolved:
        faces = {k for k, _ in tri.boundary.edge_sides(e)}
        if len(faces) != 2 or faces & seen:
            return False
        seen |= faces
    return True


def quad_isolator(state: FillState) -> FillState:
    labels = isolation_labels(state.tri, state.resolved_classes())
    by_depth: dict[int, list[EdgeRef]] = {}
    for e, depth in sorted(labels.items()):
        if depth:
            by_depth.setdefault(depth, []).append(edge_ref(state.tri, e))
    lt = state.lt
    for depth in sorted(by_depth, reverse=True):
        for ref in by_depth[depth]:
            lt, _ = lt.layer(edge_class(lt.tri, ref), phase=PHASES[1])
    weights = (0,) * lt.tri.skeleton.num_edges
    return replace(state, lt=lt, weights=weights, phase=PHASES[1])


# ---------------------------------------------------------------------------
# Wedge-Folder
# ---------------------------------------------------------------------------


def wedge_folder(state: FillState) -> FillState:
    """Layer over each petal, then fold across the edge that layering made."""
    lt = state.lt
    for ref in state.resolved:
        lt, tet = lt.layer(edge_class(lt.tri, ref), phase=PHASES[2])
        lt = lt.fold(edge_class(lt.tri, (tet, NEW_EDGE_SLOT)), phase=PHASES[2])
    return replace(state, lt=lt, weights=(0,) * lt.tri.skeleton.num_edges, phase=PHASES[2])


# ---------------------------------------------------------------------------
# Ball-Filler
# ---------------------------------------------------------------------------


def _two_sided(tri: Triangulation3, e: int) -> bool:
    sides = tri.boundary.edge_sides(e)
    return sides[0][0] != sides[1][0]


def _closing_move(tri: Triangulation3, edges) -> tuple[str, int] | None:
    """First fold that keeps the vertex link planar, among ``edges``."""
    edges = [e for e in edges if _two_sided(tri, e)]
    for e in edges:
        if off_diagonal_realises_closed_curve(tri, e):
            return "fold", e
    for e in edges:
        if edge_realises_closed_curve(tri, e):
            return "layer-fold", e
    return None


def _apply_closing(lt: LoggedTriangulation, move: tuple[str, int]) -> LoggedTriangulation:
    kind, e = move
    if kind == "layer-fold":
        lt, tet = lt.layer(e, phase=PHASES[3])
        e = edge_class(lt.tri, (tet, NEW_EDGE_SLOT))
    lt = lt.fold(e, phase=PHASES[3])
    if lt.tri.skeleton.invalid_edges:
        raise AssertionError("a boundary fold produced an invalid edge")
    return lt


def _new_face_edges(tri: Triangulation3, tet: int) -> set[int]:
    sk = tri.skeleton
    # faces 023 and 123 of a freshly layered tetrahedron are the new boundary
    return {sk.edge_of[tet][s] for s in (1, 2, 3, 4, 5)}


def _layer_tracking_vertex(lt: LoggedTriangulation, e: int, v: int):
    """Layer over ``e`` and return the new index of boundary vertex ``v``,
    which must be exactly one end of ``e``."""
    quad = edge_quad(lt.tri, e)
    a1 = quad.labels[0][0]
    end = 0 if lt.tri.boundary.corner_vertex[quad.faces[0]][a1] == v else 1
    lt, tet = lt.layer(e, phase=PHASES[3])
    bs = lt.tri.boundary
    # vertex 0 of the new tetrahedron sits on its face 023 (slot 2), vertex 1 on 123 (slot 3)
    return lt, tet, bs.corner_vertex[bs.face_index[(tet, 2 + end)]][end]


def ball_filler(state: FillState, max_layers: int | None = None) -> FillState:
    lt = state.lt
    budget = max_layers if max_layers is not None else 16 * max(1, lt.tri.size) ** 2
    while lt.tri.boundary.num_faces:
        tri = lt.tri
        move = _closing_move(tri, tri.skeleton.boundary_edges)
        if move is None:
            bs = tri.boundary
            # fewest incident edges first; ties by smallest incident edge class
            def key(v):
                return (bs.vertex_degree(v),
                        min(bs.side_edge[k][exit_] for k, _, _, exit_ in bs.vertex_cycle(v)))
            v = min(range(bs.num_vertices), key=key)
            while move is None:
                cycle = [lt.tri.boundary.side_edge[k][exit_]
                         for k, _, _, exit_ in lt.tri.boundary.vertex_cycle(v)]
                e = next((e for e in cycle if _two_sided(lt.tri, e)), None)
                if e is None or budget <= 0:
                    raise AssertionError("ball filler could not reduce the boundary")
                budget -= 1
                lt, tet, v = _layer_tracking_vertex(lt, e, v)
                move = _closing_move(lt.tri, sorted(_new_face_edges(lt.tri, tet)
                                                    & set(lt.tri.skeleton.boundary_edges)))
        faces_before = lt.tri.boundary.num_faces
        lt = _apply_closing(lt, move)
        if lt.tri.boundary.num_faces != faces_before - 2:
            raise AssertionError("a partial filling must remove exactly two boundary faces")
    return replace(state, lt=lt, weights=(), phase=PHASES[3])


# ---------------------------------------------------------------------------
# The whole algorithm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FillResult:
    state: FillState
    report: dict = field(compare=False)
    branches: tuple[FillState, ...] = field(default=(), compare=False, repr=False)

    @property
    def tri(self) -> Triangulation3:
        return self.state.tri

    @property
    def log(self):
        return self.state.lt.log


def check_fill_input(tri: Triangulation3) -> None:
    sk = tri.skeleton
    if sk.invalid_edges or not status(tri).is_valid:
        raise InvalidTriangulation("the triangulation to fill must be valid")
    if sk.num_vertices != 1:
        raise PreconditionError(f"the triangulation to fill must have one vertex, not {sk.num_vertices}")
    if not status(tri).is_orientable:
        raise PreconditionError("the triangulation to fill must be orientable")
    if len(tri.boundary.components) != 1:
        raise PreconditionError("the triangulation to fill must have exactly one boundary component")
    if boundary_genus(tri) < 1:
        raise PreconditionError("the boundary must have genus at least 1")


def input_digest(tri: Triangulation3, weights: Sequence[int], resolved: Sequence[int]) -> str:
    blob = json.dumps({"triangulation": triangulation_to_json(tri),
                       "weights": list(weights), "resolved": sorted(resolved)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _finish(state: FillState) -> FillState:
    state = quad_isolator(state)
    if not petals_isolated(state.tri, state.resolved_classes()):
        raise AssertionError("petals are not isolated after Quad-Isolator")
    state = wedge_folder(state)
    return ball_filler(state)


def _phase_counts(lt: LoggedTriangulation) -> dict[str, int]:
    counts = dict.fromkeys(PHASES, 0)
    for ev in lt.log.events:
        if ev["kind"] == "layer" and ev.get("phase") in counts:
            counts[ev["phase"]] += 1
    return counts


def fill(tri: Triangulation3 | LoggedTriangulation, weights: Sequence[int],
         resolved: Sequence[int] = (), strategy: Strategy | str = Strategy.GREEDY) -> FillResult:
    """Fill along the bouquet and return a closed one-vertex triangulation."""
    strategy = Strategy.parse(strategy)
    lt = tri if isinstance(tri, LoggedTriangulation) else None
    base = lt.tri if lt else tri
    check_fill_input(base)
    bouquet = validate(base, weights, resolved)
    start = FillState.start(bouquet, lt)

    resolved_states = petal_resolver(start, strategy)
    if strategy is Strategy.ALL:
        finals = tuple(_finish(s) for s in resolved_states)
    else:
        finals = (_finish(resolved_states),)
    final = finals[0]
    out = final.tri
    st = status(out)
    if not (st.is_closed and st.is_valid and st.is_orientable and out.skeleton.num_vertices == 1
            and vertex_link(out, 0).is_sphere):
        raise AssertionError(f"fill produced an unexpected triangulation: {st}")

    report = {
        "input_digest": input_digest(base, bouquet.weights, sorted(bouquet.resolved)),
        "genus": bouquet.genus,
        "tau": bouquet.total_weight,
        "strategy": strategy.value,
        "input_tets": base.size,
        "added": _phase_counts(final.lt),
        "tets": out.size,
        "folds": sum(1 for ev in final.lt.log.events if ev["kind"] == "fold"),
        "order_width": order_width(out, final.lt.log.order).width,
        "h1": str(h1(out)),
        "signature": canonical_signature(out),
        "status": st.as_dict(),
    }
    if strategy is Strategy.ALL:
        report["branches"] = len(finals)
        report["branch_h1"] = sorted({str(h1(s.tri)) for s in finals})
    return FillResult(final, report, finals)
