"""Layering and folding moves, construction logs and layered handlebodies."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import NotBoundary, SameFace, UnsupportedSpine
from .tri_kernel import (
    FACE_VERTICES,
    Triangulation3,
    TriangulationEditor,
    h1,
    is_orientable,
    is_valid,
    perm_from_face_map,
    triangulation_from_json,
    triangulation_to_json,
)

# A stable name for an edge: one of its (tetrahedron, edge slot) embeddings.
# Tetrahedra are never deleted, so a reference survives every later move.
EdgeRef = tuple[int, int]

NEW_EDGE_SLOT = 5  # edge 23 of a freshly layered tetrahedron


def edge_ref(tri: Triangulation3, e: int) -> EdgeRef:
    return tri.skeleton.edge_rep(e)


def edge_class(tri: Triangulation3, ref: EdgeRef) -> int:
    return tri.skeleton.edge_of[ref[0]][ref[1]]


@dataclass(frozen=True)
class EdgeQuad:
    """The two boundary faces on either side of a boundary edge.

    ``labels[i] = (a, b, c)`` gives, in the tetrahedron labels of face
    ``faces[i]``, the start and end of the edge and the opposite corner;
    the ends match across the two faces.
    """

    edge: int
    faces: tuple[int, int]
    slots: tuple[tuple[int, int], tuple[int, int]]
    labels: tuple[tuple[int, int, int], tuple[int, int, int]]


def edge_quad(tri: Triangulation3, e: int, *, allow_same_face: bool = False) -> EdgeQuad:
    sk = tri.skeleton
    if not 0 <= e < sk.num_edges or not sk.edge_is_boundary[e]:
        raise NotBoundary(f"edge {e} is not a boundary edge")
    bs = tri.boundary
    sides = sorted(bs.edge_sides(e))
    (k1, x1) = sides[0]
    a1, b1 = (y for y in bs.labels(k1) if y != x1)
    glue = bs.sides[k1][x1]
    k2 = glue.face
    a2, b2 = glue.image(a1), glue.image(b1)
    x2 = next(y for y in bs.labels(k2) if y not in (a2, b2))
    if k1 == k2 and not allow_same_face:
        raise SameFace(f"both sides of edge {e} lie in boundary face {k1}")
    return EdgeQuad(
        edge=e,
        faces=(k1, k2),
        slots=(bs.faces[k1], bs.faces[k2]),
        labels=((a1, b1, x1), (a2, b2, x2)),
    )


def layer_over_boundary_edge(tri: Triangulation3, e: int) -> tuple[Triangulation3, int]:
    """Attach a tetrahedron whose edge 01 covers ``e``; its edge 23 is the
    flipped diagonal.  Returns the new triangulation and tetrahedron index."""
    quad = edge_quad(tri, e)
    ed = tri.editor()
    new = ed.add_tetrahedron()
    for face, slot, image in zip((0, 1), quad.slots, quad.labels):
        ed.join(new, face, slot[0], perm_from_face_map(face, image))
    return ed.freeze(), new


def fold_across(tri: Triangulation3, e: int) -> Triangulation3:
    """Identify the two boundary faces beside ``e``, fixing ``e`` pointwise."""
    quad = edge_quad(tri, e)
    (t1, f1), (t2, _) = quad.slots
    mapping = dict(zip(quad.labels[0], quad.labels[1]))
    ed = tri.editor()
    ed.join(t1, f1, t2, perm_from_face_map(f1, [mapping[v] for v in FACE_VERTICES[f1]]))
    return ed.freeze()


def edge_realises_closed_curve(tri: Triangulation3, e: int) -> bool:
    quad = edge_quad(tri, e, allow_same_face=True)
    k = quad.faces[0]
    a, b, _ = quad.labels[0]
    cv = tri.boundary.corner_vertex[k]
    return cv[a] == cv[b]


def off_diagonal_realises_closed_curve(tri: Triangulation3, e: int) -> bool:
    quad = edge_quad(tri, e)
    bs = tri.boundary
    return (bs.corner_vertex[quad.faces[0]][quad.labels[0][2]]
            == bs.corner_vertex[quad.faces[1]][quad.labels[1][2]])


# ---------------------------------------------------------------------------
# Construction logs
# ---------------------------------------------------------------------------


@dataclass
class ConstructionLog:
    order: list[int] = field(default_factory=list)
    events: list[dict[str, Any]] = field(default_factory=list)

    def copy(self) -> ConstructionLog:
        return ConstructionLog(list(self.order), copy.deepcopy(self.events))

    def to_json(self) -> dict[str, Any]:
        return {"order": list(self.order), "events": copy.deepcopy(self.events)}

    @classmethod
    def from_json(cls, data: dict[str, Any] | str) -> ConstructionLog:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(list(data["order"]), list(data["events"]))


@dataclass(frozen=True)
class LoggedTriangulation:
    tri: Triangulation3
    log: ConstructionLog

    @classmethod
    def seeded(cls, tri: Triangulation3, description: dict[str, Any] | None = None) -> LoggedTriangulation:
        desc = description or {"type": "table", "triangulation": triangulation_to_json(tri)}
        log = ConstructionLog(list(range(tri.size)), [
            {"kind": "seed", "description": desc, "tets": list(range(tri.size))}
        ])
        return cls(tri, log)

    def layer(self, e: int, phase: str | None = None) -> tuple[LoggedTriangulation, int]:
        ref = edge_ref(self.tri, e)
        tri, new = layer_over_boundary_edge(self.tri, e)
        log = self.log.copy()
        log.order.append(new)
        event = {"kind": "layer", "edge": list(ref), "tet": new}
        if phase:
            event["phase"] = phase
        log.events.append(event)
        return LoggedTriangulation(tri, log), new

    def fold(self, e: int, phase: str | None = None) -> LoggedTriangulation:
        ref = edge_ref(self.tri, e)
        tri = fold_across(self.tri, e)
        log = self.log.copy()
        event = {"kind": "fold", "edge": list(ref)}
        if phase:
            event["phase"] = phase
        log.events.append(event)
        return LoggedTriangulation(tri, log)


def add_layers(lt: LoggedTriangulation, edges: Iterable[int]) -> LoggedTriangulation:
    """Layer over each edge in turn; indices refer to the state at that turn."""
    for e in edges:
        lt, _ = lt.layer(e, phase="extra")
    return lt


def replay(log: ConstructionLog | dict[str, Any]) -> Triangulation3:
    """Rebuild a triangulation from its seed and the recorded moves."""
    if isinstance(log, dict):
        log = ConstructionLog.from_json(log)
    events = iter(log.events)
    seed = next(events)
    if seed.get("kind") != "seed":
        raise ValueError("a construction log must start with its seed")
    desc = seed["description"]
    if desc["type"] == "handlebody":
        tri = build_minimal_layered_handlebody(int(desc["genus"])).tri
    elif desc["type"] == "table":
        tri = triangulation_from_json(desc["triangulation"])
    else:
        raise ValueError(f"unknown seed type {desc['type']!r}")
    for ev in events:
        e = edge_class(tri, tuple(ev["edge"]))
        if ev["kind"] == "layer":
            tri, new = layer_over_boundary_edge(tri, e)
            if new != ev["tet"]:
                raise ValueError("replayed layering produced a different tetrahedron index")
        elif ev["kind"] == "fold":
            tri = fold_across(tri, e)
        else:
            raise ValueError(f"unknown event kind {ev['kind']!r}")
    return tri


# ---------------------------------------------------------------------------
# Spines and minimal layered handlebodies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpineSpec:
    """A one-vertex surface triangulation with a single boundary edge.

    Only the ``"fan"`` family is built in: a (2g+1)-gon with boundary word
    a1 a1 a2 a2 ... ag ag c, coned from one corner.
    """

    genus: int
    choice: str = "fan"


@dataclass(frozen=True)
class Spine:
    """Triangles carry local labels 0, 1, 2; sides are named by the
    opposite label.  ``gluings`` pair sides with a label map."""

    triangles: int
    gluings: tuple[tuple[tuple[int, int], tuple[int, int], tuple[tuple[int, int], ...]], ...]
    boundary: tuple[int, int]

    @property
    def euler(self) -> int:
        return 1 - (len(self.gluings) + 1) + self.triangles


def fan_spine(g: int) -> Spine:
    if g < 1:
        raise UnsupportedSpine("spines exist only for genus at least 1")

    def polygon_side(i: int) -> tuple[int, int, tuple[int, int]]:
        # (triangle, opposite label, labels at the side's start and end)
        if i == 0:
            return 0, 2, (0, 1)
        if i == 2 * g:
            return 2 * g - 2, 1, (2, 0)
        return i - 1, 0, (1, 2)

    gluings = []
    for j in range(1, 2 * g - 1):  # diagonals from the cone corner
        gluings.append(((j - 1, 1), (j, 2), ((0, 0), (2, 1))))
    for m in range(g):  # crosscap pairs
        t1, o1, (s1, e1) = polygon_side(2 * m)
        t2, o2, (s2, e2) = polygon_side(2 * m + 1)
        gluings.append(((t1, o1), (t2, o2), ((s1, s2), (e1, e2))))
    t, o, _ = polygon_side(2 * g)
    return Spine(2 * g - 1, tuple(gluings), (t, o))


def _parity3(mapping: dict[int, int]) -> int:
    image = [mapping[i] for i in range(3)]
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if image[i] > image[j])
    return -1 if inv % 2 else 1


class _Scaffold:
    """The boundary of a thickened spine, tracked slot by slot while
    tetrahedra are layered onto it.

    A slot is either one side of a spine triangle, ``("s", j, +1/-1)``, or an
    exposed tetrahedron face ``("t", t, f)``.  Slot sides are named by the
    opposite label and glued with explicit label maps.
    """

    def __init__(self, spine: Spine):
        self.editor = TriangulationEditor()
        self.adj: dict[tuple[Any, int], tuple[Any, int, dict[int, int]]] = {}
        self.edge_id: dict[tuple[Any, int], Any] = {}
        self.attached: dict[Any, tuple[int, int, dict[int, int]]] = {}
        for q, ((j1, o1), (j2, o2), pairs) in enumerate(spine.gluings):
            m = dict(pairs)
            m[o1] = o2
            twisted = _parity3(m) == 1  # even extension reverses orientation
            for lift, sgn in enumerate((1, -1)):
                s1 = ("s", j1, sgn)
                s2 = ("s", j2, -sgn if twisted else sgn)
                self._link((s1, o1), (s2, o2), dict(pairs), (q, lift))
        j, o = spine.boundary
        self._link((("s", j, 1), o), (("s", j, -1), o),
                   {x: x for x in range(3) if x != o}, ("boundary",))

    @staticmethod
    def labels(slot) -> tuple[int, int, int]:
        return (0, 1, 2) if slot[0] == "s" else FACE_VERTICES[slot[2]]

    def _link(self, side1, side2, mapping: dict[int, int], eid) -> None:
        self.adj[side1] = (side2[0], side2[1], dict(mapping))
        self.adj[side2] = (side1[0], side1[1], {b: a for a, b in mapping.items()})
        self.edge_id[side1] = self.edge_id[side2] = eid

    def spine_slots_left(self) -> int:
        slots = {s for s, _ in self.adj}
        return sum(1 for s in slots if s[0] == "s")

    def layer(self, eid) -> None:
        side1 = min(s for s, i in self.edge_id.items() if i == eid)
        s1, x1 = side1
        s2, x2, m = self.adj[side1]
        if s1 == s2:
            raise UnsupportedSpine("scaffold edge borders a single slot")
        a1, b1 = (y for y in self.labels(s1) if y != x1)
        a2, b2 = m[a1], m[b1]
        new = self.editor.add_tetrahedron()
        for face, slot, image in ((0, s1, (a1, b1, x1)), (1, s2, (a2, b2, x2))):
            own = FACE_VERTICES[face]
            if slot[0] == "t":
                self.editor.join(new, face, slot[1], perm_from_face_map(face, image))
            else:
                self.attached[slot] = (new, face, dict(zip(own, image)))
        n1, n2 = ("t", new, 2), ("t", new, 3)
        # old side -> (new side, old label -> new label)
        moved = {
            (s1, b1): ((n1, 3), {a1: 0, x1: 2}),
            (s1, a1): ((n2, 3), {b1: 1, x1: 2}),
            (s2, b2): ((n1, 2), {a2: 0, x2: 3}),
            (s2, a2): ((n2, 2), {b2: 1, x2: 3}),
        }
        fresh = {}
        for old, (nside, tr) in moved.items():
            ps, po, pm = self.adj[old]
            if (ps, po) in moved:
                pside, ptr = moved[(ps, po)]
            else:
                pside, ptr = (ps, po), None
            mapping = {}
            for o_label, n_label in tr.items():
                target = pm[o_label]
                mapping[n_label] = ptr[target] if ptr else target
            fresh[nside] = (pside, mapping, self.edge_id[old])
        for slot in (s1, s2):
            for x in self.labels(slot):
                self.adj.pop((slot, x), None)
                self.edge_id.pop((slot, x), None)
        for nside, (pside, mapping, eid_old) in fresh.items():
            self._link(nside, pside, mapping, eid_old)
        self._link((n1, 0), (n2, 1), {2: 2, 3: 3}, ("new", new))

    def close(self) -> Triangulation3:
        pairs: dict[int, dict[int, tuple[int, int, dict[int, int]]]] = {}
        for (_, j, sgn), att in self.attached.items():
            pairs.setdefault(j, {})[sgn] = att
        for j, sides in sorted(pairs.items()):
            if len(sides) != 2:
                raise UnsupportedSpine(f"spine triangle {j} was not covered on both sides")
            t1, f1, m1 = sides[1]
            t2, f2, m2 = sides[-1]
            back = {v: k for k, v in m2.items()}
            image = [back[m1[v]] for v in FACE_VERTICES[f1]]
            self.editor.join(t1, f1, t2, perm_from_face_map(f1, image))
        return self.editor.freeze()


def _handlebody_ok(tri: Triangulation3, g: int) -> bool:
    sk = tri.skeleton
    if sk.num_vertices != 1 or len(sk.boundary_faces) != 4 * g - 2:
        return False
    if not is_orientable(tri) or not is_valid(tri):
        return False
    group = h1(tri)
    return group.rank == g and not group.torsion


def _spine_layering_plan(spine: Spine, g: int) -> tuple[list[tuple[int, int]], Triangulation3]:
    """Depth-first search for an order of lifts that consumes every spine slot."""
    interior = len(spine.gluings)

    def stranded(scaffold: _Scaffold, done: tuple[int, ...]) -> bool:
        # a spine slot none of whose sides can still be layered over
        live: dict[Any, bool] = {}
        for (slot, _), eid in scaffold.edge_id.items():
            if slot[0] == "s":
                ok = len(eid) == 2 and eid[0] not in done
                live[slot] = live.get(slot, False) or ok
        return not all(live.values())

    def gain(scaffold: _Scaffold, eid) -> int:
        return sum(1 for (slot, _), i in scaffold.edge_id.items()
                   if i == eid and slot[0] == "s")

    def search(scaffold: _Scaffold, done: tuple[int, ...], plan: list[tuple[int, int]]):
        left = interior - len(done)
        if scaffold.spine_slots_left() > 2 * left or stranded(scaffold, done):
            return None
        if left == 0:
            try:
                tri = copy.deepcopy(scaffold).close()
            except UnsupportedSpine:
                return None
            return (plan, tri) if _handlebody_ok(tri, g) else None
        moves = [(q, lift) for q in range(interior) if q not in done for lift in (0, 1)]
        moves.sort(key=lambda mv: -gain(scaffold, mv))
        for q, lift in moves:
            nxt = copy.deepcopy(scaffold)
            try:
                nxt.layer((q, lift))
            except UnsupportedSpine:
                continue
            found = search(nxt, done + (q,), plan + [(q, lift)])
            if found:
                return found
        return None

    found = search(_Scaffold(spine), (), [])
    if found is None:
        raise UnsupportedSpine(f"no layering order realises the genus-{g} spine")
    return found


_HANDLEBODY_CACHE: dict[tuple[int, str], tuple[Triangulation3, tuple[tuple[int, int], ...]]] = {}


def build_minimal_layered_handlebody(spec: SpineSpec | int) -> LoggedTriangulation:
    """One-vertex genus-g handlebody from 3g-2 tetrahedra layered on a spine."""
    if isinstance(spec, int):
        spec = SpineSpec(spec)
    if spec.choice != "fan":
        raise UnsupportedSpine(f"unknown spine family {spec.choice!r}")
    if spec.genus < 1:
        raise UnsupportedSpine("genus must be at least 1")
    key = (spec.genus, spec.choice)
    if key not in _HANDLEBODY_CACHE:
        plan, tri = _spine_layering_plan(fan_spine(spec.genus), spec.genus)
        _HANDLEBODY_CACHE[key] = (tri, tuple(plan))
    tri, plan = _HANDLEBODY_CACHE[key]
    desc = {"type": "handlebody", "genus": spec.genus, "spine": spec.choice,
            "layering": [list(p) for p in plan]}
    return LoggedTriangulation.seeded(tri, desc)


def handlebody_edge_roles(g1: LoggedTriangulation) -> dict[str, int]:
    """For the genus-1 handlebody: which edge class plays which spine role."""
    tri = g1.tri
    if tri.size != 1:
        raise UnsupportedSpine("edge roles are defined for the one-tetrahedron solid torus")
    sk = tri.skeleton
    covered = sk.edge_of[0][0]
    new = sk.edge_of[0][NEW_EDGE_SLOT]
    rest = next(e for e in range(sk.num_edges) if e not in (covered, new))
    return {"spine_interior": covered, "flip": new, "spine_boundary": rest}


def edges_of_faces(tri: Triangulation3, faces: Sequence[int]) -> set[int]:
    bs = tri.boundary
    return {bs.side_edge[k][x] for k in faces for x in bs.labels(k)}
