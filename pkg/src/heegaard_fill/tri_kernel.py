"""Generalized 3-triangulations and their combinatorial invariants.

Tetrahedron vertices are labelled 0..3.  Face slot ``f`` is the face opposite
vertex ``3 - f`` (slots read 012, 013, 023, 123) and edge slots read
01, 02, 03, 12, 13, 23.  A gluing of face slot ``(t, f)`` is a target
tetrahedron together with a permutation ``p`` of {0,1,2,3} sending the
vertices of face ``f`` onto the vertices of the target face.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Iterable, Iterator, Sequence

from .errors import (
    Disconnected,
    InvalidTriangulation,
    MalformedTable,
    NonInvolutiveGluing,
    SelfGluedFace,
)
from .homology import AbelianGroup, homology_group

Perm = tuple[int, int, int, int]

FACE_VERTICES: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
EDGE_VERTICES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_SLOT = {pair: i for i, pair in enumerate(EDGE_VERTICES)}
IDENTITY: Perm = (0, 1, 2, 3)
ALL_PERMS: tuple[Perm, ...] = tuple(permutations(range(4)))  # lexicographic


def face_opposite(v: int) -> int:
    return 3 - v


def face_with(vertices: Iterable[int]) -> int:
    """Face slot spanned by three tetrahedron vertices."""
    missing = 6 - sum(vertices)
    return 3 - missing


def edge_slot(a: int, b: int) -> int:
    return EDGE_SLOT[(a, b) if a < b else (b, a)]


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """The permutation ``x -> p[q[x]]``."""
    return tuple(p[q[i]] for i in range(4))  # type: ignore[return-value]


def inverse(p: Sequence[int]) -> Perm:
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)  # type: ignore[return-value]


def sign(p: Sequence[int]) -> int:
    s = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                s = -s
    return s


def perm_from_face_map(face: int, image: Sequence[int]) -> Perm:
    """Extend the map ``FACE_VERTICES[face][k] -> image[k]`` to a permutation."""
    src = FACE_VERTICES[face]
    p = [-1] * 4
    for a, b in zip(src, image):
        p[a] = b
    p[3 - face] = 6 - sum(image)
    return tuple(p)  # type: ignore[return-value]


@dataclass(frozen=True)
class Gluing:
    tet: int
    perm: Perm


# ---------------------------------------------------------------------------
# Triangulation
# ---------------------------------------------------------------------------


class Triangulation3:
    """An immutable generalized 3-triangulation.

    Derived data (skeleton, boundary surface, links) is computed lazily and
    cached on the instance.  Use :meth:`editor` to derive modified copies.
    """

    def __init__(self, gluings: Sequence[Sequence[Gluing | None]], *, check: bool = True):
        self._gluings: tuple[tuple[Gluing | None, ...], ...] = tuple(
            tuple(row) for row in gluings
        )
        if check:
            self._check()

    def _check(self) -> None:
        n = len(self._gluings)
        for t, row in enumerate(self._gluings):
            if len(row) != 4:
                raise MalformedTable(f"tetrahedron {t} has {len(row)} face slots")
            for f, g in enumerate(row):
                if g is None:
                    continue
                if not 0 <= g.tet < n:
                    raise MalformedTable(f"face {t}:{f} glued to missing tetrahedron {g.tet}")
                if sorted(g.perm) != [0, 1, 2, 3]:
                    raise MalformedTable(f"face {t}:{f} has a bad permutation {g.perm}")
                f2 = face_opposite(g.perm[3 - f])
                if (g.tet, f2) == (t, f):
                    raise SelfGluedFace(f"face {t}:{f} is glued to itself")
                back = self._gluings[g.tet][f2]
                if back is None or back.tet != t or back.perm != inverse(g.perm):
                    raise NonInvolutiveGluing(
                        f"face {t}:{f} -> {g.tet}:{f2} is not matched by the reverse gluing"
                    )

    # -- basic access ---------------------------------------------------

    @property
    def size(self) -> int:
        return len(self._gluings)

    def __len__(self) -> int:
        return len(self._gluings)

    def gluing(self, t: int, f: int) -> Gluing | None:
        return self._gluings[t][f]

    def is_boundary_face(self, t: int, f: int) -> bool:
        return self._gluings[t][f] is None

    def adjacent_face(self, t: int, f: int) -> tuple[int, int, Perm] | None:
        """Target ``(tet, face, perm)`` of face slot ``(t, f)``, or None."""
        g = self._gluings[t][f]
        if g is None:
            return None
        return g.tet, face_opposite(g.perm[3 - f]), g.perm

    @property
    def gluings(self) -> tuple[tuple[Gluing | None, ...], ...]:
        return self._gluings

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Triangulation3) and self._gluings == other._gluings

    def __hash__(self) -> int:
        return hash(self._gluings)

    def __repr__(self) -> str:
        return f"Triangulation3(size={self.size}, boundary_faces={len(self.skeleton.boundary_faces)})"

    def editor(self) -> TriangulationEditor:
        return TriangulationEditor(self)

    # -- derived data ---------------------------------------------------

    @cached_property
    def skeleton(self) -> Skeleton:
        return _compute_skeleton(self)

    @cached_property
    def boundary(self) -> BoundarySurface:
        return _compute_boundary_surface(self)


class TriangulationEditor:
    """Exclusively owned mutable copy; :meth:`freeze` yields a new snapshot."""

    def __init__(self, base: Triangulation3 | None = None):
        self._rows: list[list[Gluing | None]] = (
            [list(r) for r in base.gluings] if base is not None else []
        )

    @property
    def size(self) -> int:
        return len(self._rows)

    def add_tetrahedron(self) -> int:
        self._rows.append([None, None, None, None])
        return len(self._rows) - 1

    def join(self, t: int, f: int, t2: int, perm: Sequence[int]) -> None:
        perm = tuple(perm)
        f2 = face_opposite(perm[3 - f])
        if (t, f) == (t2, f2):
            raise SelfGluedFace(f"face {t}:{f} cannot be glued to itself")
        if self._rows[t][f] is not None or self._rows[t2][f2] is not None:
            raise ValueError(f"face {t}:{f} or {t2}:{f2} is already glued")
        self._rows[t][f] = Gluing(t2, perm)  # type: ignore[arg-type]
        self._rows[t2][f2] = Gluing(t, inverse(perm))

    def is_boundary_face(self, t: int, f: int) -> bool:
        return self._rows[t][f] is None

    def freeze(self) -> Triangulation3:
        return Triangulation3(self._rows)


# ---------------------------------------------------------------------------
# Skeleton
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Skeleton:
    vertex_of: tuple[tuple[int, ...], ...]
    vertex_classes: tuple[tuple[tuple[int, int], ...], ...]
    edge_of: tuple[tuple[int, ...], ...]
    edge_sign: tuple[tuple[int, ...], ...]
    edge_classes: tuple[tuple[tuple[int, int], ...], ...]
    edge_is_boundary: tuple[bool, ...]
    invalid_edges: frozenset[int]
    triangle_of: tuple[tuple[int, ...], ...]
    triangle_classes: tuple[tuple[tuple[int, int], ...], ...]
    boundary_faces: tuple[tuple[int, int], ...]

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_classes)

    @property
    def num_edges(self) -> int:
        return len(self.edge_classes)

    @property
    def num_triangles(self) -> int:
        return len(self.triangle_classes)

    def edge_rep(self, e: int) -> tuple[int, int]:
        return self.edge_classes[e][0]

    @property
    def boundary_edges(self) -> tuple[int, ...]:
        return tuple(e for e, b in enumerate(self.edge_is_boundary) if b)

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        t, s = self.edge_rep(e)
        a, b = EDGE_VERTICES[s]
        return self.vertex_of[t][a], self.vertex_of[t][b]


def _compute_skeleton(tri: Triangulation3) -> Skeleton:
    n = tri.size

    vertex_of = [[-1] * 4 for _ in range(n)]
    vclasses: list[list[tuple[int, int]]] = []
    for t in range(n):
        for v in range(4):
            if vertex_of[t][v] >= 0:
                continue
            idx = len(vclasses)
            members = []
            vertex_of[t][v] = idx
            queue = deque([(t, v)])
            while queue:
                ct, cv = queue.popleft()
                members.append((ct, cv))
                for f in range(4):
                    if f == face_opposite(cv):
                        continue
                    adj = tri.adjacent_face(ct, f)
                    if adj is None:
                        continue
                    nt, _, p = adj
                    nv = p[cv]
                    if vertex_of[nt][nv] < 0:
                        vertex_of[nt][nv] = idx
                        queue.append((nt, nv))
            vclasses.append(members)

    edge_of = [[-1] * 6 for _ in range(n)]
    edge_sign = [[0] * 6 for _ in range(n)]
    eclasses: list[list[tuple[int, int]]] = []
    invalid: set[int] = set()
    for t in range(n):
        for s in range(6):
            if edge_of[t][s] >= 0:
                continue
            idx = len(eclasses)
            members = []
            edge_of[t][s] = idx
            edge_sign[t][s] = 1
            queue = deque([(t, s)])
            while queue:
                ct, cs = queue.popleft()
                members.append((ct, cs))
                a, b = EDGE_VERTICES[cs]
                for other in range(4):
                    if other in (a, b):
                        continue
                    adj = tri.adjacent_face(ct, face_opposite(other))
                    if adj is None:
                        continue
                    nt, _, p = adj
                    na, nb = p[a], p[b]
                    ns = edge_slot(na, nb)
                    sgn = edge_sign[ct][cs] * (1 if na < nb else -1)
                    if edge_of[nt][ns] < 0:
                        edge_of[nt][ns] = idx
                        edge_sign[nt][ns] = sgn
                        queue.append((nt, ns))
                    elif edge_sign[nt][ns] != sgn:
                        invalid.add(idx)
            eclasses.append(members)

    triangle_of = [[-1] * 4 for _ in range(n)]
    tclasses: list[list[tuple[int, int]]] = []
    bfaces: list[tuple[int, int]] = []
    for t in range(n):
        for f in range(4):
            if triangle_of[t][f] >= 0:
                continue
            idx = len(tclasses)
            triangle_of[t][f] = idx
            adj = tri.adjacent_face(t, f)
            if adj is None:
                tclasses.append([(t, f)])
                bfaces.append((t, f))
            else:
                triangle_of[adj[0]][adj[1]] = idx
                tclasses.append([(t, f), (adj[0], adj[1])])

    on_boundary = [False] * len(eclasses)
    for t, f in bfaces:
        a, b, c = FACE_VERTICES[f]
        for x, y in ((a, b), (a, c), (b, c)):
            on_boundary[edge_of[t][edge_slot(x, y)]] = True

    freeze = lambda rows: tuple(tuple(r) for r in rows)  # noqa: E731
    return Skeleton(
        vertex_of=freeze(vertex_of),
        vertex_classes=freeze(vclasses),
        edge_of=freeze(edge_of),
        edge_sign=freeze(edge_sign),
        edge_classes=freeze(eclasses),
        edge_is_boundary=tuple(on_boundary),
        invalid_edges=frozenset(invalid),
        triangle_of=freeze(triangle_of),
        triangle_classes=freeze(tclasses),
        boundary_faces=tuple(bfaces),
    )


def skeleton(tri: Triangulation3) -> Skeleton:
    return tri.skeleton


# ---------------------------------------------------------------------------
# Boundary surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SideGluing:
    """Boundary face ``face`` glued along a side; ``mapping`` sends this
    face's two side labels to the partner face's labels."""

    face: int
    mapping: tuple[tuple[int, int], tuple[int, int]]

    def image(self, label: int) -> int:
        for a, b in self.mapping:
            if a == label:
                return b
        raise KeyError(label)


@dataclass(frozen=True)
class BoundaryComponent:
    faces: tuple[int, ...]
    vertices: int
    edges: int
    orientable: bool

    @property
    def euler(self) -> int:
        return self.vertices - self.edges + len(self.faces)

    @property
    def genus(self) -> int:
        chi = self.euler
        return (2 - chi) // 2 if self.orientable else 2 - chi


@dataclass(frozen=True)
class BoundarySurface:
    """The boundary 2-triangulation with its own vertex identifications.

    Boundary face ``k`` is the tetrahedron face slot ``faces[k]``; its corners
    are addressed by tetrahedron vertex labels.  Sides are addressed by the
    label of the opposite corner.
    """

    faces: tuple[tuple[int, int], ...]
    sides: tuple[dict[int, SideGluing], ...]
    side_edge: tuple[dict[int, int], ...]
    corner_vertex: tuple[dict[int, int], ...]
    vertex_corners: tuple[tuple[tuple[int, int], ...], ...]
    vertex_of_3d: tuple[int, ...]
    edges: tuple[int, ...]
    components: tuple[BoundaryComponent, ...]
    face_index: dict[tuple[int, int], int] = field(repr=False)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_corners)

    def labels(self, k: int) -> tuple[int, int, int]:
        return FACE_VERTICES[self.faces[k][1]]

    def edge_sides(self, e: int) -> list[tuple[int, int]]:
        """The (face, opposite-corner) sides carrying 3-edge class ``e``."""
        return [
            (k, x)
            for k in range(len(self.faces))
            for x, ee in self.side_edge[k].items()
            if ee == e
        ]

    def vertex_degree(self, v: int) -> int:
        return len(self.vertex_corners[v])

    def vertex_cycle(self, v: int) -> list[tuple[int, int, int, int]]:
        """Corners around boundary vertex ``v`` in cyclic order.

        Entries are ``(face, corner, entry, exit)``; ``entry`` and ``exit``
        name the two sides through the corner by their opposite labels, and
        the walk leaves each corner through ``exit``.
        """
        k0, x0 = self.vertex_corners[v][0]
        a, b = (y for y in self.labels(k0) if y != x0)
        start = (k0, x0, a, b)
        state = start
        out: list[tuple[int, int, int, int]] = []
        while True:
            out.append(state)
            k, x, entry, exit_ = state
            glue = self.sides[k][exit_]
            nx, m = glue.image(x), glue.image(entry)
            r = next(y for y in self.labels(glue.face) if y not in (nx, m))
            state = (glue.face, nx, r, m)
            if state == start:
                return out
            if len(out) > 3 * len(self.faces):
                raise RuntimeError("boundary vertex walk failed to close")


def _compute_boundary_surface(tri: Triangulation3) -> BoundarySurface:
    sk = tri.skeleton
    faces = sk.boundary_faces
    index = {slot: k for k, slot in enumerate(faces)}
    sides: list[dict[int, SideGluing]] = [dict() for _ in faces]
    side_edge: list[dict[int, int]] = [dict() for _ in faces]

    for k, (t0, f0) in enumerate(faces):
        labels = FACE_VERTICES[f0]
        for x in labels:
            a, b = (y for y in labels if y != x)
            side_edge[k][x] = sk.edge_of[t0][edge_slot(a, b)]
            if x in sides[k]:
                continue
            # walk around the edge {a, b} through the interior
            t, f, ca, cb = t0, f0, a, b
            for _ in range(6 * tri.size + 6):
                c, d = (y for y in range(4) if y not in (ca, cb))
                missing = 3 - f
                nf = face_opposite(d if missing == c else c)
                adj = tri.adjacent_face(t, nf)
                if adj is None:
                    t, f = t, nf
                    break
                t, f, p = adj[0], adj[1], adj[2]
                ca, cb = p[ca], p[cb]
            else:  # pragma: no cover - defensive
                raise RuntimeError("edge walk did not terminate")
            k2 = index[(t, f)]
            x2 = next(y for y in FACE_VERTICES[f] if y not in (ca, cb))
            sides[k][x] = SideGluing(k2, ((a, ca), (b, cb)))
            sides[k2][x2] = SideGluing(k, ((ca, a), (cb, b)))

    # corner identifications across glued sides
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for k, (_, f) in enumerate(faces):
        for x in FACE_VERTICES[f]:
            parent[(k, x)] = (k, x)
    for k in range(len(faces)):
        for x, glue in sides[k].items():
            for a, b in glue.mapping:
                ra, rb = find((k, a)), find((glue.face, b))
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

    corner_vertex: list[dict[int, int]] = [dict() for _ in faces]
    vcorners: list[list[tuple[int, int]]] = []
    root_index: dict[tuple[int, int], int] = {}
    for k, (_, f) in enumerate(faces):
        for x in FACE_VERTICES[f]:
            r = find((k, x))
            if r not in root_index:
                root_index[r] = len(vcorners)
                vcorners.append([])
            corner_vertex[k][x] = root_index[r]
            vcorners[root_index[r]].append((k, x))
    vertex_of_3d = tuple(
        sk.vertex_of[faces[c[0][0]][0]][c[0][1]] for c in vcorners
    )
    edges = tuple(sorted({e for d in side_edge for e in d.values()}))

    # connected components and their orientability
    comp_of = [-1] * len(faces)
    comps: list[BoundaryComponent] = []
    for k0 in range(len(faces)):
        if comp_of[k0] >= 0:
            continue
        cid = len(comps)
        comp_of[k0] = cid
        orient = {k0: 1}
        members, orientable = [k0], True
        queue = deque([k0])
        while queue:
            k = queue.popleft()
            labels = FACE_VERTICES[faces[k][1]]
            for x, glue in sides[k].items():
                k2 = glue.face
                # gluing preserves orientation iff the extended label map is odd
                img = {a: b for a, b in glue.mapping}
                l2 = FACE_VERTICES[faces[k2][1]]
                x2 = next(y for y in l2 if y not in img.values())
                img[x] = x2
                src = [labels.index(y) for y in labels]
                dst = [l2.index(img[y]) for y in labels]
                parity = _perm3_sign(src, dst)
                want = -orient[k] * parity
                if k2 not in orient:
                    orient[k2] = want
                    comp_of[k2] = cid
                    members.append(k2)
                    queue.append(k2)
                elif orient[k2] != want:
                    orientable = False
        mset = set(members)
        nv = len({corner_vertex[k][x] for k in mset for x in FACE_VERTICES[faces[k][1]]})
        ne = len({e for k in mset for e in side_edge[k].values()})
        comps.append(BoundaryComponent(tuple(sorted(members)), nv, ne, orientable))

    return BoundarySurface(
        faces=faces,
        sides=tuple(sides),
        side_edge=tuple(side_edge),
        corner_vertex=tuple(corner_vertex),
        vertex_corners=tuple(tuple(c) for c in vcorners),
        vertex_of_3d=vertex_of_3d,
        edges=edges,
        components=tuple(comps),
        face_index=index,
    )


def _perm3_sign(src: Sequence[int], dst: Sequence[int]) -> int:
    mapping = [0] * 3
    for s, d in zip(src, dst):
        mapping[s] = d
    inversions = sum(
        1 for i in range(3) for j in range(i + 1, 3) if mapping[i] > mapping[j]
    )
    return -1 if inversions % 2 else 1


def boundary_surface(tri: Triangulation3) -> BoundarySurface:
    return tri.boundary


# ---------------------------------------------------------------------------
# Vertex links
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkSurface:
    genus: int
    boundary_circles: int
    orientable: bool
    euler: int
    circles: tuple[tuple[tuple[tuple[int, int], int], ...], ...]

    @property
    def is_disc(self) -> bool:
        return self.orientable and self.genus == 0 and self.boundary_circles == 1

    @property
    def is_sphere(self) -> bool:
        return self.orientable and self.genus == 0 and self.boundary_circles == 0


def vertex_link(tri: Triangulation3, v: int) -> LinkSurface:
    sk = tri.skeleton
    corners = sk.vertex_classes[v]

    parent: dict[tuple[int, int, int], tuple[int, int, int]] = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for t, i in corners:
        for k in range(4):
            if k != i:
                parent[(t, i, k)] = (t, i, k)

    interior_sides = boundary_sides = 0
    orient: dict[tuple[int, int], int] = {corners[0]: 1}
    orientable = True
    queue = deque([corners[0]])
    seen = {corners[0]}
    # link triangle at (t, i): sides indexed by the face (opposite j) they lie in
    for t, i in corners:
        for j in range(4):
            if j == i:
                continue
            adj = tri.adjacent_face(t, face_opposite(j))
            if adj is None:
                boundary_sides += 1
                continue
            interior_sides += 1
            nt, _, p = adj
            for k in range(4):
                if k not in (i, j):
                    a, b = find((t, i, k)), find((nt, p[i], p[k]))
                    if a != b:
                        parent[max(a, b)] = min(a, b)
    while queue:
        t, i = queue.popleft()
        for j in range(4):
            if j == i:
                continue
            adj = tri.adjacent_face(t, face_opposite(j))
            if adj is None:
                continue
            nt, _, p = adj
            want = -orient[(t, i)] * sign(p)
            if (nt, p[i]) not in orient:
                orient[(nt, p[i])] = want
                if (nt, p[i]) not in seen:
                    seen.add((nt, p[i]))
                    queue.append((nt, p[i]))
            elif orient[(nt, p[i])] != want:
                orientable = False

    nv = len({find(u) for u in parent})
    ne = interior_sides // 2 + boundary_sides
    nf = len(corners)
    chi = nv - ne + nf

    bs = tri.boundary
    circles = []
    for bv in range(bs.num_vertices):
        if bs.vertex_of_3d[bv] != v:
            continue
        circles.append(
            tuple((bs.faces[k], x) for k, x, _, _ in bs.vertex_cycle(bv))
        )
    b = len(circles)
    genus = (2 - chi - b) // 2 if orientable else 2 - chi - b
    return LinkSurface(genus, b, orientable, chi, tuple(circles))


# ---------------------------------------------------------------------------
# Status and homology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Status:
    is_valid: bool
    is_closed: bool
    is_orientable: bool
    is_one_vertex: bool
    euler_characteristic: int

    def as_dict(self) -> dict[str, object]:
        return {
            "isValid": self.is_valid,
            "isClosed": self.is_closed,
            "isOrientable": self.is_orientable,
            "isOneVertex": self.is_one_vertex,
            "eulerCharacteristic": self.euler_characteristic,
        }


def is_orientable(tri: Triangulation3) -> bool:
    colour: dict[int, int] = {}
    for start in range(tri.size):
        if start in colour:
            continue
        colour[start] = 1
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for f in range(4):
                g = tri.gluing(t, f)
                if g is None:
                    continue
                want = -colour[t] * sign(g.perm)
                if g.tet not in colour:
                    colour[g.tet] = want
                    queue.append(g.tet)
                elif colour[g.tet] != want:
                    return False
    return True


def euler_characteristic(tri: Triangulation3) -> int:
    sk = tri.skeleton
    return sk.num_vertices - sk.num_edges + sk.num_triangles - tri.size


def is_valid(tri: Triangulation3) -> bool:
    sk = tri.skeleton
    if sk.invalid_edges:
        return False
    for v in range(sk.num_vertices):
        link = vertex_link(tri, v)
        if link.boundary_circles == 0:
            continue
        if not link.is_disc:
            return False
    return True


def status(tri: Triangulation3) -> Status:
    sk = tri.skeleton
    return Status(
        is_valid=is_valid(tri),
        is_closed=not sk.boundary_faces,
        is_orientable=is_orientable(tri),
        is_one_vertex=sk.num_vertices == 1,
        euler_characteristic=euler_characteristic(tri),
    )


def boundary_matrices(tri: Triangulation3) -> tuple[list[list[int]], list[list[int]]]:
    """Cellular boundary maps d1 (vertices x edges) and d2 (edges x triangles)."""
    sk = tri.skeleton
    d1 = [[0] * sk.num_edges for _ in range(sk.num_vertices)]
    for e, members in enumerate(sk.edge_classes):
        t, s = members[0]
        a, b = EDGE_VERTICES[s]
        d1[sk.vertex_of[t][b]][e] += 1
        d1[sk.vertex_of[t][a]][e] -= 1
    d2 = [[0] * sk.num_triangles for _ in range(sk.num_edges)]
    for c, members in enumerate(sk.triangle_classes):
        t, f = members[0]
        x, y, z = FACE_VERTICES[f]
        for coeff, (u, w) in ((1, (y, z)), (-1, (x, z)), (1, (x, y))):
            s = edge_slot(u, w)
            d2[sk.edge_of[t][s]][c] += coeff * sk.edge_sign[t][s]
    return d1, d2


def h1(tri: Triangulation3) -> AbelianGroup:
    if not is_valid(tri):
        raise InvalidTriangulation("first homology needs a valid triangulation")
    d1, d2 = boundary_matrices(tri)
    return homology_group(d1, d2, tri.skeleton.num_edges)


# ---------------------------------------------------------------------------
# Canonical signature
# ---------------------------------------------------------------------------


_PERM_INDEX = {p: i for i, p in enumerate(ALL_PERMS)}
_COMPOSE = [[_PERM_INDEX[compose(p, q)] for q in ALL_PERMS] for p in ALL_PERMS]
_INVERSE = [_PERM_INDEX[inverse(p)] for p in ALL_PERMS]
# _FACE_SOURCE[s][nf]: the face whose image under labelling s is face nf
_FACE_SOURCE = [[face_with(inverse(p)[v] for v in FACE_VERTICES[nf]) for nf in range(4)]
                for p in ALL_PERMS]


def _relabel_code(glue_tet, glue_perm, start: int, perm: int,
                  best: list[int] | None) -> list[int] | None:
    """BFS code from ``start`` with vertex labelling ``perm``.

    Returns None as soon as the code is known to exceed ``best``.
    """
    new_index = {start: 0}
    labelling = {start: perm}
    order = [start]
    code: list[int] = []
    tied = best is not None
    pos = 0
    while pos < len(order):
        t = order[pos]
        pos += 1
        sigma = labelling[t]
        sigma_inv = _INVERSE[sigma]
        for nf in range(4):
            old_face = _FACE_SOURCE[sigma][nf]
            u = glue_tet[t][old_face]
            if u < 0:
                c = -1
            else:
                g = glue_perm[t][old_face]
                if u not in new_index:
                    new_index[u] = len(order)
                    order.append(u)
                    labelling[u] = _COMPOSE[sigma][_INVERSE[g]]
                c = new_index[u] * 24 + _COMPOSE[labelling[u]][_COMPOSE[g][sigma_inv]]
            if tied:
                b = best[len(code)]
                if c > b:
                    return None
                if c < b:
                    tied = False
            code.append(c)
    return code


def canonical_signature(tri: Triangulation3) -> str:
    """Relabelling-invariant string; the minimum over all BFS relabellings."""
    n = tri.size
    if n == 0:
        return "0:"
    glue_tet = [[-1] * 4 for _ in range(n)]
    glue_perm = [[0] * 4 for _ in range(n)]
    for t in range(n):
        for f in range(4):
            g = tri.gluing(t, f)
            if g is not None:
                glue_tet[t][f] = g.tet
                glue_perm[t][f] = _PERM_INDEX[tuple(g.perm)]
    first = _relabel_code(glue_tet, glue_perm, 0, 0, None)
    if first is None or len(first) != 4 * n:
        raise Disconnected("canonical signature needs a connected triangulation")
    best = first
    for start in range(n):
        for perm in range(24):
            code = _relabel_code(glue_tet, glue_perm, start, perm, best)
            if code is not None:
                best = code
    body = ".".join("-" if c < 0 else format(c, "x") for c in best)
    return f"{n}:{body}"


def relabel(tri: Triangulation3, tet_order: Sequence[int],
            vertex_perms: Sequence[Sequence[int]]) -> Triangulation3:
    """Copy of ``tri`` where old tetrahedron ``tet_order[i]`` becomes ``i`` and
    its vertex ``v`` becomes ``vertex_perms[old][v]``."""
    n = tri.size
    new_of = {old: new for new, old in enumerate(tet_order)}
    rows: list[list[Gluing | None]] = [[None] * 4 for _ in range(n)]
    for old in range(n):
        sigma = tuple(vertex_perms[old])
        sigma_inv = inverse(sigma)
        for f in range(4):
            g = tri.gluing(old, f)
            nf = face_with(sigma[v] for v in FACE_VERTICES[f])
            if g is None:
                continue
            tau = tuple(vertex_perms[g.tet])
            rows[new_of[old]][nf] = Gluing(new_of[g.tet], compose(tau, compose(g.perm, sigma_inv)))
    return Triangulation3(rows)


# ---------------------------------------------------------------------------
# Dual multigraph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Multigraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    loops: tuple[int, ...] = ()

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError("loops belong in the separate loop list")

    def to_dot(self, name: str = "dual") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  {v};" for v in range(self.num_vertices)]
        lines += [f"  {u} -- {v};" for u, v in self.edges]
        lines += [f"  {v} -- {v} [style=dashed];" for v in self.loops]
        lines.append("}")
        return "\n".join(lines) + "\n"


def dual_multigraph(tri: Triangulation3) -> Multigraph:
    edges: list[tuple[int, int]] = []
    loops: list[int] = []
    for members in tri.skeleton.triangle_classes:
        if len(members) != 2:
            continue
        (a, _), (b, _) = members
        if a == b:
            loops.append(a)
        else:
            edges.append((min(a, b), max(a, b)))
    return Multigraph(tri.size, tuple(edges), tuple(loops))


# ---------------------------------------------------------------------------
# Text and JSON formats
# ---------------------------------------------------------------------------

_ROW = re.compile(r"^\s*tet\s+(\d+)\s*:\s*(.*?)\s*$")
_SLOT = re.compile(r"^(\d+)\(([0-3])([0-3])([0-3])\)$")


def parse_gluing_table(text: str) -> Triangulation3:
    rows: list[list[Gluing | None]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ROW.match(line)
        if not m:
            raise MalformedTable(f"line {lineno}: expected 'tet <i>: <4 slots>'")
        if int(m.group(1)) != len(rows):
            raise MalformedTable(f"line {lineno}: tetrahedra must be numbered 0, 1, 2, ... in order")
        tokens = m.group(2).split()
        if len(tokens) != 4:
            raise MalformedTable(f"line {lineno}: expected 4 face slots, found {len(tokens)}")
        row: list[Gluing | None] = []
        for f, tok in enumerate(tokens):
            if tok == "bdry":
                row.append(None)
                continue
            sm = _SLOT.match(tok)
            if not sm:
                raise MalformedTable(f"line {lineno}: cannot read face slot {tok!r}")
            image = tuple(int(c) for c in sm.group(2, 3, 4))
            if len(set(image)) != 3:
                raise MalformedTable(f"line {lineno}: repeated vertex in {tok!r}")
            row.append(Gluing(int(sm.group(1)), perm_from_face_map(f, image)))
        rows.append(row)
    if not rows:
        raise MalformedTable("empty gluing table")
    return Triangulation3(rows)


def format_gluing_table(tri: Triangulation3) -> str:
    lines = []
    for t in range(tri.size):
        slots = []
        for f in range(4):
            g = tri.gluing(t, f)
            if g is None:
                slots.append("bdry")
            else:
                slots.append(f"{g.tet}(" + "".join(str(g.perm[v]) for v in FACE_VERTICES[f]) + ")")
        lines.append(f"tet {t}: " + " ".join(slots))
    return "\n".join(lines) + "\n"


def triangulation_to_json(tri: Triangulation3) -> dict:
    return {
        "tetrahedra": [
            [None if g is None else {"tet": g.tet, "perm": list(g.perm)} for g in row]
            for row in tri.gluings
        ]
    }


def triangulation_from_json(data: dict | str) -> Triangulation3:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        rows = [
            [None if s is None else Gluing(int(s["tet"]), tuple(int(x) for x in s["perm"])) for s in row]
            for row in data["tetrahedra"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedTable(f"bad triangulation JSON: {exc}") from exc
    return Triangulation3(rows)


def iter_boundary_edges(tri: Triangulation3) -> Iterator[int]:
    yield from tri.skeleton.boundary_edges
