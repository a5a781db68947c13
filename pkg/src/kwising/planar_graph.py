"""Straight-line planar graphs: faces, subtilings, duals and turning angles.

Vertices carry integer ids and complex positions.  Undirected edges are
stored as sorted id pairs, directed edges as :class:`DirectedEdge`.  The
canonical directed-edge order used for every matrix in the package is
``(tail id, direction angle)`` with angles in ``(-pi, pi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    CrossingEdges,
    DanglingEdge,
    DegenerateEdge,
    GraphError,
    InvalidFace,
    IsolatedVertex,
    NotSimple,
    UnknownFace,
    UnknownVertex,
)

COLLINEAR_EPS = 1e-12

Edge = tuple[int, int]


class DirectedEdge(NamedTuple):
    tail: int
    head: int

    def __neg__(self) -> "DirectedEdge":
        return DirectedEdge(self.head, self.tail)

    @property
    def edge(self) -> Edge:
        return edge_key(self.tail, self.head)


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def principal_arg(z: complex) -> float:
    """Argument of ``z`` in ``(-pi, pi]`` (``atan2`` can return ``-pi`` for ``-0.0``)."""
    a = math.atan2(z.imag, z.real)
    return math.pi if a <= -math.pi else a


def angle_between(d_from: complex, d_to: complex) -> float:
    """Arg(d_to / d_from) computed without division.

    Using ``d_to * conj(d_from)`` makes the result exactly antisymmetric
    under swapping the arguments, which keeps B exactly Hermitian.
    """
    if d_from == 0 or d_to == 0:
        raise DegenerateEdge("zero-length edge direction")
    return principal_arg(d_to * d_from.conjugate())


def signed_area(points: Sequence[complex]) -> float:
    s = 0.0
    n = len(points)
    for k in range(n):
        p, q = points[k], points[(k + 1) % n]
        s += p.real * q.imag - q.real * p.imag
    return 0.5 * s


def point_in_polygon(p: complex, polygon: Sequence[complex]) -> bool:
    inside = False
    n = len(polygon)
    for k in range(n):
        a, b = polygon[k], polygon[(k + 1) % n]
        if (a.imag > p.imag) != (b.imag > p.imag):
            x = a.real + (p.imag - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            if x > p.real:
                inside = not inside
    return inside


def _orient(a: complex, b: complex, c: complex) -> int:
    u, v = b - a, c - a
    cross = u.real * v.imag - u.imag * v.real
    scale = abs(u) * abs(v)
    if abs(cross) <= COLLINEAR_EPS * scale:
        return 0
    return 1 if cross > 0 else -1


def _on_segment(a: complex, b: complex, p: complex) -> bool:
    """p collinear with ab assumed; True if p lies within the closed segment."""
    return (
        min(a.real, b.real) - COLLINEAR_EPS <= p.real <= max(a.real, b.real) + COLLINEAR_EPS
        and min(a.imag, b.imag) - COLLINEAR_EPS <= p.imag <= max(a.imag, b.imag) + COLLINEAR_EPS
    )


def segments_conflict(a: complex, b: complex, c: complex, d: complex, shared: bool) -> bool:
    """True if segments ab and cd meet anywhere other than a shared endpoint.

    With ``shared`` set, ``a == c`` is the common endpoint and only a
    collinear overlap counts.
    """
    if shared:
        if _orient(a, b, d) != 0:
            return False
        # same ray from the shared endpoint means overlap
        u, v = b - a, d - a
        return u.real * v.real + u.imag * v.imag > 0
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def _canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    k = min(range(len(cycle)), key=lambda i: cycle[i])
    return tuple(cycle[k:]) + tuple(cycle[:k])


@dataclass(frozen=True, eq=False)
class EmbeddedGraph:
    """Validated planar graph with straight edges and counterclockwise faces.

    Build instances with :func:`build_graph`; the constructor performs no
    checks.  ``faces`` holds bounded faces only.
    """

    positions: Mapping[int, complex]
    edges: tuple[Edge, ...]
    faces: tuple[tuple[int, ...], ...] = ()

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.positions))

    @cached_property
    def out(self) -> dict[int, tuple[DirectedEdge, ...]]:
        nbrs: dict[int, list[DirectedEdge]] = {v: [] for v in self.positions}
        for a, b in self.edges:
            nbrs[a].append(DirectedEdge(a, b))
            nbrs[b].append(DirectedEdge(b, a))
        return {v: tuple(sorted(es, key=self.direction_angle)) for v, es in nbrs.items()}

    @cached_property
    def directed_edges(self) -> tuple[DirectedEdge, ...]:
        return tuple(e for v in self.vertices for e in self.out[v])

    @cached_property
    def index(self) -> dict[DirectedEdge, int]:
        return {e: k for k, e in enumerate(self.directed_edges)}

    @cached_property
    def face_of_directed(self) -> dict[DirectedEdge, int]:
        """Bounded face lying to the left of each directed edge, where one exists."""
        table = {}
        for f, cycle in enumerate(self.faces):
            n = len(cycle)
            for k in range(n):
                table[DirectedEdge(cycle[k], cycle[(k + 1) % n])] = f
        return table

    @cached_property
    def outer_vertices(self) -> frozenset[int]:
        """Vertices touching the unbounded face."""
        covered = self.face_of_directed
        return frozenset(e.tail for e in self.directed_edges if e not in covered or -e not in covered)

    @cached_property
    def faces_at(self) -> dict[int, frozenset[int]]:
        acc: dict[int, set[int]] = {v: set() for v in self.positions}
        for f, cycle in enumerate(self.faces):
            for v in cycle:
                acc[v].add(f)
        return {v: frozenset(s) for v, s in acc.items()}

    def direction(self, e: DirectedEdge) -> complex:
        return self.positions[e.head] - self.positions[e.tail]

    def direction_angle(self, e: DirectedEdge) -> float:
        return principal_arg(self.direction(e))

    def degree(self, v: int) -> int:
        return len(self.out[v])

    @property
    def max_degree(self) -> int:
        return max((len(es) for es in self.out.values()), default=0)

    @property
    def num_vertices(self) -> int:
        return len(self.positions)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def cw_next(self, v: int, u: int) -> int:
        """Neighbour of ``v`` met first when turning clockwise from the edge v->u."""
        ring = self.out[v]
        k = ring.index(DirectedEdge(v, u))
        return ring[k - 1].head

    def trace_faces(self) -> list[tuple[int, ...]]:
        """All boundary walks of the embedding (bounded ones have positive area)."""
        seen: set[DirectedEdge] = set()
        walks = []
        for start in self.directed_edges:
            if start in seen:
                continue
            walk = []
            e = start
            while e not in seen:
                seen.add(e)
                walk.append(e.tail)
                e = DirectedEdge(e.head, self.cw_next(e.head, e.tail))
            walks.append(tuple(walk))
        return walks

    def face_polygon(self, f: int) -> list[complex]:
        return [self.positions[v] for v in self.faces[f]]


def build_graph(
    vertices: Mapping[int, complex] | Iterable[tuple[int, complex]],
    edges: Iterable[Sequence[int]],
    faces: Iterable[Sequence[int]] = (),
    *,
    complete_faces: bool = True,
) -> EmbeddedGraph:
    """Validate and assemble an :class:`EmbeddedGraph`.

    Checks simplicity, that every edge endpoint exists, that no vertex is
    isolated, that no two segments meet away from a common endpoint, and
    that every face is a counterclockwise boundary walk of the embedding.
    With ``complete_faces`` the faces must also account for every bounded
    boundary walk, so that the remaining directed edges form the unbounded
    face.
    """
    items = vertices.items() if isinstance(vertices, Mapping) else vertices
    positions: dict[int, complex] = {}
    for vid, pos in items:
        vid = int(vid)
        if vid in positions:
            raise NotSimple(f"duplicate vertex id {vid}")
        positions[vid] = complex(pos)
    seen_pos: dict[complex, int] = {}
    for vid, pos in positions.items():
        if not (math.isfinite(pos.real) and math.isfinite(pos.imag)):
            raise GraphError(f"vertex {vid} has a non-finite position")
        if pos in seen_pos:
            raise NotSimple(f"vertices {seen_pos[pos]} and {vid} share position {pos}")
        seen_pos[pos] = vid

    edge_set: set[Edge] = set()
    for pair in edges:
        a, b = (int(v) for v in pair)
        if a not in positions or b not in positions:
            raise DanglingEdge(f"edge ({a}, {b}) has an unknown endpoint")
        if a == b:
            raise NotSimple(f"loop at vertex {a}")
        key = edge_key(a, b)
        if key in edge_set:
            raise NotSimple(f"repeated edge {key}")
        edge_set.add(key)

    degree = dict.fromkeys(positions, 0)
    for a, b in edge_set:
        degree[a] += 1
        degree[b] += 1
    for v, d in degree.items():
        if d == 0:
            raise IsolatedVertex(f"vertex {v} has degree 0")

    edge_list = sorted(edge_set)
    _check_crossings(positions, edge_list)

    graph = EmbeddedGraph(positions, tuple(edge_list), ())
    face_list = [_canonical_cycle([int(v) for v in f]) for f in faces]
    _check_faces(graph, face_list, complete_faces)
    return EmbeddedGraph(positions, tuple(edge_list), tuple(face_list))


def _check_crossings(positions: Mapping[int, complex], edges: Sequence[Edge]) -> None:
    segs = []
    for a, b in edges:
        p, q = positions[a], positions[b]
        box = (min(p.real, q.real), max(p.real, q.real), min(p.imag, q.imag), max(p.imag, q.imag))
        segs.append((a, b, p, q, box))
    segs.sort(key=lambda s: s[4][0])
    tol = COLLINEAR_EPS * max((abs(p) for p in positions.values()), default=1.0) + COLLINEAR_EPS
    for i, (a, b, p, q, box) in enumerate(segs):
        for c, d, r, s, box2 in segs[i + 1:]:
            if box2[0] > box[1] + tol:
                break
            if box2[2] > box[3] + tol or box2[3] < box[2] - tol:
                continue
            common = {a, b} & {c, d}
            if common:
                z = common.pop()
                other1 = b if z == a else a
                other2 = d if z == c else c
                bad = segments_conflict(positions[z], positions[other1], positions[z], positions[other2], True)
            else:
                bad = segments_conflict(p, q, r, s, False)
            if bad:
                raise CrossingEdges((a, b), (c, d))


def _check_faces(graph: EmbeddedGraph, faces: list[tuple[int, ...]], complete: bool) -> None:
    used: dict[DirectedEdge, int] = {}
    edge_set = set(graph.edges)
    for f, cycle in enumerate(faces):
        n = len(cycle)
        if n < 3:
            raise InvalidFace(f"face {f} has fewer than 3 vertices")
        for k in range(n):
            u, v, w = cycle[k - 1], cycle[k], cycle[(k + 1) % n]
            if v not in graph.positions:
                raise InvalidFace(f"face {f} uses unknown vertex {v}")
            if edge_key(v, w) not in edge_set:
                raise InvalidFace(f"face {f} uses non-edge ({v}, {w})")
            if graph.cw_next(v, u) != w:
                raise InvalidFace(f"face {f} is not a boundary walk at vertex {v}")
            de = DirectedEdge(v, w)
            if de in used:
                raise InvalidFace(f"directed edge {tuple(de)} lies on faces {used[de]} and {f}")
            used[de] = f
        if signed_area([graph.positions[v] for v in cycle]) <= 0:
            raise InvalidFace(f"face {f} is not counterclockwise (or is the unbounded face)")
    if complete:
        listed = set(faces)
        for walk in graph.trace_faces():
            area = signed_area([graph.positions[v] for v in walk])
            if area > 0 and _canonical_cycle(walk) not in listed:
                raise InvalidFace(f"bounded face {_canonical_cycle(walk)} is missing from the face list")


def out_edges(graph: EmbeddedGraph, z: int) -> list[DirectedEdge]:
    """Edges leaving ``z`` sorted counterclockwise, starting just above angle -pi."""
    if z not in graph.out:
        raise UnknownVertex(z)
    return list(graph.out[z])


def turning_angle(graph: EmbeddedGraph, e: DirectedEdge, g: DirectedEdge) -> float:
    """Turning angle from ``e`` to ``g`` in ``(-pi, pi]``."""
    return angle_between(graph.direction(e), graph.direction(g))


@dataclass(frozen=True, eq=False)
class Subtiling:
    """Face-induced subgraph of an ambient graph together with its boundary."""

    ambient: EmbeddedGraph
    face_ids: tuple[int, ...]
    graph: EmbeddedGraph
    boundary: frozenset[int]

    @property
    def empty(self) -> bool:
        return not self.face_ids

    @cached_property
    def interior(self) -> tuple[int, ...]:
        return tuple(v for v in self.graph.vertices if v not in self.boundary)

    @property
    def boundary_ratio(self) -> float:
        n = self.graph.num_vertices
        return len(self.boundary) / n if n else 0.0


def empty_subtiling(ambient: EmbeddedGraph) -> Subtiling:
    return Subtiling(ambient, (), EmbeddedGraph({}, (), ()), frozenset())


def subtiling(ambient: EmbeddedGraph, face_ids: Iterable[int]) -> Subtiling:
    ids = tuple(sorted(set(int(f) for f in face_ids)))
    if not ids:
        raise UnknownFace("empty face collection")
    for f in ids:
        if not 0 <= f < len(ambient.faces):
            raise UnknownFace(f)
    selected = set(ids)
    verts: set[int] = set()
    edges: set[Edge] = set()
    for f in ids:
        cycle = ambient.faces[f]
        verts.update(cycle)
        for k in range(len(cycle)):
            edges.add(edge_key(cycle[k], cycle[(k + 1) % len(cycle)]))
    outer = ambient.outer_vertices
    boundary = frozenset(
        v for v in verts if v in outer or not ambient.faces_at[v] <= selected
    )
    induced = EmbeddedGraph(
        {v: ambient.positions[v] for v in sorted(verts)},
        tuple(sorted(edges)),
        tuple(ambient.faces[f] for f in ids),
    )
    return Subtiling(ambient, ids, induced, boundary)


def full_subtiling(ambient: EmbeddedGraph) -> Subtiling:
    return subtiling(ambient, range(len(ambient.faces)))


@dataclass(frozen=True, eq=False)
class DualEmbedding:
    """Straight-line dual of the bounded faces of ``primal``.

    Dual vertex ``f`` sits inside primal face ``f``.  Only faces sharing an
    edge with another bounded face appear as dual vertices.  Dual faces
    correspond to primal vertices not touching the unbounded face.
    """

    primal: EmbeddedGraph
    graph: EmbeddedGraph
    pairing: Mapping[Edge, Edge]
    vertex_face: Mapping[int, int]

    @cached_property
    def dual_to_primal(self) -> dict[Edge, Edge]:
        return {d: p for p, d in self.pairing.items()}


def build_dual(primal: EmbeddedGraph, positions: Mapping[int, complex]) -> DualEmbedding:
    for f in range(len(primal.faces)):
        if f not in positions:
            raise GraphError(f"no dual position for face {f}")
        if not point_in_polygon(complex(positions[f]), primal.face_polygon(f)):
            raise GraphError(f"dual vertex {f} lies outside its face")
    left = primal.face_of_directed
    pairing: dict[Edge, Edge] = {}
    for a, b in primal.edges:
        fa, fb = left.get(DirectedEdge(a, b)), left.get(DirectedEdge(b, a))
        if fa is not None and fb is not None:
            pairing[(a, b)] = edge_key(fa, fb)
    used = sorted({f for d in pairing.values() for f in d})
    dual_faces = []
    vertex_face = {}
    for v in primal.vertices:
        if v in primal.outer_vertices:
            continue
        ring = [left[e] for e in primal.out[v]]
        vertex_face[v] = len(dual_faces)
        dual_faces.append(ring)
    try:
        graph = build_graph(
            {f: complex(positions[f]) for f in used},
            list(pairing.values()),
            dual_faces,
        )
    except GraphError as exc:
        raise GraphError(f"dual embedding is invalid: {exc}") from exc
    # build_graph rotates cycles to start at their minimum id; face order is kept
    return DualEmbedding(primal, graph, pairing, vertex_face)


def dual_subtiling(G: Subtiling, dual: DualEmbedding) -> Subtiling:
    """Subtiling of the dual made of the dual faces of the interior vertices of ``G``.

    Returns an empty subtiling when ``G`` has no interior vertex.
    """
    if dual.primal is not G.ambient:
        raise GraphError("dual embedding does not belong to the subtiling's ambient graph")
    if not G.interior:
        return empty_subtiling(dual.graph)
    return subtiling(dual.graph, (dual.vertex_face[v] for v in G.interior))
