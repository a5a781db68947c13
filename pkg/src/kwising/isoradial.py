"""Isoradial graphs with unit circumradius and their self-dual Z-invariant couplings.

Each edge e is the diagonal of a unit rhombus whose other diagonal is the
dual edge; ``theta[e]`` is the angle between e and a side of that rhombus,
so ``|e| = 2 cos(theta)`` and ``theta[e] + theta[e*] = pi/2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import AngleOutOfBounds, FormatError, GraphError, NotRhombic
from .ising import CouplingSystem
from .planar_graph import (
    DirectedEdge,
    DualEmbedding,
    Edge,
    EmbeddedGraph,
    Subtiling,
    angle_between,
    build_dual,
    build_graph,
    edge_key,
    full_subtiling,
    signed_area,
)

RADIUS_TOL = 1e-9
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True, eq=False)
class IsoradialGraph:
    graph: EmbeddedGraph
    theta: dict[Edge, float]
    dual: DualEmbedding
    centers: dict[int, complex]
    name: str = "isoradial"

    @cached_property
    def subtiling(self) -> Subtiling:
        return full_subtiling(self.graph)

    @cached_property
    def dual_theta(self) -> dict[Edge, float]:
        return {d: 0.5 * math.pi - self.theta[p] for p, d in self.dual.pairing.items()}

    def angle_sums(self) -> dict[int, float]:
        """Sum of theta over edges at each vertex (pi at interior vertices)."""
        sums = {v: 0.0 for v in self.graph.vertices}
        for (a, b), t in self.theta.items():
            sums[a] += t
            sums[b] += t
        return sums

    @property
    def angle_range(self) -> tuple[float, float]:
        return min(self.theta.values()), max(self.theta.values())


def circumcenter(points: Sequence[complex]) -> complex:
    a, b, c = points[0], points[1], points[2]
    d = 2 * ((a.real * (b.imag - c.imag)) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    if d == 0:
        raise GraphError("collinear face vertices")
    ux = (abs(a) ** 2 * (b.imag - c.imag) + abs(b) ** 2 * (c.imag - a.imag) + abs(c) ** 2 * (a.imag - b.imag)) / d
    uy = (abs(a) ** 2 * (c.real - b.real) + abs(b) ** 2 * (a.real - c.real) + abs(c) ** 2 * (b.real - a.real)) / d
    return complex(ux, uy)


def _key(z: complex) -> tuple[float, float]:
    return (round(z.imag, 9) + 0.0, round(z.real, 9) + 0.0)


def _edge_theta(graph: EmbeddedGraph, e: Edge, center: complex) -> float:
    """Angle at one endpoint between the edge and the rhombus side towards ``center``."""
    a, b = e
    pa = graph.positions[a]
    theta = abs(angle_between(graph.positions[b] - pa, center - pa))
    half_diag = 0.5 * abs(graph.positions[b] - pa)
    if abs(math.cos(theta) - half_diag) > RADIUS_TOL:
        raise NotRhombic(f"edge {e}: angle {theta} disagrees with half-diagonal {half_diag}")
    return theta


def from_polygons(polygons: Iterable[Sequence[complex]], name: str = "isoradial") -> IsoradialGraph:
    """Assemble an isoradial graph from face polygons inscribed in unit circles."""
    polys = [[complex(p) for p in poly] for poly in polygons]
    keys = sorted({_key(p) for poly in polys for p in poly})
    ids = {k: i for i, k in enumerate(keys)}
    positions = {}
    for poly in polys:
        for p in poly:
            positions.setdefault(ids[_key(p)], p)
    faces, edges, centers = [], set(), {}
    for poly in polys:
        if signed_area(poly) < 0:
            poly = poly[::-1]
        cycle = [ids[_key(p)] for p in poly]
        c = circumcenter(poly)
        for p in poly:
            if abs(abs(p - c) - 1.0) > RADIUS_TOL:
                raise GraphError(f"face with vertex {p} is not inscribed in a unit circle")
        centers[len(faces)] = c
        faces.append(cycle)
        for k in range(len(cycle)):
            edges.add(edge_key(cycle[k], cycle[(k + 1) % len(cycle)]))
    graph = build_graph(positions, sorted(edges), faces)
    # build_graph keeps face order, so face f still has center centers[f]
    return isoradial_from_graph(graph, centers, name)


def isoradial_from_graph(
    graph: EmbeddedGraph,
    centers: dict[int, complex],
    name: str,
    fallback: Optional[dict[Edge, float]] = None,
) -> IsoradialGraph:
    """Attach rhombus angles; edges on no bounded face take theta from ``fallback``."""
    dual = build_dual(graph, centers)
    left = graph.face_of_directed
    theta = {}
    for a, b in graph.edges:
        f = left.get(DirectedEdge(a, b), left.get(DirectedEdge(b, a)))
        if f is not None:
            theta[(a, b)] = _edge_theta(graph, (a, b), centers[f])
        elif fallback is not None and (a, b) in fallback:
            theta[(a, b)] = fallback[(a, b)]
        else:
            raise GraphError(f"edge {(a, b)} lies on no bounded face; its rhombus angle is unknown")
    return IsoradialGraph(graph, theta, dual, dict(centers), name)


def square_patch(n: int) -> IsoradialGraph:
    """n x n faces of the square lattice, edge length sqrt(2), theta = pi/4."""
    if n < 1:
        raise ValueError("n must be >= 1")
    polys = []
    for b in range(n):
        for a in range(n):
            p = SQRT2 * complex(a, b)
            polys.append([p, p + SQRT2, p + SQRT2 * complex(1, 1), p + SQRT2 * 1j])
    return from_polygons(polys, f"square{n}")


def triangular_patch(n: int) -> IsoradialGraph:
    """Rhombus-shaped block of 2 n^2 equilateral triangles, theta = pi/6."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u, w = SQRT3, SQRT3 * cmath.exp(1j * math.pi / 3)
    polys = []
    for b in range(n):
        for a in range(n):
            p = a * u + b * w
            polys.append([p, p + u, p + w])
            polys.append([p + u, p + u + w, p + w])
    return from_polygons(polys, f"tri{n}")


def hexagonal_patch(n: int) -> IsoradialGraph:
    """Rhombus-shaped block of n^2 regular hexagons with unit sides, theta = pi/3."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u, w = SQRT3, SQRT3 * cmath.exp(1j * math.pi / 3)
    corners = [cmath.exp(1j * (math.pi / 6 + k * math.pi / 3)) for k in range(6)]
    polys = []
    for b in range(n):
        for a in range(n):
            c = a * u + b * w
            polys.append([c + z for z in corners])
    return from_polygons(polys, f"hex{n}")


GENERATORS = {"square": square_patch, "tri": triangular_patch, "hex": hexagonal_patch}


# ------------------------------------------------------------ rhombic files

def strip_rhombi(alphas: Sequence[float], rows: int) -> list[tuple[complex, complex, complex, complex]]:
    """Columns of unit rhombi with vertical sides; column k has opening angle ``alphas[k]``.

    Each rhombus is listed primal, dual, primal, dual, with primal vertices
    on the even sublattice.
    """
    xs = [0j]
    for alpha in alphas:
        xs.append(xs[-1] + cmath.exp(1j * (0.5 * math.pi - alpha)))

    def P(a: int, b: int) -> complex:
        return xs[a] + 1j * b

    out = []
    for a in range(len(alphas)):
        for b in range(rows):
            if (a + b) % 2 == 0:
                out.append((P(a, b), P(a + 1, b), P(a + 1, b + 1), P(a, b + 1)))
            else:
                out.append((P(a + 1, b), P(a + 1, b + 1), P(a, b + 1), P(a, b)))
    return out


def rhombi_of(g: IsoradialGraph) -> list[tuple[complex, complex, complex, complex]]:
    """Rhombi of an isoradial graph; boundary edges get the reflected circumcenter."""
    pos = g.graph.positions
    left = g.graph.face_of_directed
    out = []
    for a, b in g.graph.edges:
        pa, pb = pos[a], pos[b]
        fl, fr = left.get(DirectedEdge(a, b)), left.get(DirectedEdge(b, a))
        cl = g.centers.get(fl)
        cr = g.centers.get(fr)
        if cl is None:
            cl = _reflect(cr, pa, pb)
        if cr is None:
            cr = _reflect(cl, pa, pb)
        out.append((pa, cr, pb, cl))
    return out


def _reflect(c: complex, a: complex, b: complex) -> complex:
    d = (b - a) / abs(b - a)
    rel = (c - a) / d
    return a + rel.conjugate() * d


def write_rhombic_file(path: str | Path, rhombi: Iterable[Sequence[complex]]) -> None:
    lines = ["rhombi"]
    for rh in rhombi:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in rh))
    Path(path).write_text("\n".join(lines) + "\n")


def read_rhombic_file(path: str | Path) -> list[tuple[complex, ...]]:
    rhombi = []
    section = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "rhombi":
            section = line
            continue
        if section != "rhombi":
            raise FormatError(f"line {lineno}: data outside a 'rhombi' section")
        vals = line.split()
        if len(vals) != 8:
            raise FormatError(f"line {lineno}: expected 8 numbers, got {len(vals)}")
        try:
            nums = [float(v) for v in vals]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        rhombi.append(tuple(complex(nums[k], nums[k + 1]) for k in range(0, 8, 2)))
    return rhombi


def from_rhombi(
    rhombi: Iterable[Sequence[complex]],
    k: Optional[float] = None,
    K: Optional[float] = None,
    name: str = "rhombic",
) -> IsoradialGraph:
    """Isoradial graph from unit rhombi listed as (primal, dual, primal, dual).

    Primal faces are the dual points completely surrounded by rhombi.
    """
    rh = [tuple(complex(z) for z in r) for r in rhombi]
    for r in rh:
        if len(r) != 4:
            raise NotRhombic("a rhombus needs 4 vertices")
        sides = [abs(r[(i + 1) % 4] - r[i]) for i in range(4)]
        if any(abs(s - 1.0) > RADIUS_TOL for s in sides):
            raise NotRhombic(f"rhombus {r} has side lengths {sides}, expected 1")
    primal_keys = sorted({_key(r[i]) for r in rh for i in (0, 2)})
    dual_keys = {_key(r[i]) for r in rh for i in (1, 3)}
    clash = dual_keys & set(primal_keys)
    if clash:
        raise NotRhombic(f"point {clash.pop()} is used as both primal and dual vertex")
    ids = {kk: i for i, kk in enumerate(primal_keys)}
    positions = {}
    edges = set()
    rhombus_theta = {}
    around: dict[tuple[float, float], list[tuple[complex, tuple[complex, ...]]]] = {}
    for r in rh:
        for i in (0, 2):
            positions.setdefault(ids[_key(r[i])], r[i])
        e = edge_key(ids[_key(r[0])], ids[_key(r[2])])
        edges.add(e)
        rhombus_theta[e] = abs(angle_between(r[2] - r[0], r[1] - r[0]))
        for i in (1, 3):
            around.setdefault(_key(r[i]), []).append((r[i], r))
    faces, centers = [], {}
    for dk in sorted(around):
        entries = around[dk]
        d = entries[0][0]
        total = 0.0
        corners = set()
        for _, r in entries:
            total += abs(angle_between(r[0] - d, r[2] - d))
            corners.update((ids[_key(r[0])], ids[_key(r[2])]))
        if abs(total - 2 * math.pi) > 1e-7:
            continue
        cycle = sorted(corners, key=lambda v: cmath.phase(positions[v] - d))
        centers[len(faces)] = d
        faces.append(cycle)
    graph = build_graph(positions, sorted(edges), faces)
    g = isoradial_from_graph(graph, centers, name, rhombus_theta)
    for e, t in g.theta.items():
        if t <= 0 or t >= math.pi or (k is not None and t < k - 1e-12) or (K is not None and t > K + 1e-12):
            raise AngleOutOfBounds(f"edge {e} has theta={t} outside [{k}, {K}]")
    return g


def rhombic_from_file(path: str | Path, k: Optional[float] = None, K: Optional[float] = None) -> IsoradialGraph:
    return from_rhombi(read_rhombic_file(path), k, K, name=Path(path).stem)


# ------------------------------------------------------------ Z-invariant weights

def zinvariant_couplings(g: IsoradialGraph) -> CouplingSystem:
    """J_e = artanh(tan(theta_e / 2)); edges with theta >= pi/2 are rejected."""
    vals = {}
    for e, t in g.theta.items():
        if not 0 < t < 0.5 * math.pi:
            raise AngleOutOfBounds(f"edge {e}: theta={t} gives tan(theta/2) >= 1, no finite coupling")
        vals[e] = math.atanh(math.tan(0.5 * t))
    lo, hi = g.angle_range
    m = math.atanh(math.tan(0.5 * lo))
    M = math.atanh(math.tan(0.5 * hi))
    return CouplingSystem(vals, min(m, min(vals.values())), max(M, max(vals.values())))


def zinvariant_factorization(g: IsoradialGraph) -> dict[DirectedEdge, complex]:
    """Directed weights sqrt(tan(theta_e/2)) on both orientations of every edge."""
    out = {}
    for (a, b), t in g.theta.items():
        w = complex(math.sqrt(math.tan(0.5 * t)))
        out[DirectedEdge(a, b)] = w
        out[DirectedEdge(b, a)] = w
    return out


def zinvariant_dual_factorization(g: IsoradialGraph) -> dict[DirectedEdge, complex]:
    """sqrt(tan(theta_{e*}/2)) on the dual edges; a factorization of exp(-2J)."""
    out = {}
    for (a, b), t in g.dual_theta.items():
        w = complex(math.sqrt(math.tan(0.5 * t)))
        out[DirectedEdge(a, b)] = w
        out[DirectedEdge(b, a)] = w
    return out
