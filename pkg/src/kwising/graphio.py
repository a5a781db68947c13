"""Line-oriented text formats for graphs and couplings.

Graph files have up to four sections, each opened by a header line::

    vertices            # id re im
    edges               # a b [theta]
    faces               # counterclockwise vertex cycle
    dual_vertices       # face-index re im

``#`` starts a comment.  Floats are written with ``repr`` so files
round-trip exactly.  Coupling files list ``a b J`` per line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import FormatError
from .ising import CouplingSystem
from .isoradial import IsoradialGraph, isoradial_from_graph
from .planar_graph import DualEmbedding, Edge, EmbeddedGraph, build_dual, build_graph, edge_key

SECTIONS = ("vertices", "edges", "faces", "dual_vertices")


@dataclass
class GraphFile:
    vertices: dict[int, complex] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    faces: list[tuple[int, ...]] = field(default_factory=list)
    theta: dict[Edge, float] = field(default_factory=dict)
    dual_vertices: dict[int, complex] = field(default_factory=dict)

    @property
    def has_dual(self) -> bool:
        return bool(self.dual_vertices)

    @property
    def has_theta(self) -> bool:
        return bool(self.theta) and len(self.theta) == len(self.edges)

    def build(self) -> EmbeddedGraph:
        return build_graph(self.vertices, self.edges, self.faces)

    def build_dual(self, graph: Optional[EmbeddedGraph] = None) -> DualEmbedding:
        graph = graph or self.build()
        return build_dual(graph, self.dual_vertices)

    def isoradial(self, name: str = "file") -> IsoradialGraph:
        """Rebuild an isoradial graph; theta is recomputed and checked against the file."""
        graph = self.build()
        centers = self.dual_vertices
        if not centers:
            raise FormatError("isoradial graphs need dual_vertices (circumcenters)")
        g = isoradial_from_graph(graph, dict(centers), name, self.theta)
        for e, t in self.theta.items():
            if abs(g.theta[e] - t) > 1e-9:
                raise FormatError(f"theta annotation {t} on edge {e} disagrees with geometry {g.theta[e]}")
        return g


def _numbers(tokens, lineno, kinds):
    if len(tokens) not in kinds:
        raise FormatError(f"line {lineno}: expected {' or '.join(map(str, kinds))} fields, got {len(tokens)}")
    return tokens


def parse_graph_text(text: str) -> GraphFile:
    out = GraphFile()
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in SECTIONS:
            section = line
            continue
        tok = line.split()
        try:
            if section == "vertices":
                _numbers(tok, lineno, (3,))
                vid = int(tok[0])
                if vid in out.vertices:
                    raise FormatError(f"line {lineno}: duplicate vertex id {vid}")
                out.vertices[vid] = complex(float(tok[1]), float(tok[2]))
            elif section == "edges":
                _numbers(tok, lineno, (2, 3))
                e = (int(tok[0]), int(tok[1]))
                out.edges.append(e)
                if len(tok) == 3:
                    out.theta[edge_key(*e)] = float(tok[2])
            elif section == "faces":
                out.faces.append(tuple(int(t) for t in tok))
            elif section == "dual_vertices":
                _numbers(tok, lineno, (3,))
                out.dual_vertices[int(tok[0])] = complex(float(tok[1]), float(tok[2]))
            else:
                raise FormatError(f"line {lineno}: data before any section header")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: {exc}") from exc
    if not out.vertices:
        raise FormatError("no vertices section")
    return out


def load_graph_file(path: str | Path) -> GraphFile:
    return parse_graph_text(Path(path).read_text())


def format_graph(
    graph: EmbeddedGraph,
    theta: Optional[dict[Edge, float]] = None,
    dual_positions: Optional[dict[int, complex]] = None,
) -> str:
    lines = ["vertices"]
    for v in graph.vertices:
        p = graph.positions[v]
        lines.append(f"{v} {float(p.real)!r} {float(p.imag)!r}")
    lines.append("edges")
    for a, b in graph.edges:
        lines.append(f"{a} {b} {float(theta[(a, b)])!r}" if theta else f"{a} {b}")
    lines.append("faces")
    for cycle in graph.faces:
        lines.append(" ".join(str(v) for v in cycle))
    if dual_positions:
        lines.append("dual_vertices")
        for f in sorted(dual_positions):
            p = dual_positions[f]
            lines.append(f"{f} {float(p.real)!r} {float(p.imag)!r}")
    return "\n".join(lines) + "\n"


def write_isoradial(path: str | Path, g: IsoradialGraph) -> None:
    Path(path).write_text(format_graph(g.graph, g.theta, g.centers))


def write_graph(path: str | Path, graph: EmbeddedGraph, dual_positions: Optional[dict[int, complex]] = None) -> None:
    Path(path).write_text(format_graph(graph, None, dual_positions))


def load_couplings(path: str | Path) -> CouplingSystem:
    vals = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 3:
            raise FormatError(f"line {lineno}: expected 'a b J'")
        try:
            vals[edge_key(int(tok[0]), int(tok[1]))] = float(tok[2])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return CouplingSystem(vals)


def write_couplings(path: str | Path, J) -> None:
    lines = [f"{a} {b} {float(J[(a, b)])!r}" for a, b in sorted(J)]
    Path(path).write_text("\n".join(lines) + "\n")
