"""Kac-Ward transition matrices, the Hermitian block matrix B and det(Id - Lambda).

All matrices are dense ``complex128`` arrays indexed by the canonical
directed-edge order of the underlying :class:`EmbeddedGraph`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from .errors import MissingWeight, ZeroWeight
from .planar_graph import DirectedEdge, Edge, EmbeddedGraph, Subtiling, angle_between

UndirectedWeights = Mapping[Edge, complex]
DirectedWeights = Mapping[DirectedEdge, complex]
GraphLike = Union[EmbeddedGraph, Subtiling]

KINDS = ("Lambda", "ConjugatedLambda", "B", "T")


def as_graph(G: GraphLike) -> EmbeddedGraph:
    return G.graph if isinstance(G, Subtiling) else G


@dataclass(frozen=True, eq=False)
class KacWardMatrix:
    kind: str
    entries: np.ndarray
    index: tuple[DirectedEdge, ...]

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dump(self, path: str | Path) -> None:
        """Write the matrix row-major, one row per line, as ``re im`` pairs."""
        lines = []
        for row in self.entries:
            lines.append(" ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in row))
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def load_dump(path: str | Path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        vals = [float(t) for t in line.split()]
        rows.append([complex(vals[k], vals[k + 1]) for k in range(0, len(vals), 2)])
    return np.array(rows, dtype=complex).reshape(len(rows), len(rows))


def _undirected(x: UndirectedWeights, e: Edge) -> complex:
    try:
        return complex(x[e])
    except KeyError:
        pass
    try:
        return complex(x[(e[1], e[0])])
    except KeyError:
        raise MissingWeight(f"no weight for edge {e}") from None


def _directed(xd: DirectedWeights, e: DirectedEdge) -> complex:
    try:
        return complex(xd[e])
    except KeyError:
        raise MissingWeight(f"no weight for directed edge {tuple(e)}") from None


def transition_matrix(G: GraphLike, x: UndirectedWeights) -> KacWardMatrix:
    """Lambda(x): weight ``x_e * exp(i/2 * angle(e, g))`` on non-backtracking steps e -> g."""
    graph = as_graph(G)
    idx = graph.index
    out = np.zeros((len(idx), len(idx)), dtype=complex)
    for e, r in idx.items():
        w = _undirected(x, e.edge)
        de = graph.direction(e)
        for g in graph.out[e.head]:
            if g == -e:
                continue
            out[r, idx[g]] = w * cmath.exp(0.5j * angle_between(de, graph.direction(g)))
    return KacWardMatrix("Lambda", out, graph.directed_edges)


def factorize_symmetric(x: UndirectedWeights) -> dict[DirectedEdge, complex]:
    """Split each ``x_e`` into equal principal square roots on both orientations."""
    xd = {}
    for (a, b), w in x.items():
        w = complex(w)
        if w == 0:
            raise ZeroWeight(f"edge {(a, b)} has zero weight")
        r = cmath.sqrt(w)
        xd[DirectedEdge(a, b)] = r
        xd[DirectedEdge(b, a)] = r
    return xd


def induced_weights(xd: DirectedWeights) -> dict[Edge, complex]:
    """Undirected weights ``x_e = xd[e] * xd[-e]`` a directed system factorizes."""
    out = {}
    for e, w in xd.items():
        out[e.edge] = complex(w) * _directed(xd, -e)
    return out


def conjugated_transition_matrix(G: GraphLike, xd: DirectedWeights) -> KacWardMatrix:
    """D^{-1} Lambda(x) D with D = diag(xd); entries ``xd[-e] xd[g] exp(i/2 angle(e, g))``."""
    graph = as_graph(G)
    idx = graph.index
    out = np.zeros((len(idx), len(idx)), dtype=complex)
    for e, r in idx.items():
        w_rev = _directed(xd, -e)
        de = graph.direction(e)
        for g in graph.out[e.head]:
            if g == -e:
                continue
            phase = cmath.exp(0.5j * angle_between(de, graph.direction(g)))
            out[r, idx[g]] = w_rev * _directed(xd, g) * phase
    return KacWardMatrix("ConjugatedLambda", out, graph.directed_edges)


def b_block(graph: EmbeddedGraph, z: int, xd: DirectedWeights) -> np.ndarray:
    """Hermitian block B^z over Out(z) in counterclockwise order."""
    ring = graph.out[z]
    mods = [abs(_directed(xd, e)) for e in ring]
    n = len(ring)
    block = np.zeros((n, n), dtype=complex)
    for i, e in enumerate(ring):
        d_rev = -graph.direction(e)
        for j, g in enumerate(ring):
            if i == j:
                continue
            block[i, j] = mods[i] * mods[j] * cmath.exp(0.5j * angle_between(d_rev, graph.direction(g)))
    return block


def b_matrix(G: GraphLike, xd: DirectedWeights) -> KacWardMatrix:
    """Block-diagonal Hermitian matrix with the same operator norm as Lambda(xd)."""
    graph = as_graph(G)
    idx = graph.index
    out = np.zeros((len(idx), len(idx)), dtype=complex)
    for z in graph.vertices:
        rows = [idx[e] for e in graph.out[z]]
        out[np.ix_(rows, rows)] = b_block(graph, z, xd)
    return KacWardMatrix("B", out, graph.directed_edges)


def kac_ward_operator(G: GraphLike, x: UndirectedWeights) -> KacWardMatrix:
    lam = transition_matrix(G, x)
    return KacWardMatrix("T", np.eye(lam.dim, dtype=complex) - lam.entries, lam.index)


def kac_ward_determinant(G: GraphLike, x: UndirectedWeights) -> complex:
    """det(Id - Lambda(x)) by LU factorisation with partial pivoting."""
    T = kac_ward_operator(G, x).entries
    if T.size == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(T))


def log_kac_ward_determinant(G: GraphLike, x: UndirectedWeights) -> complex:
    """Principal logarithm of det(Id - Lambda(x)): ``ln|det| + i Arg(det)``."""
    T = kac_ward_operator(G, x).entries
    if T.size == 0:
        return 0j
    sign, logabs = np.linalg.slogdet(T)
    return complex(logabs, float(np.angle(sign)))
