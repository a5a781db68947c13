"""Closed-form operator norms of conjugated transition matrices.

The norm of Lambda(xd) equals the largest ``xi`` over vertices, where
``xi`` at z solves ``sum(arctan(|xd_e|^2 / s)) = pi/2`` over edges leaving
z.  Dense eigen/singular value routines are provided as the independent
reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import NoConvergence
from .kacward import DirectedWeights, GraphLike, KacWardMatrix, _directed, as_graph

HALF_PI = 0.5 * math.pi
XI_MAX_ITER = 200
CONTRACTIVE_TOL = 1e-12


@dataclass(frozen=True)
class XiQuery:
    vertex: int
    squared_moduli: tuple[float, ...]

    def __post_init__(self):
        if not self.squared_moduli:
            raise ValueError("XiQuery needs at least one edge")
        for a in self.squared_moduli:
            if not (math.isfinite(a) and a > 0):
                raise ValueError(f"squared moduli must be finite and positive, got {a}")


def squared_moduli(G: GraphLike, z: int, xd: DirectedWeights) -> tuple[float, ...]:
    graph = as_graph(G)
    return tuple(abs(_directed(xd, e)) ** 2 for e in graph.out[z])


def charpoly_value(moduli_sq: Sequence[float], t: float) -> float:
    """Re prod (t + i a_k); equals det(t Id - B^z)."""
    prod = 1.0 + 0.0j
    for a in moduli_sq:
        prod *= complex(t, a)
    return prod.real


def charpoly_bz(G: GraphLike, z: int, xd: DirectedWeights, t: float) -> float:
    return charpoly_value(squared_moduli(G, z, xd), t)


def arctan_sum(moduli_sq: Sequence[float], s: float) -> float:
    return math.fsum(math.atan2(a, s) for a in moduli_sq)


def xi_value(moduli_sq: Sequence[float]) -> float:
    """Unique s >= 0 with ``sum(arctan(a / s)) == pi/2``; 0 for a single edge.

    Bisection on [0, sum(a)]: at s = sum(a) each arctan(a/s) <= a/s so the
    sum is at most 1 < pi/2, while s -> 0 gives degree * pi/2.
    """
    if len(moduli_sq) <= 1:
        return 0.0
    lo, hi = 0.0, math.fsum(moduli_sq)
    if arctan_sum(moduli_sq, hi) > HALF_PI:
        raise NoConvergence("xi bracket invalid")
    for _ in range(XI_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if arctan_sum(moduli_sq, mid) > HALF_PI:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def xi(q: XiQuery) -> float:
    return xi_value(q.squared_moduli)


def vertex_xi(G: GraphLike, xd: DirectedWeights) -> dict[int, float]:
    graph = as_graph(G)
    return {z: xi_value(squared_moduli(graph, z, xd)) for z in graph.vertices}


def operator_norm_conjugated(G: GraphLike, xd: DirectedWeights) -> float:
    """||Lambda(xd)|| computed as the largest per-vertex xi."""
    return max(vertex_xi(G, xd).values(), default=0.0)


def largest_singular_value(M: np.ndarray | KacWardMatrix) -> float:
    A = M.entries if isinstance(M, KacWardMatrix) else np.asarray(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def eigenvalues(M: np.ndarray | KacWardMatrix, residual_tol: float = 1e-8) -> np.ndarray:
    """Full spectrum of a dense square matrix, residual-checked per eigenpair."""
    A = M.entries if isinstance(M, KacWardMatrix) else np.asarray(M, dtype=complex)
    if A.size == 0:
        return np.zeros(0, dtype=complex)
    try:
        vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    scale = np.linalg.norm(A, 2)
    if scale > 0:
        resid = np.linalg.norm(A @ vecs - vecs * vals, axis=0) / np.linalg.norm(vecs, axis=0)
        worst = float(resid.max())
        if worst > residual_tol * scale:
            raise NoConvergence(f"eigenpair residual {worst:.3e} exceeds {residual_tol:g}*||M||")
    return vals


def spectral_radius(M: np.ndarray | KacWardMatrix) -> float:
    vals = eigenvalues(M)
    return float(np.abs(vals).max()) if vals.size else 0.0


@dataclass(frozen=True)
class ContractivityReport:
    contractive: bool
    slack: Mapping[int, float]

    @property
    def min_slack(self) -> float:
        return min(self.slack.values(), default=math.inf)

    def __bool__(self) -> bool:
        return self.contractive


def is_contractive(G: GraphLike, xd: DirectedWeights, tol: float = CONTRACTIVE_TOL) -> ContractivityReport:
    """Check ``sum(arctan|xd_e|^2) <= pi/2`` at every vertex.

    Slack ``pi/2 - sum`` is reported per vertex; equality cases land within
    rounding of zero, so slack down to ``-tol`` still counts as contractive.
    """
    graph = as_graph(G)
    slack = {}
    for z in graph.vertices:
        slack[z] = HALF_PI - math.fsum(math.atan(a) for a in squared_moduli(graph, z, xd))
    return ContractivityReport(all(s >= -tol for s in slack.values()), slack)
