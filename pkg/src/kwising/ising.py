"""Ising partition functions and free energies on subtilings.

Brute-force enumeration and even-subgraph generating functions serve as
oracles for the Kac-Ward determinant formulas.  For complex inverse
temperature only ``Z**2`` and logarithmic quantities are exposed.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import (
    BranchFailure,
    EmptyInterior,
    InvalidBeta,
    MissingWeight,
    NoConvergence,
    NotInRegime,
    TooLarge,
)
from .kacward import (
    GraphLike,
    UndirectedWeights,
    _undirected,
    as_graph,
    factorize_symmetric,
    kac_ward_determinant,
    log_kac_ward_determinant,
    transition_matrix,
)
from .planar_graph import DualEmbedding, Edge, EmbeddedGraph, Subtiling, dual_subtiling, edge_key
from .spectral import operator_norm_conjugated

MAX_BRUTE_SPINS = 24
MAX_CYCLE_RANK = 24
SERIES_TOL = 1e-12
MAX_SERIES_TERMS = 20000
LN2 = math.log(2.0)


class CouplingSystem(Mapping):
    """Ferromagnetic couplings ``J_e`` with bounds ``0 < m <= J_e <= M``."""

    def __init__(self, values: Mapping[Edge, float], m: Optional[float] = None, M: Optional[float] = None):
        vals = {edge_key(*e): float(j) for e, j in values.items()}
        if not vals:
            raise ValueError("empty coupling system")
        lo, hi = min(vals.values()), max(vals.values())
        self.m = lo if m is None else float(m)
        self.M = hi if M is None else float(M)
        if not (0 < self.m <= lo and hi <= self.M < math.inf):
            raise ValueError(f"couplings in [{lo}, {hi}] violate bounds 0 < m={self.m} <= J <= M={self.M}")
        self._values = vals

    def __getitem__(self, e: Edge) -> float:
        return self._values[edge_key(*e)]

    def __iter__(self) -> Iterator[Edge]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"CouplingSystem({len(self)} edges, m={self.m}, M={self.M})"


def constant_couplings(G: GraphLike, J: float) -> CouplingSystem:
    return CouplingSystem({e: J for e in as_graph(G).edges})


def dual_couplings(J: Mapping[Edge, float], dual: DualEmbedding) -> CouplingSystem:
    """Carry couplings from primal edges onto their dual edges."""
    vals = {d: J[p] for p, d in dual.pairing.items() if p in J or (p[1], p[0]) in J}
    m = getattr(J, "m", None)
    M = getattr(J, "M", None)
    return CouplingSystem(vals, m, M)


def _coupling(J: Mapping[Edge, float], e: Edge) -> float:
    try:
        return float(J[e])
    except KeyError:
        raise MissingWeight(f"no coupling for edge {e}") from None


def stable_tanh(z: complex) -> complex:
    z = complex(z)
    if z.real < 0:
        return -stable_tanh(-z)
    q = cmath.exp(-2.0 * z)
    return (1.0 - q) / (1.0 + q)


def principal_log_cosh(z: complex) -> complex:
    """Principal Log cosh(z), evaluated without overflow for large |Re z|."""
    z = complex(z)
    if z.real < 0:
        z = -z
    val = z + cmath.log(1.0 + cmath.exp(-2.0 * z)) - LN2
    im = math.remainder(val.imag, 2 * math.pi)
    if im <= -math.pi:
        im += 2 * math.pi
    return complex(val.real, im)


def high_temperature_weights(G: GraphLike, J: Mapping[Edge, float], beta: complex) -> dict[Edge, complex]:
    return {e: stable_tanh(beta * _coupling(J, e)) for e in as_graph(G).edges}


def low_temperature_weights(dual_sub: Subtiling, J: Mapping[Edge, float], beta: complex, dual: DualEmbedding) -> dict[Edge, complex]:
    """exp(-2 beta J_e) on every dual edge e* of the dual subtiling."""
    back = dual.dual_to_primal
    return {d: cmath.exp(-2.0 * beta * _coupling(J, back[d])) for d in dual_sub.graph.edges}


# ---------------------------------------------------------------- brute force

def partition_bruteforce(G: GraphLike, J: Mapping[Edge, float], beta: complex, bc: str = "free") -> complex:
    """Sum of prod exp(beta J s_z s_w) over all spin configurations."""
    graph = as_graph(G)
    beta = complex(beta)
    if bc == "free":
        free = list(graph.vertices)
        fixed: frozenset[int] = frozenset()
    elif bc == "plus":
        if not isinstance(G, Subtiling):
            raise TypeError("plus boundary conditions need a Subtiling")
        fixed = G.boundary
        free = [v for v in graph.vertices if v not in fixed]
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    n = len(free)
    if n > MAX_BRUTE_SPINS:
        raise TooLarge(f"{n} free spins exceed the brute-force limit {MAX_BRUTE_SPINS}")
    col = {v: k for k, v in enumerate(free)}
    couplings = np.array([_coupling(J, e) for e in graph.edges])
    total_j = float(couplings.sum())
    shift = abs(beta.real) * total_j
    acc = 0j
    chunk = 1 << min(n, 20)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        spins = 1 - 2 * ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)
        energy = np.zeros(len(codes))
        for (a, b), j in zip(graph.edges, couplings):
            sa = spins[:, col[a]] if a in col else 1
            sb = spins[:, col[b]] if b in col else 1
            energy += j * (sa * sb)
        acc += np.exp(beta * energy - shift).sum()
    return complex(cmath.exp(shift) * acc)


# -------------------------------------------------------- even subgraphs

def cycle_basis_masks(graph: EmbeddedGraph) -> list[int]:
    """Fundamental cycles of a BFS spanning forest, as bitmasks over ``graph.edges``."""
    eidx = {e: k for k, e in enumerate(graph.edges)}
    adj: dict[int, list[int]] = {v: [] for v in graph.vertices}
    for a, b in graph.edges:
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[int, Optional[int]] = {}
    depth: dict[int, int] = {}
    tree: set[Edge] = set()
    for root in graph.vertices:
        if root in parent:
            continue
        parent[root], depth[root] = None, 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in parent:
                    parent[w], depth[w] = v, depth[v] + 1
                    tree.add(edge_key(v, w))
                    queue.append(w)
    masks = []
    for e in graph.edges:
        if e in tree:
            continue
        a, b = e
        m = 1 << eidx[e]
        while a != b:
            if depth[a] < depth[b]:
                a, b = b, a
            m ^= 1 << eidx[edge_key(a, parent[a])]
            a = parent[a]
        masks.append(m)
    return masks


def even_subgraph_gf(G: GraphLike, w: UndirectedWeights) -> complex:
    """Sum over even edge subsets of the product of their weights.

    Every even subgraph is a unique XOR-combination of fundamental cycles,
    so 2**rank subsets are visited instead of 2**|E|.
    """
    graph = as_graph(G)
    basis = cycle_basis_masks(graph)
    rank = len(basis)
    if rank > MAX_CYCLE_RANK:
        raise TooLarge(f"cycle space dimension {rank} exceeds {MAX_CYCLE_RANK}")
    weights = [_undirected(w, e) for e in graph.edges]
    nwords = max(1, (len(weights) + 63) // 64)
    words = np.zeros((1, nwords), dtype=np.uint64)
    for m in basis:
        vec = np.array([(m >> (64 * k)) & 0xFFFFFFFFFFFFFFFF for k in range(nwords)], dtype=np.uint64)
        words = np.concatenate([words, words ^ vec])
    total = np.ones(len(words), dtype=complex)
    for k, wk in enumerate(weights):
        word, bit = divmod(k, 64)
        sel = ((words[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        total[sel] *= wk
    return complex(total.sum())


# -------------------------------------------------------- Kac-Ward formulas

def _check_beta(beta: complex) -> complex:
    beta = complex(beta)
    if not beta.real > 0:
        raise InvalidBeta(f"Re beta must be positive, got {beta}")
    return beta


def log_partition_free_squared(G: GraphLike, J: Mapping[Edge, float], beta: complex) -> complex:
    """ln Z_free**2 = 2|V| ln 2 + 2 sum ln cosh(beta J_e) + ln det T(tanh beta J), modulo 2 pi i."""
    beta = _check_beta(beta)
    graph = as_graph(G)
    x = high_temperature_weights(graph, J, beta)
    logcosh = sum(principal_log_cosh(beta * _coupling(J, e)) for e in graph.edges)
    return 2 * graph.num_vertices * LN2 + 2 * logcosh + log_kac_ward_determinant(graph, x)


def partition_free_kw(G: GraphLike, J: Mapping[Edge, float], beta: complex, squared: bool = True) -> complex | float:
    """Z_free**2 from the Kac-Ward determinant; ``squared=False`` returns Z for real beta."""
    beta = _check_beta(beta)
    graph = as_graph(G)
    x = high_temperature_weights(graph, J, beta)
    logcosh = sum(principal_log_cosh(beta * _coupling(J, e)) for e in graph.edges)
    z2 = cmath.exp(2 * graph.num_vertices * LN2 + 2 * logcosh) * kac_ward_determinant(graph, x)
    if squared:
        return z2
    return _positive_root(z2, beta)


def _positive_root(z2: complex, beta: complex) -> float:
    if beta.imag != 0:
        raise InvalidBeta("Z itself is only exposed for real beta; use Z**2 or logarithms")
    return math.sqrt(z2.real)


def partition_plus_kw(
    G: Subtiling, J: Mapping[Edge, float], beta: complex, dual: DualEmbedding, squared: bool = True
) -> complex | float:
    """Z_plus**2 = exp(2 beta sum J_e) det T_{G*}(exp(-2 beta J))."""
    beta = complex(beta)
    gstar = dual_subtiling(G, dual)
    if gstar.empty:
        raise EmptyInterior("subtiling has no interior vertex")
    w = low_temperature_weights(gstar, J, beta, dual)
    total_j = math.fsum(_coupling(J, e) for e in G.graph.edges)
    z2 = cmath.exp(2 * beta * total_j) * kac_ward_determinant(gstar, w)
    if squared:
        return z2
    return _positive_root(z2, beta)


# -------------------------------------------------------- free energy

def log_det_series(M: np.ndarray, s: float, tol: float = SERIES_TOL, extra_terms: int = 0,
                   max_terms: int = MAX_SERIES_TERMS) -> tuple[complex, float, int]:
    """ln det(Id - M) as ``-sum tr(M^r)/r`` for a matrix with spectral radius <= s < 1.

    Terms are added until ``dim * s^(R+1) / ((R+1)(1-s)) < tol``, then
    ``extra_terms`` more.  Returns (value, tail bound after the last term, R).
    """
    n = M.shape[0]
    if n == 0:
        return 0j, 0.0, 0
    if not 0 <= s < 1:
        raise NotInRegime(f"norm bound {s} is not below 1")

    def tail(r: int) -> float:
        return n * s ** (r + 1) / ((r + 1) * (1 - s))

    R = 1
    while tail(R) >= tol:
        R += 1
        if R > max_terms:
            raise NoConvergence(f"trace series needs more than {max_terms} terms (s={s})")
    R += extra_terms
    acc = []
    P = M.copy()
    for r in range(1, R + 1):
        acc.append(np.trace(P) / r)
        if r < R:
            P = P @ M
    re = math.fsum(a.real for a in acc)
    im = math.fsum(a.imag for a in acc)
    return -complex(re, im), tail(R), R


@dataclass(frozen=True)
class FreeEnergyResult:
    beta: complex
    value: complex
    method: str
    log_z: complex
    truncation_error: Optional[float] = None

    def __post_init__(self):
        if (self.truncation_error is not None) != (self.method == "trace-series"):
            raise ValueError("truncation error is reported exactly for the trace-series method")


METHODS = ("brute", "determinant", "trace-series")


def free_energy_density(
    G: Subtiling,
    J: Mapping[Edge, float],
    beta: complex,
    bc: str = "free",
    method: str = "determinant",
    *,
    dual: Optional[DualEmbedding] = None,
    norm_bound: Optional[float] = None,
    tol: float = SERIES_TOL,
) -> FreeEnergyResult:
    """f = -ln Z / (beta |V(G)|) by enumeration, determinant or trace series.

    The trace series needs a certified bound ``s < 1`` on the spectral
    radius of the relevant transition matrix; by default it is the
    closed-form norm of the symmetric factorization of the current weights.
    For complex beta the series gives the analytic continuation with the
    principal branch of ln cosh; ``truncation_error`` is the series tail
    bound on ln det.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if bc not in ("free", "plus"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    beta = complex(beta)
    graph = as_graph(G)
    nv = graph.num_vertices
    tail = None
    if method == "brute":
        if beta.imag != 0 or beta.real == 0:
            raise InvalidBeta("brute-force free energy needs real nonzero beta")
        log_z = complex(math.log(partition_bruteforce(G, J, beta, bc).real))
    elif method == "determinant":
        if beta.imag != 0 or beta.real <= 0:
            raise InvalidBeta("determinant free energy needs real positive beta")
        log_z = 0.5 * _log_z_squared_det(G, J, beta, bc, dual).real
    else:
        if bc == "free":
            beta = _check_beta(beta)
            for e in graph.edges:
                j = _coupling(J, e)
                if math.cosh(j * beta.real) * math.cos(j * beta.imag) <= 0:
                    raise BranchFailure(f"Re cosh(beta J) <= 0 on edge {e}")
            target = graph
            w = high_temperature_weights(graph, J, beta)
            prefactor = 2 * nv * LN2 + 2 * sum(principal_log_cosh(beta * _coupling(J, e)) for e in graph.edges)
        else:
            if dual is None:
                raise ValueError("plus boundary conditions need a dual embedding")
            gstar = dual_subtiling(G, dual)
            target = gstar.graph
            w = low_temperature_weights(gstar, J, beta, dual)
            prefactor = 2 * beta * math.fsum(_coupling(J, e) for e in graph.edges)
        if target.num_edges:
            s = operator_norm_conjugated(target, factorize_symmetric(w)) if norm_bound is None else norm_bound
            if s >= 1:
                raise NotInRegime(f"certified norm bound {s:.6g} >= 1 at beta={beta}")
            logdet, tail, _ = log_det_series(transition_matrix(target, w).entries, s, tol)
        else:
            logdet, tail = 0j, 0.0
        log_z = 0.5 * (prefactor + logdet)
    return FreeEnergyResult(beta, -log_z / (beta * nv), method, log_z, tail)


def _log_z_squared_det(G, J, beta, bc, dual) -> complex:
    if bc == "free":
        return log_partition_free_squared(G, J, beta)
    if dual is None:
        raise ValueError("plus boundary conditions need a dual embedding")
    gstar = dual_subtiling(G, dual)
    total_j = math.fsum(_coupling(J, e) for e in G.graph.edges)
    if gstar.empty:
        return 2 * beta * total_j
    w = low_temperature_weights(gstar, J, beta, dual)
    return 2 * beta * total_j + log_kac_ward_determinant(gstar, w)
