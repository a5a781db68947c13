"""Seeded oracle checks run by ``kwising verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ising import (
    MAX_BRUTE_SPINS,
    MAX_CYCLE_RANK,
    CouplingSystem,
    cycle_basis_masks,
    even_subgraph_gf,
    partition_bruteforce,
    partition_free_kw,
    partition_plus_kw,
)
from .isoradial import IsoradialGraph, zinvariant_couplings, zinvariant_factorization
from .kacward import b_block, conjugated_transition_matrix, induced_weights, kac_ward_determinant, transition_matrix
from .planar_graph import DirectedEdge, DualEmbedding, EmbeddedGraph, Subtiling
from .regimes import certified_norm_bound
from .spectral import (
    charpoly_bz,
    is_contractive,
    largest_singular_value,
    operator_norm_conjugated,
    spectral_radius,
)

IDENTITY_TOL = 1e-8
CHARPOLY_TOL = 1e-9
NORM_TOL = 1e-9
BOUND_SLACK = 1e-10
SLACK_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    count: int
    max_error: float
    tol: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name:<16} n={self.count:<5d} max_err={self.max_error:.3e} tol={self.tol:.1e} {status}"
        return text + (f"  ({self.note})" if self.note else "")


def random_directed_weights(rng: np.random.Generator, graph: EmbeddedGraph, lo: float = 0.2, hi: float = 1.5) -> dict[DirectedEdge, complex]:
    out = {}
    for e in graph.directed_edges:
        out[e] = complex(rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform()))
    return out


def random_couplings(rng: np.random.Generator, graph: EmbeddedGraph) -> CouplingSystem:
    return CouplingSystem({e: rng.uniform(0.5, 1.5) for e in graph.edges})


def random_beta(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(0.1, 2.0), rng.uniform(-0.3, 0.3))


def run_checks(
    G: Subtiling | EmbeddedGraph,
    seed: int,
    trials: int,
    dual: Optional[DualEmbedding] = None,
    iso: Optional[IsoradialGraph] = None,
    identity_tol: float = IDENTITY_TOL,
) -> tuple[list[CheckResult], list[str]]:
    """Run every applicable identity; returns results and notes on skipped checks."""
    rng = np.random.default_rng(seed)
    graph = G.graph if isinstance(G, Subtiling) else G
    notes: list[str] = []
    results: list[CheckResult] = []

    if graph.num_vertices <= MAX_BRUTE_SPINS:
        worst = 0.0
        for _ in range(trials):
            J, beta = random_couplings(rng, graph), random_beta(rng)
            brute = partition_bruteforce(G, J, beta) ** 2
            worst = max(worst, abs(brute - partition_free_kw(G, J, beta)) / abs(brute))
        results.append(CheckResult("kw-free", trials, worst, identity_tol))
    else:
        notes.append(f"skipped kw-free: {graph.num_vertices} spins exceed {MAX_BRUTE_SPINS}")

    if isinstance(G, Subtiling) and dual is not None and G.interior:
        if len(G.interior) <= MAX_BRUTE_SPINS:
            worst = 0.0
            for _ in range(trials):
                J, beta = random_couplings(rng, graph), random_beta(rng)
                brute = partition_bruteforce(G, J, beta, "plus") ** 2
                worst = max(worst, abs(brute - partition_plus_kw(G, J, beta, dual)) / abs(brute))
            results.append(CheckResult("kw-plus", trials, worst, identity_tol))
        else:
            notes.append(f"skipped kw-plus: {len(G.interior)} interior spins exceed {MAX_BRUTE_SPINS}")
    else:
        notes.append("skipped kw-plus: needs dual vertices and an interior vertex")

    rank = len(cycle_basis_masks(graph))
    if rank <= MAX_CYCLE_RANK:
        worst = 0.0
        for _ in range(trials):
            w = {e: complex(0.9 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())) for e in graph.edges}
            gf2 = even_subgraph_gf(graph, w) ** 2
            worst = max(worst, abs(kac_ward_determinant(graph, w) - gf2) / max(abs(gf2), 1e-300))
        results.append(CheckResult("det-evensub", trials, worst, identity_tol))
    else:
        notes.append(f"skipped det-evensub: cycle rank {rank} exceeds {MAX_CYCLE_RANK}")

    cp_err = norm_err = bound_err = 0.0
    mismatches = 0
    for _ in range(trials):
        xd = random_directed_weights(rng, graph)
        z = graph.vertices[int(rng.integers(graph.num_vertices))]
        t = float(rng.normal(scale=2.0))
        block = b_block(graph, z, xd)
        direct = float(np.linalg.det(t * np.eye(len(block)) - block).real)
        value = charpoly_bz(graph, z, xd, t)
        cp_err = max(cp_err, abs(direct - value) / (1 + abs(value)))

        closed = operator_norm_conjugated(graph, xd)
        svd = largest_singular_value(conjugated_transition_matrix(graph, xd))
        if svd > 0:
            norm_err = max(norm_err, abs(closed - svd) / svd)
        rho = spectral_radius(transition_matrix(graph, induced_weights(xd)))
        bound_err = max(bound_err, rho - closed)

        # rescale so the norm lands near 1 and compare the two contractivity tests
        if closed > 0:
            c = math.sqrt(rng.uniform(0.7, 1.3) / closed)
            scaled = {e: c * w for e, w in xd.items()}
            sv = largest_singular_value(conjugated_transition_matrix(graph, scaled))
            if abs(sv - 1) > 1e-9 and is_contractive(graph, scaled).contractive != (sv <= 1):
                mismatches += 1
    results.append(CheckResult("charpoly-Bz", trials, cp_err, CHARPOLY_TOL))
    results.append(CheckResult("norm-xi", trials, norm_err, NORM_TOL))
    results.append(CheckResult("radius-bound", trials, max(bound_err, 0.0), BOUND_SLACK))
    results.append(CheckResult("contractivity", trials, float(mismatches), 0.0))

    if iso is not None:
        xb = zinvariant_factorization(iso)
        report = is_contractive(iso.graph, xb)
        sub = iso.subtiling
        interior = [abs(report.slack[v]) for v in sub.interior]
        results.append(CheckResult("zinv-slack", len(interior), max(interior, default=0.0), SLACK_TOL))
        J = zinvariant_couplings(iso)
        bound = certified_norm_bound(sub, J, 1.0, "high", xb)
        err = abs(bound - 1.0) if sub.interior else 0.0
        results.append(CheckResult("zinv-bound", 1, err, SLACK_TOL))
    return results, notes
