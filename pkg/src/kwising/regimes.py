"""High/low-temperature regimes in the complex beta plane and certified norm bounds."""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import astuple, dataclass, fields
from typing import IO, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import NotContractive
from .ising import _coupling, stable_tanh
from .kacward import DirectedWeights, GraphLike, _directed, as_graph, transition_matrix
from .planar_graph import DirectedEdge, Edge
from .spectral import is_contractive, spectral_radius, xi_value

ENVELOPE_GRID = 2048
GOLDEN_TOL = 1e-12
FACTORIZATION_RTOL = 1e-9
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def in_high_regime(beta: complex, m: float, M: float) -> bool:
    """Membership of the open high-temperature set; boundary points are excluded."""
    beta = complex(beta)
    _check_bounds(m, M)
    if not 0 < beta.real < 1:
        return False
    if not 2 * M * abs(beta.imag) < 0.5 * math.pi:
        return False
    return math.cosh(2 * m * beta.real) / (math.cosh(2 * m) * math.cos(2 * M * beta.imag)) < 1


def in_low_regime(beta: complex, m: float = 1.0, M: float = 1.0) -> bool:
    return complex(beta).real > 1


def _check_bounds(m: float, M: float) -> None:
    if not 0 < m <= M < math.inf:
        raise ValueError(f"need 0 < m <= M < inf, got m={m}, M={M}")


def high_ratio(beta: complex, j: float) -> float:
    """|tanh(beta j)| / tanh(j)."""
    return abs(stable_tanh(complex(beta) * j)) / math.tanh(j)


def _golden_max(fn, a: float, b: float, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    c, d = b - INVPHI * (b - a), a + INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = fn(d)
        if b - a <= tol * max(1.0, abs(b)):
            break
    x = 0.5 * (a + b)
    return x, fn(x)


def envelope_high(beta: complex, m: float, M: float) -> float:
    """sup over j in [m, M] of |tanh(beta j)| / tanh(j).

    A uniform grid locates the maximum, golden-section search refines it
    inside the neighbouring grid cells.
    """
    beta = complex(beta)
    _check_bounds(m, M)
    if not beta.real > 0:
        raise ValueError("envelope_high needs Re beta > 0")
    if m == M:
        return high_ratio(beta, m)
    js = np.linspace(m, M, ENVELOPE_GRID)
    vals = [high_ratio(beta, j) for j in js]
    k = int(np.argmax(vals))
    best = vals[k]
    lo, hi = js[max(k - 1, 0)], js[min(k + 1, len(js) - 1)]
    _, refined = _golden_max(lambda j: high_ratio(beta, j), lo, hi)
    return max(best, refined, vals[0], vals[-1])


def envelope_low(beta: complex, m: float, M: float) -> float:
    """sup over j in [m, M] of |exp(-2 beta j)| / exp(-2 j), in closed form."""
    _check_bounds(m, M)
    d = complex(beta).real - 1.0
    return math.exp(-2 * m * d) if d >= 0 else math.exp(-2 * M * d)


def base_weight(J_e: float, side: str) -> float:
    return math.tanh(J_e) if side == "high" else math.exp(-2 * J_e)


def scale_factor(J_e: float, beta: complex, side: str) -> float:
    """|w_e(beta)| / w_e(1) for the high (tanh) or low (exp(-2 beta J)) weights."""
    if side == "high":
        return abs(stable_tanh(complex(beta) * J_e)) / math.tanh(J_e)
    if side == "low":
        return math.exp(-2 * J_e * (complex(beta).real - 1.0))
    raise ValueError(f"side must be 'high' or 'low', got {side!r}")


def check_base_factorization(G: GraphLike, J: Mapping[Edge, float], x_base: DirectedWeights, side: str) -> None:
    """Raise unless x_base is a contractive factorization of tanh J (or exp(-2J))."""
    graph = as_graph(G)
    for e in graph.edges:
        d = DirectedEdge(*e)
        prod = abs(_directed(x_base, d) * _directed(x_base, -d))
        target = base_weight(_coupling(J, e), side)
        if abs(prod - target) > FACTORIZATION_RTOL * target:
            raise ValueError(f"base weights do not factorize the {side}-temperature weight on edge {e}")
    report = is_contractive(graph, x_base)
    if not report.contractive:
        worst = min(report.slack, key=report.slack.get)
        raise NotContractive(f"base weights violate contractivity at vertex {worst} (slack {report.slack[worst]:.3e})")


def certified_norm_bound(
    G: GraphLike, J: Mapping[Edge, float], beta: complex, side: str, x_base: DirectedWeights, check: bool = True
) -> float:
    """max_z xi for the rescaled base factorization; bounds rho(Lambda(w(beta))).

    ``G`` is the graph carrying the weights: the primal subtiling for the
    high side, the dual subtiling (with couplings moved onto dual edges)
    for the low side.
    """
    graph = as_graph(G)
    if check:
        check_base_factorization(graph, J, x_base, side)
    scale = {e: scale_factor(_coupling(J, e), beta, side) for e in graph.edges}
    best = 0.0
    for z in graph.vertices:
        mods = [scale[e.edge] * abs(_directed(x_base, e)) ** 2 for e in graph.out[z]]
        best = max(best, xi_value(mods))
    return best


def temperature_weights(G: GraphLike, J: Mapping[Edge, float], beta: complex, side: str) -> dict[Edge, complex]:
    beta = complex(beta)
    if side == "high":
        return {e: stable_tanh(beta * _coupling(J, e)) for e in as_graph(G).edges}
    return {e: cmath.exp(-2 * beta * _coupling(J, e)) for e in as_graph(G).edges}


@dataclass(frozen=True)
class RegimeRow:
    re_beta: float
    im_beta: float
    in_high: bool
    in_low: bool
    L_high: Optional[float]
    L_low: float
    cert_bound: Optional[float]
    rho_exact: Optional[float]


CSV_HEADER = [f.name for f in fields(RegimeRow)]


def beta_grid(re: tuple[float, float, int], im: tuple[float, float, int]) -> list[complex]:
    """Row-major grid: imaginary part outer, real part inner."""
    res = np.linspace(re[0], re[1], int(re[2])) if re[2] > 0 else np.zeros(0)
    ims = np.linspace(im[0], im[1], int(im[2])) if im[2] > 0 else np.zeros(0)
    return [complex(r, i) for i in ims for r in res]


def regime_scan(
    betas: Iterable[complex],
    m: float,
    M: float,
    G: Optional[GraphLike] = None,
    J: Optional[Mapping[Edge, float]] = None,
    x_base: Optional[DirectedWeights] = None,
    side: str = "high",
    exact_rho: bool = True,
    max_directed: int = 300,
) -> list[RegimeRow]:
    """Membership flags, envelopes, certified bounds and exact radii over a beta grid."""
    _check_bounds(m, M)
    graph = as_graph(G) if G is not None else None
    if graph is not None and x_base is not None:
        check_base_factorization(graph, J, x_base, side)
    rows = []
    for beta in betas:
        beta = complex(beta)
        L_high = envelope_high(beta, m, M) if beta.real > 0 else None
        cert = rho = None
        if graph is not None and J is not None:
            if x_base is not None and (side == "low" or beta.real > 0):
                cert = certified_norm_bound(graph, J, beta, side, x_base, check=False)
            if exact_rho and 2 * graph.num_edges <= max_directed and (side == "low" or beta.real > 0):
                rho = spectral_radius(transition_matrix(graph, temperature_weights(graph, J, beta, side)))
        rows.append(RegimeRow(
            beta.real, beta.imag,
            in_high_regime(beta, m, M), in_low_regime(beta, m, M),
            L_high, envelope_low(beta, m, M), cert, rho,
        ))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(float(v))


def write_scan_csv(rows: Sequence[RegimeRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
