"""Command-line front end.

Exit codes: 0 success, 1 validation or verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import FormatError, GraphError, KacWardError, NotContractive
from .graphio import GraphFile, load_couplings, load_graph_file, write_isoradial
from .ising import (
    MAX_BRUTE_SPINS,
    SERIES_TOL,
    CouplingSystem,
    constant_couplings,
    dual_couplings,
    free_energy_density,
)
from .isoradial import (
    GENERATORS,
    IsoradialGraph,
    rhombic_from_file,
    zinvariant_couplings,
    zinvariant_dual_factorization,
    zinvariant_factorization,
)
from .kacward import factorize_symmetric
from .planar_graph import Subtiling, dual_subtiling, full_subtiling
from .regimes import base_weight, beta_grid, regime_scan, write_scan_csv
from .spectral import is_contractive
from .verify import IDENTITY_TOL, run_checks


class InputError(Exception):
    pass


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return v, v, 1
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if n < 0:
        raise argparse.ArgumentTypeError("number of steps must be non-negative")
    return a, b, n


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
        meta = {
            "command": args.command,
            "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)},
            "versions": {
                "kwising": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
        }
        Path(str(args.out) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    else:
        sys.stdout.write(text)


def _load(path: str) -> GraphFile:
    try:
        return load_graph_file(path)
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _iso_or_none(gf: GraphFile, name: str) -> Optional[IsoradialGraph]:
    if gf.has_theta and gf.has_dual:
        return gf.isoradial(name)
    return None


# ---------------------------------------------------------------- validate

def cmd_validate(args) -> int:
    gf = _load(args.file)
    lines = []
    try:
        graph = gf.build()
    except GraphError as exc:
        print(f"invalid graph: {exc}", file=sys.stderr)
        return 1
    degrees = [graph.degree(v) for v in graph.vertices]
    hist = {d: degrees.count(d) for d in sorted(set(degrees))}
    lines.append(f"{graph.num_vertices} vertices, {len(graph.faces)} faces, {graph.num_edges} edges, max degree {graph.max_degree}")
    lines.append("degree histogram: " + ", ".join(f"{d}:{c}" for d, c in hist.items()))
    if graph.faces:
        sub = full_subtiling(graph)
        lines.append(f"boundary vertices: {len(sub.boundary)}, interior vertices: {len(sub.interior)}")
    if gf.has_dual:
        try:
            dual = gf.build_dual(graph)
        except GraphError as exc:
            print(f"invalid dual: {exc}", file=sys.stderr)
            return 1
        lines.append(f"dual: {dual.graph.num_vertices} vertices, {dual.graph.num_edges} edges, {len(dual.graph.faces)} faces, max degree {dual.graph.max_degree}")
    elif args.need_dual:
        print("invalid graph: dual_vertices section missing", file=sys.stderr)
        return 1
    if gf.theta:
        try:
            iso = gf.isoradial(Path(args.file).stem)
        except (GraphError, FormatError) as exc:
            print(f"invalid isoradial data: {exc}", file=sys.stderr)
            return 1
        lo, hi = iso.angle_range
        sums = iso.angle_sums()
        dev = max((abs(sums[v] - math.pi) for v in full_subtiling(graph).interior), default=0.0)
        lines.append(f"theta range [{lo:.12g}, {hi:.12g}], max interior angle-sum deviation {dev:.3e}")
    lines.append("ok")
    _emit(args, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    gf = _load(args.file)
    try:
        graph = gf.build()
        dual = gf.build_dual(graph) if gf.has_dual else None
        iso = _iso_or_none(gf, Path(args.file).stem)
    except GraphError as exc:
        print(f"invalid graph: {exc}", file=sys.stderr)
        return 2
    G = full_subtiling(graph) if graph.faces else graph
    tol = args.tol if args.tol is not None else IDENTITY_TOL
    lines = [f"graph {Path(args.file).name}: {graph.num_vertices} vertices, {graph.num_edges} edges; seed={args.seed} trials={args.trials}"]
    if args.trials == 0:
        lines.append("warning: trials=0, randomized checks are vacuous")
    results, notes = run_checks(G, args.seed, args.trials, dual=dual, iso=iso, identity_tol=tol)
    lines.extend(r.line() for r in results)
    lines.extend(f"note: {n}" for n in notes)
    failed = [r for r in results if not r.passed]
    lines.append(f"FAILED: {failed[0].name}" if failed else "all checks passed")
    _emit(args, "\n".join(lines) + "\n")
    return 1 if failed else 0


# ---------------------------------------------------------------- couplings

def _couplings(spec: str, graph, iso: Optional[IsoradialGraph]) -> CouplingSystem:
    if spec == "zinvariant":
        if iso is None:
            raise InputError("zinvariant couplings need theta annotations and dual vertices")
        return zinvariant_couplings(iso)
    if spec.startswith("const:"):
        try:
            return constant_couplings(graph, float(spec[6:]))
        except ValueError as exc:
            raise InputError(f"bad constant coupling {spec!r}: {exc}") from exc
    if spec.startswith("file:"):
        try:
            J = load_couplings(spec[5:])
        except OSError as exc:
            raise InputError(str(exc)) from exc
        missing = [e for e in graph.edges if e not in J]
        if missing:
            raise InputError(f"coupling file has no value for edge {missing[0]}")
        return J
    raise InputError(f"unknown coupling spec {spec!r} (zinvariant | const:J | file:PATH)")


def _base_factorization(G, J, side: str, iso: Optional[IsoradialGraph], spec: str):
    """Contractive factorization of the beta=1 weights, or None if the symmetric one is not."""
    if spec == "zinvariant" and iso is not None:
        return zinvariant_factorization(iso) if side == "high" else zinvariant_dual_factorization(iso)
    graph = G.graph if isinstance(G, Subtiling) else G
    xb = factorize_symmetric({e: base_weight(J[e], side) for e in graph.edges})
    if not is_contractive(graph, xb).contractive:
        return None
    return xb


# ---------------------------------------------------------------- scan-regimes

def cmd_scan_regimes(args) -> int:
    betas = beta_grid(args.re, args.im)
    G = J = xb = None
    m, M = args.m, args.M
    if args.graph:
        gf = _load(args.graph)
        graph = gf.build()
        iso = _iso_or_none(gf, Path(args.graph).stem)
        J = _couplings(args.couplings, graph, iso)
        if args.side == "high":
            G = full_subtiling(graph)
        else:
            if not gf.has_dual:
                raise InputError("low side needs dual_vertices in the graph file")
            dual = gf.build_dual(graph)
            G = dual_subtiling(full_subtiling(graph), dual)
            J = dual_couplings(J, dual)
            if G.empty:
                raise InputError("graph has no interior vertex; the dual subtiling is empty")
        xb = _base_factorization(G, J, args.side, iso, args.couplings)
        if xb is None:
            print("warning: symmetric base factorization is not contractive; cert_bound left blank", file=sys.stderr)
        m = J.m if m is None else m
        M = J.M if M is None else M
    if m is None or M is None:
        raise InputError("--m and --M are required without --graph")
    rows = regime_scan(betas, m, M, G, J, xb, side=args.side, exact_rho=not args.no_exact)
    buf = io.StringIO()
    write_scan_csv(rows, buf)
    _emit(args, buf.getvalue())
    return 0


# ---------------------------------------------------------------- free-energy

FE_HEADER = ["graph_id", "n_vertices", "n_edges", "bc", "re_beta", "im_beta", "method",
             "re_f", "im_f", "tail_bound", "boundary_ratio", "tol", "status"]


def _family(args) -> list[tuple[str, Subtiling, object, Optional[IsoradialGraph]]]:
    out = []
    if args.graph_family == "file":
        if not args.graph:
            raise InputError("--graph-family file needs --graph PATH")
        gf = _load(args.graph)
        graph = gf.build()
        iso = _iso_or_none(gf, Path(args.graph).stem)
        dual = gf.build_dual(graph) if gf.has_dual else None
        out.append((Path(args.graph).stem, full_subtiling(graph), dual, iso))
    else:
        gen = GENERATORS[args.graph_family]
        for n in range(1, args.n_max + 1):
            iso = gen(n)
            out.append((iso.name, iso.subtiling, iso.dual, iso))
    return out


def cmd_free_energy(args) -> int:
    betas = beta_grid(args.re, args.im)
    tol = args.tol if args.tol is not None else SERIES_TOL
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FE_HEADER)
    for name, S, dual, iso in _family(args):
        J = _couplings(args.couplings, S.graph, iso)
        if args.bc == "plus" and dual is None:
            raise InputError(f"{name}: plus boundary conditions need dual vertices")
        spins = S.graph.num_vertices if args.bc == "free" else len(S.interior)
        for beta in betas:
            methods = []
            if beta.imag == 0 and beta.real > 0:
                if spins <= MAX_BRUTE_SPINS:
                    methods.append("brute")
                methods.append("determinant")
            methods.append("trace-series")
            for method in methods:
                row = [name, S.graph.num_vertices, S.graph.num_edges, args.bc, repr(float(beta.real)), repr(float(beta.imag)), method]
                try:
                    res = free_energy_density(S, J, beta, args.bc, method, dual=dual, tol=tol)
                except KacWardError as exc:
                    row += ["", "", "", repr(float(S.boundary_ratio)), repr(tol), type(exc).__name__]
                else:
                    tail = "" if res.truncation_error is None else repr(float(res.truncation_error))
                    row += [repr(float(res.value.real)), repr(float(res.value.imag)), tail, repr(float(S.boundary_ratio)), repr(tol), "ok"]
                writer.writerow(row)
    _emit(args, buf.getvalue())
    return 0


# ---------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    if args.kind == "rhombic":
        if not args.rhombi:
            raise InputError("generate rhombic needs --rhombi PATH")
        try:
            iso = rhombic_from_file(args.rhombi, args.k, args.K)
        except OSError as exc:
            raise InputError(str(exc)) from exc
    else:
        iso = GENERATORS[args.kind](args.n)
    if not args.out:
        raise InputError("generate needs --out")
    write_isoradial(args.out, iso)
    print(f"wrote {iso.graph.num_vertices} vertices, {iso.graph.num_edges} edges to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (a JSON sidecar <out>.json records the run)")
    common.add_argument("--tol", type=float, help="override the identity / series tolerance")

    parser = argparse.ArgumentParser(prog="kwising", description="Kac-Ward operators for the planar Ising model")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a graph file")
    p.add_argument("file")
    p.add_argument("--need-dual", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("verify", parents=[common], help="run seeded oracle identities on a graph")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan-regimes", parents=[common], help="regime membership and certified bounds over a beta grid")
    p.add_argument("--m", type=float)
    p.add_argument("--M", type=float)
    p.add_argument("--re", type=parse_range, required=True, metavar="a:b:n")
    p.add_argument("--im", type=parse_range, default=(0.0, 0.0, 1), metavar="a:b:n")
    p.add_argument("--graph")
    p.add_argument("--couplings", default="zinvariant")
    p.add_argument("--side", choices=("high", "low"), default="high")
    p.add_argument("--no-exact", action="store_true", help="skip exact spectral radii")
    p.set_defaults(func=cmd_scan_regimes)

    p = sub.add_parser("free-energy", parents=[common], help="free energy densities over a beta grid and graph family")
    p.add_argument("--graph-family", choices=("square", "tri", "hex", "file"), default="square")
    p.add_argument("--graph")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--bc", choices=("free", "plus"), default="free")
    p.add_argument("--couplings", default="zinvariant")
    p.add_argument("--re", type=parse_range, required=True, metavar="a:b:n")
    p.add_argument("--im", type=parse_range, default=(0.0, 0.0, 1), metavar="a:b:n")
    p.set_defaults(func=cmd_free_energy)

    p = sub.add_parser("generate", parents=[common], help="write an isoradial patch as a graph file")
    p.add_argument("kind", choices=("square", "tri", "hex", "rhombic"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--rhombi", help="rhombic tiling file (for kind=rhombic)")
    p.add_argument("--k", type=float, help="lower bound on rhombus angles")
    p.add_argument("--K", type=float, help="upper bound on rhombus angles")
    p.set_defaults(func=cmd_generate)
    return parser


def _join_ranges(argv: list[str]) -> list[str]:
    """Let ``--im -0.3:0.3:7`` through; argparse would read the value as an option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in ("--re", "--im") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_ranges(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except (InputError, FormatError, GraphError, NotContractive, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
