import cmath
import itertools
import math

import numpy as np
import pytest

from kwising.planar_graph import build_graph


def unit_square():
    return build_graph({0: 0, 1: 1, 2: 1 + 1j, 3: 1j}, [(0, 1), (1, 2), (2, 3), (3, 0)], [(0, 1, 2, 3)])


def two_squares():
    pos = {0: 0, 1: 1, 2: 2, 3: 2 + 1j, 4: 1 + 1j, 5: 1j}
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]
    return build_graph(pos, edges, [(0, 1, 4, 5), (1, 2, 3, 4)])


def grid_graph(n, scale=1.0, rot=0.0):
    """n x n faces of the square lattice, optionally rotated and scaled."""
    w = cmath.exp(1j * rot) * scale
    vid = lambda i, j: i * (n + 1) + j
    pos = {vid(i, j): w * complex(j, i) for i in range(n + 1) for j in range(n + 1)}
    edges = []
    for i in range(n + 1):
        for j in range(n + 1):
            if j < n:
                edges.append((vid(i, j), vid(i, j + 1)))
            if i < n:
                edges.append((vid(i, j), vid(i + 1, j)))
    faces = [(vid(i, j), vid(i, j + 1), vid(i + 1, j + 1), vid(i + 1, j)) for i in range(n) for j in range(n)]
    return build_graph(pos, edges, faces)


def star(angles, lengths=None):
    lengths = lengths or [1.0] * len(angles)
    pos = {0: 0j}
    for k, (a, r) in enumerate(zip(angles, lengths), 1):
        pos[k] = r * cmath.exp(1j * a)
    return build_graph(pos, [(0, k) for k in range(1, len(angles) + 1)])


def random_star(rng, degree):
    # well separated random directions
    base = np.sort(rng.uniform(0, 2 * np.pi, degree))
    while degree > 1 and np.min(np.diff(np.r_[base, base[0] + 2 * np.pi])) < 0.05:
        base = np.sort(rng.uniform(0, 2 * np.pi, degree))
    return star(list(base), list(rng.uniform(0.5, 2.0, degree)))


def naive_partition(graph, J, beta, fixed=None):
    """Plain itertools enumeration; ``fixed`` spins are held at +1."""
    fixed = set(fixed or ())
    free = [v for v in graph.vertices if v not in fixed]
    total = 0j
    for spins in itertools.product((-1, 1), repeat=len(free)):
        s = dict(zip(free, spins))
        s.update({v: 1 for v in fixed})
        total += cmath.exp(beta * sum(J[e] * s[e[0]] * s[e[1]] for e in graph.edges))
    return total


def naive_even_gf(graph, w):
    """Sum over all 2^|E| edge subsets with even degree everywhere."""
    edges = list(graph.edges)
    total = 0j
    for mask in range(1 << len(edges)):
        deg = {}
        prod = 1 + 0j
        for k, (a, b) in enumerate(edges):
            if mask >> k & 1:
                deg[a] = deg.get(a, 0) + 1
                deg[b] = deg.get(b, 0) + 1
                prod *= w[(a, b)]
        if all(d % 2 == 0 for d in deg.values()):
            total += prod
    return total


def random_directed(rng, graph, lo=0.2, hi=1.5):
    return {e: complex(rng.uniform(lo, hi) * cmath.exp(2j * math.pi * rng.uniform())) for e in graph.directed_edges}


@pytest.fixture
def rng():
    return np.random.default_rng(20241017)
