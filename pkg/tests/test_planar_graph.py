import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import grid_graph, random_star, star, unit_square
from kwising.errors import (
    CrossingEdges,
    DanglingEdge,
    DegenerateEdge,
    IsolatedVertex,
    InvalidFace,
    NotSimple,
    UnknownFace,
    UnknownVertex,
)
from kwising.isoradial import square_patch
from kwising.planar_graph import (
    DirectedEdge,
    angle_between,
    build_graph,
    dual_subtiling,
    full_subtiling,
    out_edges,
    subtiling,
    turning_angle,
)


def test_unit_square_valid():
    g = unit_square()
    assert g.num_vertices == 4 and g.num_edges == 4
    assert all(g.degree(v) == 2 for v in g.vertices)
    assert len(g.faces) == 1


def test_crossing_edges_named():
    with pytest.raises(CrossingEdges) as info:
        build_graph({0: 0, 1: 1 + 1j, 2: 1, 3: 1j}, [(0, 1), (2, 3)])
    assert {tuple(e) for e in info.value.edges} == {(0, 1), (2, 3)}


def test_loop_rejected():
    with pytest.raises(NotSimple):
        build_graph({0: 0, 1: 1}, [(0, 0), (0, 1)])


def test_multi_edge_rejected():
    with pytest.raises(NotSimple):
        build_graph({0: 0, 1: 1}, [(0, 1), (1, 0)])


def test_unknown_endpoint():
    with pytest.raises(DanglingEdge):
        build_graph({0: 0, 1: 1}, [(0, 2)])


def test_isolated_vertex_rejected():
    with pytest.raises(IsolatedVertex):
        build_graph({0: 0, 1: 1, 2: 5j}, [(0, 1)])


def test_collinear_overlap_is_crossing():
    with pytest.raises(CrossingEdges):
        build_graph({0: 0, 1: 2, 2: 1, 3: 3}, [(0, 1), (2, 3)])


def test_vertex_on_edge_interior_is_crossing():
    with pytest.raises(CrossingEdges):
        build_graph({0: 0, 1: 2, 2: 1, 3: 1 + 1j}, [(0, 1), (2, 3)])


def test_clockwise_face_rejected():
    with pytest.raises(InvalidFace):
        build_graph({0: 0, 1: 1, 2: 1 + 1j, 3: 1j}, [(0, 1), (1, 2), (2, 3), (3, 0)], [(0, 3, 2, 1)])


def test_missing_face_rejected():
    g = grid_graph(2)
    with pytest.raises(InvalidFace):
        build_graph(g.positions, g.edges, g.faces[:3])


def test_full_3x3_subtiling_counts():
    S = full_subtiling(grid_graph(3))
    assert S.graph.num_vertices == 16
    assert S.graph.num_edges == 24
    assert len(S.boundary) == 12
    assert len(S.interior) == 4


def test_single_face_all_boundary():
    S = subtiling(unit_square(), [0])
    assert S.boundary == frozenset(range(4))
    assert S.interior == ()


def test_2x2_center_is_only_interior():
    g = grid_graph(2)
    S = full_subtiling(g)
    assert S.interior == (4,)


def test_partial_subtiling_boundary():
    # one face of a 2x2 block: the shared corner touches unselected faces
    g = grid_graph(2)
    S = subtiling(g, [0])
    assert S.graph.num_edges == 4
    assert S.interior == ()


def test_unknown_face():
    with pytest.raises(UnknownFace):
        subtiling(unit_square(), [3])
    with pytest.raises(UnknownFace):
        subtiling(unit_square(), [])


def test_dual_subtiling_3x3():
    iso = square_patch(3)
    D = dual_subtiling(iso.subtiling, iso.dual)
    assert not D.empty
    assert len(D.face_ids) == 4
    assert D.graph.num_edges == 12
    # interior of the dual block is the single center dual vertex: (n-1) x (n-1) faces -> (n-2)^2 interior
    assert len(D.interior) == 1


def test_dual_subtiling_2x2_is_star():
    iso = square_patch(2)
    D = dual_subtiling(iso.subtiling, iso.dual)
    assert D.graph.num_edges == 4
    primal = {iso.dual.dual_to_primal[e] for e in D.graph.edges}
    center = iso.subtiling.interior[0]
    assert all(center in e for e in primal)


def test_dual_subtiling_empty_interior():
    iso = square_patch(1)
    D = dual_subtiling(iso.subtiling, iso.dual)
    assert D.empty and D.graph.num_edges == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dual_block_interior_count(n):
    iso = square_patch(n)
    D = dual_subtiling(iso.subtiling, iso.dual)
    assert len(D.face_ids) == (n - 1) ** 2
    assert len(D.interior) == max(n - 2, 0) ** 2


def test_dual_pairing_incidence():
    iso = square_patch(3)
    left = iso.graph.face_of_directed
    for (a, b), d in iso.dual.pairing.items():
        assert set(d) == {left[DirectedEdge(a, b)], left[DirectedEdge(b, a)]}


def test_out_edges_degree4_order():
    g = grid_graph(2)
    dirs = [g.direction(e) for e in out_edges(g, 4)]
    # canonical start is just above -pi: south, east, north, west
    assert dirs == [-1j, 1, 1j, -1]


def test_out_edges_degree1():
    g = star([0.3])
    assert out_edges(g, 1) == [DirectedEdge(1, 0)]


def test_out_edges_unknown_vertex():
    with pytest.raises(UnknownVertex):
        out_edges(unit_square(), 17)


def test_turning_angle_examples():
    g = build_graph({0: 0, 1: 1, 2: 2, 3: 1 + 1j}, [(0, 1), (1, 2), (1, 3)])
    e = DirectedEdge(0, 1)
    assert turning_angle(g, e, DirectedEdge(1, 2)) == 0.0
    assert turning_angle(g, e, DirectedEdge(1, 3)) == pytest.approx(math.pi / 2, abs=1e-15)
    assert turning_angle(g, e, DirectedEdge(1, 0)) == math.pi
    assert turning_angle(g, e, e) == 0.0


def test_degenerate_direction():
    with pytest.raises(DegenerateEdge):
        angle_between(0j, 1 + 0j)


def test_angle_reflection_exhaustive():
    for g in (grid_graph(3), square_patch(2).graph):
        for z in g.vertices:
            for e in g.out[z]:
                for f in g.out[z]:
                    if e != f:
                        assert turning_angle(g, -e, f) == -turning_angle(g, -f, e)


def test_three_edge_identity(rng):
    for _ in range(50):
        g = random_star(rng, int(rng.integers(3, 8)))
        out = g.out[0]
        for e1 in out:
            for e2 in out:
                for h in out:
                    if len({e1, e2, h}) < 3:
                        continue
                    lhs = turning_angle(g, -e1, h)
                    rhs = turning_angle(g, -e2, h) + turning_angle(g, -e1, e2) + math.pi
                    d = (lhs - rhs) / (2 * math.pi)
                    assert abs(d - round(d)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(0.1, 10))
def test_turning_angles_rotation_invariant(rot, scale):
    g0, g1 = grid_graph(2), grid_graph(2, scale, rot)
    for z in g0.vertices:
        for e in g0.out[z]:
            for f in g0.out[e.head]:
                a, b = turning_angle(g0, e, f), turning_angle(g1, e, f)
                # reversals sit on the branch cut and may flip sign
                if abs(abs(a) - math.pi) < 1e-9:
                    assert abs(abs(b) - math.pi) < 1e-9
                else:
                    assert a == pytest.approx(b, abs=1e-9)
