import math
from dataclasses import replace

import pytest

from kwising.errors import AngleOutOfBounds, NotRhombic
from kwising.isoradial import (
    from_rhombi,
    hexagonal_patch,
    read_rhombic_file,
    rhombi_of,
    rhombic_from_file,
    square_patch,
    strip_rhombi,
    triangular_patch,
    write_rhombic_file,
    zinvariant_couplings,
    zinvariant_dual_factorization,
    zinvariant_factorization,
)
from kwising.planar_graph import dual_subtiling
from kwising.spectral import is_contractive, vertex_xi

PATCHES = [square_patch, triangular_patch, hexagonal_patch]
THETA = {square_patch: math.pi / 4, triangular_patch: math.pi / 6, hexagonal_patch: math.pi / 3}


def test_square_patch_counts():
    g1 = square_patch(1)
    assert g1.graph.num_edges == 4
    assert all(abs(abs(g1.graph.direction(e)) - math.sqrt(2)) < 1e-12 for e in g1.graph.directed_edges)
    g3 = square_patch(3)
    assert (g3.graph.num_vertices, g3.graph.num_edges) == (16, 24)


@pytest.mark.parametrize("make", PATCHES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_angles(make, n):
    g = make(n)
    for t in g.theta.values():
        assert t == pytest.approx(THETA[make], abs=1e-12)
    for p, d in g.dual.pairing.items():
        assert g.theta[p] + g.dual_theta[d] == pytest.approx(math.pi / 2, abs=1e-12)
    sums = g.angle_sums()
    for v in g.subtiling.interior:
        assert sums[v] == pytest.approx(math.pi, abs=1e-12)


@pytest.mark.parametrize("make", PATCHES)
def test_faces_on_unit_circles(make):
    g = make(2)
    for f, cycle in enumerate(g.graph.faces):
        for v in cycle:
            assert abs(g.graph.positions[v] - g.centers[f]) == pytest.approx(1.0, abs=1e-12)


def test_triangular_dual_is_hexagonal():
    g = triangular_patch(3)
    D = dual_subtiling(g.subtiling, g.dual)
    assert D.graph.max_degree == 3
    assert all(len(c) == 6 for c in D.graph.faces)
    for d in D.graph.edges:
        assert g.dual_theta[d] == pytest.approx(math.pi / 3, abs=1e-12)


def test_coupling_values():
    for make, tanh in ((square_patch, math.sqrt(2) - 1), (triangular_patch, 2 - math.sqrt(3)), (hexagonal_patch, 1 / math.sqrt(3))):
        J = zinvariant_couplings(make(2))
        for j in J.values():
            assert math.tanh(j) == pytest.approx(tanh, abs=1e-12)
    assert next(iter(zinvariant_couplings(square_patch(1)).values())) == pytest.approx(0.440687, abs=1e-6)
    assert next(iter(zinvariant_couplings(hexagonal_patch(1)).values())) == pytest.approx(0.658479, abs=1e-6)


@pytest.mark.parametrize("make", PATCHES)
def test_dual_coupling_identity(make):
    g = make(2)
    J = zinvariant_couplings(g)
    for p, d in g.dual.pairing.items():
        assert math.exp(-2 * J[p]) == pytest.approx(math.tan(g.dual_theta[d] / 2), abs=1e-12)


@pytest.mark.parametrize("make", PATCHES)
def test_zinvariant_contractive_both_sides(make):
    g = make(3)
    rep = is_contractive(g.graph, zinvariant_factorization(g))
    assert rep
    for v in g.subtiling.interior:
        assert abs(rep.slack[v]) <= 1e-12
    full = g.graph.max_degree
    for v in g.subtiling.boundary:
        assert rep.slack[v] >= -1e-12
        if g.graph.degree(v) < full:
            assert rep.slack[v] > 0
    xis = vertex_xi(g.graph, zinvariant_factorization(g))
    for v in g.subtiling.interior:
        assert xis[v] == pytest.approx(1.0, abs=1e-12)
    D = dual_subtiling(g.subtiling, g.dual)
    if not D.empty:
        drep = is_contractive(D.graph, zinvariant_dual_factorization(g))
        assert drep
        for v in D.interior:
            assert abs(drep.slack[v]) <= 1e-12


def test_rhombic_file_roundtrip(tmp_path):
    g = square_patch(1)
    write_rhombic_file(tmp_path / "sq.txt", rhombi_of(g))
    h = rhombic_from_file(tmp_path / "sq.txt")
    assert h.graph.num_edges == 4 and len(h.graph.faces) == 1
    assert sorted(h.graph.positions.values(), key=lambda z: (z.real, z.imag)) == pytest.approx(
        sorted(g.graph.positions.values(), key=lambda z: (z.real, z.imag)), abs=1e-12)
    for t in h.theta.values():
        assert t == pytest.approx(math.pi / 4, abs=1e-12)


def test_rhombic_patch_roundtrip(tmp_path):
    g = triangular_patch(2)
    write_rhombic_file(tmp_path / "tri.txt", rhombi_of(g))
    h = rhombic_from_file(tmp_path / "tri.txt")
    assert (h.graph.num_vertices, h.graph.num_edges, len(h.graph.faces)) == (9, 16, 8)


def test_two_angle_strip():
    g = from_rhombi(strip_rhombi([2 * math.pi / 3, math.pi / 3] * 3, 6))
    assert {round(t, 9) for t in g.theta.values()} == {round(math.pi / 6, 9), round(math.pi / 3, 9)}
    sums = g.angle_sums()
    assert g.subtiling.interior
    for v in g.subtiling.interior:
        assert sums[v] == pytest.approx(math.pi, abs=1e-12)
    J = zinvariant_couplings(g)
    assert is_contractive(g.graph, zinvariant_factorization(g))
    assert J.m < J.M


def test_not_rhombic():
    bad = [(0j, 1 + 0j, 1 + 1.1j, 1.1j)]
    with pytest.raises(NotRhombic):
        from_rhombi(bad)


def test_angle_bounds():
    rh = strip_rhombi([2 * math.pi / 3, math.pi / 3] * 2, 4)
    with pytest.raises(AngleOutOfBounds):
        from_rhombi(rh, k=0.6)
    from_rhombi(rh, k=math.pi / 6, K=math.pi / 3)


def test_rhombus_angles_stay_below_right_angle():
    g = from_rhombi(strip_rhombi([math.pi / 3, math.pi / 6] * 2, 4))
    assert 0 < min(g.theta.values()) and max(g.theta.values()) < math.pi / 2


def test_wide_angles_rejected_for_couplings():
    g = square_patch(1)
    e = next(iter(g.theta))
    bad = replace(g, theta={**g.theta, e: math.pi / 2})
    with pytest.raises(AngleOutOfBounds) as info:
        zinvariant_couplings(bad)
    assert str(e) in str(info.value)


def test_rhombic_file_format_errors(tmp_path):
    from kwising.errors import FormatError
    p = tmp_path / "x.txt"
    p.write_text("rhombi\n0 0 1 0 1 1\n")
    with pytest.raises(FormatError):
        read_rhombic_file(p)
    p.write_text("0 0 1 0 1 1 0 1\n")
    with pytest.raises(FormatError):
        read_rhombic_file(p)
