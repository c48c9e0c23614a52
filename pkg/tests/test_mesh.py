import numpy as np
import pytest

from ncrect.mesh import Mesh, uniform_grid, unit_square_grid
from ncrect.ref_element import GAUSS_POINTS, OUTER_NODE

S = OUTER_NODE


def affine_fit_oracle(ref_pts, phys_pts):
    # solve the 6-parameter affine map from three point correspondences
    M = np.zeros((6, 6))
    rhs = np.zeros(6)
    for k, (r, p) in enumerate(zip(ref_pts[:3], phys_pts[:3])):
        M[2 * k, :] = [r[0], r[1], 1, 0, 0, 0]
        M[2 * k + 1, :] = [0, 0, 0, r[0], r[1], 1]
        rhs[2 * k:2 * k + 2] = p
    a11, a12, b1, a21, a22, b2 = np.linalg.solve(M, rhs)
    return np.array([[a11, a12], [a21, a22]]), np.array([b1, b2])


@pytest.mark.parametrize("n,nv,ne,nr", [(1, 4, 4, 1), (2, 9, 12, 4),
                                        (4, 25, 40, 16), (7, 64, 112, 49)])
def test_uniform_grid_counts(n, nv, ne, nr):
    mesh = unit_square_grid(n)
    assert mesh.num_vertices == nv
    assert mesh.num_edges == ne
    assert mesh.num_elements == nr


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_euler_relation(n):
    mesh = uniform_grid((0.5, -1.0), (2.0, 0.5), (0.3, 1.0), n)
    assert mesh.num_vertices - mesh.num_edges + mesh.num_elements == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_interior_entity_counts(n):
    mesh = unit_square_grid(n)
    assert mesh.num_interior_vertices == (n - 1) ** 2
    assert mesh.num_interior_edges == 2 * n * (n - 1)


def test_edge_adjacency_counts():
    mesh = unit_square_grid(3)
    for eid in range(mesh.num_edges):
        adjacent = int(np.sum(mesh.edge_elements[eid] >= 0))
        assert adjacent == (1 if mesh.boundary_edge[eid] else 2)


def test_incidence_relations_are_mutually_inverse():
    mesh = uniform_grid((0.0, 0.0), (1.0, 0.25), (0.0, 1.0), 3)
    for el in range(mesh.num_elements):
        for eid in mesh.element_edges[el]:
            assert el in mesh.edge_elements[eid]
    for eid in range(mesh.num_edges):
        for el in mesh.edge_elements[eid]:
            if el >= 0:
                assert eid in mesh.element_edges[el]


def test_affine_map_axis_aligned():
    mesh = unit_square_grid(2)
    amap = mesh.affine_map(0)  # element [0, 1/2]^2
    assert amap.A == pytest.approx(np.diag([0.25, 0.25]), abs=0)
    assert amap.b == pytest.approx([0.25, 0.25], abs=0)


def test_affine_map_reference_sized_element():
    mesh = uniform_grid((-1.0, -1.0), (2.0, 0.0), (0.0, 2.0), 1)
    amap = mesh.affine_map(0)
    assert amap.A == pytest.approx(np.eye(2), abs=0)
    assert amap.b == pytest.approx([0.0, 0.0], abs=0)


def test_affine_map_sheared_grid_against_fit_oracle():
    mesh = uniform_grid((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), 1)
    amap = mesh.affine_map(0)
    assert amap.A == pytest.approx(np.array([[0.5, 0.5], [0.0, 0.5]]), abs=0)
    assert amap.b == pytest.approx([1.0, 0.5], abs=0)
    ref_corners = np.array([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0)])
    A, b = affine_fit_oracle(ref_corners, mesh.vertices[mesh.elements[0][:3]])
    assert amap.A == pytest.approx(A, abs=1e-14)
    assert amap.b == pytest.approx(b, abs=1e-14)


def test_affine_map_sends_reference_corners_to_element_corners():
    mesh = uniform_grid((0.2, -0.1), (1.3, 0.4), (-0.2, 0.9), 3)
    ref_corners = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], dtype=float)
    for el in range(mesh.num_elements):
        mapped = mesh.affine_map(el).apply(ref_corners)
        assert mapped == pytest.approx(mesh.vertices[mesh.elements[el]],
                                       abs=1e-13)


def test_edge_gauss_points_unit_edge():
    mesh = unit_square_grid(1)
    eid = mesh.element_edges[0][0]  # bottom edge, (0,0)-(1,0)
    assert mesh.edges[eid].tolist() == [0, 1]
    pts = mesh.edge_gauss_points(eid)
    expected = np.array([[(1 - S) / 2, 0.0], [0.5, 0.0], [(1 + S) / 2, 0.0]])
    assert pts == pytest.approx(expected, abs=1e-15)


def test_edge_gauss_points_reference_bottom_edge():
    mesh = uniform_grid((-1.0, -1.0), (2.0, 0.0), (0.0, 2.0), 1)
    eid = mesh.element_edges[0][0]
    assert mesh.edge_gauss_points(eid) == pytest.approx(
        GAUSS_POINTS[:3], abs=1e-15)


def test_edge_midpoint_is_endpoint_average():
    mesh = uniform_grid((0.0, 0.0), (2.0, 1.0), (0.5, 3.0), 2)
    for eid in range(mesh.num_edges):
        a, b = mesh.vertices[mesh.edges[eid]]
        assert mesh.edge_gauss_points(eid)[1] == pytest.approx(
            (a + b) / 2, abs=1e-15)


def test_element_gauss_points_reference_element():
    mesh = uniform_grid((-1.0, -1.0), (2.0, 0.0), (0.0, 2.0), 1)
    assert mesh.element_gauss_points(0) == pytest.approx(
        GAUSS_POINTS, abs=1e-15)


def test_element_gauss_points_on_unit_square_boundary():
    mesh = unit_square_grid(1)
    pts = mesh.element_gauss_points(0)
    on_boundary = (np.isclose(pts, 0.0) | np.isclose(pts, 1.0)).any(axis=1)
    assert on_boundary.all()
    assert pts == pytest.approx((GAUSS_POINTS + 1.0) / 2.0, abs=1e-15)


def test_neighbors_share_edge_gauss_points():
    mesh = uniform_grid((0.0, 0.0), (1.0, 0.2), (0.1, 1.0), 3)
    for eid in np.flatnonzero(~mesh.boundary_edge):
        el1, el2 = mesh.edge_elements[eid]
        sets = []
        for el in (el1, el2):
            loc = list(mesh.element_edges[el]).index(eid)
            pts = mesh.element_gauss_points(el)[3 * loc:3 * loc + 3]
            sets.append(pts[np.lexsort((pts[:, 1], pts[:, 0]))])
        assert sets[0] == pytest.approx(sets[1], abs=1e-13)


def test_forward_gauss_point_agrees_between_neighbors():
    # both adjacent elements must resolve the canonical forward node to
    # the same global point
    mesh = uniform_grid((0.0, 0.0), (1.0, 0.3), (0.2, 1.0), 4)
    for eid in range(mesh.num_edges):
        forward_global = mesh.edge_gauss_points(eid)[0]
        for el in mesh.edge_elements[eid]:
            if el < 0:
                continue
            loc = list(mesh.element_edges[el]).index(eid)
            pts = mesh.element_gauss_points(el)
            if mesh.element_edge_forward[el, loc]:
                resolved = pts[3 * loc]
            else:
                resolved = pts[3 * loc + 2]
            assert resolved == pytest.approx(forward_global, abs=1e-13)


def test_edges_are_canonically_oriented():
    mesh = unit_square_grid(3)
    for a, b in mesh.edges:
        pa, pb = mesh.vertices[a], mesh.vertices[b]
        assert (pa[0], pa[1]) < (pb[0], pb[1])


def test_locate_prefers_lower_element_id_on_ties():
    mesh = unit_square_grid(2)
    assert mesh.locate((0.5, 0.25)) == 0  # shared edge of elements 0 and 1
    assert mesh.locate((0.25, 0.25)) == 0
    assert mesh.locate((0.75, 0.75)) == 3


def test_locate_outside_raises():
    mesh = unit_square_grid(2)
    with pytest.raises(ValueError):
        mesh.locate((1.5, 0.5))


def test_degenerate_spans_rejected():
    with pytest.raises(ValueError):
        uniform_grid((0.0, 0.0), (1.0, 1.0), (2.0, 2.0), 2)
    with pytest.raises(ValueError):
        uniform_grid((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), 0)


def test_dump_golden_single_element():
    mesh = unit_square_grid(1)
    expected = (
        "vertex 0 0.0 0.0 1\n"
        "vertex 1 1.0 0.0 1\n"
        "vertex 2 0.0 1.0 1\n"
        "vertex 3 1.0 1.0 1\n"
        "edge 0 0 1 1\n"
        "edge 1 1 3 1\n"
        "edge 2 2 3 1\n"
        "edge 3 0 2 1\n"
        "element 0 0 1 3 2\n"
    )
    assert mesh.dump() == expected


def test_dump_round_trips_through_reconstruction():
    mesh = uniform_grid((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), 2)
    text = mesh.dump()
    vertices, elements = [], []
    for line in text.splitlines():
        parts = line.split()
        if parts[0] == "vertex":
            vertices.append((float(parts[2]), float(parts[3])))
        elif parts[0] == "element":
            elements.append([int(v) for v in parts[2:]])
    rebuilt = Mesh(np.array(vertices), np.array(elements))
    assert rebuilt.edges.tolist() == mesh.edges.tolist()
    assert rebuilt.boundary_edge.tolist() == mesh.boundary_edge.tolist()
