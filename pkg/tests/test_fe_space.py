import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncrect import ref_element
from ncrect.errors import EmptySpaceError, OutOfDomainError
from ncrect.fe_space import (FeFunction, basis_function, build_dofmap,
                             element_local_global, evaluate_fe_function,
                             interpolate_elementwise, interpolate_local,
                             local_poly_coeffs, local_values_of_global_basis,
                             localize)
from ncrect.mesh import unit_square_grid
from ncrect.ref_element import (DIM, GAUSS_POINTS, relation_residual,
                                value_matrix)

coeff_arrays = st.lists(
    st.floats(-1.0, 1.0, allow_nan=False), min_size=DIM, max_size=DIM
).map(np.array)


def test_dirichlet_count_n2():
    dofmap = build_dofmap(unit_square_grid(2), "dirichlet0")
    assert dofmap.total == 9  # 1 interior vertex + 2 * 4 interior edges


def test_full_count_n2():
    dofmap = build_dofmap(unit_square_grid(2), "full")
    assert dofmap.total == 32  # 9 + 2 * 12 - 1


def test_dirichlet_count_n8():
    dofmap = build_dofmap(unit_square_grid(8), "dirichlet0")
    assert dofmap.total == 273  # 49 + 2 * 112


@pytest.mark.parametrize("n", range(1, 17))
def test_full_dimension_formula(n):
    mesh = unit_square_grid(n)
    dofmap = build_dofmap(mesh, "full")
    assert dofmap.total == mesh.num_vertices + 2 * mesh.num_edges - 1


@pytest.mark.parametrize("n", range(2, 17))
def test_dirichlet_dimension_formula(n):
    mesh = unit_square_grid(n)
    dofmap = build_dofmap(mesh, "dirichlet0")
    assert dofmap.total == (mesh.num_interior_vertices
                            + 2 * mesh.num_interior_edges)


def test_dof_ids_are_contiguous():
    for kind in ("dirichlet0", "full"):
        dofmap = build_dofmap(unit_square_grid(3), kind)
        ids = np.concatenate([dofmap.vertex_dof, dofmap.edge_plus_dof,
                              dofmap.edge_minus_dof])
        ids = np.sort(ids[ids >= 0])
        assert ids.tolist() == list(range(dofmap.total))


def test_dirichlet_excludes_boundary_entities():
    mesh = unit_square_grid(3)
    dofmap = build_dofmap(mesh, "dirichlet0")
    assert np.all(dofmap.vertex_dof[mesh.boundary_vertex] < 0)
    assert np.all(dofmap.edge_plus_dof[mesh.boundary_edge] < 0)
    assert np.all(dofmap.edge_minus_dof[mesh.boundary_edge] < 0)


def test_full_drops_exactly_one_function():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    assert dofmap.dropped == ("edge_minus", mesh.num_edges - 1)
    assert dofmap.edge_minus_dof[mesh.num_edges - 1] < 0


def test_dirichlet_on_single_element_grid_is_empty():
    with pytest.raises(EmptySpaceError):
        build_dofmap(unit_square_grid(1), "dirichlet0")


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        build_dofmap(unit_square_grid(2), "mystery")


def test_vertex_dof_local_values_at_a_corner():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "dirichlet0")
    # the only interior vertex (1/2, 1/2) is corner 2 of element 0
    vid = int(np.flatnonzero(~mesh.boundary_vertex)[0])
    dof = dofmap.vertex_dof[vid]
    values = local_values_of_global_basis(mesh, dofmap, 0, dof)
    expected = np.zeros(12)
    expected[[5, 6]] = 1.0  # the two Gauss points flanking corner 2
    assert values == pytest.approx(expected, abs=0)
    assert relation_residual(values) == 0.0


def test_edge_plus_dof_local_values_on_bottom_edge():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    eid = mesh.element_edges[0][0]  # bottom edge of element 0, forward
    assert mesh.element_edge_forward[0][0]
    dof = dofmap.edge_plus_dof[eid]
    values = local_values_of_global_basis(mesh, dofmap, 0, dof)
    expected = np.zeros(12)
    expected[1] = 5.0
    expected[0] = 4.0
    assert values == pytest.approx(expected, abs=0)
    assert relation_residual(values) == 0.0


def test_unrelated_vertex_dof_has_zero_local_values():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    far_vertex = mesh.num_vertices - 1  # (1,1), not on element 0
    dof = dofmap.vertex_dof[far_vertex]
    values = local_values_of_global_basis(mesh, dofmap, 0, dof)
    assert values == pytest.approx(np.zeros(12), abs=0)


def test_all_local_restrictions_satisfy_the_relation():
    mesh = unit_square_grid(3)
    for kind in ("dirichlet0", "full"):
        dofmap = build_dofmap(mesh, kind)
        gen_values = ref_element.local_generators().gauss_values
        for el in range(mesh.num_elements):
            for slot, dof in element_local_global(mesh, dofmap, el):
                assert abs(relation_residual(gen_values[slot])) <= 1e-12


def test_interior_element_has_twelve_entries():
    mesh = unit_square_grid(4)
    dofmap = build_dofmap(mesh, "dirichlet0")
    # central element: all four vertices and edges interior
    el = 5  # element (1,1) in the 4x4 grid
    verts = mesh.elements[el]
    assert not mesh.boundary_vertex[verts].any()
    assert len(element_local_global(mesh, dofmap, el)) == 12


def test_corner_element_entries_on_coarse_dirichlet_grid():
    # element [0, 1/2]^2 of the 2x2 grid: 1 interior vertex and 2
    # interior edges (the ones through the center) -> 1 + 2*2 entries
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "dirichlet0")
    pairs = element_local_global(mesh, dofmap, 0)
    assert len(pairs) == 5
    verts = mesh.elements[0]
    assert int(np.sum(~mesh.boundary_vertex[verts])) == 1
    interior_edges = [e for e in mesh.element_edges[0]
                      if not mesh.boundary_edge[e]]
    assert len(interior_edges) == 2


def test_full_entries_are_twelve_minus_dropped():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    dropped_edge = dofmap.dropped[1]
    for el in range(mesh.num_elements):
        expected = 12 - int(dropped_edge in mesh.element_edges[el])
        assert len(element_local_global(mesh, dofmap, el)) == expected


def test_slots_are_strictly_increasing():
    mesh = unit_square_grid(3)
    dofmap = build_dofmap(mesh, "full")
    for el in range(mesh.num_elements):
        slots = [s for s, _ in element_local_global(mesh, dofmap, el)]
        assert slots == sorted(slots)
        assert len(set(slots)) == len(slots)


def test_interpolate_local_reproduces_members():
    rng = np.random.default_rng(11)
    coeffs = rng.uniform(-1, 1, DIM)
    values = value_matrix() @ coeffs
    assert interpolate_local(values) == pytest.approx(coeffs, abs=1e-12)


def test_interpolate_local_matches_normal_equations_oracle():
    # x^4 sampled at the boundary Gauss points is not attainable; the
    # fit must agree with the brute-force normal-equations solution
    values = GAUSS_POINTS[:, 0] ** 4
    V = value_matrix()
    oracle = np.linalg.solve(V.T @ V, V.T @ values)
    fitted = interpolate_local(values)
    assert fitted == pytest.approx(oracle, abs=1e-10)
    residual = V @ fitted - values
    assert np.abs(residual).max() > 1e-3  # genuinely overdetermined data


def test_interpolate_local_zero():
    assert interpolate_local(np.zeros(12)) == pytest.approx(
        np.zeros(DIM), abs=0)


@given(coeff_arrays)
def test_interpolation_exactness_property(coeffs):
    values = value_matrix() @ coeffs
    assert np.abs(interpolate_local(values) - coeffs).max() <= 1e-11


def test_evaluate_vertex_basis_at_nearest_gauss_point():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "dirichlet0")
    vid = int(np.flatnonzero(~mesh.boundary_vertex)[0])  # center vertex
    f = basis_function(dofmap, int(dofmap.vertex_dof[vid]))
    # nearest Gauss point on the edge from the center toward (1, 1/2)
    eid = [e for e in range(mesh.num_edges)
           if vid in mesh.edges[e] and not mesh.boundary_edge[e]][0]
    pts = mesh.edge_gauss_points(eid)
    # nearest outer node of that edge as seen from the vertex
    d0 = np.linalg.norm(pts[0] - mesh.vertices[vid])
    d2 = np.linalg.norm(pts[2] - mesh.vertices[vid])
    nearest = pts[0] if d0 < d2 else pts[2]
    assert evaluate_fe_function(mesh, f, nearest) == pytest.approx(1.0,
                                                                   abs=1e-12)


def test_evaluate_zero_function():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    f = FeFunction(dofmap, np.zeros(dofmap.total))
    assert evaluate_fe_function(mesh, f, (0.3, 0.7)) == 0.0


def test_evaluate_edge_plus_basis_at_midpoint():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    eid = 0
    f = basis_function(dofmap, int(dofmap.edge_plus_dof[eid]))
    mid = mesh.edge_midpoint(eid)
    assert evaluate_fe_function(mesh, f, mid) == pytest.approx(5.0, abs=1e-12)


def test_evaluate_outside_domain_raises():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    f = FeFunction(dofmap, np.zeros(dofmap.total))
    with pytest.raises(OutOfDomainError):
        evaluate_fe_function(mesh, f, (2.0, 0.5))


def test_coefficient_length_is_checked():
    dofmap = build_dofmap(unit_square_grid(2), "full")
    with pytest.raises(ValueError):
        FeFunction(dofmap, np.zeros(dofmap.total + 1))


def test_gauss_point_continuity_of_all_basis_functions():
    # the defining property of the space: traces from both sides of an
    # interior edge agree at its three Gauss points
    mesh = unit_square_grid(3)
    for kind in ("dirichlet0", "full"):
        dofmap = build_dofmap(mesh, kind)
        interior = np.flatnonzero(~mesh.boundary_edge)
        for dof in range(dofmap.total):
            f = basis_function(dofmap, dof)
            for eid in interior:
                el1, el2 = mesh.edge_elements[eid]
                pts = mesh.edge_gauss_points(eid)
                vals = []
                for el in (el1, el2):
                    coeffs = local_poly_coeffs(mesh, dofmap, f, el)
                    ref = mesh.affine_map(el).pull_back(pts)
                    vals.append(ref_element.eval_poly(coeffs, ref))
                assert vals[0] == pytest.approx(vals[1], abs=1e-12)


def test_localize_roundtrip_through_generators():
    mesh = unit_square_grid(2)
    dofmap = build_dofmap(mesh, "full")
    rng = np.random.default_rng(3)
    f = FeFunction(dofmap, rng.uniform(-1, 1, dofmap.total))
    gen_values = ref_element.local_generators().gauss_values
    for el in range(mesh.num_elements):
        local = localize(mesh, dofmap, f.coeffs, el)
        # local Gauss values must match the dof-weighted prescription
        values = local @ gen_values
        coeffs = local_poly_coeffs(mesh, dofmap, f, el)
        attained = ref_element.eval_poly(coeffs, GAUSS_POINTS)
        assert attained == pytest.approx(values, abs=1e-11)


def test_elementwise_interpolation_order_is_near_four():
    # coarse two-level check; the acceptance suite measures 16 -> 32
    from ncrect.convergence import interpolation_l2_errors
    errors = interpolation_l2_errors("dirichlet-paper", [8, 16])
    order = np.log2(errors[0] / errors[1])
    assert 3.5 <= order <= 4.5


def test_elementwise_interpolation_reproduces_space_members():
    mesh = unit_square_grid(2)

    def member(x, y):
        return 1.0 + x - 2 * y + x**3 - 0.5 * y**3 + 0.25 * x * y

    coeffs = interpolate_elementwise(mesh, member)
    rng = np.random.default_rng(5)
    for el in range(mesh.num_elements):
        amap = mesh.affine_map(el)
        ref_pts = rng.uniform(-1, 1, (20, 2))
        phys = amap.apply(ref_pts)
        values = ref_element.eval_poly(coeffs[el], ref_pts)
        assert values == pytest.approx(member(phys[:, 0], phys[:, 1]),
                                       abs=1e-11)
