"""Global nonconforming spaces built from Gauss-point degrees of freedom.

Two kinds of space are supported:

* ``"full"`` -- one basis function per vertex plus two per edge, with a
  single function dropped to remove the one global linear dependence
  (dimension num_vertices + 2*num_edges - 1).
* ``"dirichlet0"`` -- only functions attached to interior vertices and
  interior edges, so every member vanishes at all boundary Gauss points
  (dimension num_interior_vertices + 2*num_interior_edges).

Each global basis function restricted to an element coincides with one
of the 12 local generators; `element_local_global` enumerates the
(generator slot, global dof) pairs that realize the correspondence.
"""

from dataclasses import dataclass

import numpy as np

from . import ref_element
from .errors import EmptySpaceError, OutOfDomainError
from .mesh import Mesh

KINDS = ("dirichlet0", "full")


@dataclass(frozen=True)
class DofMap:
    """Global numbering of the vertex/edge basis functions.

    vertex_dof, edge_plus_dof, edge_minus_dof hold global dof ids or -1
    where the function is excluded (boundary entity or the dropped
    function).  `dropped` names the single omitted function for the
    full kind as ("edge_minus", edge_id); None for dirichlet0.
    """

    kind: str
    vertex_dof: np.ndarray
    edge_plus_dof: np.ndarray
    edge_minus_dof: np.ndarray
    dropped: tuple | None
    total: int


def build_dofmap(mesh: Mesh, kind: str) -> DofMap:
    """Number the global basis functions of the requested space."""
    if kind not in KINDS:
        raise ValueError(f"unknown space kind {kind!r}; expected one of {KINDS}")
    nv, ne = mesh.num_vertices, mesh.num_edges
    vertex_dof = -np.ones(nv, dtype=int)
    edge_plus_dof = -np.ones(ne, dtype=int)
    edge_minus_dof = -np.ones(ne, dtype=int)
    next_id = 0
    if kind == "dirichlet0":
        for v in range(nv):
            if not mesh.boundary_vertex[v]:
                vertex_dof[v] = next_id
                next_id += 1
        for e in range(ne):
            if not mesh.boundary_edge[e]:
                edge_plus_dof[e] = next_id
                edge_minus_dof[e] = next_id + 1
                next_id += 2
        dropped = None
        if next_id == 0:
            raise EmptySpaceError(
                "the homogeneous-boundary space is empty on this mesh "
                "(no interior vertices or edges)")
    else:
        # drop the backward function of the highest-index edge; the
        # remaining functions are linearly independent
        dropped = ("edge_minus", ne - 1)
        for v in range(nv):
            vertex_dof[v] = next_id
            next_id += 1
        for e in range(ne):
            edge_plus_dof[e] = next_id
            next_id += 1
            if e != ne - 1:
                edge_minus_dof[e] = next_id
                next_id += 1
    for arr in (vertex_dof, edge_plus_dof, edge_minus_dof):
        arr.flags.writeable = False
    return DofMap(kind, vertex_dof, edge_plus_dof, edge_minus_dof,
                  dropped, next_id)


def element_local_global(mesh: Mesh, dofmap: DofMap, element_id: int):
    """(generator slot, global dof) pairs supported on an element.

    Slots follow the reference layout: 0..3 vertex generators, 4..7
    forward edge generators, 8..11 backward edge generators.  An edge
    whose canonical direction is reversed in this element swaps its
    forward/backward slots.  Pairs are returned sorted by slot.
    """
    verts = mesh.elements[element_id]
    pairs = []
    for corner in range(4):
        dof = dofmap.vertex_dof[verts[corner]]
        if dof >= 0:
            pairs.append((corner, int(dof)))
    for loc in range(4):
        eid = mesh.element_edges[element_id, loc]
        forward = mesh.element_edge_forward[element_id, loc]
        plus = dofmap.edge_plus_dof[eid]
        minus = dofmap.edge_minus_dof[eid]
        if plus >= 0:
            pairs.append(((4 + loc) if forward else (8 + loc), int(plus)))
        if minus >= 0:
            pairs.append(((8 + loc) if forward else (4 + loc), int(minus)))
    pairs.sort()
    return pairs


def local_values_of_global_basis(mesh: Mesh, dofmap: DofMap,
                                 element_id: int, dof_id: int):
    """Gauss values of one global basis function on one element.

    Returns the 12 values in reference ordering; all zeros when the
    function has no support on the element.
    """
    gen_values = ref_element.local_generators().gauss_values
    for slot, dof in element_local_global(mesh, dofmap, element_id):
        if dof == dof_id:
            return gen_values[slot].copy()
    return np.zeros(ref_element.NUM_GAUSS)


def localize(mesh: Mesh, dofmap: DofMap, coeffs, element_id: int):
    """Slot-indexed local weights of a global coefficient vector; (12,)."""
    coeffs = np.asarray(coeffs, dtype=float)
    local = np.zeros(ref_element.NUM_GENERATORS)
    for slot, dof in element_local_global(mesh, dofmap, element_id):
        local[slot] = coeffs[dof]
    return local


def interpolate_local(values):
    """Least-squares fit in the local space to 12 Gauss values.

    Exact (residual below 1e-12) whenever the values satisfy the linear
    relation; for general data this is the closest attainable value set.
    """
    values = np.asarray(values, dtype=float)
    return ref_element._pseudo_inverse() @ values


@dataclass
class FeFunction:
    """A member of the global space: dofmap plus one weight per basis."""

    dofmap: DofMap
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.dofmap.total,):
            raise ValueError(
                f"coefficient vector has shape {self.coeffs.shape}, "
                f"expected ({self.dofmap.total},)")


def basis_function(dofmap: DofMap, dof_id: int) -> FeFunction:
    """The global basis function with index dof_id as an FeFunction."""
    coeffs = np.zeros(dofmap.total)
    coeffs[dof_id] = 1.0
    return FeFunction(dofmap, coeffs)


def local_poly_coeffs(mesh: Mesh, dofmap: DofMap, f: FeFunction,
                      element_id: int):
    """Monomial coefficients of f restricted to an element; (11,)."""
    local = localize(mesh, dofmap, f.coeffs, element_id)
    return local @ ref_element.local_generators().coeffs


def evaluate_fe_function(mesh: Mesh, f: FeFunction, point):
    """Point evaluation of an FeFunction.

    The containing element is located with ties broken toward the lower
    element id; at a shared Gauss point the traces agree anyway.
    Raises OutOfDomainError for points outside the mesh.
    """
    try:
        element_id = mesh.locate(point)
    except ValueError as exc:
        raise OutOfDomainError(str(exc)) from None
    ref = mesh.affine_map(element_id).pull_back(np.asarray(point, dtype=float))
    coeffs = local_poly_coeffs(mesh, f.dofmap, f, element_id)
    return ref_element.eval_poly(coeffs, ref)


def interpolate_elementwise(mesh: Mesh, func):
    """Per-element least-squares fit of a function at the Gauss points.

    Returns monomial coefficients of shape (num_elements, 11).  The fit
    reproduces members of the local space exactly; for general smooth
    functions the 12 Gauss values violate the linear relation and the
    result is the least-squares compromise.
    """
    pinv_t = ref_element._pseudo_inverse().T
    out = np.empty((mesh.num_elements, ref_element.DIM))
    for el in range(mesh.num_elements):
        pts = mesh.element_gauss_points(el)
        values = np.asarray(func(pts[:, 0], pts[:, 1]), dtype=float)
        out[el] = values @ pinv_t
    return out
