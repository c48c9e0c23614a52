"""Assembly and solution of the discrete Dirichlet and Neumann problems.

The strong problem is -div(alpha grad u) + beta u = f with either a
homogeneous Dirichlet condition or the flux condition
n.(alpha grad u) + gamma u = g.  Element matrices are computed over the
12 local generators (rank 11); the redundancy is harmless because the
global numbering already removes the dependent combination.  Scatter-add
runs in ascending (element, slot) order so single-threaded assembly is
bitwise reproducible.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from . import fe_space, ref_element
from .errors import (ConfigurationError, IndefiniteSystemError,
                     NonConvergenceError)
from .fe_space import DofMap, FeFunction, element_local_global, localize
from .fields import eval_gradient_field, eval_matrix_field, eval_scalar_field
from .mesh import Mesh
from .quadrature import QuadRule2D, gauss_1d, tensor_rule

DEFAULT_VOLUME_RULE = (5, 5)
DEFAULT_EDGE_RULE = 5
#: error norms are sampled with the 3x3 Gauss rule per element, matching
#: the convention of the reference convergence tables ("apparent" norms);
#: pass a finer rule to compute_errors for fully converged norms
DEFAULT_ERROR_RULE = (3, 3)


@dataclass(frozen=True)
class DirichletBC:
    """Homogeneous Dirichlet condition u = 0 on the whole boundary."""


@dataclass(frozen=True)
class NeumannBC:
    """Flux condition n.(alpha grad u) + gamma u = g on the boundary.

    g is called as g(x, y, nx, ny) with (nx, ny) the unit outward
    normal; gamma as gamma(x, y), or None for identically zero.
    """

    g: Callable
    gamma: Callable | None = None


@dataclass(frozen=True)
class Problem:
    """Coefficients and data of the second-order elliptic problem.

    alpha : (x, y) -> 2x2 SPD array, or None for the identity
    beta : (x, y) -> nonnegative real, or None for zero
    f : (x, y) -> real source term
    bc : DirichletBC or NeumannBC
    """

    f: Callable
    bc: object
    alpha: Callable | None = None
    beta: Callable | None = None


@dataclass
class SparseSystem:
    """Symmetric sparse matrix (CSR) and right-hand side."""

    matrix: csr_matrix
    rhs: np.ndarray


@dataclass(frozen=True)
class ErrorPair:
    """L2 and broken-energy error of a discrete solution."""

    l2: float
    energy: float


def _as_rule(rule) -> QuadRule2D:
    if isinstance(rule, QuadRule2D):
        return rule
    nx, ny = rule
    return tensor_rule(nx, ny)


class _ReferenceTables:
    """Generator values/gradients at the points of a volume rule."""

    def __init__(self, rule: QuadRule2D):
        gens = ref_element.local_generators().coeffs
        self.rule = rule
        self.values = ref_element.basis_matrix(rule.points) @ gens.T
        self.gradients = np.einsum(
            "gc,qcd->gqd", gens, ref_element.basis_gradient_matrix(rule.points))


def _local_matrix(mesh, element_id, problem, tables):
    amap = mesh.affine_map(element_id)
    detA = abs(amap.det)
    binv_t = np.linalg.inv(amap.A).T
    pts = amap.apply(tables.rule.points)
    w = tables.rule.weights * detA
    grads = np.einsum("de,gqe->gqd", binv_t, tables.gradients)
    if problem.alpha is None:
        K = np.einsum("gqd,hqd,q->gh", grads, grads, w)
    else:
        alpha = eval_matrix_field(problem.alpha, pts[:, 0], pts[:, 1])
        flux = np.einsum("qde,gqe->gqd", alpha, grads)
        K = np.einsum("gqd,hqd,q->gh", flux, grads, w)
    if problem.beta is not None:
        beta = eval_scalar_field(problem.beta, pts[:, 0], pts[:, 1])
        K += np.einsum("qg,qh,q->gh", tables.values, tables.values, w * beta)
    fvals = eval_scalar_field(problem.f, pts[:, 0], pts[:, 1])
    load = tables.values.T @ (w * fvals)
    return K, load


def local_matrix(mesh: Mesh, element_id: int, problem: Problem,
                 volume_rule=DEFAULT_VOLUME_RULE):
    """12x12 generator matrix and 12-entry load vector of one element.

    Entry (i, j) integrates alpha grad(psi_i).grad(psi_j) + beta psi_i
    psi_j over the element, with the generators pushed forward through
    the affine map; the load integrates f psi_i.
    """
    tables = _ReferenceTables(_as_rule(volume_rule))
    return _local_matrix(mesh, element_id, problem, tables)


def _check_kind_matches_bc(dofmap: DofMap, problem: Problem):
    if isinstance(problem.bc, DirichletBC) and dofmap.kind != "dirichlet0":
        raise ConfigurationError(
            "Dirichlet problems require a dirichlet0 dof map")
    if isinstance(problem.bc, NeumannBC) and dofmap.kind != "full":
        raise ConfigurationError("Neumann problems require a full dof map")


def _spot_check_alpha(problem: Problem, mesh: Mesh, rule: QuadRule2D):
    if problem.alpha is None:
        return
    pts = mesh.affine_map(0).apply(rule.points)
    alpha = eval_matrix_field(problem.alpha, pts[:, 0], pts[:, 1])
    sym_defect = np.abs(alpha - alpha.transpose(0, 2, 1)).max()
    if sym_defect > 1e-10 * max(1.0, np.abs(alpha).max()):
        raise ConfigurationError("alpha must be symmetric")
    eigs = np.linalg.eigvalsh(alpha)
    if eigs.min() <= 0:
        raise ConfigurationError(
            f"alpha is not positive definite at sample points "
            f"(smallest eigenvalue {eigs.min():.3e})")


def assemble(mesh: Mesh, dofmap: DofMap, problem: Problem,
             volume_rule=DEFAULT_VOLUME_RULE,
             edge_rule=DEFAULT_EDGE_RULE) -> SparseSystem:
    """Assemble the stiffness/mass matrix and load vector.

    Neumann problems additionally accumulate the boundary integrals of
    gamma psi_i psi_j into the matrix and g psi_i into the load.
    """
    _check_kind_matches_bc(dofmap, problem)
    tables = _ReferenceTables(_as_rule(volume_rule))
    _spot_check_alpha(problem, mesh, tables.rule)

    slot_maps = [element_local_global(mesh, dofmap, el)
                 for el in range(mesh.num_elements)]
    rows, cols, data = [], [], []
    rhs = np.zeros(dofmap.total)
    for el in range(mesh.num_elements):
        K, load = _local_matrix(mesh, el, problem, tables)
        pairs = slot_maps[el]
        slots = np.array([s for s, _ in pairs], dtype=int)
        dofs = np.array([d for _, d in pairs], dtype=int)
        rows.append(np.repeat(dofs, len(dofs)))
        cols.append(np.tile(dofs, len(dofs)))
        data.append(K[np.ix_(slots, slots)].ravel())
        rhs[dofs] += load[slots]

    if isinstance(problem.bc, NeumannBC):
        _boundary_terms(mesh, dofmap, problem.bc, rhs, slot_maps, edge_rule,
                        rows, cols, data)
    matrix = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dofmap.total, dofmap.total)).tocsr()
    return SparseSystem(matrix, rhs)


def _boundary_terms(mesh, dofmap, bc, rhs, slot_maps, edge_rule,
                    rows, cols, data):
    """Accumulate boundary-edge load (and gamma mass) contributions."""
    rule = gauss_1d(edge_rule)
    gens = ref_element.local_generators().coeffs
    for el in range(mesh.num_elements):
        amap = None
        for loc in range(4):
            eid = mesh.element_edges[el, loc]
            if not mesh.boundary_edge[eid]:
                continue
            if amap is None:
                amap = mesh.affine_map(el)
            a, b = mesh.vertices[mesh.edges[eid]]
            mid, half = (a + b) / 2, (b - a) / 2
            pts = mid[None, :] + np.outer(rule.nodes, half)
            jac = np.linalg.norm(half)
            normal = mesh.outward_normal(el, loc)
            values = ref_element.basis_matrix(amap.pull_back(pts)) @ gens.T
            pairs = slot_maps[el]
            slots = np.array([s for s, _ in pairs], dtype=int)
            dofs = np.array([d for _, d in pairs], dtype=int)
            gvals = eval_scalar_field(
                lambda x, y: bc.g(x, y, normal[0], normal[1]),
                pts[:, 0], pts[:, 1])
            rhs[dofs] += (values.T @ (rule.weights * jac * gvals))[slots]
            if bc.gamma is not None:
                gam = eval_scalar_field(bc.gamma, pts[:, 0], pts[:, 1])
                M = np.einsum("qg,qh,q->gh", values, values,
                              rule.weights * jac * gam)
                rows.append(np.repeat(dofs, len(dofs)))
                cols.append(np.tile(dofs, len(dofs)))
                data.append(M[np.ix_(slots, slots)].ravel())


def solve(system: SparseSystem, rel_tol: float = 1e-12,
          max_iter: int | None = None):
    """Jacobi-preconditioned conjugate gradients.

    Stops when the preconditioned residual norm drops below rel_tol
    times its initial value.  Returns (solution, iteration_count).
    Raises IndefiniteSystemError on nonpositive curvature and
    NonConvergenceError (with the residual history) when max_iter is
    exhausted; the default limit is 20 * dimension.
    """
    A = system.matrix
    b = system.rhs
    n = len(b)
    if max_iter is None:
        max_iter = 20 * n
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise IndefiniteSystemError(
            "matrix diagonal has nonpositive entries; not SPD")
    inv_diag = 1.0 / diag
    x = np.zeros(n)
    r = b.copy()
    z = inv_diag * r
    rho = float(r @ z)
    rho0 = rho
    history = [1.0]
    if rho0 == 0.0:
        return x, 0
    p = z.copy()
    target = rel_tol * rel_tol * rho0
    for it in range(1, max_iter + 1):
        Ap = A @ p
        curvature = float(p @ Ap)
        if curvature <= 0:
            raise IndefiniteSystemError(
                f"nonpositive curvature {curvature:.3e} at iteration {it}; "
                f"matrix is singular or indefinite",
                residual_history=history)
        step = rho / curvature
        x += step * p
        r -= step * Ap
        z = inv_diag * r
        rho_next = float(r @ z)
        history.append(math.sqrt(max(rho_next, 0.0) / rho0))
        if rho_next <= target:
            return x, it
        p = z + (rho_next / rho) * p
        rho = rho_next
    raise NonConvergenceError(max_iter, history)


def compute_errors(mesh: Mesh, dofmap: DofMap, u_h: FeFunction, u_exact,
                   grad_exact, problem: Problem,
                   error_rule=DEFAULT_ERROR_RULE) -> ErrorPair:
    """L2 and broken-energy error of u_h against an exact solution.

    The energy norm integrates alpha grad(e).grad(e) + beta e^2 with
    elementwise gradients.  Both integrals are sampled with error_rule
    (3x3 by default, the "apparent" convention of the reference tables).
    """
    gens = ref_element.local_generators().coeffs
    coeffs = np.array([
        localize(mesh, dofmap, u_h.coeffs, el) @ gens
        for el in range(mesh.num_elements)
    ])
    return errors_from_local_coeffs(mesh, coeffs, u_exact, grad_exact,
                                    problem, error_rule)


def errors_from_local_coeffs(mesh: Mesh, local_coeffs, u_exact, grad_exact,
                             problem: Problem,
                             error_rule=DEFAULT_ERROR_RULE) -> ErrorPair:
    """Error norms of an elementwise polynomial field.

    local_coeffs has shape (num_elements, 11) in the monomial ordering;
    this also serves the elementwise interpolants, which need not be
    continuous at the Gauss points.
    """
    rule = _as_rule(error_rule)
    basis = ref_element.basis_matrix(rule.points)
    basis_grad = ref_element.basis_gradient_matrix(rule.points)
    l2_sq = 0.0
    energy_sq = 0.0
    for el in range(mesh.num_elements):
        amap = mesh.affine_map(el)
        w = rule.weights * abs(amap.det)
        pts = amap.apply(rule.points)
        binv_t = np.linalg.inv(amap.A).T
        diff = eval_scalar_field(u_exact, pts[:, 0], pts[:, 1]) \
            - basis @ local_coeffs[el]
        grad_ref = np.einsum("c,qcd->qd", local_coeffs[el], basis_grad)
        grad_diff = eval_gradient_field(grad_exact, pts[:, 0], pts[:, 1]) \
            - grad_ref @ binv_t.T
        l2_sq += float(w @ diff**2)
        if problem.alpha is None:
            flux = grad_diff
        else:
            alpha = eval_matrix_field(problem.alpha, pts[:, 0], pts[:, 1])
            flux = np.einsum("qde,qe->qd", alpha, grad_diff)
        energy_sq += float(w @ np.einsum("qd,qd->q", flux, grad_diff))
        if problem.beta is not None:
            beta = eval_scalar_field(problem.beta, pts[:, 0], pts[:, 1])
            energy_sq += float((w * beta) @ diff**2)
    return ErrorPair(math.sqrt(l2_sq), math.sqrt(energy_sq))


def observed_order(e_coarse: float, e_fine: float) -> float:
    """log2 of the error drop between meshes of size h and h/2."""
    if e_coarse <= 0 or e_fine <= 0:
        raise ValueError("errors must be positive to compute an order")
    return math.log2(e_coarse / e_fine)


def jump_orthogonality_check(mesh: Mesh, dofmap: DofMap, w: FeFunction,
                             perturb=None) -> float:
    """Largest moment of the inter-element jumps against edge quadratics.

    For every interior edge the jump of w is integrated against 1, t,
    t^2 in the canonical edge parameter; members of the space give
    moments at rounding level because their jumps vanish at the 3 Gauss
    points and edge traces are cubic.  `perturb` optionally maps element
    ids to 12-entry slot-weight offsets, used as a negative control.
    """
    gens = ref_element.local_generators().coeffs
    local = {}

    def coeffs_for(el):
        if el not in local:
            slot_w = localize(mesh, dofmap, w.coeffs, el)
            if perturb and el in perturb:
                slot_w = slot_w + np.asarray(perturb[el], dtype=float)
            local[el] = slot_w @ gens
        return local[el]

    rule = gauss_1d(5)
    t = rule.nodes
    moments_basis = np.stack([np.ones_like(t), t, t * t])
    worst = 0.0
    for eid in np.flatnonzero(~mesh.boundary_edge):
        a, b = mesh.vertices[mesh.edges[eid]]
        mid, half = (a + b) / 2, (b - a) / 2
        pts = mid[None, :] + np.outer(t, half)
        jac = np.linalg.norm(half)
        el1, el2 = mesh.edge_elements[eid]
        trace1 = ref_element.eval_poly(
            coeffs_for(el1), mesh.affine_map(el1).pull_back(pts))
        trace2 = ref_element.eval_poly(
            coeffs_for(el2), mesh.affine_map(el2).pull_back(pts))
        jump = trace1 - trace2
        moments = moments_basis @ (rule.weights * jac * jump)
        worst = max(worst, float(np.max(np.abs(moments))))
    return worst


def dump_matrix_text(system: SparseSystem) -> str:
    """Coordinate-format dump (row col value per line, sorted)."""
    coo = system.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}"
             for i in order]
    return "\n".join(lines) + "\n"
