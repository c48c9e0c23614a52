"""Cubic nonconforming finite elements on rectangular meshes.

The element carries its degrees of freedom at the three Gauss points of
each edge (12 values tied by one linear relation, 11 independent), uses
the cubic polynomials enriched with x^3*y - x*y^3 on the reference
square, and is continuous across elements exactly at the edge Gauss
points.  The package provides the reference element, structured
parallelogram meshes, global Dirichlet/Neumann spaces, sparse assembly
with a preconditioned CG solver, manufactured-solution presets, and a
CLI for convergence studies.
"""

from .assembly import (DirichletBC, ErrorPair, NeumannBC, Problem,
                       SparseSystem, assemble, compute_errors, local_matrix,
                       jump_orthogonality_check, observed_order, solve)
from .convergence import (ConvergenceReport, ConvergenceRow, RunConfig,
                          run_convergence)
from .errors import (ConfigurationError, EmptySpaceError,
                     InconsistentValuesError, IndefiniteSystemError,
                     NonConvergenceError, OutOfDomainError)
from .fe_space import (DofMap, FeFunction, build_dofmap, element_local_global,
                       evaluate_fe_function, interpolate_elementwise,
                       interpolate_local, local_values_of_global_basis)
from .mesh import AffineMap, Mesh, uniform_grid, unit_square_grid
from .problems import preset_problem
from .quadrature import QuadRule1D, QuadRule2D, gauss_1d, tensor_rule
from .ref_element import (GAUSS_POINTS, coeffs_from_gauss_values, eval_poly,
                          eval_poly_grad, local_generators, relation_residual,
                          unisolvency_report)

__version__ = "0.1.0"
