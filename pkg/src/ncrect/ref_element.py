"""The cubic nonconforming reference element on [-1, 1]^2.

Degrees of freedom are values at the 12 Gauss points (the 3-point
Gauss-Legendre nodes of each edge, numbered counterclockwise from the
bottom edge).  The local space is the cubic polynomials enriched with
x^3*y - x*y^3, giving dimension 11.  One linear relation ties the 12
Gauss values of every member together, so the 12 point values carry
exactly 11 independent degrees of freedom.

Polynomial coefficient vectors use the fixed monomial ordering

    [1, x, y, x^2, x*y, y^2, x^3, x^2*y, x*y^2, y^3, enrichment]

where the default enrichment is x^3*y - x*y^3.  All serialized
coefficient data uses this order.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentValuesError

#: distance of the outer Gauss nodes from an edge midpoint
OUTER_NODE = np.sqrt(0.6)

_S = OUTER_NODE

#: the 12 Gauss points, counterclockwise from the bottom edge
GAUSS_POINTS = np.array([
    (-_S, -1.0), (0.0, -1.0), (_S, -1.0),   # bottom
    (1.0, -_S), (1.0, 0.0), (1.0, _S),      # right
    (_S, 1.0), (0.0, 1.0), (-_S, 1.0),      # top
    (-1.0, _S), (-1.0, 0.0), (-1.0, -_S),   # left
])
GAUSS_POINTS.flags.writeable = False

#: corner vertices, counterclockwise from (-1, -1)
VERTEX_COORDS = np.array([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
VERTEX_COORDS.flags.writeable = False

#: weights of the single linear relation among the 12 Gauss values:
#: RELATION_WEIGHTS @ values == 0 for every member of the local space
RELATION_WEIGHTS = np.array(
    [-5.0, 4.0, -5.0, 5.0, -4.0, 5.0, -5.0, 4.0, -5.0, 5.0, -4.0, 5.0])
RELATION_WEIGHTS.flags.writeable = False

#: exponents of the ten cubic monomials
MONOMIAL_POWERS = np.array([
    (0, 0), (1, 0), (0, 1),
    (2, 0), (1, 1), (0, 2),
    (3, 0), (2, 1), (1, 2), (0, 3),
])
MONOMIAL_POWERS.flags.writeable = False

#: supported enrichment monomial combinations (coefficients of x^3*y, x*y^3)
ENRICHMENTS = {
    "x3y-xy3": (1.0, -1.0),
    "x3y+xy3": (1.0, 1.0),
    "x3y": (1.0, 0.0),
    "xy3": (0.0, 1.0),
}

DIM = 11
NUM_GAUSS = 12


def basis_matrix(pts, enrichment="x3y-xy3"):
    """Values of the 11 basis polynomials at pts; shape (npts, 11)."""
    a, b = ENRICHMENTS[enrichment]
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    cols = [x**p * y**q for p, q in MONOMIAL_POWERS]
    cols.append(a * x**3 * y + b * x * y**3)
    return np.column_stack(cols)


def basis_gradient_matrix(pts, enrichment="x3y-xy3"):
    """Gradients of the 11 basis polynomials at pts; shape (npts, 11, 2)."""
    a, b = ENRICHMENTS[enrichment]
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    zero = np.zeros_like(x)
    gx, gy = [], []
    for p, q in MONOMIAL_POWERS:
        gx.append(p * x**(p - 1) * y**q if p > 0 else zero)
        gy.append(q * x**p * y**(q - 1) if q > 0 else zero)
    gx.append(a * 3 * x**2 * y + b * y**3)
    gy.append(a * x**3 + b * 3 * x * y**2)
    return np.stack([np.column_stack(gx), np.column_stack(gy)], axis=-1)


def value_matrix(points=None, enrichment="x3y-xy3"):
    """The 12x11 matrix of basis values at the Gauss points."""
    if points is None:
        points = GAUSS_POINTS
    return basis_matrix(points, enrichment)


_PINV = None


def _pseudo_inverse():
    # Least-squares fall-back for the overdetermined 12x11 system; exact
    # whenever the data satisfies the relation.
    global _PINV
    if _PINV is None:
        _PINV = np.linalg.pinv(value_matrix())
    return _PINV


def relation_residual(values) -> float:
    """Defect of the linear relation among 12 Gauss values.

    Zero exactly when the values are attainable by a member of the
    local space.
    """
    values = np.asarray(values, dtype=float)
    return float(RELATION_WEIGHTS @ values)


def default_relation_tol(values) -> float:
    values = np.asarray(values, dtype=float)
    return 1e-8 * max(1.0, float(np.max(np.abs(values))))


def coeffs_from_gauss_values(values, tol=None):
    """Coefficients of the unique member matching 12 Gauss values.

    Parameters
    ----------
    values : array of 12 reals in Gauss-point order.
    tol : consistency tolerance for the linear relation; defaults to
        1e-8 * max(1, max|values|).

    Raises InconsistentValuesError when the relation residual exceeds
    tol.
    """
    values = np.asarray(values, dtype=float)
    if tol is None:
        tol = default_relation_tol(values)
    res = relation_residual(values)
    if abs(res) > tol:
        raise InconsistentValuesError(abs(res), tol)
    return _pseudo_inverse() @ values


def eval_poly(coeffs, pts, enrichment="x3y-xy3"):
    """Evaluate a coefficient vector at one point or an array of points."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    out = basis_matrix(pts, enrichment) @ np.asarray(coeffs, dtype=float)
    return float(out[0]) if single else out


def eval_poly_grad(coeffs, pts, enrichment="x3y-xy3"):
    """Analytic gradient of a coefficient vector; (2,) or (npts, 2)."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    grads = basis_gradient_matrix(pts, enrichment)
    out = np.einsum("c,pcd->pd", np.asarray(coeffs, dtype=float), grads)
    return out[0] if single else out


# Generator slot layout: 0..3 vertex generators (corner j), 4..7 forward
# edge generators of edge j, 8..11 backward edge generators of edge j.
# Edge j runs counterclockwise from corner j; its Gauss points are
# 3j, 3j+1, 3j+2 with the midpoint in the middle.
NUM_GENERATORS = 12


def generator_gauss_values():
    """Prescribed Gauss values of the 12 local generators; (12, 12).

    Row g is the value pattern of generator g at the 12 Gauss points:
    vertex generators take 1 at the two points flanking their corner,
    edge generators take 5 at the edge midpoint and 4 at the outer point
    on the forward (resp. backward) side.
    """
    vals = np.zeros((NUM_GENERATORS, NUM_GAUSS))
    for j in range(4):
        vals[j, (3 * j - 1) % NUM_GAUSS] = 1.0
        vals[j, 3 * j] = 1.0
        vals[4 + j, 3 * j + 1] = 5.0
        vals[4 + j, 3 * j] = 4.0
        vals[8 + j, 3 * j + 1] = 5.0
        vals[8 + j, 3 * j + 2] = 4.0
    return vals


@dataclass(frozen=True)
class LocalGenerators:
    """The 12 generator polynomials spanning the 11-dimensional space."""

    gauss_values: np.ndarray  # (12, 12) prescribed point values
    coeffs: np.ndarray        # (12, 11) monomial coefficients


_GENERATORS = None


def local_generators() -> LocalGenerators:
    """Coefficients of the 12 local generators (rank 11, one dependence)."""
    global _GENERATORS
    if _GENERATORS is None:
        vals = generator_gauss_values()
        coeffs = vals @ _pseudo_inverse().T
        vals.flags.writeable = False
        coeffs.flags.writeable = False
        _GENERATORS = LocalGenerators(vals, coeffs)
    return _GENERATORS


@dataclass(frozen=True)
class VariantConditioning:
    enrichment: str
    rank: int
    smallest_singular_value: float
    largest_singular_value: float
    condition: float


@dataclass(frozen=True)
class UnisolvencyReport:
    variants: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.variants["x3y-xy3"].rank


def unisolvency_report(points=None) -> UnisolvencyReport:
    """Rank and conditioning of the Gauss-value matrix per enrichment.

    The default enrichment must have rank 11; the x3y+xy3 combination is
    singular at the Gauss points (x*y*(x^2+y^2-8/5) vanishes at all 12),
    which shows up as a near-zero smallest singular value.
    """
    variants = {}
    for name in ENRICHMENTS:
        M = value_matrix(points, name)
        sv = np.linalg.svd(M, compute_uv=False)
        rank_tol = sv[0] * max(M.shape) * np.finfo(float).eps
        rank = int(np.sum(sv > rank_tol))
        variants[name] = VariantConditioning(
            enrichment=name,
            rank=rank,
            smallest_singular_value=float(sv[-1]),
            largest_singular_value=float(sv[0]),
            condition=float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf,
        )
    return UnisolvencyReport(variants)
