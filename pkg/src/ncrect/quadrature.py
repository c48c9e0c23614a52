"""Gauss-Legendre quadrature on [-1, 1] and tensor-product rules on the square.

Rules up to 5 points use tabulated nodes/weights (17 significant digits);
larger rules are generated by Newton iteration on the Legendre polynomial.
"""

from dataclasses import dataclass

import numpy as np

MAX_POINTS = 16

# Tabulated nodes/weights for the small rules on the hot path.
_TABLES = {
    1: ([0.0], [2.0]),
    2: (
        [-0.57735026918962576, 0.57735026918962576],
        [1.0, 1.0],
    ),
    3: (
        [-0.77459666924148338, 0.0, 0.77459666924148338],
        [0.55555555555555556, 0.88888888888888889, 0.55555555555555556],
    ),
    4: (
        [-0.86113631159405258, -0.33998104358485626,
         0.33998104358485626, 0.86113631159405258],
        [0.34785484513745386, 0.65214515486254614,
         0.65214515486254614, 0.34785484513745386],
    ),
    5: (
        [-0.90617984593866399, -0.53846931010568309, 0.0,
         0.53846931010568309, 0.90617984593866399],
        [0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
         0.47862867049936647, 0.23692688505618909],
    ),
}


@dataclass(frozen=True)
class QuadRule1D:
    """Nodes and weights of a Gauss-Legendre rule on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class QuadRule2D:
    """Tensor-product rule on [-1, 1]^2; points are (x, y) rows."""

    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)


def _legendre_and_derivative(n, x):
    """Value and derivative of the degree-n Legendre polynomial at x."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def _newton_rule(n):
    # Chebyshev-like initial guess, then Newton until the polynomial
    # residual drops below 1e-15.
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(64):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(p)) < 1e-15 and np.max(np.abs(dx)) < 1e-15:
            break
    # enforce exact symmetry about the origin
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    order = np.argsort(x)
    return x[order], w[order]


def gauss_1d(n: int) -> QuadRule1D:
    """n-point Gauss-Legendre rule on [-1, 1], exact through degree 2n-1.

    Raises ValueError unless 1 <= n <= 16.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"point count must be an integer, got {n!r}")
    if not 1 <= n <= MAX_POINTS:
        raise ValueError(f"point count must be in [1, {MAX_POINTS}], got {n}")
    if n in _TABLES:
        nodes, weights = _TABLES[n]
        nodes = np.array(nodes)
        weights = np.array(weights)
    else:
        nodes, weights = _newton_rule(n)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadRule1D(nodes, weights)


def tensor_rule(nx: int, ny: int) -> QuadRule2D:
    """Tensor product of two 1-D rules; x varies fastest in the point list."""
    rx = gauss_1d(nx)
    ry = gauss_1d(ny)
    X, Y = np.meshgrid(rx.nodes, ry.nodes)
    WX, WY = np.meshgrid(rx.weights, ry.weights)
    points = np.column_stack([X.ravel(), Y.ravel()])
    weights = (WX * WY).ravel()
    points.flags.writeable = False
    weights.flags.writeable = False
    return QuadRule2D(points, weights)
