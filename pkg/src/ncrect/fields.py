"""Helpers to evaluate user-supplied coefficient callables at point sets.

Callables may be numpy-vectorized (preferred) or plain scalar functions;
scalar and constant returns are broadcast to the requested shape.
"""

import numpy as np


def eval_scalar_field(fn, x, y):
    """Evaluate fn(x, y) -> real over coordinate arrays; returns (n,)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.asarray(fn(x, y), dtype=float)
    if out.shape == x.shape:
        return out
    if out.shape == ():
        return np.full(x.shape, float(out))
    return np.array([float(fn(xi, yi)) for xi, yi in zip(x, y)])


def eval_matrix_field(fn, x, y):
    """Evaluate a 2x2-matrix-valued fn pointwise; returns (n, 2, 2)."""
    return np.array([np.asarray(fn(xi, yi), dtype=float)
                     for xi, yi in zip(x, y)])


def eval_gradient_field(fn, x, y):
    """Evaluate fn(x, y) -> (grad_x, grad_y) over arrays; returns (n, 2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.asarray(fn(x, y), dtype=float)
    if out.shape == x.shape + (2,):
        return out
    return np.array([np.asarray(fn(xi, yi), dtype=float).reshape(2)
                     for xi, yi in zip(x, y)])
