"""Built-in manufactured-solution problems on the unit square.

Source terms and boundary data are hand-derived closed forms; on first
use each preset is validated against a central finite-difference check
of its source term, so transcription slips in the long trigonometric
expressions cannot pass silently.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assembly import DirichletBC, NeumannBC, Problem
from .errors import ConfigurationError

_TWO_PI = 2.0 * math.pi


def _poly(x, y):
    return x**3 - y**4 + x**2 * y**3


def _poly_dx(x, y):
    return 3 * x**2 + 2 * x * y**3


def _poly_dy(x, y):
    return -4 * y**3 + 3 * x**2 * y**2


def _poly_dxx(x, y):
    return 6 * x + 2 * y**3


def _poly_dyy(x, y):
    return -12 * y**2 + 6 * x**2 * y


def _dirichlet_u(x, y):
    return np.sin(_TWO_PI * x) * np.sin(_TWO_PI * y) * _poly(x, y)


def _dirichlet_grad(x, y):
    ss = np.sin(_TWO_PI * x) * np.sin(_TWO_PI * y)
    cs = np.cos(_TWO_PI * x) * np.sin(_TWO_PI * y)
    sc = np.sin(_TWO_PI * x) * np.cos(_TWO_PI * y)
    return np.stack([
        _TWO_PI * cs * _poly(x, y) + ss * _poly_dx(x, y),
        _TWO_PI * sc * _poly(x, y) + ss * _poly_dy(x, y),
    ], axis=-1)


def _dirichlet_f(x, y):
    ss = np.sin(_TWO_PI * x) * np.sin(_TWO_PI * y)
    cs = np.cos(_TWO_PI * x) * np.sin(_TWO_PI * y)
    sc = np.sin(_TWO_PI * x) * np.cos(_TWO_PI * y)
    u_xx = (-_TWO_PI**2 * ss * _poly(x, y)
            + 2 * _TWO_PI * cs * _poly_dx(x, y) + ss * _poly_dxx(x, y))
    u_yy = (-_TWO_PI**2 * ss * _poly(x, y)
            + 2 * _TWO_PI * sc * _poly_dy(x, y) + ss * _poly_dyy(x, y))
    return -(u_xx + u_yy)


def _neumann_u(x, y):
    return np.cos(_TWO_PI * x) * np.cos(_TWO_PI * y) * _poly(x, y)


def _neumann_grad(x, y):
    cc = np.cos(_TWO_PI * x) * np.cos(_TWO_PI * y)
    sc = np.sin(_TWO_PI * x) * np.cos(_TWO_PI * y)
    cs = np.cos(_TWO_PI * x) * np.sin(_TWO_PI * y)
    return np.stack([
        -_TWO_PI * sc * _poly(x, y) + cc * _poly_dx(x, y),
        -_TWO_PI * cs * _poly(x, y) + cc * _poly_dy(x, y),
    ], axis=-1)


def _neumann_f(x, y):
    cc = np.cos(_TWO_PI * x) * np.cos(_TWO_PI * y)
    sc = np.sin(_TWO_PI * x) * np.cos(_TWO_PI * y)
    cs = np.cos(_TWO_PI * x) * np.sin(_TWO_PI * y)
    u_xx = (-_TWO_PI**2 * cc * _poly(x, y)
            - 2 * _TWO_PI * sc * _poly_dx(x, y) + cc * _poly_dxx(x, y))
    u_yy = (-_TWO_PI**2 * cc * _poly(x, y)
            - 2 * _TWO_PI * cs * _poly_dy(x, y) + cc * _poly_dyy(x, y))
    return -(u_xx + u_yy) + _neumann_u(x, y)


def _neumann_g(x, y, nx, ny):
    grad = _neumann_grad(x, y)
    return grad[..., 0] * nx + grad[..., 1] * ny


@dataclass(frozen=True)
class PresetProblem:
    """A Problem together with its exact solution and gradient."""

    name: str
    problem: Problem
    u_exact: Callable
    grad_exact: Callable


def validate_against_finite_differences(preset: PresetProblem,
                                        num_points: int = 100,
                                        step: float = 1e-4,
                                        tol: float = 1e-5,
                                        seed: int = 20240) -> float:
    """Check f against a central-difference Laplacian of u_exact.

    Returns the largest deviation; raises if it exceeds tol.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(2 * step, 1.0 - 2 * step, size=(num_points, 2))
    x, y = pts[:, 0], pts[:, 1]
    u = preset.u_exact
    lap = (u(x + step, y) + u(x - step, y) + u(x, y + step) + u(x, y - step)
           - 4.0 * u(x, y)) / step**2
    expected = -lap
    if preset.problem.beta is not None:
        expected = expected + preset.problem.beta(x, y) * u(x, y)
    worst = float(np.max(np.abs(expected - preset.problem.f(x, y))))
    if worst > tol:
        raise AssertionError(
            f"preset {preset.name!r} failed the finite-difference source "
            f"check: max deviation {worst:.3e} > {tol:.0e}")
    return worst


_VALIDATED: set = set()


def preset_problem(name: str) -> PresetProblem:
    """Named problem presets: "dirichlet-paper" or "neumann-paper".

    Both use the unit square.  The first construction of each preset
    runs the finite-difference source check.
    """
    if name == "dirichlet-paper":
        preset = PresetProblem(
            name=name,
            problem=Problem(f=_dirichlet_f, bc=DirichletBC()),
            u_exact=_dirichlet_u,
            grad_exact=_dirichlet_grad,
        )
    elif name == "neumann-paper":
        preset = PresetProblem(
            name=name,
            problem=Problem(
                f=_neumann_f,
                bc=NeumannBC(g=_neumann_g, gamma=None),
                beta=lambda x, y: np.ones_like(np.asarray(x, dtype=float)),
            ),
            u_exact=_neumann_u,
            grad_exact=_neumann_grad,
        )
    else:
        raise ConfigurationError(
            f"unknown problem preset {name!r}; "
            f"expected 'dirichlet-paper' or 'neumann-paper'")
    if name not in _VALIDATED:
        validate_against_finite_differences(preset)
        _VALIDATED.add(name)
    return preset


PRESET_NAMES = ("dirichlet-paper", "neumann-paper")

#: space kind matching each preset's boundary condition
PRESET_KINDS = {"dirichlet-paper": "dirichlet0", "neumann-paper": "full"}
