"""Mesh-refinement sweeps and convergence reports.

A sweep solves the configured problem on a sequence of n-by-n grids
(h = 1/n), records errors, and chains observed orders across
consecutive levels.  Reports serialize to CSV with full float precision
(exact round trip) or to a terminal table with the same precision as
the reference tables (4 significant digits, orders to 2 decimals).
"""

import io
from dataclasses import dataclass, field, replace

from . import assembly, fe_space
from .errors import ConfigurationError
from .mesh import unit_square_grid
from .problems import PRESET_KINDS, preset_problem

CSV_COLUMNS = ("h", "dofs", "l2_error", "l2_order",
               "energy_error", "energy_order")


@dataclass(frozen=True)
class RunConfig:
    """Configuration of a refinement sweep.

    levels must be strictly increasing; Dirichlet problems need n >= 2
    (a 1x1 grid has no interior degrees of freedom).
    """

    problem: str = "dirichlet-paper"
    levels: tuple = (2, 4, 8, 16, 32)
    quad_volume: int = 5
    quad_edge: int = 5
    quad_error: int = 3
    solver_tol: float = 1e-12
    solver_max_iter: int | None = None
    output_path: str | None = None
    output_format: str = "pretty-table"


def validate_config(config: RunConfig) -> RunConfig:
    levels = tuple(int(n) for n in config.levels)
    if len(levels) == 0:
        raise ConfigurationError("levels must not be empty")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigurationError(f"levels must be strictly increasing: {levels}")
    if levels[0] < 1:
        raise ConfigurationError(f"levels must be positive: {levels}")
    if config.problem not in PRESET_KINDS:
        raise ConfigurationError(f"unknown problem preset {config.problem!r}")
    if PRESET_KINDS[config.problem] == "dirichlet0" and levels[0] < 2:
        raise ConfigurationError(
            "Dirichlet sweeps need n >= 2 at the coarsest level")
    if config.output_format not in ("csv", "pretty-table"):
        raise ConfigurationError(
            f"unknown output format {config.output_format!r}")
    return replace(config, levels=levels)


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    dofs: int
    l2_error: float
    l2_order: float | None
    energy_error: float
    energy_order: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    problem: str
    rows: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class LevelResult:
    """One solved level; solution kept for downstream inspection."""

    n: int
    dofs: int
    errors: assembly.ErrorPair
    iterations: int
    u_h: fe_space.FeFunction


def solve_level(config: RunConfig, n: int) -> LevelResult:
    """Build, assemble and solve one n-by-n level of the sweep."""
    preset = preset_problem(config.problem)
    mesh = unit_square_grid(n)
    dofmap = fe_space.build_dofmap(mesh, PRESET_KINDS[config.problem])
    system = assembly.assemble(
        mesh, dofmap, preset.problem,
        volume_rule=(config.quad_volume, config.quad_volume),
        edge_rule=config.quad_edge)
    x, iters = assembly.solve(system, rel_tol=config.solver_tol,
                              max_iter=config.solver_max_iter)
    u_h = fe_space.FeFunction(dofmap, x)
    errors = assembly.compute_errors(
        mesh, dofmap, u_h, preset.u_exact, preset.grad_exact, preset.problem,
        error_rule=(config.quad_error, config.quad_error))
    return LevelResult(n, dofmap.total, errors, iters, u_h)


def run_convergence(config: RunConfig, progress=None) -> ConvergenceReport:
    """Run the configured sweep and chain observed orders across levels."""
    config = validate_config(config)
    rows = []
    prev = None
    for n in config.levels:
        result = solve_level(config, n)
        if prev is None:
            l2_order = energy_order = None
        else:
            l2_order = assembly.observed_order(prev.l2, result.errors.l2)
            energy_order = assembly.observed_order(
                prev.energy, result.errors.energy)
        rows.append(ConvergenceRow(
            h=1.0 / n, dofs=result.dofs,
            l2_error=result.errors.l2, l2_order=l2_order,
            energy_error=result.errors.energy, energy_order=energy_order))
        prev = result.errors
        if progress is not None:
            progress(rows[-1])
    return ConvergenceReport(config.problem, tuple(rows))


def report_to_csv(report: ConvergenceReport) -> str:
    """Serialize with repr precision so parsing restores exact floats."""
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in report.rows:
        cells = [repr(row.h), str(row.dofs), repr(row.l2_error),
                 "" if row.l2_order is None else repr(row.l2_order),
                 repr(row.energy_error),
                 "" if row.energy_order is None else repr(row.energy_order)]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def report_from_csv(text: str, problem: str = "") -> ConvergenceReport:
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ConfigurationError(f"unexpected CSV header {header}")
    rows = []
    for line in lines[1:]:
        h, dofs, l2e, l2o, ene, eno = line.split(",")
        rows.append(ConvergenceRow(
            h=float(h), dofs=int(dofs),
            l2_error=float(l2e), l2_order=float(l2o) if l2o else None,
            energy_error=float(ene),
            energy_order=float(eno) if eno else None))
    return ConvergenceReport(problem, tuple(rows))


def _fmt_h(h: float) -> str:
    inv = 1.0 / h
    if abs(inv - round(inv)) < 1e-9:
        return f"1/{round(inv)}"
    return f"{h:.4g}"


def format_table(report: ConvergenceReport) -> str:
    """Terminal table with the reference tables' precision."""
    header = f"{'h':>8} {'DOFs':>8} {'l2_error':>12} {'order':>6} " \
             f"{'energy_error':>13} {'order':>6}"
    lines = [f"problem: {report.problem}", header, "-" * len(header)]
    for row in report.rows:
        l2o = "-" if row.l2_order is None else f"{row.l2_order:.2f}"
        eno = "-" if row.energy_order is None else f"{row.energy_order:.2f}"
        lines.append(
            f"{_fmt_h(row.h):>8} {row.dofs:>8d} {row.l2_error:>12.4g} "
            f"{l2o:>6} {row.energy_error:>13.4g} {eno:>6}")
    return "\n".join(lines) + "\n"


def interpolation_l2_errors(problem_name: str, levels,
                            error_rule=(3, 3)):
    """L2 error of the elementwise Gauss-point interpolant per level.

    Used for the interpolation-order study; the interpolant is the
    least-squares fit on each element, independent of any solve.
    """
    preset = preset_problem(problem_name)
    errors = []
    for n in levels:
        mesh = unit_square_grid(n)
        coeffs = fe_space.interpolate_elementwise(mesh, preset.u_exact)
        pair = assembly.errors_from_local_coeffs(
            mesh, coeffs, preset.u_exact, preset.grad_exact, preset.problem,
            error_rule=error_rule)
        errors.append(pair.l2)
    return errors
