"""Command-line driver.

Subcommands
-----------
solve           solve one level and print its errors
convergence     run a refinement sweep and emit the convergence table
verify-element  run the element property suite
dump-matrix     write the assembled system in coordinate text format

Exit codes: 0 success, 1 check failure, 2 configuration error, 3 solver
failure.

A flat key=value config file can seed any run; command-line flags
override file values.  Recognized keys: problem, levels, quad.volume,
quad.edge, quad.error, solver.tol, solver.max_iter, output.path,
output.format.
"""

import argparse
import sys
from dataclasses import replace

from . import assembly, convergence, fe_space, ref_element, verification
from .convergence import RunConfig
from .errors import ConfigurationError, SolverError
from .mesh import unit_square_grid
from .problems import PRESET_KINDS, preset_problem

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_FAILURE = 3

_CONFIG_KEYS = ("problem", "levels", "quad.volume", "quad.edge", "quad.error",
                "solver.tol", "solver.max_iter", "output.path",
                "output.format")


def load_config_file(path: str) -> dict:
    """Parse a flat key=value config file; '#' starts a comment line."""
    values = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigurationError(
                    f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _parse_levels(text: str):
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigurationError(f"levels must be integers, got {text!r}")


def build_run_config(args) -> RunConfig:
    """Merge config-file values and command-line flags (flags win)."""
    config = RunConfig()
    if getattr(args, "config", None):
        raw = load_config_file(args.config)
        updates = {}
        if "problem" in raw:
            updates["problem"] = raw["problem"]
        if "levels" in raw:
            updates["levels"] = _parse_levels(raw["levels"])
        if "quad.volume" in raw:
            updates["quad_volume"] = int(raw["quad.volume"])
        if "quad.edge" in raw:
            updates["quad_edge"] = int(raw["quad.edge"])
        if "quad.error" in raw:
            updates["quad_error"] = int(raw["quad.error"])
        if "solver.tol" in raw:
            updates["solver_tol"] = float(raw["solver.tol"])
        if "solver.max_iter" in raw:
            updates["solver_max_iter"] = int(raw["solver.max_iter"])
        if "output.path" in raw:
            updates["output_path"] = raw["output.path"]
        if "output.format" in raw:
            updates["output_format"] = raw["output.format"]
        config = replace(config, **updates)
    overrides = {}
    if getattr(args, "problem", None) is not None:
        overrides["problem"] = args.problem
    if getattr(args, "levels", None) is not None:
        overrides["levels"] = _parse_levels(args.levels)
    if getattr(args, "quad_volume", None) is not None:
        overrides["quad_volume"] = args.quad_volume
    if getattr(args, "quad_edge", None) is not None:
        overrides["quad_edge"] = args.quad_edge
    if getattr(args, "quad_error", None) is not None:
        overrides["quad_error"] = args.quad_error
    if getattr(args, "tol", None) is not None:
        overrides["solver_tol"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        overrides["solver_max_iter"] = args.max_iter
    if getattr(args, "out", None) is not None:
        overrides["output_path"] = args.out
    if getattr(args, "format", None) is not None:
        overrides["output_format"] = args.format
    return replace(config, **overrides)


def _add_common_flags(parser, with_levels):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--problem",
                        help="problem preset (dirichlet-paper, neumann-paper)")
    if with_levels:
        parser.add_argument("--levels",
                            help="comma-separated mesh levels, e.g. 2,4,8")
    parser.add_argument("--quad-volume", type=int, dest="quad_volume",
                        help="points per axis of the volume rule (default 5)")
    parser.add_argument("--quad-edge", type=int, dest="quad_edge",
                        help="points of the boundary edge rule (default 5)")
    parser.add_argument("--quad-error", type=int, dest="quad_error",
                        help="points per axis of the error rule (default 3)")
    parser.add_argument("--tol", type=float, help="solver relative tolerance")
    parser.add_argument("--max-iter", type=int, dest="max_iter",
                        help="solver iteration limit (default 20x dofs)")
    parser.add_argument("--out", help="output path (default stdout only)")
    parser.add_argument("--format", choices=["csv", "pretty-table"],
                        help="output format (default pretty-table)")


def cmd_solve(args) -> int:
    config = build_run_config(args)
    config = convergence.validate_config(replace(config, levels=(args.n,)))
    result = convergence.solve_level(config, args.n)
    print(f"problem: {config.problem}")
    print(f"n: {args.n}  h: 1/{args.n}  dofs: {result.dofs}")
    print(f"l2_error: {result.errors.l2:.6e}")
    print(f"energy_error: {result.errors.energy:.6e}")
    print(f"cg_iterations: {result.iterations}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    config = convergence.validate_config(build_run_config(args))
    report = convergence.run_convergence(config)
    if config.output_format == "csv":
        payload = convergence.report_to_csv(report)
    else:
        payload = convergence.format_table(report)
    print(payload, end="")
    if config.output_path:
        with open(config.output_path, "w") as handle:
            handle.write(payload)
        print(f"wrote {config.output_format} to {config.output_path}")
    return EXIT_OK


def cmd_verify_element(args) -> int:
    results = verification.run_element_checks(
        enrichment=args.enrichment,
        uncorrected_g12=args.uncorrected_g12,
        mesh_n=args.mesh_n)
    failures = 0
    for result in results:
        print(result)
        failures += not result.passed
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILURE


def cmd_dump_matrix(args) -> int:
    config = build_run_config(args)
    config = convergence.validate_config(replace(config, levels=(args.n,)))
    if not config.output_path:
        raise ConfigurationError("dump-matrix needs --out (or output.path)")
    preset = preset_problem(config.problem)
    mesh = unit_square_grid(args.n)
    dofmap = fe_space.build_dofmap(mesh, PRESET_KINDS[config.problem])
    system = assembly.assemble(
        mesh, dofmap, preset.problem,
        volume_rule=(config.quad_volume, config.quad_volume),
        edge_rule=config.quad_edge)
    with open(config.output_path, "w") as handle:
        handle.write(assembly.dump_matrix_text(system))
    print(f"wrote {system.matrix.nnz} entries "
          f"({dofmap.total}x{dofmap.total}) to {config.output_path}")
    if args.mesh_out:
        with open(args.mesh_out, "w") as handle:
            handle.write(mesh.dump())
        print(f"wrote mesh dump to {args.mesh_out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncrect",
        description="Cubic nonconforming rectangular finite elements: "
                    "solve, convergence studies, element verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a single level")
    p_solve.add_argument("--n", type=int, required=True,
                         help="mesh is n-by-n with h = 1/n")
    _add_common_flags(p_solve, with_levels=False)
    p_solve.set_defaults(handler=cmd_solve)

    p_conv = sub.add_parser("convergence", help="run a refinement sweep")
    _add_common_flags(p_conv, with_levels=True)
    p_conv.set_defaults(handler=cmd_convergence)

    p_verify = sub.add_parser("verify-element",
                              help="run the element property suite")
    p_verify.add_argument("--enrichment", default="x3y-xy3",
                          choices=sorted(ref_element.ENRICHMENTS),
                          help="enrichment variant (negative control)")
    p_verify.add_argument("--uncorrected-g12", action="store_true",
                          help="use the misprinted duplicate 12th Gauss "
                               "point (negative control)")
    p_verify.add_argument("--mesh-n", type=int, default=4,
                          help="mesh size for the jump-moment check")
    p_verify.set_defaults(handler=cmd_verify_element)

    p_dump = sub.add_parser("dump-matrix",
                            help="write the assembled system in "
                                 "coordinate text format")
    p_dump.add_argument("--n", type=int, required=True)
    p_dump.add_argument("--mesh-out", dest="mesh_out",
                        help="also write the mesh record dump here")
    _add_common_flags(p_dump, with_levels=False)
    p_dump.set_defaults(handler=cmd_dump_matrix)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())
