"""Command-line front end.

Subcommands:

- ``run``: one solve of a built-in case; prints Newton iterations, the
  contact-state histogram, and (for cases with a closed-form solution)
  the error row; optionally writes the row as CSV.
- ``convergence``: refinement study over a list of mesh sizes; writes
  the study as CSV in the fixed schema.
- ``checks``: self-check suite of the discrete operators (pass/fail
  table; see :mod:`ddrcontact.checks`).
- ``mesh-info``: entity counts and mesh sizes of a built-in mesh.
- ``export-mesh``: write a built-in mesh in the POLYMESH v1 text format.

Exit codes: 0 success, 1 configuration error, 2 solver or check failure.
Options may come from ``--config FILE`` (``key = value`` lines with
dotted section prefixes, ``#`` comments); command-line flags override
the file.  The environment variable ``DDR_THREADS`` caps the number of
threads used by the underlying linear algebra libraries.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from collections import Counter

__all__ = ["main"]

CASES = ("frictionless_61", "tresca_62", "incompressible_63",
         "two_fractures")
FAMILIES = ("cartesian", "tetrahedral", "hexacut")

# config-file key -> argparse destination
CONFIG_KEYS = {
    "run.case": "case",
    "run.order": "order",
    "mesh.family": "family",
    "mesh.n": "n",
    "mesh.levels": "levels",
    "mesh.seed": "seed",
    "mesh.magnitude": "magnitude",
    "material.E": "E",
    "material.nu": "nu",
    "material.L": "L",
    "contact.g": "g",
    "contact.beta": "beta",
    "contact.beta_n": "beta_n",
    "contact.beta_t": "beta_t",
    "newton.rel_tol": "rel_tol",
    "newton.abs_tol": "abs_tol",
    "newton.max_iter": "max_iter",
    "output.csv": "out",
}


class ConfigError(Exception):
    """Invalid configuration (bad flag, file, or value)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise ConfigError(message)


def _apply_threads_cap():
    cap = os.environ.get("DDR_THREADS")
    if not cap:
        return
    if not cap.isdigit() or int(cap) < 1:
        raise ConfigError(f"DDR_THREADS must be a positive integer, got {cap!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=int(cap))
    except ImportError:
        pass


def _parse_value(dest, text):
    """Convert a config-file string to the type of the flag it feeds."""
    if dest in ("n", "seed", "max_iter", "order"):
        return int(text)
    if dest in ("magnitude", "E", "nu", "L", "g", "beta", "beta_n",
                "beta_t", "rel_tol", "abs_tol"):
        return float(text)
    if dest == "levels":
        return _parse_levels(text)
    return text


def _parse_levels(text):
    try:
        levels = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"bad level list {text!r}: {exc}") from None
    if not levels:
        raise ConfigError("level list must not be empty")
    if any(n < 1 for n in levels):
        raise ConfigError("levels must be positive")
    return levels


def _read_config_file(path):
    """Parse a key=value config file into {argparse dest: value}."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        dest = CONFIG_KEYS[key]
        try:
            out[dest] = _parse_value(dest, value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") \
                from None
    return out


def _merge_config(args):
    """Fill in unset flags from the config file; flags take precedence."""
    if getattr(args, "config", None) is None:
        return args
    for dest, value in _read_config_file(args.config).items():
        if getattr(args, dest, None) is None and hasattr(args, dest):
            setattr(args, dest, value)
    return args


def _add_mesh_flags(p, levels=False):
    p.add_argument("--family", choices=FAMILIES, default=None,
                   help="mesh family (default cartesian)")
    if levels:
        p.add_argument("--levels", type=_parse_levels, default=None,
                       help="comma-separated cells-per-axis list, e.g. 2,4,8")
    else:
        p.add_argument("--n", type=int, default=None,
                       help="cells per axis (default 2)")
    p.add_argument("--seed", type=int, default=None,
                   help="random seed for the hexacut perturbation (default 0)")
    p.add_argument("--magnitude", type=float, default=None,
                   help="hexacut perturbation as a fraction of h (default 0.25)")


def _add_case_flags(p):
    p.add_argument("--case", choices=CASES, default=None,
                   help="built-in case (default frictionless_61)")
    p.add_argument("--L", type=float, default=None,
                   help="second Lame coefficient for incompressible_63")
    p.add_argument("--E", type=float, default=None,
                   help="Young modulus override (two_fractures only)")
    p.add_argument("--nu", type=float, default=None,
                   help="Poisson ratio override (two_fractures only)")
    p.add_argument("--g", type=float, default=None,
                   help="friction threshold override (two_fractures only)")


def _add_newton_flags(p):
    p.add_argument("--beta", type=float, default=None,
                   help="set both complementarity parameters")
    p.add_argument("--beta-n", dest="beta_n", type=float, default=None)
    p.add_argument("--beta-t", dest="beta_t", type=float, default=None)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    p.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p.add_argument("--order", type=int, default=None,
                   help="quadrature order (default 6)")


def build_parser():
    parser = _Parser(prog="ddrcontact",
                     description=__doc__.split("\n", 1)[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="single solve of a built-in case")
    pr.add_argument("--config", default=None, help="key=value config file")
    _add_case_flags(pr)
    _add_mesh_flags(pr)
    _add_newton_flags(pr)
    pr.add_argument("--out", default=None, help="write the error row as CSV")

    pc = sub.add_parser("convergence", help="refinement study, CSV output")
    pc.add_argument("--config", default=None, help="key=value config file")
    _add_case_flags(pc)
    _add_mesh_flags(pc, levels=True)
    _add_newton_flags(pc)
    pc.add_argument("--out", default=None, help="CSV output path")

    pk = sub.add_parser("checks", help="operator self-check suite")
    pk.add_argument("--seed", type=int, default=0)
    pk.add_argument("--samples", type=int, default=20,
                    help="random fields per check")
    pk.add_argument("--tol", type=float, default=None,
                    help="override every tolerance; errors above the "
                         "override but under the default report MARGINAL")
    pk.add_argument("--debug-stab-face-scale", dest="stab_face_scale",
                    type=float, default=1.0,
                    help="fault injection: rescale the stabilization face "
                         "term (any value other than 1 must fail)")

    pm = sub.add_parser("mesh-info", help="entity counts and mesh sizes")
    _add_mesh_flags(pm)
    pm.add_argument("--case", choices=CASES, default=None,
                    help="take the fracture geometry from this case")

    pe = sub.add_parser("export-mesh", help="write POLYMESH v1")
    _add_mesh_flags(pe)
    pe.add_argument("--case", choices=CASES, default=None,
                    help="take the fracture geometry from this case")
    pe.add_argument("--out", required=False, default=None,
                    help="output path (required)")
    return parser


def _defaults(args):
    """Fill remaining unset options with documented defaults.

    ``mesh-info`` and ``export-mesh`` keep ``case=None`` (no fracture)
    unless one is requested explicitly.
    """
    defaults = [("family", "cartesian"), ("n", 2), ("seed", 0),
                ("magnitude", 0.25)]
    if args.command in ("run", "convergence"):
        defaults.append(("case", "frictionless_61"))
    for dest, value in defaults:
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)
    return args


def _newton_config(args):
    from .contact import NewtonConfig
    kw = {}
    if getattr(args, "beta", None) is not None:
        kw["beta_n"] = kw["beta_t"] = args.beta
    if getattr(args, "beta_n", None) is not None:
        kw["beta_n"] = args.beta_n
    if getattr(args, "beta_t", None) is not None:
        kw["beta_t"] = args.beta_t
    for dest in ("rel_tol", "abs_tol", "max_iter"):
        if getattr(args, dest, None) is not None:
            kw[dest] = getattr(args, dest)
    return NewtonConfig(**kw)


def _check_overrides(args):
    if args.case != "two_fractures":
        for dest in ("E", "nu", "g"):
            if getattr(args, dest, None) is not None:
                raise ConfigError(
                    f"--{dest} only applies to the two_fractures case; "
                    f"the closed-form cases fix their own material data")
        if args.L is not None and args.case != "incompressible_63":
            raise ConfigError("--L only applies to incompressible_63")
    elif args.L is not None:
        raise ConfigError("--L only applies to incompressible_63")


def _order_kw(args):
    from .poly import DEFAULT_ORDER
    return args.order if args.order is not None else DEFAULT_ORDER


def _state_histogram(states):
    from .contact import STATE_NAMES
    hist = Counter(states.tolist())
    return ", ".join(f"{STATE_NAMES[s]}={hist.get(s, 0)}" for s in range(4))


def _print_solution_summary(solution):
    print(f"newton iterations: {solution.iterations}")
    if solution.residual_history:
        print(f"final residual:    {solution.residual_history[-1]:.6e}")
    print(f"contact states:    {_state_histogram(solution.states)}")


def cmd_run(args):
    from . import verification as V
    _check_overrides(args)
    order = _order_kw(args)
    newton = _newton_config(args)
    print(f"case={args.case} family={args.family} n={args.n} "
          f"seed={args.seed}")
    if args.case == "two_fractures":
        from .problems import two_fracture_compression
        kw = {}
        for dest in ("g", "E", "nu"):
            if getattr(args, dest) is not None:
                kw[dest] = getattr(args, dest)
        result = two_fracture_compression(n=args.n, newton=newton,
                                          order=order, **kw)
        sol = result.solution
        if not sol.converged:
            print("solver did not converge", file=sys.stderr)
            return 2
        _print_solution_summary(sol)
        return 0
    case = V.get_case(args.case, L=args.L)
    result = V.solve_case(case, args.family, args.n, seed=args.seed,
                          magnitude=args.magnitude, newton=newton,
                          order=order)
    sol = result.solution
    if not sol.converged:
        print("solver did not converge", file=sys.stderr)
        return 2
    _print_solution_summary(sol)
    e_u, e_jump, e_grad, e_ln = V.compute_errors(case, result, order)
    row = V.ErrorRow(
        case=case.name, family=args.family, level=1, n=args.n,
        h=float(result.mesh.cell_diam.max()),
        n_cells=result.mesh.n_cells, n_dofs=result.dofmap.n_dofs,
        newton_iters=sol.iterations, e_u=e_u, e_jump=e_jump,
        e_grad=e_grad, e_lambda_n=e_ln,
    )
    print(f"e_u={e_u:.6e} e_jump={e_jump:.6e} "
          f"e_grad={e_grad:.6e} e_lambda_n={e_ln:.6e}")
    if args.out:
        V.write_csv([row], args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_convergence(args):
    from . import verification as V
    _check_overrides(args)
    if args.case == "two_fractures":
        raise ConfigError(
            "convergence requires a case with a closed-form solution")
    if args.levels is None:
        raise ConfigError("convergence requires --levels (or mesh.levels)")
    order = _order_kw(args)
    newton = _newton_config(args)
    case = V.get_case(args.case, L=args.L)
    print(f"case={args.case} family={args.family} "
          f"levels={','.join(map(str, args.levels))} seed={args.seed}")
    rows, failed, prev = [], 0, None
    for lvl, n in enumerate(args.levels, start=1):
        try:
            result = V.solve_case(case, args.family, n, seed=args.seed,
                                  magnitude=args.magnitude, newton=newton,
                                  order=order)
            e_u, e_jump, e_grad, e_ln = V.compute_errors(case, result, order)
        except Exception as exc:
            print(f"level {lvl} (n={n}) failed: {exc}", file=sys.stderr)
            failed += 1
            prev = None
            continue
        row = V.ErrorRow(
            case=case.name, family=args.family, level=lvl, n=n,
            h=float(result.mesh.cell_diam.max()),
            n_cells=result.mesh.n_cells, n_dofs=result.dofmap.n_dofs,
            newton_iters=result.solution.iterations, e_u=e_u,
            e_jump=e_jump, e_grad=e_grad, e_lambda_n=e_ln,
        )
        if prev is not None and prev.h > row.h:
            ratio = math.log(prev.h / row.h)
            for attr in ("u", "jump", "grad", "lambda_n"):
                ep = getattr(prev, f"e_{attr}")
                ec = getattr(row, f"e_{attr}")
                if ep > 0 and ec > 0:
                    setattr(row, f"ord_{attr}", math.log(ep / ec) / ratio)
        rows.append(row)
        prev = row
        print(f"level {lvl} n={n} h={row.h:.6g} iters={row.newton_iters} "
              f"e_u={e_u:.6e} e_jump={e_jump:.6e} e_grad={e_grad:.6e} "
              f"e_lambda_n={e_ln:.6e}")
    if args.out:
        V.write_csv(rows, args.out)
        print(f"wrote {args.out} ({len(rows)} rows)")
    return 2 if failed else 0


def cmd_checks(args):
    from .checks import run_all_checks
    results = run_all_checks(seed=args.seed, n_samples=args.samples,
                             stab_face_scale=args.stab_face_scale)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        tol = args.tol if args.tol is not None else r.tol
        if r.max_error <= tol:
            status = "PASS"
        elif r.max_error <= r.tol:
            status = "MARGINAL"
            all_ok = False
        else:
            status = "FAIL"
            all_ok = False
        print(f"{r.name:<{width}}  max error {r.max_error:.3e}  "
              f"tol {tol:.1e}  {status}")
    return 0 if all_ok else 2


def _build_mesh(args):
    from .mesh import build_cartesian, build_tetrahedral, build_hexacut
    planes = ()
    if args.case is not None:
        if args.case == "two_fractures":
            from .mesh import FracturePlane
            planes = (FracturePlane("x", 0.0), FracturePlane("y", 0.0))
        else:
            from .verification import get_case
            planes = (get_case(args.case).fracture_plane(),)
    if args.family == "hexacut":
        return build_hexacut(args.n, fracture_planes=planes, seed=args.seed,
                             magnitude=args.magnitude)
    build = {"cartesian": build_cartesian,
             "tetrahedral": build_tetrahedral}[args.family]
    return build(args.n, fracture_planes=planes)


def cmd_mesh_info(args):
    mesh, fracture = _build_mesh(args)
    print(f"family:         {args.family}")
    print(f"cells:          {mesh.n_cells}")
    print(f"faces:          {mesh.n_faces}")
    print(f"edges:          {mesh.n_edges}")
    print(f"vertices:       {mesh.n_vertices}")
    print(f"fracture faces: {fracture.n_faces}")
    print(f"h_max:          {mesh.cell_diam.max():.6g}")
    print(f"h_min:          {mesh.cell_diam.min():.6g}")
    return 0


def cmd_export_mesh(args):
    from .mesh import write_polymesh
    if not args.out:
        raise ConfigError("export-mesh requires --out")
    mesh, fracture = _build_mesh(args)
    write_polymesh(args.out, mesh, fracture)
    print(f"wrote {args.out}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "convergence": cmd_convergence,
    "checks": cmd_checks,
    "mesh-info": cmd_mesh_info,
    "export-mesh": cmd_export_mesh,
}


def main(argv=None):
    parser = build_parser()
    try:
        _apply_threads_cap()
        args = parser.parse_args(argv)
        args = _merge_config(args)
        args = _defaults(args)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        from .mesh import MeshError
        if isinstance(exc, MeshError):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
