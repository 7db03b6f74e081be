"""Command-line entry point: `eulerfd run ...` and `eulerfd converge ...`.

A flat key = value config file can seed any option; flags given on the
command line win. Exit codes: 0 success, 2 configuration error, 3 solver
failure, 1 anything else.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError, EulerFDError, InvalidStateError
from .harness import RunConfig, convergence_study, run, summary_sections
from .io import parse_config
from .stepper import INTEGRATOR_IDS


def _resolution(text):
    return tuple(int(v) for v in str(text).split(","))


def _parse_floor(text):
    if text is None:
        return None
    rho, p = (float(v) for v in str(text).split(","))
    return (rho, p)


def _bool(text):
    val = str(text).strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eulerfd",
        description="Finite-difference WENO solver for the compressible "
                    "Euler equations with single-step time-averaged-flux "
                    "integrators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--problem", help="benchmark id (see docs)")
        p.add_argument("--cfl", type=float, default=None,
                       help="Courant number (default 0.4 in 1D/2D, 0.3 in 3D)")
        p.add_argument("--tfinal", type=float, default=None,
                       help="final time (default: the problem's)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="compute thread count")
        p.add_argument("--config", default=None,
                       help="flat key = value config file; flags win")
        p.add_argument("--repeat", type=int, default=None,
                       help="timed repeats for performance averaging")
        p.add_argument("--eps-op", type=float, default=None, dest="eps_op",
                       help="base perturbation constant for the "
                            "difference-based contractions")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--floor", default=None,
                       help="density,pressure floor pair (default: off)")

    p_run = sub.add_parser("run", help="execute one configured run")
    add_common(p_run)
    p_run.add_argument("--resolution", type=_resolution, default=None,
                       help="cells per axis, e.g. 256 or 256,256")
    p_run.add_argument("--integrator", choices=INTEGRATOR_IDS, default=None)
    p_run.add_argument("--profiles", type=_bool, default=None,
                       help="write profile CSVs (default on)")
    p_run.add_argument("--fields", type=_bool, default=None,
                       help="write VTK/CSV field dumps (default off)")
    p_run.add_argument("--summary", type=_bool, default=None,
                       help="write the run summary (default on)")

    p_conv = sub.add_parser("converge", help="error/order/speedup table")
    add_common(p_conv)
    p_conv.add_argument("--resolutions", default=None,
                        help="comma-separated list, e.g. 120,200,400")
    p_conv.add_argument("--integrators", default=None,
                        help="comma-separated subset of " + ",".join(INTEGRATOR_IDS))
    return parser


def _merged(args, key, cast, default=None):
    """Flag value if given, else config-file value, else default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    fileval = args._file_config.get(key.replace("_", "-"),
                                    args._file_config.get(key))
    if fileval is not None:
        return cast(fileval)
    return default


def _load_file_config(args):
    args._file_config = parse_config(args.config) if args.config else {}


def cmd_run(args):
    _load_file_config(args)
    problem = _merged(args, "problem", str)
    resolution = _merged(args, "resolution", _resolution)
    integrator = _merged(args, "integrator", str)
    if not problem or resolution is None or not integrator:
        raise ConfigurationError(
            "run needs --problem, --resolution, and --integrator "
            "(flags or config file)")
    config = RunConfig(
        problem=problem,
        resolution=resolution,
        integrator=integrator,
        cfl=_merged(args, "cfl", float),
        t_final=_merged(args, "tfinal", float),
        outdir=_merged(args, "out", str),
        workers=_merged(args, "workers", int),
        eps_op=_merged(args, "eps_op", float, RunConfig.eps_op),
        gamma=_merged(args, "gamma", float, RunConfig.gamma),
        repeat=_merged(args, "repeat", int, 1),
        write_profiles=_merged(args, "profiles", _bool, True),
        write_fields=_merged(args, "fields", _bool, False),
        write_summary=_merged(args, "summary", _bool, True),
        floor=_parse_floor(_merged(args, "floor", str)),
    )
    summary = run(config)
    for sec, kv in summary_sections(summary).items():
        print(f"[{sec}]")
        for key, val in kv.items():
            print(f"{key} = {val}")
        print()
    return 0


def cmd_converge(args):
    _load_file_config(args)
    problem = _merged(args, "problem", str)
    res_text = _merged(args, "resolutions", str)
    if not problem or not res_text:
        raise ConfigurationError("converge needs --problem and --resolutions")
    resolutions = [int(v) for v in str(res_text).split(",")]
    integ_text = _merged(args, "integrators", str) or ",".join(INTEGRATOR_IDS)
    integrators = [v.strip() for v in integ_text.split(",")]
    base = RunConfig(problem=problem, resolution=resolutions[0],
                     integrator=integrators[0],
                     cfl=_merged(args, "cfl", float),
                     t_final=_merged(args, "tfinal", float),
                     eps_op=_merged(args, "eps_op", float, RunConfig.eps_op),
                     gamma=_merged(args, "gamma", float, RunConfig.gamma),
                     repeat=_merged(args, "repeat", int, 1))
    if _merged(args, "workers", int):
        import numba
        numba.set_num_threads(_merged(args, "workers", int))
    rows, _ = convergence_study(problem, resolutions, integrators, base,
                                outdir=_merged(args, "out", str))
    header = ("integrator", "n", "l1_density", "order", "wall_seconds",
              "time_ratio_vs_rk")
    print(" ".join(f"{h:>16}" for h in header))
    for row in rows:
        cells = [f"{v:>16.6g}" if isinstance(v, float) else f"{v!s:>16}"
                 for v in row]
        print(" ".join(cells))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_converge(args)
    except ConfigurationError as exc:
        print(f"configuration-error: {exc}", file=sys.stderr)
        return 2
    except InvalidStateError as exc:
        print(f"solver-error: {exc}", file=sys.stderr)
        return 3
    except EulerFDError as exc:
        print(f"solver-error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
