"""Command line harness: run scenarios, convergence studies, steady checks.

Exit codes: 0 success, 2 configuration error, 3 solver abort.  The output
root defaults to the working directory and can be overridden with the
DGFLOW_OUTPUT_ROOT environment variable or --output-root.
"""

from __future__ import annotations

import argparse
import sys

from .config import config_from_file
from .quadrature import ConfigurationError
from .runner import (convergence_study, format_table, output_root, run_scenario,
                     steady_state_check, write_study)
from .scenarios import REGISTRY
from .timestep import SolverAbort

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgflow", description="nodal DG solver for entropy gradient flows")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output-root", default=None)

    p_study = sub.add_parser("study", help="convergence study over a mesh family")
    p_study.add_argument("config")
    p_study.add_argument("--n", required=True,
                         help="comma separated resolutions, doubling (20,40,80)")
    p_study.add_argument("--reference", default="exact",
                         help="exact | fine | fine:<k>,<N> (default exact)")
    p_study.add_argument("--output-root", default=None)

    p_check = sub.add_parser("check-steady", help="stationarity report for a run")
    p_check.add_argument("run_dir")

    sub.add_parser("list-scenarios", help="list the scenario registry")
    return parser


def _cmd_run(args) -> int:
    cfg = config_from_file(args.config)
    artifacts = run_scenario(cfg, root=args.output_root)
    final = artifacts.result.final
    print(f"{cfg.scenario}: t = {final.t:.6g} in {final.step_count} steps "
          f"({final.halving_count} halvings), min rho = {final.rho.min():.3e}")
    print(f"artifacts in {artifacts.directory}")
    return EXIT_OK


def _cmd_study(args) -> int:
    cfg = config_from_file(args.config)
    n_list = [int(v) for v in args.n.split(",") if v]
    ref = args.reference
    kwargs = {}
    if ref.startswith("fine:"):
        spec = ref[len("fine:"):].split(",")
        if len(spec) != 2:
            raise ConfigurationError("--reference fine:<k>,<N>")
        kwargs = dict(ref_k=int(spec[0]), ref_n=int(spec[1]))
        ref = "fine"
    rows = convergence_study(cfg, n_list, reference=ref, **kwargs)
    print(format_table(rows))
    directory = output_root(args.output_root) / cfg.output_dir
    write_study(rows, directory)
    print(f"study table in {directory}")
    return EXIT_OK


def _cmd_check_steady(args) -> int:
    report = steady_state_check(args.run_dir)
    print(f"max |rho * dxi/dx| = {report.max_rho_dxi:.6e}")
    for first, last, spread in report.components:
        print(f"support cells {first}..{last}: xi spread {spread:.6e}")
    if report.disconnected:
        print("support is disconnected")
    return EXIT_OK


def _cmd_list() -> int:
    width = max(len(name) for name in REGISTRY)
    for name in sorted(REGISTRY):
        sc = REGISTRY[name]
        tag = " [long]" if sc.long else ""
        print(f"{name:<{width}}  ({sc.dimension}D){tag} {sc.description}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "study":
            return _cmd_study(args)
        if args.command == "check-steady":
            return _cmd_check_steady(args)
        return _cmd_list()
    except (ConfigurationError, FileNotFoundError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
