# gate_sim.py
"""
Command-line entry point.

    python gate_sim.py run --scenario fig5-1flip --out results/fig5
    python gate_sim.py run --list
    python gate_sim.py sweep --config sweeps/flips.yaml --jobs 3
    python gate_sim.py validate --config my_run.yaml
"""
import argparse
import sys

from api.commands import cmd_run, cmd_sweep, cmd_validate
from config.settings import settings
from core.scenarios import list_scenarios
from utils.logging import configure_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser("gate_sim", description="Dressed-state two-ion gate simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", type=str, default=None, help="Flat YAML run configuration")
        sub.add_argument("--scenario", type=str, default=None, help="Named scenario (overrides the config's)")

    run = commands.add_parser("run", help="Run one scenario")
    common(run)
    run.add_argument("--out", type=str, default=None, help="Output directory")
    run.add_argument("--seedless", action="store_true", help="Fail if anything draws random numbers")
    run.add_argument("--list", action="store_true", help="List the named scenarios and exit")
    run.add_argument("--progress", action="store_true", help="Show a progress bar over the time grid")

    sweep = commands.add_parser("sweep", help="Run one scenario per sweep value")
    common(sweep)
    sweep.add_argument("--out", type=str, default=None, help="Output directory")
    sweep.add_argument("--jobs", type=int, default=None, help="Concurrent jobs (default: parallel_jobs)")
    sweep.add_argument("--seedless", action="store_true", help="Fail if anything draws random numbers")

    validate = commands.add_parser("validate", help="Check the frequency hierarchy of a configuration")
    common(validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings.LOGGING.LEVEL)

    if args.command == "run":
        if args.list:
            for scenario in list_scenarios():
                print(f"{scenario.name:<26} {scenario.description}")
            return 0
        return cmd_run(args.config, out=args.out, scenario=args.scenario, seedless=args.seedless,
                       progress=args.progress)
    if args.command == "sweep":
        if args.jobs is not None and args.jobs < 1:
            print("error: --jobs must be at least 1")
            return 2
        return cmd_sweep(args.config, out=args.out, jobs=args.jobs, scenario=args.scenario, seedless=args.seedless)
    return cmd_validate(args.config, scenario=args.scenario)


if __name__ == "__main__":
    sys.exit(main())
