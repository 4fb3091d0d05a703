"""
Command Line Interface for hsthermo

Subcommands run QFI sweeps, extract N_max, verify the norm bounds, compare
against the brute-force oracle and print Gamma. Handlers return exit codes:
0 success, 1 usage or parameter error, 2 failed check, 3 capacity error.
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

import pandas as pd
from rich.console import Console

from .__version__ import __version__
from .core.config import ThermoConfig, parse_float_list
from .core.errors import (
    BoundInapplicableError,
    CapacityError,
    NoHeisenbergWindowError,
    ThermometryError,
)
from .core.export import ResultExporter
from .core.models import thermal_quantities
from .core.scheme import gamma_analytic, gamma_numeric
from .core.sweep import DEFAULT_NMAX_TAU, bounds_report, find_nmax, oracle_report, run_metadata, run_sweep
from .core.types import CheckReport, NmaxRule, OutputFormat, SweepMode
from .interfaces.report_display import ReportFormatter
from .utils import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_CAPACITY = 3

console = Console()
error_console = Console(stderr=True)


class ThermoArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(args: argparse.Namespace) -> ThermoConfig:
    """Config file and environment first, then command-line overrides"""
    config = ThermoConfig.from_env(args.config)
    overrides = {
        ("model", "theta"): getattr(args, "theta", None),
        ("model", "xi"): getattr(args, "xi", None),
        ("model", "eta"): getattr(args, "eta", None),
        ("model", "kappa_s_over_g"): getattr(args, "kappa_s", None),
        ("nmax", "tau"): getattr(args, "tau", None),
        ("nmax", "rule"): getattr(args, "rule", None),
        ("output", "path"): args.output,
        ("output", "format"): args.format,
        ("output", "threads"): args.threads,
    }
    for (section, key), value in overrides.items():
        if value is not None:
            setattr(getattr(config, section), key, value)
    config.validate()
    return config


def _formatter() -> ReportFormatter:
    return ReportFormatter(console)


def _report_errors(message: str) -> None:
    ReportFormatter(error_console).format_error(message)


def _write_or_show_report(report: CheckReport, config: ThermoConfig) -> int:
    if config.output.path:
        result = ResultExporter(config.output.format).export(report, config.output.path)
        if not result["success"]:
            _report_errors(result["error"])
            return EXIT_USAGE
        _formatter().format_success(f"Report written to {result['file_path']}")
    _formatter().format_report(report)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def handle_sweep_command(args: argparse.Namespace) -> int:
    """Handle 'hsthermo sweep'"""
    config = ThermoConfig.from_env(args.config)
    for attribute in ("n", "xi", "eta", "theta", "mode", "rho00", "sigma01"):
        value = getattr(args, attribute, None)
        if value is not None:
            setattr(config.sweep, attribute, value)
    if args.kappa_s is not None:
        config.model.kappa_s_over_g = args.kappa_s
    for attribute, value in (("path", args.output), ("format", args.format), ("threads", args.threads)):
        if value is not None:
            setattr(config.output, attribute, value)
    config.validate()

    spec = config.to_sweep_spec()
    result = run_sweep(spec, threads=config.output.threads)
    if spec.output_path:
        exported = ResultExporter(spec.output_format).export(result, spec.output_path)
        if not exported["success"]:
            _report_errors(exported["error"])
            return EXIT_USAGE
        _formatter().format_success(f"{exported['row_count']} rows written to {exported['file_path']}")
    else:
        _formatter().format_sweep(result)
    return EXIT_OK


def handle_nmax_command(args: argparse.Namespace) -> int:
    """Handle 'hsthermo nmax'; --xi takes a list"""
    config = ThermoConfig.from_env(args.config)
    for section, key, value in (
        ("model", "eta", args.eta),
        ("model", "theta", args.theta),
        ("nmax", "tau", args.tau),
        ("nmax", "rule", args.rule),
        ("output", "path", args.output),
        ("output", "format", args.format),
    ):
        if value is not None:
            setattr(getattr(config, section), key, value)
    config.validate()

    xi_values = parse_float_list(args.xi) if args.xi else [config.model.xi]
    rule = NmaxRule(config.nmax.rule)
    rows = []
    for xi in xi_values:
        try:
            nmax = find_nmax(xi, config.model.eta, config.model.theta, config.nmax.tau, rule, config.model.kappa_s_over_g)
        except NoHeisenbergWindowError as exc:
            _report_errors(str(exc))
            return EXIT_CHECK_FAILED
        rows.append((xi, config.model.eta, config.model.theta, nmax))

    _formatter().format_nmax(rows, rule.value)
    if config.output.path:
        frame = pd.DataFrame.from_records(rows, columns=["xi", "eta", "theta", "N_max"])
        tau = DEFAULT_NMAX_TAU if config.nmax.tau is None else config.nmax.tau
        exported = ResultExporter(config.output.format).export_frame(
            frame, config.output.path, run_metadata(mode="nmax", rule=rule.value, tau=tau)
        )
        if not exported["success"]:
            _report_errors(exported["error"])
            return EXIT_USAGE
    return EXIT_OK


def handle_bounds_command(args: argparse.Namespace) -> int:
    """Handle 'hsthermo bounds'"""
    config = _load_config(args)
    t_values = parse_float_list(args.t) if args.t else None
    report = bounds_report(config.to_model(), t_values=t_values, g=args.g)
    return _write_or_show_report(report, config)


def handle_oracle_command(args: argparse.Namespace) -> int:
    """Handle 'hsthermo oracle-check'"""
    config = _load_config(args)
    report = oracle_report(config.to_model(), args.n)
    return _write_or_show_report(report, config)


def handle_gamma_command(args: argparse.Namespace) -> int:
    """Handle 'hsthermo gamma'"""
    config = _load_config(args)
    model = config.to_model()
    gamma = gamma_analytic(model)
    _formatter().format_gamma(model, gamma, thermal_quantities(model.theta).phi)
    if args.numeric:
        if model.ideal_thermalization:
            _report_errors("--numeric needs a finite xi")
            return EXIT_USAGE
        numeric = gamma_numeric(model)
        deviation = abs(numeric.value - gamma.value)
        _formatter().format_success(f"Sector-map Gamma agrees to {deviation:.3e}")
    return EXIT_OK


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    """Shared flags, accepted before or after the subcommand"""
    default = argparse.SUPPRESS if suppress else None
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument('--config', default=default, help='YAML config file (default: .hsthermo/config.yml)')
    options.add_argument('--output', default=default, help='Write results to this file instead of the console')
    options.add_argument('--format', choices=[fmt.value for fmt in OutputFormat], default=default, help='Output file format')
    options.add_argument('--threads', type=int, default=default, help='Worker threads for sweeps')
    options.add_argument('--debug', action='store_true', default=argparse.SUPPRESS if suppress else False,
                         help='Enable debug logging')
    return options


def _model_options(parser: argparse.ArgumentParser, xi_help: str = 'Thermalization rate gamma/g (inf allowed)') -> None:
    parser.add_argument('--xi', type=float, help=xi_help)
    parser.add_argument('--eta', type=float, help='Ancilla dephasing kappa_A/g')
    parser.add_argument('--theta', type=float, help='Temperature k_B T / hbar Omega')
    parser.add_argument('--kappa-s', dest='kappa_s', type=float, help='Probe pure dephasing kappa_s/g')


def create_cli_parser() -> argparse.ArgumentParser:
    """Create the CLI argument parser with subcommands."""
    parser = ThermoArgumentParser(
        prog='hsthermo',
        description='Heisenberg-scaling thermometry: QFI sweeps, N_max and bound verification',
        parents=[_global_options(suppress=False)],
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', help='Available commands', required=True)
    shared = [_global_options(suppress=True)]

    sweep_parser = subparsers.add_parser('sweep', help='QFI over a grid of N, xi, eta and theta', parents=shared)
    sweep_parser.add_argument('--mode', choices=[mode.value for mode in SweepMode], help='QFI formula to evaluate')
    sweep_parser.add_argument('--n', help='N grid: "1,10,100", "1:50" or "logspace:1:1000:60"')
    sweep_parser.add_argument('--xi', help='Comma separated xi values')
    sweep_parser.add_argument('--eta', help='Comma separated eta values')
    sweep_parser.add_argument('--theta', help='Comma separated temperatures')
    sweep_parser.add_argument('--rho00', help='Probe ground populations (initial-state mode)')
    sweep_parser.add_argument('--sigma01', help='Ancilla coherences (initial-state mode)')
    sweep_parser.add_argument('--kappa-s', dest='kappa_s', type=float, help='Probe pure dephasing kappa_s/g')
    sweep_parser.set_defaults(func=handle_sweep_command)

    nmax_parser = subparsers.add_parser('nmax', help='Largest N keeping Heisenberg scaling', parents=shared)
    nmax_parser.add_argument('--xi', help='Comma separated xi values')
    nmax_parser.add_argument('--eta', type=float, help='Ancilla dephasing kappa_A/g')
    nmax_parser.add_argument('--theta', type=float, help='Temperature k_B T / hbar Omega')
    nmax_parser.add_argument('--tau', type=float, help=f'Allowed QFI loss, in (0, 1) (default {DEFAULT_NMAX_TAU:.6f})')
    nmax_parser.add_argument('--rule', choices=[rule.value for rule in NmaxRule], help='N_max criterion')
    nmax_parser.set_defaults(func=handle_nmax_command)

    bounds_parser = subparsers.add_parser('bounds', help='Damping-basis, memory and decay bound checks', parents=shared)
    _model_options(bounds_parser)
    bounds_parser.add_argument('--g', type=float, default=1.0, help='Coupling strength used in the bounds')
    bounds_parser.add_argument('--t', help='Comma separated times for the decay bound')
    bounds_parser.set_defaults(func=handle_bounds_command)

    oracle_parser = subparsers.add_parser('oracle-check', help='Compare against the joint simulation', parents=shared)
    oracle_parser.add_argument('--n', type=int, default=2, help='Number of probes (at most 3)')
    _model_options(oracle_parser)
    oracle_parser.set_defaults(func=handle_oracle_command)

    gamma_parser = subparsers.add_parser('gamma', help='Print Gamma and its temperature derivative', parents=shared)
    _model_options(gamma_parser)
    gamma_parser.add_argument('--numeric', action='store_true', help='Also evaluate Gamma through the sector maps')
    gamma_parser.set_defaults(func=handle_gamma_command)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the hsthermo console script"""
    parser = create_cli_parser()
    args = parser.parse_args(argv)
    configure_logging(debug=args.debug)
    logger.debug(f"hsthermo {__version__}: {args.command}")

    try:
        return args.func(args)
    except CapacityError as exc:
        _report_errors(str(exc))
        return EXIT_CAPACITY
    except (BoundInapplicableError, NoHeisenbergWindowError) as exc:
        _report_errors(str(exc))
        return EXIT_CHECK_FAILED
    except ThermometryError as exc:
        _report_errors(str(exc))
        return EXIT_USAGE
    except KeyboardInterrupt:
        _report_errors("Interrupted")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
