"""
Command-line front end.

Data goes to stdout (or --output); logs go to stderr.  Exit codes: 0 success,
1 verification or statistical failure, 2 usage error.
"""
import argparse
import logging
import sys
from typing import List, Optional

from config.settings import get_config
from photon_gbd.commands import (
    MODELS, cmd_figures, cmd_gbd, cmd_pmf, cmd_sample, cmd_scenario, cmd_verify
)
from photon_gbd.figures import FIGURES
from photon_gbd.models import DeviceKind
from photon_gbd.report_writer import ReportWriter
from photon_gbd.utils import (
    BudgetExhaustedError, NumericalError, ValidationError, setup_logging
)
from photon_gbd.verification import SUITES

config = get_config()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_FORMATS = {
    'pmf': 'csv',
    'gbd': 'csv',
    'figures': 'csv',
    'verify': 'json',
    'sample': 'json',
    'scenario': 'csv',
}


def _output_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--output', '-o', help="output file (default: stdout)")
    parent.add_argument('--format', choices=('csv', 'json'), help="output format")
    parent.add_argument('--timing', action='store_true',
                        help="record wall time in the report (breaks byte-identical reruns)")
    parent.add_argument('--log-level', default=None,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    return parent


def _model_options(parser: argparse.ArgumentParser, default: Optional[str] = None) -> None:
    parser.add_argument('--model', choices=MODELS, default=default, required=default is None)
    parser.add_argument('--w', type=float, help="degeneracy parameter (photon density for poisson)")
    parser.add_argument('--gamma', type=float, help="Lorentzian line half-width (glauber)")
    parser.add_argument('--photon-rate', type=float, help="mean photon rate W (glauber)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='photon-gbd',
        description="Photon-number statistics under flux splitting")
    subparsers = parser.add_subparsers(dest='command', required=True)
    common = _output_options()

    pmf = subparsers.add_parser('pmf', parents=[common], help="photon-count distribution")
    _model_options(pmf)
    pmf.add_argument('--volume', type=float, help="phase volume in coherence cells")
    pmf.add_argument('--tau', type=float, help="sampling time (glauber volume)")
    pmf.add_argument('--kmax', type=int, help="last k to tabulate (default: certified tail)")

    gbd = subparsers.add_parser('gbd', parents=[common],
                                help="generalized binomial distribution row")
    _model_options(gbd)
    gbd.add_argument('--A', type=float, required=True)
    gbd.add_argument('--B', type=float, required=True)
    gbd.add_argument('--n', type=int, required=True)

    figures = subparsers.add_parser('figures', parents=[common], help="figure data tables")
    figures.add_argument('which', nargs='?', choices=FIGURES)
    figures.add_argument('--which', dest='which_flag', choices=FIGURES)
    figures.add_argument('--alpha', type=float)
    figures.add_argument('--s-min', type=float)
    figures.add_argument('--s-max', type=float)
    figures.add_argument('--points', type=int)
    figures.add_argument('--n', type=int, help="photon number (fig4)")
    figures.add_argument('--s-values', type=float, nargs='+', help="volumes (fig4)")

    verify = subparsers.add_parser('verify', parents=[common], help="verification suites")
    verify.add_argument('--suite', choices=SUITES + ('all',), default='all')
    verify.add_argument('--detail', action='store_true', help="include every check in the report")
    verify.add_argument('--inject-fault', action='store_true', help=argparse.SUPPRESS)

    sample = subparsers.add_parser('sample', parents=[common], help="Monte Carlo oracles")
    target = sample.add_mutually_exclusive_group(required=True)
    for name in ('polya', 'poisson', 'be', 'gbd'):
        target.add_argument(f'--{name}', dest='target', action='store_const', const=name)
    sample.add_argument('--model', choices=('poisson', 'be'), default='be')
    sample.add_argument('--n', type=int)
    sample.add_argument('--alpha', type=float)
    sample.add_argument('--S', type=float)
    sample.add_argument('--mean', type=float)
    sample.add_argument('--A', type=float)
    sample.add_argument('--B', type=float)
    sample.add_argument('--w', type=float)
    sample.add_argument('--M', type=int, default=config.MIN_SAMPLE_DRAWS * 100)
    sample.add_argument('--seed', type=int,
                        help=f"random seed (default: ${config.SEED_ENV_VAR} or {config.DEFAULT_SEED})")
    sample.add_argument('--shards', type=int)

    scenario = subparsers.add_parser('scenario', parents=[common],
                                     help="splitting-device output tables")
    scenario.add_argument('--device', choices=[k.value for k in DeviceKind],
                          default=DeviceKind.BEAMSPLITTER.value)
    scenario.add_argument('--alpha', type=float, required=True, help="transmittance")
    scenario.add_argument('--cascade', type=float, nargs='+',
                          help="transmittances of further devices of the same kind")
    _model_options(scenario)
    scenario.add_argument('--S', type=float, required=True)
    scenario.add_argument('--nmax', type=int)
    return parser


def run_command(args: argparse.Namespace):
    if args.command == 'pmf':
        return cmd_pmf(args.model, args.volume, args.w, args.gamma, args.photon_rate,
                       args.tau, args.kmax, timing=args.timing)
    if args.command == 'gbd':
        return cmd_gbd(args.model, args.A, args.B, args.n, args.w, args.gamma,
                       args.photon_rate, timing=args.timing)
    if args.command == 'figures':
        which = args.which or args.which_flag
        if which is None:
            raise ValidationError("Missing required fields: which")
        return cmd_figures(which, args.alpha, args.s_min, args.s_max, args.points,
                           args.n, args.s_values, timing=args.timing)
    if args.command == 'verify':
        return cmd_verify(args.suite, fault=args.inject_fault, detail=args.detail,
                          timing=args.timing)
    if args.command == 'sample':
        return cmd_sample(args.target, args.M, args.seed, n=args.n, alpha=args.alpha, S=args.S,
                          mean=args.mean, A=args.A, B=args.B, w=args.w, model=args.model,
                          shards=args.shards, timing=args.timing)
    return cmd_scenario(args.device, args.alpha, args.model, args.S, args.w, args.gamma,
                        args.photon_rate, args.cascade, args.nmax, timing=args.timing)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or config.LOG_LEVEL, config.LOG_FILE)
    logger.info(f"Running {args.command}")

    try:
        report = run_command(args)
    except ValidationError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except BudgetExhaustedError as e:
        logger.error(f"Sampling budget exhausted: {e} (acceptance rate {e.acceptance_rate:.3e})")
        return EXIT_FAILURE
    except NumericalError as e:
        logger.error(f"Numerical error: {e}")
        return EXIT_FAILURE

    writer = ReportWriter()
    fmt = args.format or DEFAULT_FORMATS[args.command]
    writer.write(writer.render(report, fmt), args.output)
    logger.info(f"{args.command} finished: {'passed' if report.passed else 'FAILED'}")
    return EXIT_OK if report.passed else EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
