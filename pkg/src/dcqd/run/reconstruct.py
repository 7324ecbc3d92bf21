"""
Code for the `dcqd-reconstruct` script that characterizes a channel end to end: it enumerates
the d² configurations, simulates their statistics (exactly or with shots), assembles the
linear system, solves for χ and writes a JSON run report.
"""

import argparse
import sys
import time
from typing import Optional

from dcqd import __version__
from dcqd.channels import InvalidChannelError, chi_distance
from dcqd.cmd import (ExitCode, add_common_args, exit_with, info_stream, positive_arg,
                      prime_arg, setup_command, write_output)
from dcqd.config import Consts, Settings
from dcqd.pauli import DimensionError
from dcqd.print import print_info, print_warn
from dcqd.protocol import (AlphaKind, AlphaPolicy, enumerate_configurations, sample_outcomes,
                           simulate)
from dcqd.reconstruct import (Reconstruction, UnderDeterminedError, assemble_system,
                              rank_report, solve_chi)
from dcqd.report import (ChannelSpec, ChannelSpecError, RunReport, read_channel_spec,
                         render_report, summarize)
from dcqd.stabilizer import InvalidProbeError


def main() -> None:
    """main function for `dcqd-reconstruct` script"""
    main_argv(sys.argv[1:])


def main_argv(argv: list[str]) -> None:
    """
    Main entrypoint of `dcqd-reconstruct` that takes a list of arguments which are usually the
    command-line arguments of the `main()` function. Pass ["-h"]/["--help"] to see all the
    available arguments with help message for each.

    :param argv: arguments to the function (main function passes `sys.argv[1:]`)
    """
    args = parse_args(argv)
    settings = setup_command(args)
    try:
        spec = read_channel_spec(args.channel_file)
    except ChannelSpecError as err:
        exit_with(f"Invalid channel spec: {err}")
    if args.d is not None and args.d != spec.d:
        exit_with(f"--d {args.d} does not match d={spec.d} of '{spec.source}'")
    if spec.n_qudits != 1:
        exit_with(f"Full reconstruction needs a single-qudit map but '{spec.source}' has "
                  f"{spec.n_qudits} qudits; use dcqd-population for the diagonal")
    try:
        report = reconstruct(spec, args, settings)
    except (DimensionError, InvalidChannelError, InvalidProbeError) as err:
        exit_with(f"Reconstruction failed: {err}")
    write_output(render_report(report), args.output)
    out = info_stream(args.output)
    if report.under_determined:
        print_warn(f"System is under-determined with rank {report.rank.rank} of "
                   f"{report.rank.required}", file=sys.stderr)
        sys.exit(ExitCode.FAILURE)
    print_info(f"Recovered χ for d={report.d} with rank {report.rank.rank}, Frobenius error "
               f"{report.frobenius_error:.3g} in {report.duration_seconds:.2f}s", file=out)


def reconstruct(spec: ChannelSpec, args: argparse.Namespace, settings: Settings) -> RunReport:
    """
    Run the full characterization of the channel of `spec` with the options of the script.

    :param spec: the channel to characterize
    :param args: the parsed arguments
    :param settings: the loaded `Settings`
    :return: the `RunReport`
    """
    start = time.perf_counter()
    out = info_stream(args.output)
    d = spec.d
    kind = AlphaKind(args.alphas_policy or settings.alpha_policy)
    policy = AlphaPolicy(kind, args.seed, settings.alpha_ratio, settings.alpha_tolerance)
    configs = enumerate_configurations(d, policy)
    print_info(f"Simulating {len(configs)} configurations of '{spec.source}' (d={d})", file=out)
    workers = settings.workers if args.workers is None else args.workers
    records = simulate(spec.chi, configs, workers, settings.undefined_probability)
    if args.shots:
        records = [sample_outcomes(r, args.shots, args.seed, settings.undefined_probability)
                   for r in records]
    system = assemble_system(configs, records, args.trace_preserving, args.drop_undefined,
                             settings.undefined_probability)
    ranks = rank_report(system, settings.rank_threshold)
    result: Optional[Reconstruction] = None
    null_labels: tuple[str, ...] = ()
    try:
        result = solve_chi(system, settings.rank_threshold, args.psd)
        chi = result.chi
    except UnderDeterminedError as err:
        null_labels = err.null_space_labels
        chi = err.partial
    error = None if chi is None else chi_distance(chi, spec.chi)
    return RunReport(Consts.program_name(), __version__, args.seed, d, spec.n_qudits, args.shots,
                     policy.kind.value, args.trace_preserving, summarize(configs, records), ranks,
                     result is None, null_labels, chi, spec.chi, error,
                     None if result is None else result.residual_norm,
                     time.perf_counter() - start)


def parse_args(argv: list[str]) -> argparse.Namespace:
    """
    Parse command-line arguments for the program and return the result :class:`argparse.Namespace`.

    :param argv: the list of arguments to be parsed
    :return: the result of parsing using the `argparse` library as a :class:`argparse.Namespace`
    """
    parser = argparse.ArgumentParser(
        description="Characterize a single-qudit channel with d² ensemble measurements and "
                    "write a JSON run report")
    parser.add_argument("-d", "--d", type=prime_arg,
                        help="prime qudit dimension; must match the channel spec when given")
    parser.add_argument("-n", "--shots", type=positive_arg,
                        help="number of shots per configuration; exact statistics when omitted")
    parser.add_argument("-s", "--seed", type=int, default=Consts.default_seed(),
                        help="seed of all random draws (probe coefficients and shots), "
                             "default is %(default)s")
    parser.add_argument("-o", "--output", type=str,
                        help="file to write the report to; standard output when omitted or '-'")
    parser.add_argument("-t", "--trace-preserving", action="store_true",
                        help="add the trace-preservation constraint rows to the system")
    parser.add_argument("-a", "--alphas-policy", type=str, choices=("geometric", "random"),
                        help="policy of the probe coefficients; default is from the settings")
    parser.add_argument("-p", "--psd", action="store_true",
                        help="clip negative eigenvalues of the recovered χ")
    parser.add_argument("-w", "--workers", type=int,
                        help="threads simulating the configurations, 0 for serial; default is "
                             "from the settings")
    parser.add_argument("--drop-undefined", action="store_true",
                        help="skip normalizer rows of outcomes with vanishing probability "
                             "instead of keeping them in joint form")
    add_common_args(parser)
    parser.add_argument("channel_file", type=str, help="JSON channel spec of the map")
    return parser.parse_args(argv)
