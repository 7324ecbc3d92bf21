"""
Code for the `dcqd-population` script that demonstrates the population procedure: a single
ensemble measurement on maximally entangled pairs gives every diagonal element of χ.
"""

import argparse
import sys

import numpy as np

from dcqd.channels import ChiMatrix, InvalidChannelError, identity_chi
from dcqd.cmd import add_common_args, exit_with, positive_arg, prime_arg, setup_command
from dcqd.config import Consts
from dcqd.pauli import multi_error_basis
from dcqd.print import fgcolor as fg
from dcqd.print import print_info
from dcqd.protocol import (DimensionCapError, OutcomeRecord, outcome_grid, population_diagonal,
                           run_population, run_population_multiqudit, sample_outcomes)
from dcqd.report import ChannelSpecError, read_channel_spec
from dcqd.util import Column, FormatTable


def main() -> None:
    """main function for `dcqd-population` script"""
    main_argv(sys.argv[1:])


def main_argv(argv: list[str]) -> None:
    """
    Main entrypoint of `dcqd-population` that takes a list of arguments which are usually the
    command-line arguments of the `main()` function. Pass ["-h"]/["--help"] to see all the
    available arguments with help message for each.

    :param argv: arguments to the function (main function passes `sys.argv[1:]`)
    """
    args = parse_args(argv)
    settings = setup_command(args)
    if args.channel_file:
        try:
            spec = read_channel_spec(args.channel_file)
        except ChannelSpecError as err:
            exit_with(f"Invalid channel spec: {err}")
        if args.d is not None and args.d != spec.d:
            exit_with(f"--d {args.d} does not match d={spec.d} of '{spec.source}'")
        chi, source = spec.chi, spec.source
    else:
        chi, source = identity_chi(args.d or 2), "identity channel"
    try:
        if chi.n_qudits == 1:
            record = run_population(chi, settings.matrix_tolerance)
        else:
            record = run_population_multiqudit(chi, settings.dimension_cap,
                                               settings.matrix_tolerance)
    except (DimensionCapError, InvalidChannelError) as err:
        exit_with(f"Population run failed: {err}")
    if args.shots:
        record = sample_outcomes(record, args.shots, args.seed, settings.undefined_probability)
    print_info(f"Population measurement of {source} (d={chi.d}, {chi.n_qudits} qudit(s)"
               f"{f', {args.shots} shots' if args.shots else ''})")
    colored = sys.stdout.isatty()
    if chi.n_qudits == 1:
        print(grid_table(record).show(colored))
    print(diagonal_table(chi, record).show(colored))
    deviation = float(np.max(np.abs(population_diagonal(record) - np.diag(chi.entries).real)))
    print_info(f"Total probability {record.stabilizer_probs.sum():.12g} (Tr χ = {chi.trace:.12g})"
               f", largest deviation from diag(χ) {deviation:.3g}")


def grid_table(record: OutcomeRecord) -> FormatTable:
    """the d×d outcome probabilities of a single-pair population run indexed by (k, k′)"""
    grid = outcome_grid(record)
    d = grid.shape[0]
    rows = [[f"k={k}"] + [f"{p:.6f}" for p in grid[k]] for k in range(d)]
    columns = [Column("k \\ k′", fg.orange)] + [Column(f"k′={k2}", fg.blue) for k2 in range(d)]
    return FormatTable(rows, columns)


def diagonal_table(chi: ChiMatrix, record: OutcomeRecord) -> FormatTable:
    """recovered populations next to the diagonal of χ in error-basis order"""
    diagonal = population_diagonal(record)
    elements = multi_error_basis(chi.d, chi.n_qudits)
    rows = [[m, str(elements[m]), f"{diagonal[m]:.6f}", f"{chi.entries[m, m].real:.6f}"]
            for m in range(len(elements))]
    return FormatTable(rows, [Column("Index", fg.orange), Column("Error", fg.cyan, 2.0),
                              Column("Population", fg.green, 1.5), Column("χ_mm", fg.blue, 1.5)])


def parse_args(argv: list[str]) -> argparse.Namespace:
    """
    Parse command-line arguments for the program and return the result :class:`argparse.Namespace`.

    :param argv: the list of arguments to be parsed
    :return: the result of parsing using the `argparse` library as a :class:`argparse.Namespace`
    """
    parser = argparse.ArgumentParser(
        description="Extract the diagonal of χ with a single measurement of X⊗X and Z⊗Z^{d−1} "
                    "on maximally entangled pairs")
    parser.add_argument("-d", "--d", type=prime_arg,
                        help="prime qudit dimension of the identity channel used when no "
                             "channel spec is given (default 2); must match the spec otherwise")
    parser.add_argument("-n", "--shots", type=positive_arg,
                        help="number of shots; exact probabilities when omitted")
    parser.add_argument("-s", "--seed", type=int, default=Consts.default_seed(),
                        help="seed of the shot sampling, default is %(default)s")
    add_common_args(parser)
    parser.add_argument("channel_file", type=str, nargs="?",
                        help="JSON channel spec of the map (single or multi-qudit)")
    return parser.parse_args(argv)
