"""
Code for the `dcqd-resources` script that compares the physical resources of process
characterization schemes for n qudits.
"""

import argparse
import sys

from dcqd.cmd import add_common_args, positive_arg, prime_arg, setup_command
from dcqd.print import fgcolor as fg
from dcqd.print import print_info
from dcqd.reconstruct import resource_table
from dcqd.util import Column, FormatTable


def main() -> None:
    """main function for `dcqd-resources` script"""
    main_argv(sys.argv[1:])


def main_argv(argv: list[str]) -> None:
    """
    Main entrypoint of `dcqd-resources` that takes a list of arguments which are usually the
    command-line arguments of the `main()` function. Pass ["-h"]/["--help"] to see all the
    available arguments with help message for each.

    :param argv: arguments to the function (main function passes `sys.argv[1:]`)
    """
    args = parse_args(argv)
    setup_command(args)
    rows = resource_table(args.d, args.n)
    print_info(f"Required physical resources for d={args.d}, n={args.n}")
    columns = [Column("Scheme", fg.orange, 1.5), Column("dim(H)", fg.blue),
               Column("Inputs", fg.blue), Column("Configurations", fg.green, 1.5),
               Column("Measurements", fg.purple, 2.0), Column("Interactions", fg.cyan, 2.0)]
    table = FormatTable([[r.scheme, r.hilbert_dim, r.inputs, r.configurations, r.measurements,
                          r.interactions] for r in rows], columns, args.format)
    print(table.show(colored=sys.stdout.isatty() and not args.plain))


def parse_args(argv: list[str]) -> argparse.Namespace:
    """
    Parse command-line arguments for the program and return the result :class:`argparse.Namespace`.

    :param argv: the list of arguments to be parsed
    :return: the result of parsing using the `argparse` library as a :class:`argparse.Namespace`
    """
    parser = argparse.ArgumentParser(
        description="Show the number of configurations, inputs and interactions needed by "
                    "standard, ancilla-assisted and direct process characterization")
    parser.add_argument("-d", "--d", type=prime_arg, default=2,
                        help="prime qudit dimension, default is %(default)s")
    parser.add_argument("-n", "--n", type=positive_arg, default=1,
                        help="number of qudits, default is %(default)s")
    parser.add_argument("-f", "--format", type=str, default="rounded_grid",
                        help="table format as accepted by `tabulate`, default is %(default)s")
    parser.add_argument("-P", "--plain", action="store_true", help="do not color the table")
    add_common_args(parser)
    return parser.parse_args(argv)
