"""
Code for the `dcqd-verify` script that runs the structural checks for one or more prime
dimensions and prints a PASS/FAIL line per check.
"""

import argparse
import sys

from dcqd.cmd import ExitCode, add_common_args, exit_with, prime_arg, setup_command
from dcqd.config import Consts
from dcqd.lemmas import run_checks
from dcqd.print import print_check, print_error, print_info


def main() -> None:
    """main function for `dcqd-verify` script"""
    main_argv(sys.argv[1:])


def main_argv(argv: list[str]) -> None:
    """
    Main entrypoint of `dcqd-verify` that takes a list of arguments which are usually the
    command-line arguments of the `main()` function. Pass ["-h"]/["--help"] to see all the
    available arguments with help message for each.

    :param argv: arguments to the function (main function passes `sys.argv[1:]`)
    """
    args = parse_args(argv)
    settings = setup_command(args)
    supported = Consts.verify_primes()
    dims: list[int] = args.d or list(supported)
    if unsupported := [d for d in dims if d not in supported]:
        exit_with(f"Unsupported dimension(s) {unsupported}; supported are {list(supported)}")
    failures = 0
    total = 0
    for d in dims:
        print_info(f"Checking d={d}")
        for result in run_checks(d, settings):
            print_check(result.name, result.passed, result.detail)
            total += 1
            failures += not result.passed
    if failures:
        print_error(f"{failures} of {total} checks FAILED")
        sys.exit(ExitCode.FAILURE)
    print_info(f"All {total} checks passed")


def parse_args(argv: list[str]) -> argparse.Namespace:
    """
    Parse command-line arguments for the program and return the result :class:`argparse.Namespace`.

    :param argv: the list of arguments to be parsed
    :return: the result of parsing using the `argparse` library as a :class:`argparse.Namespace`
    """
    parser = argparse.ArgumentParser(
        description="Verify the structural claims of direct characterization exhaustively for "
                    "prime dimensions")
    parser.add_argument("-d", "--d", type=prime_arg, action="append",
                        help="prime dimension to check (can be specified multiple times); "
                             f"default is all of {', '.join(map(str, Consts.verify_primes()))}")
    add_common_args(parser)
    return parser.parse_args(argv)
