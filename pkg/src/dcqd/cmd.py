"""
Helpers shared by the `dcqd-*` command-line scripts.
"""

import argparse
import configparser
import sys
from enum import IntEnum
from typing import IO, NoReturn, Optional

from .config import Settings, load_settings
from .pauli import DimensionError, check_prime
from .print import print_error, set_quiet


class ExitCode(IntEnum):
    """exit status of the scripts"""
    SUCCESS = 0
    FAILURE = 1  # verification failure or under-determined reconstruction
    INPUT_ERROR = 2


def prime_arg(value: str) -> int:
    """`argparse` type for a prime dimension"""
    try:
        return check_prime(int(value))
    except (ValueError, DimensionError) as err:
        raise argparse.ArgumentTypeError(f"expected a prime dimension but got '{value}'") \
            from err


def positive_arg(value: str) -> int:
    """`argparse` type for a positive integer"""
    try:
        result = int(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected an integer but got '{value}'") from err
    if result < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer but got {result}")
    return result


def add_common_args(parser: argparse.ArgumentParser) -> None:
    """add the `--config` and `-q/--quiet` options accepted by every script"""
    parser.add_argument("-C", "--config", type=str,
                        help="settings file to use instead of the ones searched by default "
                             "($DCQD_CONFIG, ~/.config/dcqd/settings.ini)")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="only print errors and the results")


def exit_with(msg: str, code: ExitCode = ExitCode.INPUT_ERROR) -> NoReturn:
    """print an error message and exit with the given code"""
    print_error(msg)
    sys.exit(code)


def setup_command(args: argparse.Namespace) -> Settings:
    """
    Apply the common options of a script: set the quiet mode and load the settings.

    :param args: the parsed arguments including those of :func:`add_common_args`
    :return: the loaded `Settings`; exits with the input-error code if they cannot be read
    """
    set_quiet(args.quiet)
    try:
        return load_settings(args.config)
    except (OSError, ValueError, configparser.Error) as err:
        exit_with(f"Failed to read settings: {err}")


def info_stream(output: Optional[str]) -> IO[str]:
    """stream for informational messages: stderr when the result document goes to stdout"""
    return sys.stderr if not output or output == "-" else sys.stdout


def write_output(text: str, output: Optional[str]) -> None:
    """
    Write a result document to a file, or to standard output when `output` is empty or "-".

    :param text: the document
    :param output: path of the output file
    """
    if not output or output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(output, "w", encoding="utf-8") as out_fd:
            out_fd.write(text)
    except OSError as err:
        exit_with(f"Failed to write '{output}': {err.strerror}")
