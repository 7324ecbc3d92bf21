"""
Colored console output of the `dcqd-*` scripts with a global quiet switch.
"""

import os
import shutil
import sys
from dataclasses import dataclass
from typing import IO, Optional


@dataclass(frozen=True)
class TermColors:
    """ANSI escape sequences of the foreground colors used by the scripts"""
    red: str
    green: str
    orange: str
    blue: str
    purple: str
    cyan: str
    reset: str


fgcolor = TermColors("\033[31m", "\033[32m", "\033[33m", "\033[34m", "\033[35m", "\033[36m",
                     "\033[00m")

# set by the scripts for `-q/--quiet`; errors and check verdicts are printed regardless
_QUIET = False


def set_quiet(quiet: bool) -> None:
    """suppress (or re-enable) the messages of `print_info` and `print_warn`"""
    global _QUIET  # pylint: disable=global-statement
    _QUIET = quiet


def get_terminal_width() -> int:
    """
    Width of the terminal used to limit table columns. stderr is queried first since stdout
    may be redirected to a report file.
    """
    try:
        return os.get_terminal_size(sys.stderr.fileno()).columns
    except OSError:
        return shutil.get_terminal_size().columns


def print_color(msg: str, fg: Optional[str] = None, end: str = "\n",
                file: Optional[IO[str]] = None) -> None:
    """
    Write a message in the given foreground color. The color is dropped when the target is not
    a terminal so that piped output and report files stay free of escape sequences.

    :param msg: the message
    :param fg: one of the `fgcolor` strings, or None for the default color
    :param end: terminator of the message, a newline by default
    :param file: the text stream to write to, `sys.stdout` by default
    """
    out = file or sys.stdout
    text = f"{fg}{msg}{fgcolor.reset}" if fg and out.isatty() else msg
    print(text, end=end, file=out, flush=end != "\n")


def print_error(msg: str, end: str = "\n", file: Optional[IO[str]] = None) -> None:
    """write an error in red to `file` (`sys.stderr` by default) even in quiet mode"""
    print_color(msg, fg=fgcolor.red, end=end, file=file or sys.stderr)


def print_warn(msg: str, end: str = "\n", file: Optional[IO[str]] = None) -> None:
    """write a warning in purple to `file` (`sys.stderr` by default) unless quiet"""
    if not _QUIET:
        print_color(msg, fg=fgcolor.purple, end=end, file=file or sys.stderr)


def print_info(msg: str, end: str = "\n", file: Optional[IO[str]] = None) -> None:
    """write a progress or summary message in blue to `file` (`sys.stdout` by default) unless
    quiet"""
    if not _QUIET:
        print_color(msg, fg=fgcolor.blue, end=end, file=file)


def print_check(name: str, passed: bool, detail: str = "",
                file: Optional[IO[str]] = None) -> None:
    """
    Write the verdict of one verification check as a green PASS or red FAIL line.

    :param name: short name of the check
    :param passed: whether the check passed
    :param detail: optional detail appended after the name (e.g. the measured count)
    :param file: the text stream to write to, `sys.stdout` by default
    """
    status = "PASS" if passed else "FAIL"
    suffix = f": {detail}" if detail else ""
    print_color(f"[{status}] {name}{suffix}", fg=fgcolor.green if passed else fgcolor.red,
                file=file)
