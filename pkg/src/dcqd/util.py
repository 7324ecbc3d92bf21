"""
Helpers shared by the settings loader and the table output of the scripts.
"""

from configparser import ConfigParser
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from tabulate import tabulate

from .print import fgcolor as fg
from .print import get_terminal_width


def ini_file_reader(fd: Iterable[str], case_sensitive: bool = True) -> ConfigParser:
    """
    Parse settings in INI format. Only '=' separates keys from values and values are taken
    literally since none of the numeric settings needs interpolation.

    :param fd: lines of the INI data, usually an open file
    :param case_sensitive: whether keys keep their case (default) or are lower-cased
    :return: the parsed `ConfigParser`
    """
    config = ConfigParser(interpolation=None, delimiters="=")
    if case_sensitive:
        config.optionxform = str  # type: ignore
    config.read_file(fd)
    return config


@dataclass(frozen=True)
class Column:
    """
    A column of a :class:`FormatTable`.

    Attributes:
        header: title of the column
        color: one of the `fgcolor` strings used for the header and values
        width_ratio: share of the terminal width the column may take relative to the others
    """
    header: str
    color: str
    width_ratio: float = 1.0


@dataclass
class FormatTable:
    """
    Table of values laid out for the current terminal with `tabulate`; values that do not fit
    their share of the width are wrapped.

    Attributes:
        rows: the rows of values, one per line of the table
        columns: the `Column` of each position in the rows
        fmt: `tabulate` format of the table, e.g. `rounded_grid`
        max_col_widths: widths of the columns derived from their `width_ratio`
    """
    rows: Sequence[Sequence[Any]]
    columns: Sequence[Column]
    fmt: str = "rounded_grid"
    max_col_widths: list[int] = field(init=False)

    def __post_init__(self):
        # each column loses 3 characters to padding and its border
        available = get_terminal_width() - 3 * len(self.columns) - 1
        total = sum(c.width_ratio for c in self.columns)
        self.max_col_widths = [max(4, int(c.width_ratio * available / total))
                               for c in self.columns]

    def show(self, colored: bool = True) -> str:
        """
        Render the table.

        :param colored: whether to color each column, to be False for redirected output
        :return: the table as a multi-line string
        """
        headers = [c.header for c in self.columns]
        rows: Iterable[list[str]] = ([str(v) for v in row] for row in self.rows)
        if colored:
            headers = [f"{c.color}{h}{fg.reset}" for c, h in zip(self.columns, headers)]
            rows = ([f"{c.color}{v}{fg.reset}" for c, v in zip(self.columns, row)]
                    for row in rows)
        return tabulate(rows, headers, tablefmt=self.fmt, disable_numparse=True,
                        maxcolwidths=self.max_col_widths)
