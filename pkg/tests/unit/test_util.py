"""Unit tests for `dcqd/util.py` and `dcqd/print.py`"""

import pytest

from dcqd.print import fgcolor, print_check, print_error, print_info, print_warn, set_quiet
from dcqd.util import Column, FormatTable


@pytest.fixture(name="table")
def create_table() -> FormatTable:
    """a small two-column table"""
    return FormatTable([["SQPT", 16], ["DCQD", 4]],
                       [Column("Scheme", fgcolor.orange, 2.0), Column("Inputs", fgcolor.blue)])


def test_format_table(table: FormatTable):
    """columns get their share of the width and colors only on request"""
    assert len(table.max_col_widths) == 2
    assert table.max_col_widths[0] >= table.max_col_widths[1] >= 4
    plain = table.show(colored=False)
    assert "\033[" not in plain
    assert plain.splitlines()[1].split("│")[1].strip() == "Scheme"
    assert "DCQD" in plain
    colored = table.show()
    assert f"{fgcolor.orange}SQPT{fgcolor.reset}" in colored
    assert f"{fgcolor.blue}16{fgcolor.reset}" in colored


def test_quiet_messages(capsys: pytest.CaptureFixture[str]):
    """quiet mode keeps errors and check verdicts and drops the rest"""
    try:
        set_quiet(True)
        print_info("info")
        print_warn("warn")
        print_error("error")
        print_check("cosets", True, "3 cosets each")
        captured = capsys.readouterr()
        assert captured.out == "[PASS] cosets: 3 cosets each\n"
        assert captured.err == "error\n"
    finally:
        set_quiet(False)
    print_info("info")
    print_warn("warn")
    print_check("full rank", False)
    captured = capsys.readouterr()
    assert captured.out == "info\n[FAIL] full rank\n"
    assert captured.err == "warn\n"


if __name__ == "__main__":
    # boilerplate to invoke pytest on this file for debugging
    pytest.main([__file__, "-s"])
