"""Unit tests for the `dcqd/run/*.py` scripts and `dcqd/cmd.py`"""

import argparse
import json
from importlib.resources import files
from pathlib import Path
from typing import Callable
from unittest.mock import patch

import pytest

from dcqd.channels import identity_chi
from dcqd.cmd import ExitCode, positive_arg, prime_arg, write_output
from dcqd.reconstruct import UnderDeterminedError
from dcqd.report import parse_report
from dcqd.run import population, reconstruct, resources, verify

from unit.util import resource


def _exit_code(func: Callable[[list[str]], None], argv: list[str]) -> int:
    with pytest.raises(SystemExit) as info:
        func(argv)
    code = info.value.code
    return 0 if code is None else int(code)


def test_argument_types():
    """prime and positive arguments are validated before any work is done"""
    assert prime_arg("5") == 5
    assert positive_arg("3") == 3
    for value in ("4", "1", "x"):
        with pytest.raises(argparse.ArgumentTypeError):
            prime_arg(value)
    for value in ("0", "-2", "1.5"):
        with pytest.raises(argparse.ArgumentTypeError):
            positive_arg(value)
    assert _exit_code(resources.main_argv, ["-d", "6"]) == ExitCode.INPUT_ERROR
    assert _exit_code(reconstruct.main_argv, ["-n", "0", resource("bit-flip-d2.json")]) == 2


def test_write_output(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    """documents go to a file or to standard output"""
    write_output("{}\n", "-")
    assert capsys.readouterr().out == "{}\n"
    target = tmp_path / "out.json"
    write_output("{}\n", str(target))
    assert target.read_text(encoding="utf-8") == "{}\n"
    with pytest.raises(SystemExit) as info:
        write_output("{}\n", str(tmp_path))
    assert info.value.code == ExitCode.INPUT_ERROR
    assert "Failed to write" in capsys.readouterr().err


def test_reconstruct_to_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    """an exact run writes a full-rank report and a summary line"""
    output = tmp_path / "report.json"
    reconstruct.main_argv(["-o", str(output), "-t", resource("bit-flip-d2.json")])
    captured = capsys.readouterr()
    assert "Simulating 4 configurations" in captured.out
    assert "Recovered χ for d=2 with rank 16" in captured.out
    report = parse_report(output.read_text(encoding="utf-8"), str(output))
    assert report.d == 2
    assert report.shots is None
    assert report.trace_preserving
    assert not report.under_determined
    assert report.rank.rank == 16
    assert report.frobenius_error is not None and report.frobenius_error <= 1e-8
    assert len(report.configurations) == 4


def test_reconstruct_to_stdout(capsys: pytest.CaptureFixture[str]):
    """the report goes to stdout and messages to stderr; shot runs repeat for a fixed seed"""
    argv = ["-q", "-n", "2000", "-s", "3", "-p", "-a", "random", "-w", "2",
            resource("identity-d3.json")]
    reconstruct.main_argv(argv)
    first = json.loads(capsys.readouterr().out)
    reconstruct.main_argv(argv)
    captured = capsys.readouterr()
    assert captured.err == ""
    second = json.loads(captured.out)
    assert first["shots"] == 2000
    assert first["alphas_policy"] == "random"
    assert first["d"] == 3
    del first["duration_seconds"], second["duration_seconds"]
    assert first == second


def test_reconstruct_reference_runs(tmp_path: Path):
    """a sampled qubit bit flip and an exact random qutrit map are recovered to known accuracy"""
    output = tmp_path / "bit-flip.json"
    reconstruct.main_argv(["-q", "-n", "1000000", "-s", "7", "-o", str(output),
                           resource("bit-flip-d2.json")])
    report = parse_report(output.read_text(encoding="utf-8"))
    assert report.shots == 1000000
    assert report.frobenius_error is not None and report.frobenius_error <= 2e-2
    channel = files("dcqd").joinpath("conf").joinpath("channels").joinpath("random-d3.json")
    output = tmp_path / "random-d3.json"
    reconstruct.main_argv(["-q", "-o", str(output), str(channel)])
    report = parse_report(output.read_text(encoding="utf-8"))
    assert report.rank.rank == 81
    assert report.frobenius_error is not None and report.frobenius_error <= 1e-8


def test_reconstruct_input_errors(capsys: pytest.CaptureFixture[str]):
    """bad specs, a dimension mismatch and multi-qudit maps exit with the input-error code"""
    cases = [
        (["bad-syntax.json"], "Invalid channel spec"),
        (["non-prime.json"], "must be a prime"),
        (["-d", "3", "bit-flip-d2.json"], "does not match d=2"),
        (["random-two-qubit.json"], "dcqd-population"),
    ]
    for argv, message in cases:
        argv = argv[:-1] + [resource(argv[-1])]
        assert _exit_code(reconstruct.main_argv, argv) == ExitCode.INPUT_ERROR
        assert message in capsys.readouterr().err
    argv = ["-C", resource("settings-bad-policy.ini"), resource("bit-flip-d2.json")]
    assert _exit_code(reconstruct.main_argv, argv) == ExitCode.INPUT_ERROR
    assert "Failed to read settings" in capsys.readouterr().err


def test_reconstruct_under_determined(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    """a rank-deficient system still writes its report before exiting with failure"""
    output = tmp_path / "report.json"
    error = UnderDeterminedError(12, 16, ["re[0,1]", "im[0,1]", "re[2,3]", "im[2,3]"],
                                 identity_chi(2))
    with patch("dcqd.run.reconstruct.solve_chi", side_effect=error):
        argv = ["-o", str(output), resource("bit-flip-d2.json")]
        code = _exit_code(reconstruct.main_argv, argv)
    assert code == ExitCode.FAILURE
    assert "under-determined" in capsys.readouterr().err
    report = parse_report(output.read_text(encoding="utf-8"))
    assert report.under_determined
    assert report.null_space_labels == ("re[0,1]", "im[0,1]", "re[2,3]", "im[2,3]")
    assert report.residual_norm is None
    assert report.chi is not None


def test_verify(capsys: pytest.CaptureFixture[str]):
    """every check passes for d = 2 and unsupported primes are rejected"""
    verify.main_argv(["-d", "2"])
    out = capsys.readouterr().out
    assert "Checking d=2" in out
    assert "[PASS] composition" in out
    assert "[PASS] full rank: rank 16 of 16" in out
    assert "[FAIL]" not in out
    assert out.rstrip().endswith("All 21 checks passed")
    verify.main_argv(["-q", "-d", "2", "-d", "3"])
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 42
    assert "Checking" not in out
    assert _exit_code(verify.main_argv, ["-d", "11"]) == ExitCode.INPUT_ERROR
    assert "Unsupported dimension(s) [11]" in capsys.readouterr().err
    assert _exit_code(verify.main_argv, ["-d", "9"]) == ExitCode.INPUT_ERROR


def test_resources(capsys: pytest.CaptureFixture[str]):
    """the comparison table lists every scheme with plain text when requested"""
    resources.main_argv(["-d", "3", "-P"])
    out = capsys.readouterr().out
    assert "Required physical resources for d=3, n=1" in out
    for scheme in ("SQPT", "AAPT", "DCQD"):
        assert scheme in out
    assert "81" in out
    assert "\033[" not in out
    resources.main_argv(["-q", "-n", "2", "-f", "plain"])
    out = capsys.readouterr().out
    assert "Required" not in out
    assert "256" in out


def test_population(capsys: pytest.CaptureFixture[str]):
    """the population run shows the outcome grid and the diagonal of χ"""
    population.main_argv([resource("bit-flip-d2.json")])
    out = capsys.readouterr().out
    assert "d=2, 1 qudit(s)" in out
    assert "0.300000" in out
    assert "0.700000" in out
    assert "largest deviation from diag(χ)" in out
    population.main_argv(["-d", "3"])
    out = capsys.readouterr().out
    assert "identity channel (d=3" in out
    assert "1.000000" in out
    population.main_argv(["-n", "500", resource("random-two-qubit.json")])
    out = capsys.readouterr().out
    assert "d=2, 2 qudit(s), 500 shots" in out
    assert "k \\ k′" not in out
    assert _exit_code(population.main_argv, ["-d", "3", resource("bit-flip-d2.json")]) == 2
    assert "does not match" in capsys.readouterr().err
    assert _exit_code(population.main_argv, [resource("missing-representation.json")]) == 2


if __name__ == "__main__":
    # boilerplate to invoke pytest on this file for debugging
    pytest.main([__file__, "-s"])
