"""Unit tests for `dcqd/lemmas.py`"""

import pytest

from dcqd.config import Settings
from dcqd.lemmas import (CheckResult, check_abelian_subgroups, check_cosets,
                         check_distinct_phases, check_hamming, check_logical_mub,
                         check_normalizer_order, check_unique_solution, run_checks)
from dcqd.protocol import AlphaPolicy
from dcqd.stabilizer import StabilizerCode, mub_family_indices

_CHECK_NAMES = [
    "composition", "commutation phase", "basis orthogonality", "unique solution",
    "population syndromes", "W partition", "normalizer order", "Abelian subgroups", "cosets",
    "coset phases", "W phases", "logical MUB", "family MUB", "outcome projectors",
    "probe conditions", "probability expansion", "configuration count",
    "rank per configuration", "full rank", "second coset adds no rank", "Hamming bound",
]


def _default_probes(d: int) -> list[StabilizerCode]:
    policy = AlphaPolicy()
    return [policy.probe(d, i, 0, pos + 1) for pos, i in enumerate(mub_family_indices(d))]


@pytest.mark.parametrize("d", [2, 3])
def test_run_checks(d: int):
    """all checks pass for small primes and come in a fixed order"""
    results = run_checks(d)
    assert [r.name for r in results] == _CHECK_NAMES
    failed = [r for r in results if not r.passed]
    assert failed == []
    by_name = {r.name: r.detail for r in results}
    assert by_name["normalizer order"] == f"|N(S)|={d ** 3}"
    assert by_name["Abelian subgroups"] == f"{d + 1} Abelian subgroups"
    assert by_name["logical MUB"] == f"MUB overlap 1/{d}"
    assert by_name["configuration count"] == f"{d * d} configurations"
    assert by_name["full rank"] == f"rank {d ** 4} of {d ** 4}"
    assert by_name["second coset adds no rank"] == "increment 0"


def test_structure_d5():
    """normalizer, subgroup, coset and MUB structure for d = 5"""
    d = 5
    probes = _default_probes(d)
    assert check_normalizer_order(probes) == (True, "|N(S)|=125")
    assert check_abelian_subgroups(probes) == (True, "6 Abelian subgroups")
    assert check_cosets(probes) == (True, "5 cosets each")
    assert check_distinct_phases(probes)[0]
    assert check_logical_mub(probes, Settings().matrix_tolerance) == (True, "MUB overlap 1/5")
    assert check_unique_solution(d)[0]


def test_unique_solution():
    """p′ is unique for q ≠ 0 and q′ is unique when q = 0 and p ≠ 0"""
    assert check_unique_solution(2) == (True, "10 equations")
    assert check_unique_solution(3) == (True, "60 equations")
    assert check_unique_solution(5) == (True, f"{4 * 125 + 4 * 5} equations")


@pytest.mark.slow
def test_run_checks_d5():
    """the complete check suite for d = 5"""
    assert all(r.passed for r in run_checks(5))


def test_hamming_check():
    """the degenerate-code bound cases as a single check"""
    passed, detail = check_hamming(2)
    assert passed
    assert detail == "saturated at 4, 4, 2; n=k holds only for g=[4]"
    assert check_hamming(3)[0]


def test_check_result():
    """verdicts of failed checks keep their detail"""
    result = CheckResult("full rank", False, "rank 12 of 16")
    assert not result.passed
    assert result.detail == "rank 12 of 16"
    assert CheckResult("cosets", True).detail == ""


if __name__ == "__main__":
    # boilerplate to invoke pytest on this file for debugging
    pytest.main([__file__, "-s"])
