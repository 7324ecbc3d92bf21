"""Unit tests for `dcqd/report.py`"""

import json
from importlib.resources import files

import numpy as np
import pytest
from packaging.version import Version

from dcqd import __version__
from dcqd.channels import chi_distance, identity_chi, kraus_to_chi, random_kraus
from dcqd.config import Consts
from dcqd.protocol import enumerate_configurations, simulate
from dcqd.reconstruct import assemble_system, rank_report, solve_chi
from dcqd.report import (ChannelSpecError, RunReport, check_report_version, decode_complex,
                         encode_complex, encode_matrix, parse_channel_spec, parse_report,
                         read_channel_spec, render_report, summarize)

from unit.util import resource


@pytest.fixture(name="report")
def create_report() -> RunReport:
    """report of an exact run on the qubit identity channel"""
    chi = identity_chi(2)
    configs = enumerate_configurations(2)
    records = simulate(chi, configs)
    system = assemble_system(configs, records)
    result = solve_chi(system)
    return RunReport(Consts.program_name(), __version__, 7, 2, 1, None, "geometric", False,
                     summarize(configs, records), rank_report(system), False, (), result.chi,
                     chi, chi_distance(result.chi, chi), result.residual_norm, 0.25)


def test_read_channel_specs():
    """the Kraus, χ and random representations give valid process matrices"""
    spec = read_channel_spec(resource("identity-d3.json"))
    assert spec.d == 3
    assert spec.n_qudits == 1
    assert spec.kraus is not None
    assert chi_distance(spec.chi, identity_chi(3)) <= 1e-12
    assert spec.description == "identity channel on a qutrit"
    assert spec.source.endswith("identity-d3.json")
    spec = read_channel_spec(resource("bit-flip-d2.json"))
    assert np.isclose(spec.chi.entries[2, 2].real, 0.3)
    assert np.isclose(spec.chi.entries[0, 0].real, 0.7)
    spec = read_channel_spec(resource("random-two-qubit.json"))
    assert spec.n_qudits == 2
    assert spec.kraus is not None
    assert len(spec.kraus.operators) == 16
    assert np.isclose(spec.chi.trace, 1.0)
    expected = kraus_to_chi(random_kraus(2, 2, 16, True, 11))
    assert chi_distance(spec.chi, expected) <= 1e-12
    spec = read_channel_spec(resource("lossy-d2.json"))
    assert spec.chi.trace < 1.0
    assert spec.kraus is not None
    assert len(spec.kraus.operators) == 3


def test_packaged_channels():
    """every channel spec shipped with the package parses"""
    directory = files("dcqd").joinpath("conf").joinpath("channels")
    names = sorted(entry.name for entry in directory.iterdir() if entry.name.endswith(".json"))
    assert names == ["bit-flip-d2.json", "depolarizing-d2.json", "identity-d2.json",
                     "random-d3.json"]
    for name in names:
        spec = parse_channel_spec(directory.joinpath(name).read_text(encoding="utf-8"), name)
        assert np.isclose(spec.chi.trace, 1.0)


def test_inline_chi_spec():
    """a χ given directly accepts plain real entries"""
    text = json.dumps({"d": 2, "representation": "chi",
                       "chi": [[0.85, 0, 0, 0], [0, 0.05, 0, 0], [0, 0, 0.05, 0],
                               [0, 0, 0, [0.05, 0.0]]]})
    spec = parse_channel_spec(text)
    assert spec.kraus is None
    assert spec.source == "<string>"
    assert np.allclose(np.diag(spec.chi.entries).real, [0.85, 0.05, 0.05, 0.05])


def test_malformed_specs():
    """errors name the line of a syntax error or the field at fault"""
    with pytest.raises(ChannelSpecError, match=r"bad-syntax\.json:3:3: Expecting ',' delimiter"):
        read_channel_spec(resource("bad-syntax.json"))
    with pytest.raises(ChannelSpecError, match="field 'representation' is required"):
        read_channel_spec(resource("missing-representation.json"))
    with pytest.raises(ChannelSpecError, match="min eigenvalue"):
        read_channel_spec(resource("not-positive.json"))
    with pytest.raises(ChannelSpecError, match="must be a prime"):
        read_channel_spec(resource("non-prime.json"))
    with pytest.raises(ChannelSpecError, match="No such file"):
        read_channel_spec(resource("missing.json"))
    cases = [
        ('[1, 2]', "must be a JSON object"),
        ('{"d": true, "representation": "chi"}', "field 'd' must be of type int but got true"),
        ('{"d": 2, "n_qudits": 0, "representation": "chi"}', "field 'n_qudits'"),
        ('{"d": 2, "representation": "superop"}', "field 'representation' must be one of"),
        ('{"d": 2, "representation": "kraus", "operators": 3}',
         "field 'operators' must be of type list but got 3"),
        ('{"d": 2, "representation": "kraus", "operators": [[[1, 0], [0]]]}',
         r"field 'operators\[0\]\[1\]' must be a row of 2 entries"),
        ('{"d": 2, "representation": "chi", "chi": [["x", 0], [0, 0]]}',
         r"field 'chi\[0\]\[0\]' must be a \[real, imaginary\] pair"),
        ('{"d": 2, "representation": "chi", "chi": [[1, 0], [0, 0]]}', "must be 4×4"),
        ('{"d": 2, "representation": "random"}', "field 'seed' is required"),
        ('{"d": 2, "representation": "random", "seed": 1, "rank": 0}', "field 'rank'"),
        ('{"d": 2, "representation": "random", "seed": 1, "trace_preserving": "yes"}',
         "field 'trace_preserving' must be a boolean"),
        ('{"d": 2, "representation": "chi", "chi": [[1]], "description": 5}',
         "field 'description' must be a string"),
    ]
    for text, message in cases:
        with pytest.raises(ChannelSpecError, match=message):
            parse_channel_spec(text, "inline.json")


def test_complex_encoding():
    """complex values are [real, imaginary] pairs and NaN becomes null"""
    assert encode_complex(1.5 - 2j) == [1.5, -2.0]
    assert encode_complex(complex(np.nan, 0.0)) is None
    assert encode_matrix(np.eye(2)) == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    assert decode_complex([0.5, -1], "x") == complex(0.5, -1.0)
    assert decode_complex(3, "x") == complex(3.0, 0.0)
    with pytest.raises(ChannelSpecError, match="not a boolean"):
        decode_complex(False, "x")
    with pytest.raises(ChannelSpecError):
        decode_complex([1, 2, 3], "x")


def test_render_and_parse(report: RunReport):
    """a rendered report parses back and renders to the same text"""
    text = render_report(report)
    assert text.endswith("}\n")
    doc = json.loads(text)
    assert list(doc)[:4] == ["tool", "version", "seed", "d"]
    assert list(doc)[-1] == "duration_seconds"
    assert doc["configurations"][1]["expectations"][1] == [None]
    assert doc["rank"]["rank"] == 16
    parsed = parse_report(text, "report.json")
    assert parsed.d == 2
    assert parsed.shots is None
    assert parsed.rank == report.rank
    assert parsed.configurations == report.configurations
    assert parsed.chi is not None
    assert render_report(parsed) == text


def test_parse_report_errors(report: RunReport):
    """reports of another tool, another major version or with bad fields are rejected"""
    doc = json.loads(render_report(report))
    with pytest.raises(ChannelSpecError, match="field 'tool'"):
        parse_report(json.dumps(dict(doc, tool="other")))
    with pytest.raises(ChannelSpecError, match="duration_seconds"):
        parse_report(json.dumps(dict(doc, duration_seconds="fast")))
    with pytest.raises(ChannelSpecError, match="field 'shots' must be an integer or null"):
        parse_report(json.dumps(dict(doc, shots="many")))
    with pytest.raises(ChannelSpecError, match="field 'shots'"):
        parse_report(json.dumps(dict(doc, shots=1.5)))
    with pytest.raises(ChannelSpecError, match="field 'frobenius_error'"):
        parse_report(json.dumps(dict(doc, frobenius_error="small")))
    with pytest.raises(ChannelSpecError, match="field 'residual_norm'"):
        parse_report(json.dumps(dict(doc, residual_norm=True)))
    assert parse_report(json.dumps(dict(doc, shots=1000, frobenius_error=0))).shots == 1000
    with pytest.raises(ChannelSpecError, match="field 'rank'"):
        parse_report(json.dumps(dict(doc, rank={"rank": 1})))
    configs = [dict(doc["configurations"][0])]
    del configs[0]["probabilities"]
    with pytest.raises(ChannelSpecError, match=r"configurations\[0\]\.probabilities"):
        parse_report(json.dumps(dict(doc, configurations=configs)))
    with pytest.raises(ChannelSpecError, match="report.json:1:1"):
        parse_report("nope", "report.json")


def test_report_version():
    """reports of the same major version and not newer than the running one are accepted"""
    running = Version(__version__)
    check_report_version(__version__)
    check_report_version(f"{running.major}.0.0")
    with pytest.raises(ChannelSpecError, match="cannot be read"):
        check_report_version(f"{running.major + 1}.0.0")
    with pytest.raises(ChannelSpecError, match="cannot be read"):
        check_report_version(f"{running.major}.{running.minor + 1}.0")
    with pytest.raises(ChannelSpecError, match="invalid version"):
        check_report_version("not-a-version")


if __name__ == "__main__":
    # boilerplate to invoke pytest on this file for debugging
    pytest.main([__file__, "-s"])
