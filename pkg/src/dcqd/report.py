"""
Reading of channel-spec files and writing/reading of run reports, both JSON documents using
the same number encoding: a complex number is a `[real, imaginary]` pair and a matrix is a list
of rows of such pairs.
"""

import json
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
from packaging.version import InvalidVersion, Version

from . import __version__
from .channels import (ChiMatrix, InvalidChannelError, KrausSet, check_chi, kraus_to_chi,
                       random_kraus)
from .config import Consts
from .pauli import DimensionError, check_prime
from .protocol import ConfigurationKind, ExperimentalConfiguration, OutcomeRecord
from .reconstruct import RankContribution, RankReport


class ChannelSpecError(Exception):
    """raised for a malformed channel spec or run report, naming the line or field at fault"""


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """
    A map read from a channel-spec file.

    Attributes:
        d: the prime qudit dimension
        n_qudits: number of qudits the map acts on
        chi: the process matrix
        kraus: the Kraus operators when the file gave them (or generated them)
        description: free text from the file
        source: name of the file, or "<string>"
    """
    d: int
    n_qudits: int
    chi: ChiMatrix
    kraus: Optional[KrausSet]
    description: str
    source: str


@dataclass(frozen=True)
class ConfigurationSummary:
    """
    Statistics of one configuration as stored in a report.

    Attributes:
        index: position in the enumeration
        kind: "population" or "coherence"
        stabilizer_index: basis index of E_i for coherence configurations
        abelian_subgroup_index: index of the Abelian subgroup of the measured coset
        coset_label: stabilizer power of the measured coset
        alphas: probe coefficients of coherence configurations
        probabilities: stabilizer outcome probabilities (record order)
        expectations: [k][b−1] conditional normalizer expectations, None where undefined
    """
    index: int
    kind: str
    stabilizer_index: Optional[int]
    abelian_subgroup_index: Optional[int]
    coset_label: Optional[int]
    alphas: Optional[tuple[complex, ...]]
    probabilities: tuple[float, ...]
    expectations: Optional[tuple[tuple[Optional[complex], ...], ...]]


@dataclass(frozen=True)
class RunReport:
    """
    Self-contained result of a reconstruction run; every field except `duration_seconds` is
    determined by the command-line flags.

    Attributes:
        tool: program name
        version: version of the program that wrote the report
        seed: the user seed
        d: prime qudit dimension
        n_qudits: number of qudits of the map
        shots: shots per configuration, None for exact statistics
        alphas_policy: name of the probe-coefficient policy
        trace_preserving: whether trace-preservation rows were added
        configurations: per-configuration statistics
        rank: the rank report of the assembled system
        under_determined: whether the system was rank deficient
        null_space_labels: parameter labels of the undetermined directions
        chi: recovered process matrix (partial when under-determined), None if not solved
        ground_truth_chi: the process matrix of the input channel
        frobenius_error: distance between `chi` and `ground_truth_chi`
        residual_norm: least-squares residual, None when under-determined
        duration_seconds: wall-clock duration of the run
    """
    tool: str
    version: str
    seed: int
    d: int
    n_qudits: int
    shots: Optional[int]
    alphas_policy: str
    trace_preserving: bool
    configurations: tuple[ConfigurationSummary, ...]
    rank: RankReport
    under_determined: bool
    null_space_labels: tuple[str, ...]
    chi: Optional[ChiMatrix]
    ground_truth_chi: Optional[ChiMatrix]
    frobenius_error: Optional[float]
    residual_norm: Optional[float]
    duration_seconds: float


def encode_complex(value: complex) -> Optional[list[float]]:
    """[real, imaginary] pair of a complex number, None for NaN"""
    value = complex(value)
    if math.isnan(value.real) or math.isnan(value.imag):
        return None
    return [float(value.real), float(value.imag)]


def encode_matrix(matrix: np.ndarray) -> list[list[Optional[list[float]]]]:
    """a complex matrix as a list of rows of [real, imaginary] pairs"""
    return [[encode_complex(v) for v in row] for row in np.asarray(matrix)]


def _field(path: str, source: str) -> str:
    return f"{source}: field '{path}'" if path else source


def decode_complex(value: Any, path: str, source: str = "<string>") -> complex:
    """
    Decode a [real, imaginary] pair, also accepting a plain real number.

    :param value: the decoded JSON value
    :param path: field path used in error messages
    :param source: file name used in error messages
    :return: the complex number
    """
    if isinstance(value, bool):
        raise ChannelSpecError(f"{_field(path, source)} must be a number, not a boolean")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (isinstance(value, list) and len(value) == 2 and  # type: ignore
            all(isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in value)):  # type: ignore
        return complex(float(value[0]), float(value[1]))  # type: ignore
    raise ChannelSpecError(f"{_field(path, source)} must be a [real, imaginary] pair but got "
                           f"{json.dumps(value)}")


def decode_matrix(value: Any, path: str, source: str = "<string>") -> np.ndarray:
    """decode a square matrix of [real, imaginary] pairs into a complex array"""
    if not isinstance(value, list) or not value:
        raise ChannelSpecError(f"{_field(path, source)} must be a non-empty list of rows")
    rows: list[list[complex]] = []
    for r, row in enumerate(value):  # type: ignore
        if not isinstance(row, list) or len(row) != len(value):  # type: ignore
            raise ChannelSpecError(f"{_field(f'{path}[{r}]', source)} must be a row of "
                                   f"{len(value)} entries")  # type: ignore
        rows.append([decode_complex(v, f"{path}[{r}][{c}]", source)
                     for c, v in enumerate(row)])  # type: ignore
    return np.array(rows, dtype=np.complex128)


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ChannelSpecError(f"{source}:{err.lineno}:{err.colno}: {err.msg}") from err


def _require(doc: dict[str, Any], key: str, kind: type, source: str) -> Any:
    if key not in doc:
        raise ChannelSpecError(f"{_field(key, source)} is required")
    value = doc[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ChannelSpecError(f"{_field(key, source)} must be of type {kind.__name__} but got "
                               f"{json.dumps(value)}")
    return value


def parse_channel_spec(text: str, source: str = "<string>") -> ChannelSpec:
    """
    Parse a channel spec. The "representation" is "kraus" (with "operators"), "chi" (with
    "chi") or "random" (with "seed", optional "rank" and "trace_preserving") for a seeded
    random map.

    :param text: the JSON text
    :param source: name used in error messages
    :return: the `ChannelSpec` with a validated process matrix
    """
    doc = _load_json(text, source)
    if not isinstance(doc, dict):
        raise ChannelSpecError(f"{source}: a channel spec must be a JSON object")
    spec: dict[str, Any] = doc  # type: ignore
    d = _require(spec, "d", int, source)
    n_qudits = spec.get("n_qudits", 1)
    if not isinstance(n_qudits, int) or isinstance(n_qudits, bool) or n_qudits < 1:
        raise ChannelSpecError(f"{_field('n_qudits', source)} must be a positive integer")
    representation = _require(spec, "representation", str, source)
    description = spec.get("description", "")
    if not isinstance(description, str):
        raise ChannelSpecError(f"{_field('description', source)} must be a string")
    try:
        check_prime(d)
        kraus: Optional[KrausSet] = None
        if representation == "kraus":
            operators = _require(spec, "operators", list, source)
            kraus = KrausSet(d, n_qudits, tuple(decode_matrix(op, f"operators[{j}]", source)
                                                for j, op in enumerate(operators)))
            chi = kraus_to_chi(kraus)
        elif representation == "chi":
            chi = ChiMatrix(d, n_qudits, decode_matrix(_require(spec, "chi", list, source),
                                                       "chi", source))
        elif representation == "random":
            seed = _require(spec, "seed", int, source)
            rank = spec.get("rank", d ** (2 * n_qudits))
            trace_preserving = spec.get("trace_preserving", True)
            if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
                raise ChannelSpecError(f"{_field('rank', source)} must be a positive integer")
            if not isinstance(trace_preserving, bool):
                raise ChannelSpecError(f"{_field('trace_preserving', source)} must be a boolean")
            kraus = random_kraus(d, n_qudits, rank, trace_preserving, seed)
            chi = kraus_to_chi(kraus)
        else:
            raise ChannelSpecError(f"{_field('representation', source)} must be one of 'kraus', "
                                   f"'chi' or 'random' but got '{representation}'")
        check_chi(chi)
    except (DimensionError, InvalidChannelError) as err:
        raise ChannelSpecError(f"{source}: {err}") from err
    return ChannelSpec(d, n_qudits, chi, kraus, description, source)


def read_channel_spec(path: str) -> ChannelSpec:
    """read and parse a channel-spec file"""
    try:
        with open(path, "r", encoding="utf-8") as spec_fd:
            text = spec_fd.read()
    except OSError as err:
        raise ChannelSpecError(f"{path}: {err.strerror}") from err
    return parse_channel_spec(text, path)


def summarize(configs: Sequence[ExperimentalConfiguration],
              records: Sequence[OutcomeRecord]) -> tuple[ConfigurationSummary, ...]:
    """the report summaries of the given configurations and their records"""
    summaries: list[ConfigurationSummary] = []
    for config, record in zip(configs, records):
        alphas = None if config.probe.alphas is None else \
            tuple(complex(a) for a in config.probe.alphas)
        expectations = None
        if record.normalizer_expectations is not None:
            expectations = tuple(tuple(None if np.isnan(v) else complex(v) for v in row)
                                 for row in record.normalizer_expectations)
        summaries.append(ConfigurationSummary(
            config.index, config.kind.value, config.stabilizer_index,
            config.abelian_subgroup_index, config.coset_label, alphas,
            tuple(float(p) for p in record.stabilizer_probs), expectations))
    return tuple(summaries)


def _encode_summary(summary: ConfigurationSummary) -> dict[str, Any]:
    return {
        "index": summary.index,
        "kind": summary.kind,
        "stabilizer_index": summary.stabilizer_index,
        "abelian_subgroup_index": summary.abelian_subgroup_index,
        "coset_label": summary.coset_label,
        "alphas": None if summary.alphas is None else
        [encode_complex(a) for a in summary.alphas],
        "probabilities": list(summary.probabilities),
        "expectations": None if summary.expectations is None else
        [[None if v is None else encode_complex(v) for v in row] for row in summary.expectations],
    }


def _encode_chi(chi: Optional[ChiMatrix]) -> Optional[list[list[Optional[list[float]]]]]:
    return None if chi is None else encode_matrix(chi.entries)


def _nullable_float(value: Optional[float]) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)


def render_report(report: RunReport) -> str:
    """
    Render a report as JSON text with two-space indentation and keys in a fixed order; the
    text ends with a newline.
    """
    doc = {
        "tool": report.tool,
        "version": report.version,
        "seed": report.seed,
        "d": report.d,
        "n_qudits": report.n_qudits,
        "shots": report.shots,
        "alphas_policy": report.alphas_policy,
        "trace_preserving": report.trace_preserving,
        "configurations": [_encode_summary(s) for s in report.configurations],
        "rank": {
            "rank": report.rank.rank,
            "required": report.rank.required,
            "contributions": [{"config_index": c.config_index, "kind": c.kind, "rows": c.rows,
                               "increment": c.increment} for c in report.rank.contributions],
        },
        "under_determined": report.under_determined,
        "null_space_labels": list(report.null_space_labels),
        "chi": _encode_chi(report.chi),
        "ground_truth_chi": _encode_chi(report.ground_truth_chi),
        "frobenius_error": _nullable_float(report.frobenius_error),
        "residual_norm": _nullable_float(report.residual_norm),
        "duration_seconds": report.duration_seconds,
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def check_report_version(version: str, source: str = "<string>") -> None:
    """
    Check that a report written by `version` can be read by the running version: reports from
    another major version or from a newer release are rejected.
    """
    try:
        written = Version(version)
    except InvalidVersion as err:
        raise ChannelSpecError(f"{_field('version', source)}: invalid version '{version}'") \
            from err
    running = Version(__version__)
    if written.major != running.major or written > running:
        raise ChannelSpecError(f"{source}: report written by {Consts.program_name()} {version} "
                               f"cannot be read by version {__version__}")


def _decode_chi(value: Any, d: int, n_qudits: int, path: str,
                source: str) -> Optional[ChiMatrix]:
    if value is None:
        return None
    try:
        return ChiMatrix(d, n_qudits, decode_matrix(value, path, source))
    except DimensionError as err:
        raise ChannelSpecError(f"{_field(path, source)}: {err}") from err


def _decode_summary(value: Any, path: str, source: str) -> ConfigurationSummary:
    if not isinstance(value, dict):
        raise ChannelSpecError(f"{_field(path, source)} must be an object")
    doc: dict[str, Any] = value  # type: ignore
    try:
        kind = ConfigurationKind(doc["kind"]).value
        alphas = None if doc["alphas"] is None else tuple(
            decode_complex(a, f"{path}.alphas[{j}]", source) for j, a in enumerate(doc["alphas"]))
        expectations = None if doc["expectations"] is None else tuple(
            tuple(None if v is None else decode_complex(v, f"{path}.expectations[{k}][{b}]",
                                                        source) for b, v in enumerate(row))
            for k, row in enumerate(doc["expectations"]))
        return ConfigurationSummary(int(doc["index"]), kind, doc["stabilizer_index"],
                                    doc["abelian_subgroup_index"], doc["coset_label"], alphas,
                                    tuple(float(p) for p in doc["probabilities"]), expectations)
    except KeyError as err:
        raise ChannelSpecError(f"{_field(f'{path}.{err.args[0]}', source)} is required") from err
    except (TypeError, ValueError) as err:
        raise ChannelSpecError(f"{_field(path, source)}: {err}") from err


def parse_report(text: str, source: str = "<string>") -> RunReport:
    """
    Parse a report written by :func:`render_report`; rendering the result again gives the same
    text for reports of the running version.

    :param text: the JSON text
    :param source: name used in error messages
    :return: the `RunReport`
    """
    doc = _load_json(text, source)
    if not isinstance(doc, dict):
        raise ChannelSpecError(f"{source}: a report must be a JSON object")
    report: dict[str, Any] = doc  # type: ignore
    tool = _require(report, "tool", str, source)
    if tool != Consts.program_name():
        raise ChannelSpecError(f"{_field('tool', source)} must be '{Consts.program_name()}'")
    version = _require(report, "version", str, source)
    check_report_version(version, source)
    d = _require(report, "d", int, source)
    n_qudits = _require(report, "n_qudits", int, source)
    rank_doc = _require(report, "rank", dict, source)
    try:
        rank = RankReport(int(rank_doc["rank"]), int(rank_doc["required"]), tuple(
            RankContribution(c["config_index"], c["kind"], int(c["rows"]), int(c["increment"]))
            for c in rank_doc["contributions"]))
    except (KeyError, TypeError, ValueError) as err:
        raise ChannelSpecError(f"{_field('rank', source)}: malformed rank report") from err
    configurations = tuple(_decode_summary(c, f"configurations[{j}]", source) for j, c in
                           enumerate(_require(report, "configurations", list, source)))
    return RunReport(
        tool, version, _require(report, "seed", int, source), d, n_qudits,
        _optional_number(report, "shots", int, source),
        _require(report, "alphas_policy", str, source),
        _require(report, "trace_preserving", bool, source), configurations, rank,
        _require(report, "under_determined", bool, source),
        tuple(str(label) for label in _require(report, "null_space_labels", list, source)),
        _decode_chi(report.get("chi"), d, n_qudits, "chi", source),
        _decode_chi(report.get("ground_truth_chi"), d, n_qudits, "ground_truth_chi", source),
        _optional_number(report, "frobenius_error", float, source),
        _optional_number(report, "residual_norm", float, source),
        _duration(report, source))


def _optional_number(report: dict[str, Any], key: str, kind: type, source: str) -> Any:
    """value of a number field that may be null; integers are accepted for float fields"""
    value = report.get(key)
    if value is None:
        return None
    accepted, name = ((int,), "an integer") if kind is int else ((int, float), "a number")
    if not isinstance(value, accepted) or isinstance(value, bool):
        raise ChannelSpecError(f"{_field(key, source)} must be {name} or null but got "
                               f"{json.dumps(value)}")
    return kind(value)


def _duration(report: dict[str, Any], source: str) -> float:
    value = report.get("duration_seconds")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ChannelSpecError(f"{_field('duration_seconds', source)} must be a number")
    return float(value)
