"""
Linear-algebra side of direct characterization: every measured statistic is a real linear
functional of the Hermitian process matrix, so the records of all configurations assemble into
one real linear system over the d^{4n} real parameters of χ, whose rank and least-squares
solution are computed here.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .channels import ChiMatrix, basis_operators, basis_states, project_psd
from .config import Settings
from .pauli import DimensionError, check_prime, matrix_of_multi
from .protocol import (ConfigurationKind, ExperimentalConfiguration, OutcomeRecord,
                       population_basis)
from .stabilizer import eigenprojector

_DEFAULTS = Settings()


class MismatchedRecordError(Exception):
    """raised when the outcome records do not belong to the given configurations"""


class UnderDeterminedError(Exception):
    """raised when the assembled system has fewer independent rows than χ has parameters"""

    def __init__(self, rank: int, required: int, null_space_labels: Sequence[str],
                 partial: Optional[ChiMatrix] = None):
        missing = ", ".join(null_space_labels[:8])
        if len(null_space_labels) > 8:
            missing += f", ... ({len(null_space_labels)} directions)"
        super().__init__(f"Rank {rank} is below the {required} parameters of χ; "
                         f"undetermined directions: {missing}")
        self.rank = rank
        self.required = required
        self.null_space_labels = tuple(null_space_labels)
        self.partial = partial


class Statistic(str, Enum):
    """kind of measured quantity behind a row of the linear system"""
    PROBABILITY = "probability"
    NORMALIZER = "normalizer"
    TRACE = "trace"


@dataclass(frozen=True)
class RowLabel:
    """
    Provenance of one row of a `LinearSystem`.

    Attributes:
        config_index: index of the configuration, None for trace-preservation rows
        statistic: the `Statistic` of the row
        outcome: stabilizer outcome (population outcomes in record order), or the basis index j
                 of a trace-preservation row
        normalizer: the power b of the measured normalizer T^b S^{a0} for normalizer rows
        part: "re" or "im" for rows taken from a complex statistic, "re" for real ones
    """
    config_index: Optional[int]
    statistic: Statistic
    outcome: int
    normalizer: Optional[int] = None
    part: str = "re"

    def __str__(self) -> str:
        source = "trace" if self.config_index is None else f"config[{self.config_index}]"
        norm = "" if self.normalizer is None else f".N{self.normalizer}"
        return f"{source}.{self.statistic.value}[{self.outcome}]{norm}.{self.part}"


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """
    Real linear system `matrix @ x = rhs` over the real parameters x of a Hermitian χ (see
    :func:`chi_to_params` for their order).

    Attributes:
        d: the prime qudit dimension
        n_qudits: number of qudits of the characterized map
        matrix: coefficient matrix of shape (rows, d^{4n})
        rhs: the observed statistics
        row_labels: one `RowLabel` per row
        param_labels: one label per column, e.g. "diag[0]", "re[0,3]", "im[1,2]"
    """
    d: int
    n_qudits: int
    matrix: NDArray[np.float64] = field(repr=False)
    rhs: NDArray[np.float64] = field(repr=False)
    row_labels: tuple[RowLabel, ...] = field(repr=False)
    param_labels: tuple[str, ...] = field(repr=False)

    @property
    def required_rank(self) -> int:
        """number of real parameters of χ, d^{4n}"""
        return self.matrix.shape[1]

    def rows_of(self, config_index: Optional[int]) -> NDArray[np.bool_]:
        """boolean mask of the rows contributed by a configuration (None for trace rows)"""
        return np.array([label.config_index == config_index for label in self.row_labels],
                        dtype=np.bool_)


@dataclass(frozen=True)
class RankContribution:
    """
    Rank gained by adding the rows of one configuration after all earlier ones.

    Attributes:
        config_index: index of the configuration, None for the trace-preservation rows
        kind: "population", "coherence" or "trace"
        rows: number of rows contributed
        increment: increase of the numerical rank
    """
    config_index: Optional[int]
    kind: str
    rows: int
    increment: int


@dataclass(frozen=True)
class RankReport:
    """
    Numerical rank of a `LinearSystem`.

    Attributes:
        rank: rank of the complete system
        required: number of real parameters, d^{4n}
        contributions: incremental contributions in row order (population first)
    """
    rank: int
    required: int
    contributions: tuple[RankContribution, ...]

    @property
    def full_rank(self) -> bool:
        """whether the system determines every parameter"""
        return self.rank >= self.required


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """
    Result of :func:`solve_chi`.

    Attributes:
        chi: the recovered process matrix
        residual_norm: Euclidean norm of `matrix @ x − rhs` before any PSD projection
        rank: numerical rank of the solved system
        projected: whether negative eigenvalues were clipped
    """
    chi: ChiMatrix
    residual_norm: float
    rank: int
    projected: bool = False


def param_labels(size: int) -> tuple[str, ...]:
    """labels of the real parameters for a χ with `size` basis elements"""
    upper = np.triu_indices(size, k=1)
    pairs = [f"{m},{n}" for m, n in zip(*upper)]
    return tuple([f"diag[{m}]" for m in range(size)] + [f"re[{p}]" for p in pairs] +
                 [f"im[{p}]" for p in pairs])


def chi_to_params(chi: ChiMatrix) -> NDArray[np.float64]:
    """
    Real parameters of a Hermitian χ: the diagonal in basis order, then Re χ_mn and Im χ_mn for
    m < n in lexicographic order.
    """
    entries = chi.entries
    upper = np.triu_indices(chi.size, k=1)
    return np.concatenate([np.diag(entries).real, entries[upper].real, entries[upper].imag])


def params_to_chi(params: NDArray[np.float64], d: int, n_qudits: int = 1) -> ChiMatrix:
    """
    Hermitian process matrix from its real parameters (inverse of :func:`chi_to_params`).

    :param params: vector of length d^{4n}
    :param d: prime dimension
    :param n_qudits: number of qudits
    :return: the `ChiMatrix`
    """
    size = d ** (2 * n_qudits)
    if params.shape != (size * size,):
        raise DimensionError(f"Expected {size * size} parameters but got {params.shape}")
    upper = np.triu_indices(size, k=1)
    count = len(upper[0])
    values = params[size:size + count] + 1j * params[size + count:]
    entries = np.diag(params[:size].astype(np.complex128))
    entries[upper] = values
    entries[upper[1], upper[0]] = values.conj()
    return ChiMatrix(d, n_qudits, entries)


def _coefficients(c: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """
    Coefficients on the real parameters of the functional χ ↦ Σ_mn c_mn χ_mn, for a stack of
    matrices c of shape (..., size, size).
    """
    size = c.shape[-1]
    rows, cols = np.triu_indices(size, k=1)
    upper = c[..., rows, cols]
    lower = c[..., cols, rows]
    diag = np.diagonal(c, axis1=-2, axis2=-1)
    return np.concatenate([diag, upper + lower, 1j * (upper - lower)], axis=-1)


def _functionals(psi: NDArray[np.complex128],
                 observables: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """coefficients of χ ↦ Tr(O Ψ χ Ψ†) for each observable O of the stack"""
    # Tr(O Ψ χ Ψ†) = Σ_mn χ_mn (Ψ† O Ψ)_nm
    sandwiched = np.einsum("in,kij,jm->kmn", psi.conj(), observables, psi, optimize=True)
    return _coefficients(sandwiched)


def _signature(config: ExperimentalConfiguration) -> tuple[object, ...]:
    return (config.index, config.kind, config.d, config.n_pairs, config.stabilizer_index,
            config.abelian_subgroup_index, config.coset_label)


def _check_records(configs: Sequence[ExperimentalConfiguration],
                   records: Sequence[OutcomeRecord]) -> tuple[int, int]:
    if not configs:
        raise MismatchedRecordError("Cannot assemble a system without configurations")
    if len(configs) != len(records):
        raise MismatchedRecordError(f"Got {len(records)} records for {len(configs)} "
                                    "configurations")
    d = configs[0].d
    n_qudits = configs[0].n_pairs if configs[0].kind == ConfigurationKind.POPULATION else 1
    for config, record in zip(configs, records):
        if _signature(config) != _signature(record.config):
            raise MismatchedRecordError(f"Record of configuration {record.config.index} does "
                                        f"not match configuration {config.index}")
        config_qudits = config.n_pairs if config.kind == ConfigurationKind.POPULATION else 1
        if config.d != d or config_qudits != n_qudits:
            raise MismatchedRecordError(
                f"Configuration {config.index} is for d={config.d} on {config_qudits} qudits "
                f"but the first one is for d={d} on {n_qudits} qudits")
        if (config.kind == ConfigurationKind.COHERENCE and
                (record.joint_values is None and record.normalizer_expectations is None)):
            raise MismatchedRecordError(f"Record of coherence configuration {config.index} "
                                        "carries no normalizer statistics")
    return d, n_qudits


def _population_rows(config: ExperimentalConfiguration, record: OutcomeRecord
                     ) -> tuple[list[NDArray[np.float64]], list[float], list[RowLabel]]:
    d, n_pairs = config.d, config.n_pairs
    psi = basis_states(d, n_pairs, config.probe.state)
    amplitudes = population_basis(d, n_pairs).conj().T @ psi
    # probability of outcome o is Σ_mn a_om χ_mn conj(a_on)
    c = amplitudes[:, :, np.newaxis] * amplitudes.conj()[:, np.newaxis, :]
    coefficients = _coefficients(c).real
    rows = list(coefficients)
    rhs = [float(p) for p in record.stabilizer_probs]
    labels = [RowLabel(config.index, Statistic.PROBABILITY, o) for o in range(len(rows))]
    return rows, rhs, labels


def _coherence_rows(config: ExperimentalConfiguration, record: OutcomeRecord,
                    drop_undefined: bool, undefined_probability: float
                    ) -> tuple[list[NDArray[np.float64]], list[float], list[RowLabel]]:
    d = config.d
    psi = basis_states(d, 1, config.probe.state)
    projectors = np.array([eigenprojector(config.probe.generator, k) for k in range(d)])
    normalizers = [matrix_of_multi(n) for n in config.measured_normalizers]
    joint = record.joint_values
    if joint is None:
        assert record.normalizer_expectations is not None
        joint = np.nan_to_num(record.normalizer_expectations) * \
            record.stabilizer_probs[:, np.newaxis]
    prob_coefficients = _functionals(psi, projectors).real
    rows: list[NDArray[np.float64]] = []
    rhs: list[float] = []
    labels: list[RowLabel] = []
    for k in range(d):
        rows.append(prob_coefficients[k])
        rhs.append(float(record.stabilizer_probs[k]))
        labels.append(RowLabel(config.index, Statistic.PROBABILITY, k))
        if drop_undefined and record.stabilizer_probs[k] < undefined_probability:
            continue
        # joint statistic Tr(N_b P_k E(ρ) P_k), linear in χ
        sandwiched = np.array([projectors[k] @ n @ projectors[k] for n in normalizers])
        coefficients = _functionals(psi, sandwiched)
        for b in range(len(normalizers)):
            value = complex(joint[k, b])
            rows.extend((coefficients[b].real, coefficients[b].imag))
            rhs.extend((value.real, value.imag))
            labels.extend((RowLabel(config.index, Statistic.NORMALIZER, k, b + 1, "re"),
                           RowLabel(config.index, Statistic.NORMALIZER, k, b + 1, "im")))
    return rows, rhs, labels


def trace_rows(d: int, n_qudits: int
               ) -> tuple[list[NDArray[np.float64]], list[float], list[RowLabel]]:
    """
    Rows of the trace-preservation constraint Σ_mn χ_mn E_n†E_m = I, written as
    Tr(E_j† Σ_mn χ_mn E_n†E_m) / d^n = δ_j0 for every basis element E_j.

    :param d: prime dimension
    :param n_qudits: number of qudits
    :return: the rows, right-hand sides and labels (real and imaginary part per E_j)
    """
    ops = basis_operators(d, n_qudits)
    dim = d ** n_qudits
    # c[j, m, n] = Tr(E_j† E_n† E_m) / dim
    c = np.einsum("jba,ncb,mca->jmn", ops.conj(), ops.conj(), ops, optimize=True) / dim
    coefficients = _coefficients(c)
    rows: list[NDArray[np.float64]] = []
    rhs: list[float] = []
    labels: list[RowLabel] = []
    for j in range(ops.shape[0]):
        rows.extend((coefficients[j].real, coefficients[j].imag))
        rhs.extend((1.0 if j == 0 else 0.0, 0.0))
        labels.extend((RowLabel(None, Statistic.TRACE, j, part="re"),
                       RowLabel(None, Statistic.TRACE, j, part="im")))
    return rows, rhs, labels


def assemble_system(configs: Sequence[ExperimentalConfiguration],
                    records: Sequence[OutcomeRecord], trace_preserving: bool = False,
                    drop_undefined: bool = False,
                    undefined_probability: float = _DEFAULTS.undefined_probability
                    ) -> LinearSystem:
    """
    Build the real linear system relating the parameters of χ to the recorded statistics.

    A population record contributes one row per outcome. A coherence record contributes one row
    per stabilizer outcome k and, for every measured normalizer N_b, the real and imaginary
    parts of the joint statistic Tr(N_b P_k E(ρ) P_k). The joint form keeps the rows of
    outcomes with vanishing probability exact; `drop_undefined` skips them instead.

    :param configs: the configurations, in enumeration order
    :param records: one record per configuration (exact or sampled)
    :param trace_preserving: append the trace-preservation constraint rows
    :param drop_undefined: skip normalizer rows of outcomes below `undefined_probability`
    :param undefined_probability: threshold for `drop_undefined`
    :return: the assembled `LinearSystem`
    """
    d, n_qudits = _check_records(configs, records)
    rows: list[NDArray[np.float64]] = []
    rhs: list[float] = []
    labels: list[RowLabel] = []
    for config, record in zip(configs, records):
        if config.kind == ConfigurationKind.POPULATION:
            part = _population_rows(config, record)
        else:
            part = _coherence_rows(config, record, drop_undefined, undefined_probability)
        rows.extend(part[0])
        rhs.extend(part[1])
        labels.extend(part[2])
    if trace_preserving:
        part = trace_rows(d, n_qudits)
        rows.extend(part[0])
        rhs.extend(part[1])
        labels.extend(part[2])
    size = d ** (2 * n_qudits)
    return LinearSystem(d, n_qudits, np.array(rows, dtype=np.float64),
                        np.array(rhs, dtype=np.float64), tuple(labels), param_labels(size))


def numerical_rank(matrix: NDArray[np.float64],
                   threshold: float = _DEFAULTS.rank_threshold) -> int:
    """number of singular values above `threshold` times the largest one"""
    if matrix.size == 0:
        return 0
    values = scipy.linalg.svdvals(matrix)
    if values[0] == 0.0:
        return 0
    return int(np.count_nonzero(values > threshold * values[0]))


def rank_report(system: LinearSystem,
                threshold: float = _DEFAULTS.rank_threshold) -> RankReport:
    """
    Numerical rank of the system and the rank gained by each configuration when the rows are
    added in enumeration order (population first, trace-preservation rows last).

    :param system: the assembled `LinearSystem`
    :param threshold: relative singular-value cutoff
    :return: the `RankReport`
    """
    # configuration indices in order of first appearance
    order = list(dict.fromkeys(label.config_index for label in system.row_labels))
    contributions: list[RankContribution] = []
    included = np.zeros(len(system.row_labels), dtype=np.bool_)
    rank = 0
    for config_index in order:
        mask = system.rows_of(config_index)
        included |= mask
        new_rank = numerical_rank(system.matrix[included], threshold)
        contributions.append(RankContribution(config_index, _row_kind(system, mask),
                                              int(mask.sum()), new_rank - rank))
        rank = new_rank
    return RankReport(rank, system.required_rank, tuple(contributions))


def _row_kind(system: LinearSystem, mask: NDArray[np.bool_]) -> str:
    stats = {label.statistic for label, keep in zip(system.row_labels, mask) if keep}
    if Statistic.TRACE in stats:
        return Statistic.TRACE.value
    if Statistic.NORMALIZER in stats:
        return ConfigurationKind.COHERENCE.value
    return ConfigurationKind.POPULATION.value


def null_space_labels(system: LinearSystem,
                      threshold: float = _DEFAULTS.rank_threshold) -> list[str]:
    """
    Parameter labels of the directions left undetermined by the system, one per null-space
    basis vector: the label of its largest component.
    """
    null = scipy.linalg.null_space(system.matrix, rcond=threshold)
    return [system.param_labels[int(np.argmax(np.abs(null[:, j])))]
            for j in range(null.shape[1])]


def solve_chi(system: LinearSystem, threshold: float = _DEFAULTS.rank_threshold,
              psd: bool = False) -> Reconstruction:
    """
    Least-squares solution of the system mapped back to a Hermitian χ.

    :param system: the assembled `LinearSystem`
    :param threshold: relative singular-value cutoff for the rank check and the solve
    :param psd: clip negative eigenvalues of the solution
    :return: the `Reconstruction`
    :raises UnderDeterminedError: when the rank is below d^{4n}; the exception carries the
                                  null-space labels and the minimum-norm partial solution
    """
    params, _, rank, _ = scipy.linalg.lstsq(system.matrix, system.rhs, cond=threshold)
    chi = params_to_chi(params, system.d, system.n_qudits)
    if rank < system.required_rank:
        raise UnderDeterminedError(int(rank), system.required_rank,
                                   null_space_labels(system, threshold), chi)
    residual = float(np.linalg.norm(system.matrix @ params - system.rhs))
    if psd:
        return Reconstruction(project_psd(chi), residual, int(rank), True)
    return Reconstruction(chi, residual, int(rank))


@dataclass(frozen=True)
class ResourceRow:
    """
    Physical resources of one process-characterization scheme for n qudits.

    Attributes:
        scheme: name of the scheme
        hilbert_dim: dimension of the Hilbert space of each experimental configuration
        inputs: number of distinct input states
        configurations: overall number of experimental configurations
        measurements: kind of measurements performed
        interactions: interactions required by those measurements
    """
    scheme: str
    hilbert_dim: int
    inputs: int
    configurations: int
    measurements: str
    interactions: str


def resource_table(d: int, n: int) -> list[ResourceRow]:
    """
    Closed-form resource counts of standard and ancilla-assisted tomography schemes compared
    with direct characterization.

    :param d: prime dimension
    :param n: number of qudits, at least 1
    :return: one `ResourceRow` per scheme (SQPT, AAPT, AAPT (MUB), AAPT (POVM), DCQD)
    """
    check_prime(d)
    if n < 1:
        raise DimensionError(f"Number of qudits must be positive but got {n}")
    return [
        ResourceRow("SQPT", d ** n, d ** (2 * n), d ** (4 * n), "1-body", "single-body"),
        ResourceRow("AAPT", d ** (2 * n), 1, d ** (4 * n), "joint 1-body", "single-body"),
        ResourceRow("AAPT (MUB)", d ** (2 * n), 1, d ** (2 * n) + 1, "MUB", "many-body"),
        ResourceRow("AAPT (POVM)", d ** (4 * n), 1, 1, "POVM", "many-body"),
        ResourceRow("DCQD", d ** (2 * n), (d + 2) ** n, d ** (2 * n), "stabilizer/normalizer",
                    "single- and two-body"),
    ]
