"""
Simulation of the two measurement procedures of direct characterization: the population
run on a maximally entangled pair, and the coherence runs that measure one stabilizer generator
together with the d−1 nontrivial members of a normalizer coset.

All statistics are computed densely from the output state of the map applied to the principal
qudit(s) of the probe; shot sampling draws from those exact distributions.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .channels import ChiMatrix, apply_channel_pure, check_chi, error_states
from .config import Settings
from .pauli import (DimensionError, MultiPauli, compose_multi, embed, error_basis, power,
                    w_subset)
from .stabilizer import (ComplexVector, InvalidProbeError, StabilizerCode, coherence_probe,
                         cosets, eigenprojector, mub_family_indices,
                         population_probe, spectral_projectors, useful_subgroups)

_DEFAULTS = Settings()
# golden-ratio fraction used for the quadratic phases of the geometric probe profile
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
# random probes are resampled at most this many times before giving up
_MAX_RESAMPLES = 200
# tag in the seed sequence of probe draws that separates them from the shot streams
_PROBE_STREAM = 1


class DimensionCapError(Exception):
    """raised when a dense multi-qudit simulation would exceed the configured dimension cap"""


class ConfigurationKind(str, Enum):
    """the two procedures of the protocol"""
    POPULATION = "population"
    COHERENCE = "coherence"


class AlphaKind(str, Enum):
    """policies producing the probe coefficients of the coherence configurations"""
    GEOMETRIC = "geometric"
    RANDOM = "random"
    FIXED = "fixed"


def geometric_alphas(d: int, ratio: float, shift: int = 0) -> ComplexVector:
    """
    Normalized coefficients α_l ∝ r^{(l+s) mod d} exp(2πi·g·(l+s)²) with g the golden-ratio
    fraction; different shifts s give different superpositions for repeated probes.

    :param d: prime dimension
    :param ratio: modulus ratio r between consecutive coefficients
    :param shift: the repetition shift s
    :return: the coefficient vector
    """
    levels = np.arange(d) + shift
    alphas = ratio ** (levels % d) * np.exp(2j * np.pi * _GOLDEN * levels ** 2)
    return alphas / np.linalg.norm(alphas)


def random_alphas(d: int, rng: np.random.Generator) -> ComplexVector:
    """normalized complex Gaussian coefficients"""
    alphas = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return alphas / np.linalg.norm(alphas)


@dataclass(frozen=True)
class AlphaPolicy:
    """
    Choice of probe coefficients for every coherence configuration.

    Attributes:
        kind: the `AlphaKind`
        seed: seed of the random policy and of the fallback of the geometric one
        ratio: modulus ratio of the geometric profile
        tolerance: smallest accepted margin of the probe conditions
        fixed: coefficients used by every probe for the `fixed` kind (not validated)
    """
    kind: AlphaKind = AlphaKind.GEOMETRIC
    seed: int = 7
    ratio: float = _DEFAULTS.alpha_ratio
    tolerance: float = _DEFAULTS.alpha_tolerance
    fixed: Optional[tuple[complex, ...]] = None

    def probe(self, d: int, i: int, repetition: int, sequence: int) -> StabilizerCode:
        """
        Build the coherence probe for one configuration.

        :param d: prime dimension
        :param i: basis index of E_i
        :param repetition: how many probes of the same E_i came before this one
        :param sequence: position of the configuration in the enumeration, which seeds the
                         random draws so that each configuration gets its own superposition
        :return: the validated (except for the `fixed` kind) `StabilizerCode`
        """
        if self.kind == AlphaKind.FIXED:
            if self.fixed is None:
                raise InvalidProbeError("The fixed probe policy needs explicit coefficients")
            return coherence_probe(d, i, self.fixed, validate=False)
        if self.kind == AlphaKind.GEOMETRIC:
            try:
                return coherence_probe(d, i, geometric_alphas(d, self.ratio, repetition),
                                       tolerance=self.tolerance)
            except InvalidProbeError:
                pass
        rng = np.random.default_rng([self.seed, _PROBE_STREAM, sequence])
        for _ in range(_MAX_RESAMPLES):
            try:
                return coherence_probe(d, i, random_alphas(d, rng), tolerance=self.tolerance)
            except InvalidProbeError:
                continue
        raise InvalidProbeError(f"No valid probe coefficients found for d={d}, i={i} after "
                                f"{_MAX_RESAMPLES} draws")


@dataclass(frozen=True, eq=False)
class ExperimentalConfiguration:
    """
    One probe state together with one commuting measurement set.

    Attributes:
        index: position in the enumeration
        kind: population or coherence
        probe: the probe code and state
        stabilizer_index: basis index i of E_i (coherence only)
        abelian_subgroup_index: index v of the Abelian subgroup of the measured coset
        coset_label: stabilizer power a0 of the measured coset
        measured_normalizers: the d−1 measured members T^b S^{a0}, b = 1..d−1
        n_pairs: number of probe pairs r (population only; coherence probes use one pair)
    """
    index: int
    kind: ConfigurationKind
    probe: StabilizerCode
    stabilizer_index: Optional[int] = None
    abelian_subgroup_index: Optional[int] = None
    coset_label: Optional[int] = None
    measured_normalizers: tuple[MultiPauli, ...] = ()
    n_pairs: int = 1

    @property
    def d(self) -> int:
        """the prime qudit dimension"""
        return self.probe.d


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    """
    Statistics of one configuration, exact or estimated from shots.

    Attributes:
        config: the configuration measured
        stabilizer_probs: outcome probabilities; population outcomes are ordered by
                          (k_1, k′_1, ..., k_r, k′_r) row-major, coherence outcomes by k
        trace: Tr E(ρ) of the output state
        normalizer_expectations: [k, b−1] conditional expectation of the b-th measured normalizer
                                 given outcome k, NaN where the outcome probability is too small
        joint_values: [k, b−1] unconditioned values Tr(N_b P_k E(ρ))
        eigen_probs: [b−1, k, j] probability of outcome k together with eigenvalue j of N_b
        eigenvalues: [b−1, j] the eigenvalues of each measured normalizer
        shots: number of shots when sampled, None for exact statistics
        counts: population tallies per outcome, or coherence tallies [b−1, k, j]
    """
    config: ExperimentalConfiguration
    stabilizer_probs: NDArray[np.float64]
    trace: float
    normalizer_expectations: Optional[NDArray[np.complex128]] = None
    joint_values: Optional[NDArray[np.complex128]] = None
    eigen_probs: Optional[NDArray[np.float64]] = None
    eigenvalues: Optional[NDArray[np.complex128]] = None
    shots: Optional[int] = None
    counts: Optional[NDArray[np.int64]] = field(default=None, repr=False)


def population_probe_multi(d: int, n_pairs: int) -> StabilizerCode:
    """
    Product of `n_pairs` maximally entangled pairs with qudits ordered A_1..A_r, B_1..B_r,
    which is the maximally entangled state of dimension d^r; generators X_{A_j}X_{B_j} and
    Z_{A_j}Z_{B_j}^{d−1} for each pair, in pair order.

    :param d: prime dimension
    :param n_pairs: number of pairs r
    :return: the `StabilizerCode` with 2r generators
    """
    if n_pairs == 1:
        return population_probe(d)
    basis = error_basis(d)
    x, z = basis[d], basis[1]
    total = 2 * n_pairs
    generators: list[MultiPauli] = []
    for j in range(n_pairs):
        generators.append(compose_multi(embed(x, j, total), embed(x, n_pairs + j, total)))
        generators.append(compose_multi(embed(z, j, total),
                                        embed(power(z, d - 1), n_pairs + j, total)))
    dim = d ** n_pairs
    state = np.eye(dim, dtype=np.complex128).reshape(-1) / np.sqrt(dim)
    return StabilizerCode(d, tuple(generators), (0,) * total, state)


def population_configuration(d: int, n_pairs: int = 1) -> ExperimentalConfiguration:
    """the single population configuration for `n_pairs` qudits"""
    return ExperimentalConfiguration(0, ConfigurationKind.POPULATION,
                                     population_probe_multi(d, n_pairs), n_pairs=n_pairs)


def _pair_basis(d: int) -> NDArray[np.complex128]:
    """
    Joint eigenvectors of X⊗X and Z⊗Z^{d−1} as columns ordered by k·d + k′, each the range of
    the rank-one projector P_k P′_{k′}.
    """
    code = population_probe(d)
    first = [eigenprojector(code.generators[0], k) for k in range(d)]
    second = [eigenprojector(code.generators[1], k) for k in range(d)]
    columns: list[NDArray[np.complex128]] = []
    for k in range(d):
        for k2 in range(d):
            proj = first[k] @ second[k2]
            col = proj[:, int(np.argmax(np.linalg.norm(proj, axis=0)))]
            columns.append(col / np.linalg.norm(col))
    return np.column_stack(columns)


def population_basis(d: int, n_pairs: int) -> NDArray[np.complex128]:
    """
    Joint eigenvectors of all population generators for `n_pairs` pairs, as columns in outcome
    order, with rows in the A_1..A_r, B_1..B_r qudit ordering.

    :param d: prime dimension
    :param n_pairs: number of pairs r
    :return: the unitary matrix of side d^{2r}
    """
    pair = _pair_basis(d)
    full = reduce(np.kron, [pair] * n_pairs)
    total = d ** (2 * n_pairs)
    # rows are ordered (A_1, B_1, A_2, B_2, ...) after the Kronecker product
    axes = list(range(0, 2 * n_pairs, 2)) + list(range(1, 2 * n_pairs, 2))
    tensor = full.reshape((d,) * (2 * n_pairs) + (total,))
    return np.transpose(tensor, axes + [2 * n_pairs]).reshape(total, total)


def _population_record(chi: ChiMatrix, dimension_cap: int,
                       tolerance: float) -> OutcomeRecord:
    check_chi(chi, tolerance)
    n_pairs = chi.n_qudits
    total = chi.d ** (2 * n_pairs)
    if total > dimension_cap:
        raise DimensionCapError(f"Population run for {n_pairs} qudits of d={chi.d} needs "
                                f"dimension {total} above the cap of {dimension_cap}")
    config = population_configuration(chi.d, n_pairs)
    basis = population_basis(chi.d, n_pairs)
    # ⟨v|Ψ χ Ψ†|v⟩ for every outcome vector v without forming the output state
    amplitudes = basis.conj().T @ error_states(chi, config.probe.state)
    probs = np.einsum("om,mn,on->o", amplitudes, chi.entries, amplitudes.conj()).real
    return OutcomeRecord(config, probs, chi.trace)


def run_population(chi: ChiMatrix,
                   tolerance: float = _DEFAULTS.matrix_tolerance) -> OutcomeRecord:
    """
    Population procedure for a single-qudit map: the map acts on qudit A of the maximally
    entangled pair, then X⊗X and Z⊗Z^{d−1} are measured. The probability of outcome (k, k′)
    equals χ_mm for the unique E_m = X^{k′} Z^{−k}.

    :param chi: a valid single-qudit process matrix
    :param tolerance: tolerance for the validity check of `chi`
    :return: the exact `OutcomeRecord`
    """
    if chi.n_qudits != 1:
        raise DimensionError(f"Expected a single-qudit map but got {chi.n_qudits} qudits; "
                             "use run_population_multiqudit")
    return _population_record(chi, _DEFAULTS.dimension_cap, tolerance)


def run_population_multiqudit(chi: ChiMatrix, dimension_cap: int = _DEFAULTS.dimension_cap,
                              tolerance: float = _DEFAULTS.matrix_tolerance) -> OutcomeRecord:
    """
    Population procedure for an r-qudit map using r entangled pairs; the d^{2r} outcome
    probabilities equal the diagonal of χ (see :func:`population_diagonal`).

    :param chi: a valid process matrix on r qudits
    :param dimension_cap: largest total dense dimension d^{2r} allowed
    :param tolerance: tolerance for the validity check of `chi`
    :return: the exact `OutcomeRecord`
    """
    return _population_record(chi, dimension_cap, tolerance)


def outcome_to_basis_index(d: int, k: int, k2: int) -> int:
    """basis index of the error detected as population outcome (k, k′), i.e. X^{k′} Z^{−k}"""
    return k2 * d + (-k) % d


def population_diagonal(record: OutcomeRecord) -> NDArray[np.float64]:
    """
    Reorder population probabilities from outcome order into error-basis order so that the
    result equals diag(χ).

    :param record: a population `OutcomeRecord`
    :return: the d^{2r} probabilities in basis order
    """
    config = record.config
    if config.kind != ConfigurationKind.POPULATION:
        raise ValueError("Only population records map to the diagonal of χ")
    d, n_pairs = config.d, config.n_pairs
    size = d * d
    single = np.array([outcome_to_basis_index(d, cell // d, cell % d) for cell in range(size)])
    diagonal = np.zeros(size ** n_pairs)
    for outcome, prob in enumerate(record.stabilizer_probs):
        index = 0
        for cell in np.unravel_index(outcome, (size,) * n_pairs):
            index = index * size + int(single[cell])
        diagonal[index] = prob
    return diagonal


def outcome_grid(record: OutcomeRecord) -> NDArray[np.float64]:
    """single-pair population probabilities as a d×d grid indexed by (k, k′)"""
    if record.config.kind != ConfigurationKind.POPULATION or record.config.n_pairs != 1:
        raise ValueError("The outcome grid is defined for single-qudit population records")
    d = record.config.d
    return record.stabilizer_probs.reshape(d, d)


def run_coherence(chi: ChiMatrix, config: ExperimentalConfiguration,
                  undefined_probability: float = _DEFAULTS.undefined_probability,
                  tolerance: float = _DEFAULTS.matrix_tolerance) -> OutcomeRecord:
    """
    Coherence procedure: the map acts on qudit A of the probe, the stabilizer generator is
    measured with outcome k and each measured normalizer N_b is evaluated on the post-measurement
    state, giving Tr(P_k E(ρ)) and Tr(N_b P_k E(ρ) P_k) / Tr(P_k E(ρ)).

    :param chi: a valid single-qudit process matrix
    :param config: a coherence configuration
    :param undefined_probability: outcome probability below which expectations are NaN
    :param tolerance: tolerance for the validity check of `chi`
    :return: the exact `OutcomeRecord`
    """
    if config.kind != ConfigurationKind.COHERENCE:
        raise ValueError(f"Configuration {config.index} is not a coherence configuration")
    if chi.n_qudits != 1 or chi.d != config.d:
        raise DimensionError(f"Coherence runs need a single-qudit map with d={config.d}")
    check_chi(chi, tolerance)
    d = config.d
    rho = apply_channel_pure(chi, config.probe.state)
    projectors = [eigenprojector(config.probe.generator, k) for k in range(d)]
    probs = np.array([np.trace(p @ rho).real for p in projectors])
    count = len(config.measured_normalizers)
    eigenvalues = np.zeros((count, d), dtype=np.complex128)
    eigen_probs = np.zeros((count, d, d))
    joint = np.zeros((d, count), dtype=np.complex128)
    for b, normalizer in enumerate(config.measured_normalizers):
        values, spectral = spectral_projectors(normalizer)
        eigenvalues[b] = values
        for k, proj in enumerate(projectors):
            sub = proj @ rho @ proj
            eigen_probs[b, k] = [np.trace(q @ sub).real for q in spectral]
            joint[k, b] = np.sum(values * eigen_probs[b, k])
    return OutcomeRecord(config, probs, float(np.trace(rho).real),
                         _expectations(joint, probs, undefined_probability), joint,
                         eigen_probs, eigenvalues)


def expanded_stabilizer_probs(chi: ChiMatrix,
                              config: ExperimentalConfiguration) -> NDArray[np.float64]:
    """
    Closed-form stabilizer outcome probabilities of a coherence configuration,
    Tr[P_k E(ρ)] = Σ_{m∈W_k} χ_mm + 2 Σ_{m<n∈W_k} Re[χ_mn ⟨φ|E_n†E_m|φ⟩], with W_k the basis
    elements whose commutation phase with E_i is k. Comparing these with
    :func:`run_coherence` checks the expansion against the dense simulation.

    :param chi: a single-qudit process matrix
    :param config: a coherence configuration
    :return: the d predicted probabilities
    """
    d = config.d
    if config.kind != ConfigurationKind.COHERENCE or config.stabilizer_index is None:
        raise ValueError(f"Configuration {config.index} is not a coherence configuration")
    psi = error_states(chi, config.probe.state)
    # gram[n, m] = ⟨φ|E_n†E_m|φ⟩
    gram = psi.conj().T @ psi
    probs = np.zeros(d)
    for k in range(d):
        members = sorted(w_subset(d, config.stabilizer_index, k))
        total = sum(chi.entries[m, m].real for m in members)
        for pos, m in enumerate(members):
            for n in members[pos + 1:]:
                total += 2.0 * (chi.entries[m, n] * gram[n, m]).real
        probs[k] = total
    return probs


def _expectations(joint: NDArray[np.complex128], probs: NDArray[np.float64],
                  undefined_probability: float) -> NDArray[np.complex128]:
    expectations = np.full(joint.shape, np.nan, dtype=np.complex128)
    defined = probs >= undefined_probability
    expectations[defined] = joint[defined] / probs[defined][:, np.newaxis]
    return expectations


def enumerate_configurations(d: int, alphas: Optional[AlphaPolicy] = None,
                             subgroup_choice: Optional[Sequence[int]] = None,
                             coset_label: int = 0) -> list[ExperimentalConfiguration]:
    """
    The d² configurations: one population run, then for each of the d+1 stabilizers
    E_i^A (E_i^B)^{d−1} with E_i in Z, X, XZ, ..., XZ^{d−1}, d−1 coherence runs each measuring a
    coset from a different useful Abelian subgroup with a fresh probe superposition.

    :param d: prime dimension
    :param alphas: policy of the probe coefficients (geometric by default)
    :param subgroup_choice: positions (0..d−1) in the list of useful subgroups used by the
                            repetitions; defaults to the first d−1
    :param coset_label: stabilizer power a0 of the measured cosets
    :return: the configurations in enumeration order
    """
    policy = alphas or AlphaPolicy()
    choice = list(subgroup_choice) if subgroup_choice is not None else list(range(d - 1))
    if len(choice) != d - 1 or len(set(choice)) != d - 1 or not all(0 <= c < d for c in choice):
        raise ValueError(f"Subgroup choice must be {d - 1} distinct positions in [0, {d}) "
                         f"but got {choice}")
    configs = [population_configuration(d)]
    for i in mub_family_indices(d):
        start = len(configs)
        probes = [policy.probe(d, i, repetition, start + repetition)
                  for repetition in range(d - 1)]
        # the subgroups only depend on the generator, shared by all probes of this E_i
        subgroups = useful_subgroups(probes[0])
        for probe, position in zip(probes, choice):
            subgroup = subgroups[position]
            coset = cosets(subgroup, probe.generator)[coset_label % d]
            configs.append(ExperimentalConfiguration(
                len(configs), ConfigurationKind.COHERENCE, probe, i, subgroup.index,
                coset.coset_label, coset.measured))
    return configs


def simulate(chi: ChiMatrix, configs: Sequence[ExperimentalConfiguration], workers: int = 0,
             undefined_probability: float = _DEFAULTS.undefined_probability
             ) -> list[OutcomeRecord]:
    """
    Exact records of all configurations, optionally evaluated on a thread pool; the results are
    returned in enumeration order.

    :param chi: a valid single-qudit process matrix
    :param configs: the configurations
    :param workers: number of threads, 0 to run serially
    :param undefined_probability: outcome probability below which expectations are NaN
    :return: one `OutcomeRecord` per configuration
    """
    def run(config: ExperimentalConfiguration) -> OutcomeRecord:
        if config.kind == ConfigurationKind.POPULATION:
            # records carry the caller's configuration object
            return replace(run_population(chi), config=config)
        return run_coherence(chi, config, undefined_probability)

    if workers <= 0:
        return [run(config) for config in configs]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, configs))


def sample_outcomes(record: OutcomeRecord, shots: int, seed: int,
                    undefined_probability: float = _DEFAULTS.undefined_probability
                    ) -> OutcomeRecord:
    """
    Replace exact statistics by estimates from `shots` simulated measurements. The generator is
    seeded with (seed, configuration index). Coherence shots are split equally among the d−1
    measured normalizers (earlier ones get the remainder) and each share is a multinomial draw
    over (outcome k, eigenvalue j). Maps that lose probability get an extra unobserved outcome.

    :param record: an exact `OutcomeRecord`
    :param shots: total number of shots, at least 1
    :param seed: the user seed
    :param undefined_probability: estimated probability below which expectations are NaN
    :return: the estimated `OutcomeRecord` with `shots` and `counts`
    """
    if shots < 1:
        raise ValueError(f"Number of shots must be positive but got {shots}")
    rng = np.random.default_rng([seed, record.config.index])
    if record.config.kind == ConfigurationKind.POPULATION:
        counts = _draw(rng, shots, record.stabilizer_probs)
        return OutcomeRecord(record.config, counts / shots, record.trace, shots=shots,
                             counts=counts)
    assert record.eigen_probs is not None and record.eigenvalues is not None
    n_norm, d, _ = record.eigen_probs.shape
    shares = [shots // n_norm + (1 if b < shots % n_norm else 0) for b in range(n_norm)]
    counts = np.zeros((n_norm, d, d), dtype=np.int64)
    eigen_probs = np.zeros((n_norm, d, d))
    joint = np.zeros((d, n_norm), dtype=np.complex128)
    for b, share in enumerate(shares):
        if share == 0:
            continue
        counts[b] = _draw(rng, share, record.eigen_probs[b].ravel()).reshape(d, d)
        eigen_probs[b] = counts[b] / share
        joint[:, b] = eigen_probs[b] @ record.eigenvalues[b]
    probs = counts.sum(axis=(0, 2)) / shots
    return OutcomeRecord(record.config, probs, record.trace,
                         _expectations(joint, probs, undefined_probability), joint,
                         eigen_probs, record.eigenvalues, shots, counts)


def _draw(rng: np.random.Generator, shots: int, probs: NDArray[np.float64]) -> NDArray[np.int64]:
    """multinomial tallies over `probs` plus an unobserved outcome carrying the missing weight"""
    pvals = np.clip(probs, 0.0, None)
    total = pvals.sum()
    if total > 1.0:
        pvals = pvals / total
    lost = max(0.0, 1.0 - pvals.sum())
    return rng.multinomial(shots, np.append(pvals, lost))[:-1].astype(np.int64)
