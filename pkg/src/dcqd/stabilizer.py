"""
Stabilizer probe states of the characterization protocol together with their normalizers,
Abelian subgroups, coset measurement sets, probe-state conditions and mutually unbiased bases.

Groups are enumerated by brute force over phase-free exponent keys (q_1, p_1, q_2, p_2), so two
elements differing only by a power of ω are the same group element here.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .config import Settings
from .pauli import (ComplexMatrix, MultiPauli, PauliElement, check_prime, commutation_phase,
                    commutation_phase_multi, compose_multi, embed, error_basis, from_exponents,
                    matrix_of, matrix_of_multi, power, power_multi, tensor)

ComplexVector = NDArray[np.complex128]
ExponentKey = tuple[int, ...]

_DEFAULTS = Settings()


class InvalidGeneratorError(Exception):
    """raised for a stabilizer generator that cannot define the requested projectors or groups"""


class InvalidProbeError(Exception):
    """raised when probe coefficients cannot produce a usable probe state"""


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    """
    A stabilizer code on two (or 2r) qudits together with the probe state it fixes.

    Attributes:
        d: the prime qudit dimension
        generators: the commuting stabilizer generators
        eigenvalue_labels: label k of the eigenvalue ω^k of each generator on `state`
        state: the probe state vector fixed by the generators
        stabilizer_index: basis index i of E_i for a coherence probe, None for population probes
        alphas: the coefficients of `state` in the logical basis |l_i⟩|l_i⟩ (coherence probes)
    """
    d: int
    generators: tuple[MultiPauli, ...]
    eigenvalue_labels: tuple[int, ...]
    state: ComplexVector = field(repr=False)
    stabilizer_index: Optional[int] = None
    alphas: Optional[ComplexVector] = field(default=None, repr=False)

    @property
    def generator(self) -> MultiPauli:
        """the sole generator of a single-generator (coherence) code"""
        if len(self.generators) != 1:
            raise InvalidGeneratorError(
                f"Expected a single-generator code but it has {len(self.generators)} generators")
        return self.generators[0]


@dataclass(frozen=True)
class AbelianSubgroup:
    """
    Maximal Abelian subgroup of the normalizer of a single-generator code.

    Attributes:
        index: position v in [1, d+1] in the deterministic ordering of the subgroups
        generator: the lexicographically smallest element outside the stabilizer group
        elements: phase-free keys of the d² elements
        useful: True when the subgroup acts nontrivially on both qudits i.e. it does not
                contain E_i ⊗ I; only these subgroups give informative measurements
    """
    index: int
    generator: MultiPauli
    elements: frozenset[ExponentKey]
    useful: bool


@dataclass(frozen=True)
class NormalizerCoset:
    """
    The measurement set {T^b S^{a0} : b = 0..d−1} of one Abelian subgroup.

    Attributes:
        abelian_subgroup_index: index v of the subgroup that T generates together with S
        coset_label: the stabilizer power a0
        members: the d elements T^b S^{a0} for b = 0..d−1, with their exact phases
        stabilizer: the stabilizer generator S
    """
    abelian_subgroup_index: int
    coset_label: int
    members: tuple[MultiPauli, ...]
    stabilizer: MultiPauli

    @property
    def measured(self) -> tuple[MultiPauli, ...]:
        """the d−1 nontrivial members (b = 1..d−1) that are measured"""
        return self.members[1:]


@dataclass(frozen=True)
class AlphaValidation:
    """
    Outcome of :func:`validate_alphas`.

    Attributes:
        valid: True if every checked condition is above the tolerance
        margin: the smallest modulus over all checked conditions
        checked: the (a, b) pairs that were evaluated
    """
    valid: bool
    margin: float
    checked: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class HammingBound:
    """both sides of the quantum Hamming bound evaluated exactly and whether it holds"""
    lhs: Fraction
    rhs: Fraction
    holds: bool


def mub_family_indices(d: int) -> list[int]:
    """
    Basis indices of the d+1 elements Z, X, XZ, ..., XZ^{d−1} whose eigenbases are mutually
    unbiased; their powers partition the d²−1 nonidentity basis elements.
    """
    check_prime(d)
    return [1] + [d + j for j in range(d)]


def commuting_families(d: int) -> list[frozenset[int]]:
    """
    The d+1 commuting families {E^a : a = 1..d−1} of the elements of :func:`mub_family_indices`
    as sets of basis indices.

    :param d: prime dimension
    :return: list of the families in the order of :func:`mub_family_indices`
    """
    basis = error_basis(d)
    return [frozenset(power(basis[i], a).index for a in range(1, d))
            for i in mub_family_indices(d)]


def shift_operator(e: PauliElement) -> PauliElement:
    """
    A basis element F with commutation_phase(e, F) = 1, so F maps the eigenvector of `e` with
    eigenvalue λ to the one with eigenvalue ωλ.

    :param e: a nonidentity element
    :return: the phase-free shift element
    """
    d = e.d
    if e.is_identity:
        raise InvalidGeneratorError("The identity has no eigenvalue shift operator")
    if e.x_pow == 0:
        return PauliElement(d, 0, pow(e.z_pow, -1, d), 0)
    return PauliElement(d, 0, 0, (-pow(e.x_pow, -1, d)) % d)


def eigenbasis_of(e: PauliElement) -> ComplexMatrix:
    """
    Orthonormal eigenbasis of a nonidentity element as matrix columns |0⟩, ..., |d−1⟩ where
    E|l⟩ = λ_0 ω^l |l⟩ for E the phase-free element and λ_0^d = ω^c with E^d = ω^c I.
    The vectors are generated as |l⟩ = F^l |0⟩ with F = :func:`shift_operator`, and |0⟩ is the
    projection of the first standard basis vector (which has a positive first component).

    :param e: a nonidentity element (its phase is ignored)
    :return: the d×d unitary matrix of eigenvectors
    """
    d = e.d
    base = e.phase_free()
    c = power(base, d).phase
    lambda0 = np.exp(2j * np.pi * c / (d * d))
    mat = matrix_of(base)
    proj = sum(((lambda0 ** -l) * np.linalg.matrix_power(mat, l) for l in range(d)),
               np.zeros((d, d), dtype=np.complex128)) / d
    zero = proj[:, 0] / np.linalg.norm(proj[:, 0])
    shift = matrix_of(shift_operator(base))
    columns = [zero]
    for _ in range(1, d):
        columns.append(shift @ columns[-1])
    return np.column_stack(columns)


def _check_eigen_equations(code: StabilizerCode, tolerance: float) -> None:
    for gen, label in zip(code.generators, code.eigenvalue_labels):
        applied = matrix_of_multi(gen) @ code.state
        expected = np.exp(2j * np.pi * label / code.d) * code.state
        if np.max(np.abs(applied - expected)) > tolerance:
            raise InvalidGeneratorError(f"Generator {gen} does not fix the probe state with "
                                        f"eigenvalue label {label}")


def population_probe(d: int) -> StabilizerCode:
    """
    The maximally entangled probe (1/√d) Σ_k |k⟩|k⟩ stabilized by X⊗X and Z⊗Z^{d−1}.

    :param d: prime dimension
    :return: the two-generator `StabilizerCode`
    """
    basis = error_basis(d)
    x, z = basis[d], basis[1]
    generators = (tensor([x, x]), tensor([z, power(z, d - 1)]))
    state = np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)
    code = StabilizerCode(d, generators, (0, 0), state)
    _check_eigen_equations(code, _DEFAULTS.matrix_tolerance)
    return code


def coherence_generator(d: int, i: int) -> MultiPauli:
    """
    The generator ω^{−c} E_i ⊗ E_i^{d−1} where E_i^d = ω^c I; the phase makes its d-th power the
    identity and its eigenvalue on |l_i⟩|l_i⟩ equal to 1.

    :param d: prime dimension
    :param i: nonzero basis index of E_i
    :return: the generator
    """
    if not 0 < i < d * d:
        raise InvalidGeneratorError(f"Stabilizer index must be in [1, {d * d}) but got {i}")
    e = error_basis(d)[i]
    gen = tensor([e, power(e, d - 1)])
    return MultiPauli(gen.factors, (gen.global_phase - power(e, d).phase) % d)


def probe_state(d: int, i: int, alphas: Sequence[complex]) -> ComplexVector:
    """
    The state Σ_l α_l |l_i⟩|l_i⟩ in the eigenbasis of E_i given by :func:`eigenbasis_of`.

    :param d: prime dimension
    :param i: nonzero basis index of E_i
    :param alphas: d coefficients, normalized here
    :return: the normalized state vector of length d²
    """
    coeffs = np.asarray(alphas, dtype=np.complex128)
    if coeffs.shape != (d,):
        raise InvalidProbeError(f"Expected {d} probe coefficients but got shape {coeffs.shape}")
    norm = np.linalg.norm(coeffs)
    if norm == 0.0:
        raise InvalidProbeError("Probe coefficients cannot all be zero")
    coeffs = coeffs / norm
    basis = eigenbasis_of(error_basis(d)[i])
    return sum((coeffs[l] * np.kron(basis[:, l], basis[:, l]) for l in range(d)),
               np.zeros(d * d, dtype=np.complex128))


def coherence_probe(d: int, i: int, alphas: Sequence[complex], validate: bool = True,
                    tolerance: float = _DEFAULTS.alpha_tolerance) -> StabilizerCode:
    """
    Single-generator probe code with state Σ_l α_l |l_i⟩|l_i⟩ fixed by
    :func:`coherence_generator`.

    :param d: prime dimension
    :param i: nonzero basis index of E_i
    :param alphas: d coefficients (normalized here)
    :param validate: if True then the coefficients must pass :func:`validate_alphas` for the
                     cosets of every useful Abelian subgroup
    :param tolerance: the smallest accepted margin when validating
    :return: the `StabilizerCode`
    """
    state = probe_state(d, i, alphas)
    coeffs = np.asarray(alphas, dtype=np.complex128)
    coeffs = coeffs / np.linalg.norm(coeffs)
    code = StabilizerCode(d, (coherence_generator(d, i),), (0,), state, i, coeffs)
    _check_eigen_equations(code, _DEFAULTS.matrix_tolerance)
    if validate:
        for subgroup in useful_subgroups(code):
            check = validate_alphas(d, coeffs, cosets(subgroup, code.generator)[0], tolerance)
            if not check.valid:
                raise InvalidProbeError(
                    f"Probe coefficients violate the probe conditions for subgroup "
                    f"{subgroup.index} (margin {check.margin:.3g} <= {tolerance:g})")
    return code


def spectral_projectors(m: MultiPauli) -> tuple[ComplexVector, list[ComplexMatrix]]:
    """
    Eigenvalues μ_j = μ_0 ω^j of a Weyl element and the projectors onto their eigenspaces,
    Q_j = (1/d) Σ_l (μ_j)^{−l} M^l, where μ_0^d equals the phase of M^d.

    :param m: the multi-qudit element
    :return: tuple of the d eigenvalues and the d projectors
    """
    d = m.d
    top = power_multi(m, d)
    if not top.is_identity:
        raise InvalidGeneratorError(f"{m}^{d} is not proportional to the identity")
    mu0 = np.exp(2j * np.pi * top.global_phase / (d * d))
    powers = [matrix_of_multi(power_multi(m, l)) for l in range(d)]
    eigenvalues = mu0 * np.exp(2j * np.pi * np.arange(d) / d)
    projectors = [sum(((eigenvalues[j] ** -l) * powers[l] for l in range(d)),
                      np.zeros_like(powers[0])) / d for j in range(d)]
    return eigenvalues, projectors


def eigenprojector(s: MultiPauli, k: int) -> ComplexMatrix:
    """
    Projector P_k = (1/d) Σ_l ω^{−lk} S^l onto the eigenvalue ω^k of a generator with S^d = I.

    :param s: the generator (its d-th power must be the identity without phase)
    :param k: the eigenvalue label
    :return: the Hermitian idempotent projector
    """
    top = power_multi(s, s.d)
    if not top.is_identity or top.global_phase:
        raise InvalidGeneratorError(f"{s}^{s.d} must be the phase-free identity but is {top}")
    _, projectors = spectral_projectors(s)
    return projectors[k % s.d]


def _key(m: MultiPauli) -> ExponentKey:
    return m.exponents


def _span(d: int, vectors: Sequence[ExponentKey]) -> frozenset[ExponentKey]:
    """all Z_d linear combinations of the given exponent keys"""
    size = len(vectors[0])
    return frozenset(
        tuple(sum(c * v[j] for c, v in zip(coeffs, vectors)) % d for j in range(size))
        for coeffs in product(range(d), repeat=len(vectors)))


def normalizer(code: StabilizerCode) -> list[MultiPauli]:
    """
    All phase-free elements on the code's qudits commuting with its sole generator, in
    lexicographic order of their exponent keys; there are d³ of them on two qudits.

    :param code: a single-generator code
    :return: the normalizer elements
    """
    gen = code.generator
    d = code.d
    elements = (from_exponents(d, key) for key in product(range(d), repeat=2 * gen.n_qudits))
    return [el for el in elements if commutation_phase_multi(el, gen) == 0]


def stabilizer_group(code: StabilizerCode) -> frozenset[ExponentKey]:
    """phase-free keys of the cyclic group {S^a} of the sole generator"""
    return _span(code.d, [_key(code.generator)])


def abelian_subgroups(code: StabilizerCode) -> list[AbelianSubgroup]:
    """
    The d+1 maximal Abelian subgroups ⟨T, S⟩ of the normalizer, each of order d² and
    containing the stabilizer group, ordered by their smallest non-stabilizer key.

    :param code: a single-generator code
    :return: the subgroups with indices 1..d+1
    """
    d = code.d
    gen = code.generator
    stab = stabilizer_group(code)
    e_i = gen.factors[0]
    found: dict[frozenset[ExponentKey], ExponentKey] = {}
    for el in normalizer(code):
        key = _key(el)
        if key in stab or any(key in group for group in found):
            continue
        # normalizer elements are visited in key order, so `key` is the smallest outside C
        found[_span(d, [key, _key(gen)])] = key
    subgroups: list[AbelianSubgroup] = []
    for index, (elements, key) in enumerate(sorted(found.items(), key=lambda kv: kv[1]),
                                            start=1):
        useful = any(commutation_phase(from_exponents(d, el).factors[0], e_i) != 0
                     for el in elements)
        subgroups.append(AbelianSubgroup(index, from_exponents(d, key), elements, useful))
    return subgroups


def useful_subgroups(code: StabilizerCode) -> list[AbelianSubgroup]:
    """the d Abelian subgroups acting nontrivially on both qudits, in index order"""
    return [sub for sub in abelian_subgroups(code) if sub.useful]


def cosets(subgroup: AbelianSubgroup, s: MultiPauli) -> list[NormalizerCoset]:
    """
    The d measurement sets {T^b S^{a0} : b} of an Abelian subgroup for a0 = 0..d−1; together
    they cover the subgroup.

    :param subgroup: one of the :func:`abelian_subgroups`
    :param s: the stabilizer generator
    :return: the cosets ordered by a0
    """
    d = s.d
    t = subgroup.generator
    return [NormalizerCoset(subgroup.index, a0,
                            tuple(compose_multi(power_multi(t, b), power_multi(s, a0))
                                  for b in range(d)), s)
            for a0 in range(d)]


def stabilizer_cosets(subgroup: AbelianSubgroup, s: MultiPauli) -> list[frozenset[ExponentKey]]:
    """
    The d left cosets T^b C of the stabilizer group C = {S^a} inside an Abelian subgroup, as
    phase-free keys; the coset for b = 0 is C itself.

    :param subgroup: one of the :func:`abelian_subgroups`
    :param s: the stabilizer generator
    :return: the cosets ordered by b
    """
    d = s.d
    stab = _span(d, [_key(s)])
    t_key = _key(subgroup.generator)
    return [frozenset(tuple((b * t + c) % d for t, c in zip(t_key, el)) for el in stab)
            for b in range(d)]


def alternative_sets(code: StabilizerCode) -> list[NormalizerCoset]:
    """
    The d² alternative measurement sets of a coherence probe: every coset of every useful
    Abelian subgroup; each one yields the same number of independent equations.
    """
    gen = code.generator
    return [coset for sub in useful_subgroups(code) for coset in cosets(sub, gen)]


def validate_alphas(d: int, alphas: Sequence[complex], coset: NormalizerCoset,
                    tolerance: float = _DEFAULTS.alpha_tolerance) -> AlphaValidation:
    """
    Check the probe conditions for a coset: for all a, b in [0, d) the overlap
    ⟨φ_c| (E_i^a ⊗ I) T^b S^{a0} |φ_c⟩ must be nonzero. Since E_n†E_m for E_m, E_n in the same
    W_k^i is a power of E_i, this is the sum Σ_l ω^{(a+bp)l} α_l^* α_{l+bq} up to a phase.
    All a are checked, a superset of the values reachable from the outcome labels.

    :param d: prime dimension
    :param alphas: the probe coefficients (normalized here)
    :param coset: the measurement set, which also fixes E_i through its stabilizer
    :param tolerance: margins at or below this fail
    :return: the `AlphaValidation`
    """
    e_i = coset.stabilizer.factors[0]
    state = probe_state(d, e_i.index, alphas)
    margin = np.inf
    checked: list[tuple[int, int]] = []
    for a in range(d):
        left = matrix_of_multi(embed(power(e_i, a), 0, 2))
        for b, member in enumerate(coset.members):
            value = np.vdot(state, left @ (matrix_of_multi(member) @ state))
            margin = min(margin, float(abs(value)))
            checked.append((a, b))
    return AlphaValidation(margin > tolerance, margin, tuple(checked))


def code_space_basis(code: StabilizerCode) -> ComplexMatrix:
    """orthonormal basis |l_i⟩|l_i⟩ of the d-dimensional space fixed by a coherence generator"""
    e_i = code.generator.factors[0]
    basis = eigenbasis_of(e_i)
    return np.column_stack([np.kron(basis[:, l], basis[:, l]) for l in range(code.d)])


def logical_bases(code: StabilizerCode) -> list[ComplexMatrix]:
    """
    Eigenbases, within the code space, of the generators of all d+1 Abelian subgroups; these
    are mutually unbiased bases of the d-dimensional logical space.

    :param code: a single-generator code
    :return: one d×d unitary per subgroup
    """
    space = code_space_basis(code)
    bases: list[ComplexMatrix] = []
    for sub in abelian_subgroups(code):
        logical = space.conj().T @ matrix_of_multi(sub.generator) @ space
        # the complex Schur form of a normal matrix is diagonal, so its vectors are eigenvectors
        _, vectors = scipy.linalg.schur(logical, output="complex")
        bases.append(vectors)
    return bases


def mub_check(bases: Sequence[ComplexMatrix],
              tolerance: float = _DEFAULTS.matrix_tolerance) -> bool:
    """
    Check that every pair of vectors from different bases has |⟨u|v⟩|² = 1/dim.

    :param bases: orthonormal bases given as matrix columns, all of the same dimension
    :param tolerance: allowed deviation of each squared overlap
    :return: True if the bases are mutually unbiased
    """
    if not bases:
        return True
    dim = bases[0].shape[0]
    for first, second in combinations(bases, 2):
        if first.shape != second.shape:
            return False
        overlaps = np.abs(first.conj().T @ second) ** 2
        if np.max(np.abs(overlaps - 1.0 / dim)) > tolerance:
            return False
    return True


def check_hamming_bound(n: int, k: int, g: int, n_e: int, t: int, d: int) -> HammingBound:
    """
    Evaluate Σ_{j=0}^{t} C(n_e, j) (d²−1)^j d^k / g ≤ d^n exactly.

    :param n: number of physical qudits
    :param k: number of logical qudits
    :param g: degeneracy factor dividing the left side
    :param n_e: number of qudits exposed to errors
    :param t: number of errors to detect
    :param d: prime dimension
    :return: the `HammingBound` with both sides
    """
    check_prime(d)
    if not 0 <= t <= n_e <= n or g < 1:
        raise ValueError(f"Invalid bound arguments n={n}, k={k}, g={g}, n_e={n_e}, t={t}")
    lhs = Fraction(sum(comb(n_e, j) * (d * d - 1) ** j for j in range(t + 1)) * d ** k, g)
    rhs = Fraction(d ** n)
    return HammingBound(lhs, rhs, lhs <= rhs)
