"""
Completely positive maps in the process-matrix (χ) representation over the Weyl error basis,
E(ρ) = Σ_mn χ_mn E_m ρ E_n†, together with Kraus conversion, random generation and validation.
"""

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .config import Settings
from .pauli import ComplexMatrix, DimensionError, check_prime, matrix_of_multi, multi_error_basis

_DEFAULTS = Settings()


class InvalidChannelError(Exception):
    """raised when a process matrix or Kraus set violates the completely-positive map invariants"""


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    """
    Process matrix of a map on `n_qudits` qudits of dimension `d`.

    Attributes:
        d: the prime qudit dimension
        n_qudits: number of qudits the map acts on
        entries: the d^{2n}×d^{2n} complex matrix indexed by row-major error-basis indices
    """
    d: int
    n_qudits: int
    entries: ComplexMatrix = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        if self.n_qudits < 1:
            raise DimensionError(f"A map acts on at least one qudit, got {self.n_qudits}")
        size = self.d ** (2 * self.n_qudits)
        if self.entries.shape != (size, size):
            raise DimensionError(f"χ for d={self.d}, n_qudits={self.n_qudits} must be "
                                 f"{size}×{size} but got {self.entries.shape}")

    @property
    def size(self) -> int:
        """number of error-basis elements, d^{2n}"""
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        """Hilbert-space dimension d^n the map acts on"""
        return self.d ** self.n_qudits

    @property
    def trace(self) -> float:
        """real part of Tr χ, which is 1 for trace-preserving maps"""
        return float(np.trace(self.entries).real)


@dataclass(frozen=True, eq=False)
class KrausSet:
    """
    Kraus operators K_i of a map, E(ρ) = Σ_i K_i ρ K_i†.

    Attributes:
        d: the prime qudit dimension
        n_qudits: number of qudits the operators act on
        operators: the d^n×d^n complex matrices
    """
    d: int
    n_qudits: int
    operators: tuple[ComplexMatrix, ...] = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        dim = self.d ** self.n_qudits
        if not self.operators:
            raise InvalidChannelError("A Kraus set needs at least one operator")
        for op in self.operators:
            if op.shape != (dim, dim):
                raise DimensionError(f"Kraus operators must be {dim}×{dim} but got {op.shape}")


@dataclass(frozen=True)
class ChiReport:
    """
    Diagnostics of a process matrix against its invariants.

    Attributes:
        hermiticity_residual: largest |χ − χ†| entry
        min_eigenvalue: smallest eigenvalue of the Hermitian part
        trace: real part of Tr χ
        tolerance: tolerance used for the `valid` verdicts
    """
    hermiticity_residual: float
    min_eigenvalue: float
    trace: float
    tolerance: float

    @property
    def hermitian(self) -> bool:
        """χ equals its adjoint within the tolerance"""
        return self.hermiticity_residual <= self.tolerance

    @property
    def positive(self) -> bool:
        """no eigenvalue below minus the tolerance"""
        return self.min_eigenvalue >= -self.tolerance

    @property
    def trace_bounded(self) -> bool:
        """Tr χ ≤ 1 within the tolerance"""
        return self.trace <= 1.0 + self.tolerance

    @property
    def valid(self) -> bool:
        """all three invariants hold"""
        return self.hermitian and self.positive and self.trace_bounded


@lru_cache(maxsize=16)
def basis_operators(d: int, n_qudits: int) -> NDArray[np.complex128]:
    """
    Dense matrices of the multi-qudit error basis stacked as (d^{2n}, d^n, d^n); the array is
    shared between callers and is read-only.
    """
    ops = np.array([matrix_of_multi(m) for m in multi_error_basis(d, n_qudits)])
    ops.setflags(write=False)
    return ops


def identity_chi(d: int, n_qudits: int = 1) -> ChiMatrix:
    """process matrix of the identity map, χ_00 = 1"""
    check_prime(d)
    size = d ** (2 * n_qudits)
    entries = np.zeros((size, size), dtype=np.complex128)
    entries[0, 0] = 1.0
    return ChiMatrix(d, n_qudits, entries)


def pauli_chi(d: int, weights: Sequence[float], n_qudits: int = 1) -> ChiMatrix:
    """
    Diagonal process matrix of a Weyl (Pauli) channel applying E_m with probability weights[m].

    :param d: prime dimension
    :param weights: nonnegative probabilities in error-basis order
    :param n_qudits: number of qudits
    :return: the diagonal `ChiMatrix`
    """
    values = np.asarray(weights, dtype=np.float64)
    if np.any(values < 0.0):
        raise InvalidChannelError(f"Weights of a Pauli channel must be nonnegative: {weights}")
    return ChiMatrix(d, n_qudits, np.diag(values).astype(np.complex128))


def depolarizing_chi(d: int, p: float) -> ChiMatrix:
    """single-qudit depolarizing map ρ ↦ (1−p)ρ + p·I/d, i.e. χ_00 = 1 − p + p/d², χ_mm = p/d²"""
    weights = np.full(d * d, p / (d * d))
    weights[0] += 1.0 - p
    return pauli_chi(d, weights)


def kraus_to_chi(kraus: KrausSet) -> ChiMatrix:
    """
    Expand K_i = Σ_m c_im E_m with c_im = Tr(E_m† K_i)/d^n and form χ_mn = Σ_i c_im c_in^*;
    a trace-preserving map then has Tr χ = 1.

    :param kraus: the Kraus operators
    :return: the `ChiMatrix`
    """
    ops = basis_operators(kraus.d, kraus.n_qudits)
    stacked = np.array(kraus.operators)
    coeffs = np.einsum("mab,iab->im", ops.conj(), stacked) / (kraus.d ** kraus.n_qudits)
    return ChiMatrix(kraus.d, kraus.n_qudits, coeffs.T @ coeffs.conj())


def _check_rho(dim: int, rho: ComplexMatrix) -> None:
    if rho.shape != (dim, dim):
        raise DimensionError(f"Density matrix must be {dim}×{dim} but got {rho.shape}")


def apply_channel(chi: ChiMatrix, rho: ComplexMatrix, ancilla_dim: int = 1) -> ComplexMatrix:
    """
    Evaluate E(ρ) = Σ_mn χ_mn (E_m ⊗ I) ρ (E_n ⊗ I)† where the identity acts on an ancilla of
    dimension `ancilla_dim` placed after the principal qudits.

    :param chi: the process matrix
    :param rho: density matrix on principal qudits followed by the ancilla
    :param ancilla_dim: dimension of the untouched ancilla, 1 for none
    :return: the output density matrix
    """
    dim = chi.dim
    _check_rho(dim * ancilla_dim, rho)
    ops = basis_operators(chi.d, chi.n_qudits)
    tensor = rho.reshape(dim, ancilla_dim, dim, ancilla_dim)
    left = np.einsum("mij,jakb->miakb", ops, tensor)
    out = np.einsum("mn,miakb,nlk->ialb", chi.entries, left, ops.conj(), optimize=True)
    return out.reshape(dim * ancilla_dim, dim * ancilla_dim)


def apply_kraus(kraus: KrausSet, rho: ComplexMatrix, ancilla_dim: int = 1) -> ComplexMatrix:
    """evaluate Σ_i (K_i ⊗ I) ρ (K_i ⊗ I)† with an ancilla after the principal qudits"""
    dim = kraus.d ** kraus.n_qudits
    _check_rho(dim * ancilla_dim, rho)
    eye = np.eye(ancilla_dim, dtype=np.complex128)
    full = [np.kron(k, eye) for k in kraus.operators]
    return sum((k @ rho @ k.conj().T for k in full), np.zeros_like(rho, dtype=np.complex128))


def basis_states(d: int, n_qudits: int, state: NDArray[np.complex128]) -> ComplexMatrix:
    """
    Columns (E_m ⊗ I)|ψ⟩ for every basis element of `n_qudits` qudits, for a pure state on
    those principal qudits followed by an ancilla. Then E(|ψ⟩⟨ψ|) = Ψ χ Ψ†.

    :param d: prime dimension
    :param n_qudits: number of principal qudits
    :param state: the pure state vector
    :return: the matrix Ψ with one column per basis element
    """
    dim = d ** n_qudits
    if state.shape[0] % dim:
        raise DimensionError(f"State of length {state.shape[0]} has no {dim}-dimensional factor")
    amplitudes = state.reshape(dim, state.shape[0] // dim)
    ops = basis_operators(d, n_qudits)
    return np.einsum("mij,ja->iam", ops, amplitudes).reshape(state.shape[0], ops.shape[0])


def error_states(chi_like: ChiMatrix, state: NDArray[np.complex128]) -> ComplexMatrix:
    """:func:`basis_states` for the d and qudit count of a process matrix"""
    return basis_states(chi_like.d, chi_like.n_qudits, state)


def apply_channel_pure(chi: ChiMatrix, state: NDArray[np.complex128]) -> ComplexMatrix:
    """E(|ψ⟩⟨ψ|) for a pure state, computed as Ψ χ Ψ† with Ψ from :func:`error_states`"""
    psi = error_states(chi, state)
    return psi @ chi.entries @ psi.conj().T


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix"""
    ginibre = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = scipy.linalg.qr(ginibre)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases[np.newaxis, :]


def random_kraus(d: int, n_qudits: int, rank: int, trace_preserving: bool,
                 seed: int) -> KrausSet:
    """
    Random Kraus set with `rank` operators cut from a random isometry; a map that is not
    trace-preserving is damped by a random contraction U diag(√s) U† with s in [0.2, 1).

    :param d: prime dimension
    :param n_qudits: number of qudits
    :param rank: number of Kraus operators, at least 1
    :param trace_preserving: whether Σ K† K = I
    :param seed: seed for `numpy.random.default_rng`
    :return: the `KrausSet`
    """
    check_prime(d)
    if rank < 1:
        raise InvalidChannelError(f"Kraus rank must be at least 1 but got {rank}")
    rng = np.random.default_rng(seed)
    dim = d ** n_qudits
    shape = (rank * dim, dim)
    ginibre = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    isometry, _ = scipy.linalg.qr(ginibre, mode="economic")
    operators = [isometry[j * dim:(j + 1) * dim, :] for j in range(rank)]
    if not trace_preserving:
        unitary = random_unitary(dim, rng)
        damping = unitary @ np.diag(np.sqrt(rng.uniform(0.2, 1.0, dim))) @ unitary.conj().T
        operators = [op @ damping for op in operators]
    return KrausSet(d, n_qudits, tuple(operators))


def random_cp_map(d: int, n_qudits: int, rank: int, trace_preserving: bool,
                  seed: int) -> ChiMatrix:
    """
    Random completely positive map as a `ChiMatrix`, deterministic for a given seed.
    With rank 1 and `trace_preserving` this is a random unitary channel.
    """
    return kraus_to_chi(random_kraus(d, n_qudits, rank, trace_preserving, seed))


def validate_chi(chi: ChiMatrix, tolerance: float = _DEFAULTS.matrix_tolerance) -> ChiReport:
    """
    Measure how far χ is from being Hermitian, positive semidefinite and of trace at most 1.

    :param chi: the process matrix
    :param tolerance: tolerance used for the verdicts of the report
    :return: the `ChiReport`
    """
    entries = chi.entries
    residual = float(np.max(np.abs(entries - entries.conj().T)))
    hermitian = (entries + entries.conj().T) / 2
    min_eig = float(scipy.linalg.eigvalsh(hermitian)[0])
    return ChiReport(residual, min_eig, chi.trace, tolerance)


def check_chi(chi: ChiMatrix, tolerance: float = _DEFAULTS.matrix_tolerance) -> None:
    """raise `InvalidChannelError` if `chi` fails any invariant of :func:`validate_chi`"""
    report = validate_chi(chi, tolerance)
    if not report.valid:
        raise InvalidChannelError(
            f"Invalid process matrix: hermiticity residual {report.hermiticity_residual:.3g}, "
            f"min eigenvalue {report.min_eigenvalue:.3g}, trace {report.trace:.12g}")


def tensor_chi(chis: Sequence[ChiMatrix]) -> ChiMatrix:
    """
    Process matrix of the product map acting factor-wise, χ = χ_1 ⊗ ... ⊗ χ_r in row-major
    multi-qudit indexing.

    :param chis: the factor maps sharing the same d
    :return: the combined `ChiMatrix`
    """
    if not chis:
        raise DimensionError("Cannot form the tensor product of an empty sequence")
    d = chis[0].d
    for chi in chis:
        if chi.d != d:
            raise DimensionError(f"Mismatched qudit dimensions {d} and {chi.d}")
    entries = reduce(np.kron, (chi.entries for chi in chis))
    return ChiMatrix(d, sum(chi.n_qudits for chi in chis), entries)


def chi_distance(first: ChiMatrix, second: ChiMatrix) -> float:
    """Frobenius norm of the difference of two process matrices"""
    if first.entries.shape != second.entries.shape or first.d != second.d:
        raise DimensionError("Process matrices of different shapes cannot be compared")
    return float(np.linalg.norm(first.entries - second.entries))


def project_psd(chi: ChiMatrix) -> ChiMatrix:
    """nearest positive semidefinite process matrix obtained by clipping negative eigenvalues"""
    hermitian = (chi.entries + chi.entries.conj().T) / 2
    values, vectors = scipy.linalg.eigh(hermitian)
    clipped = (vectors * np.clip(values, 0.0, None)[np.newaxis, :]) @ vectors.conj().T
    return ChiMatrix(chi.d, chi.n_qudits, clipped)
