"""
Exact algebra of the generalized Pauli (Weyl) group over Z_d for prime d.

An element is stored in the normal-ordered form ω^a X^q Z^p with X|k⟩ = |k+1⟩,
Z|k⟩ = ω^k|k⟩ and ω = exp(2πi/d), so that ZX = ωXZ. All phases are integers mod d and
ω is only materialized as a complex number by :func:`matrix_of` and :func:`matrix_of_multi`.
"""

from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray
from sympy import isprime  # type: ignore

ComplexMatrix = NDArray[np.complex128]


class DimensionError(Exception):
    """raised for a non-prime dimension or operands of mismatched dimensions"""


@lru_cache(maxsize=64)
def check_prime(d: int) -> int:
    """
    Check that the given qudit dimension is a prime.

    :param d: the dimension to check
    :return: the same dimension
    """
    if d < 2 or not isprime(d):
        raise DimensionError(f"Qudit dimension must be a prime but got {d}")
    return d


def omega_power(d: int, n: int) -> complex:
    """complex value of ω^n for ω = exp(2πi/d)"""
    return complex(np.exp(2j * np.pi * (n % d) / d))


@dataclass(frozen=True)
class PauliElement:
    """
    Phase-tagged Weyl operator ω^a X^q Z^p on a single qudit.

    Attributes:
        d: the prime dimension of the qudit
        phase: exponent `a` of ω in [0, d)
        x_pow: exponent `q` of X in [0, d)
        z_pow: exponent `p` of Z in [0, d)
    """
    d: int
    phase: int
    x_pow: int
    z_pow: int

    def __post_init__(self):
        check_prime(self.d)
        for value in (self.phase, self.x_pow, self.z_pow):
            if not 0 <= value < self.d:
                raise DimensionError(f"Exponents must be in [0, {self.d}) but got "
                                     f"({self.phase}, {self.x_pow}, {self.z_pow})")

    @property
    def index(self) -> int:
        """position of the phase-free element in :func:`error_basis` i.e. q·d + p"""
        return self.x_pow * self.d + self.z_pow

    @property
    def is_identity(self) -> bool:
        """true if the element is the identity up to its phase"""
        return self.x_pow == 0 and self.z_pow == 0

    def phase_free(self) -> "PauliElement":
        """the same element with zero phase"""
        return PauliElement(self.d, 0, self.x_pow, self.z_pow)

    def __str__(self) -> str:
        parts = [f"w^{self.phase}"] if self.phase else []
        if self.x_pow:
            parts.append("X" if self.x_pow == 1 else f"X^{self.x_pow}")
        if self.z_pow:
            parts.append("Z" if self.z_pow == 1 else f"Z^{self.z_pow}")
        return "".join(parts) if parts else "I"


def weyl_element(d: int, a: int, q: int, p: int) -> PauliElement:
    """
    Create the canonical element ω^a X^q Z^p with all exponents reduced mod d.

    :param d: prime dimension of the qudit
    :param a: exponent of ω
    :param q: exponent of X
    :param p: exponent of Z
    :return: the canonical `PauliElement`
    """
    check_prime(d)
    return PauliElement(d, a % d, q % d, p % d)


def identity(d: int) -> PauliElement:
    """identity element for qudit dimension `d`"""
    return weyl_element(d, 0, 0, 0)


def _check_same_d(d1: int, d2: int) -> None:
    if d1 != d2:
        raise DimensionError(f"Mismatched qudit dimensions {d1} and {d2}")


def compose(e1: PauliElement, e2: PauliElement) -> PauliElement:
    """
    Product e1·e2 in normal order: moving Z^{p1} past X^{q2} gives the phase ω^{p1·q2}.

    :param e1: left operand
    :param e2: right operand
    :return: the canonical product
    """
    _check_same_d(e1.d, e2.d)
    d = e1.d
    return PauliElement(d, (e1.phase + e2.phase + e1.z_pow * e2.x_pow) % d,
                        (e1.x_pow + e2.x_pow) % d, (e1.z_pow + e2.z_pow) % d)


def dagger(e: PauliElement) -> PauliElement:
    """adjoint of the element; (ω^a X^q Z^p)† = ω^{pq − a} X^{−q} Z^{−p}"""
    return weyl_element(e.d, e.z_pow * e.x_pow - e.phase, -e.x_pow, -e.z_pow)


def power(e: PauliElement, n: int) -> PauliElement:
    """
    The n-th power of an element; negative powers are powers of the adjoint.
    E^n = ω^{n·a + p·q·n(n−1)/2} X^{nq} Z^{np}, so E^d carries the phase p·q·d(d−1)/2
    which is nonzero only for d = 2 with q = p = 1.

    :param e: the element
    :param n: the integer exponent
    :return: the canonical power
    """
    if n < 0:
        return power(dagger(e), -n)
    return weyl_element(e.d, n * e.phase + e.z_pow * e.x_pow * (n * (n - 1) // 2),
                        n * e.x_pow, n * e.z_pow)


def commutation_phase(e1: PauliElement, e2: PauliElement) -> int:
    """
    The exponent k with e1·e2 = ω^k e2·e1, which is p·q′ − q·p′ mod d for e1 = (q, p) and
    e2 = (q′, p′); the elements commute iff k = 0.

    :param e1: first element
    :param e2: second element
    :return: the commutation phase in [0, d)
    """
    _check_same_d(e1.d, e2.d)
    return (e1.z_pow * e2.x_pow - e1.x_pow * e2.z_pow) % e1.d


def matrix_of(e: PauliElement) -> ComplexMatrix:
    """
    Dense unitary matrix of ω^a X^q Z^p.

    :param e: the element
    :return: the d×d complex matrix
    """
    d = e.d
    shift = np.roll(np.eye(d, dtype=np.complex128), e.x_pow, axis=0)
    clock = np.exp(2j * np.pi * e.z_pow * np.arange(d) / d)
    return omega_power(d, e.phase) * shift * clock[np.newaxis, :]


def error_basis(d: int) -> list[PauliElement]:
    """
    The d² phase-free elements X^q Z^p ordered by index q·d + p; index 0 is the identity
    and Tr(E_i† E_j) = d·δ_ij.

    :param d: prime dimension
    :return: the list of basis elements
    """
    check_prime(d)
    return [PauliElement(d, 0, q, p) for q in range(d) for p in range(d)]


def w_subset(d: int, i: int, k: int) -> frozenset[int]:
    """
    Indices of the d basis elements E_j with commutation_phase(E_i, E_j) = k.
    For k = 0 the subset holds the identity and E_i itself.

    :param d: prime dimension
    :param i: index of the nonidentity reference element E_i (any index when k = 0)
    :param k: the required commutation phase
    :return: the set of basis indices
    """
    basis = error_basis(d)
    if i == 0 and k % d != 0:
        raise ValueError("The identity commutes with every element so only k = 0 applies")
    ref = basis[i]
    return frozenset(j for j, e in enumerate(basis) if commutation_phase(ref, e) == k % d)


@dataclass(frozen=True)
class MultiPauli:
    """
    Tensor product of single-qudit Weyl operators with an overall phase.

    Attributes:
        factors: the phase-free `PauliElement` for each qudit, in qudit order
        global_phase: exponent of ω multiplying the product
    """
    factors: tuple[PauliElement, ...]
    global_phase: int = 0

    def __post_init__(self):
        if not self.factors:
            raise DimensionError("A multi-qudit element needs at least one factor")
        d = self.factors[0].d
        for factor in self.factors:
            _check_same_d(d, factor.d)
            if factor.phase:
                raise DimensionError("Factors of a MultiPauli must be phase-free; "
                                     "use `tensor` to collect the phases")
        if not 0 <= self.global_phase < d:
            raise DimensionError(f"Global phase must be in [0, {d}) but got {self.global_phase}")

    @property
    def d(self) -> int:
        """the prime dimension of each qudit"""
        return self.factors[0].d

    @property
    def n_qudits(self) -> int:
        """number of tensor factors"""
        return len(self.factors)

    @property
    def exponents(self) -> tuple[int, ...]:
        """phase-free key (q_1, p_1, q_2, p_2, ...) used to compare elements modulo phase"""
        return tuple(v for f in self.factors for v in (f.x_pow, f.z_pow))

    @property
    def is_identity(self) -> bool:
        """true if every factor is the identity (the phase is ignored)"""
        return all(f.is_identity for f in self.factors)

    def __str__(self) -> str:
        body = "⊗".join(str(f) for f in self.factors)
        return f"w^{self.global_phase}·{body}" if self.global_phase else body


def tensor(elements: Sequence[PauliElement]) -> MultiPauli:
    """
    Tensor product of single-qudit elements; their phases move into the global phase.

    :param elements: one element per qudit sharing the same d
    :return: the `MultiPauli` whose matrix is the Kronecker product
    """
    if not elements:
        raise DimensionError("Cannot form the tensor product of an empty sequence")
    d = elements[0].d
    phase = 0
    for e in elements:
        _check_same_d(d, e.d)
        phase += e.phase
    return MultiPauli(tuple(e.phase_free() for e in elements), phase % d)


def from_exponents(d: int, exponents: Sequence[int], phase: int = 0) -> MultiPauli:
    """
    Build a `MultiPauli` from a phase-free key (q_1, p_1, q_2, p_2, ...).

    :param d: prime dimension
    :param exponents: even-length sequence of exponents
    :param phase: exponent of the global phase
    :return: the canonical `MultiPauli`
    """
    if len(exponents) % 2 or not exponents:
        raise DimensionError(f"Exponent vector must have a nonzero even length: {exponents}")
    return MultiPauli(tuple(weyl_element(d, 0, exponents[j], exponents[j + 1])
                            for j in range(0, len(exponents), 2)), phase % d)


def embed(element: PauliElement, position: int, n_qudits: int) -> MultiPauli:
    """
    Place a single-qudit element on one qudit of an n-qudit register, identity elsewhere.

    :param element: the single-qudit element (its phase becomes the global phase)
    :param position: zero-based qudit position
    :param n_qudits: size of the register
    :return: the `MultiPauli`
    """
    if not 0 <= position < n_qudits:
        raise DimensionError(f"Position {position} outside a register of {n_qudits} qudits")
    ident = identity(element.d)
    return tensor([element if j == position else ident for j in range(n_qudits)])


def _check_same_shape(m1: MultiPauli, m2: MultiPauli) -> None:
    _check_same_d(m1.d, m2.d)
    if m1.n_qudits != m2.n_qudits:
        raise DimensionError(f"Mismatched qudit counts {m1.n_qudits} and {m2.n_qudits}")


def compose_multi(m1: MultiPauli, m2: MultiPauli) -> MultiPauli:
    """factor-wise product m1·m2 with the reordering phases collected globally"""
    _check_same_shape(m1, m2)
    factors = [compose(f1, f2) for f1, f2 in zip(m1.factors, m2.factors)]
    product_el = tensor(factors)
    return MultiPauli(product_el.factors,
                      (product_el.global_phase + m1.global_phase + m2.global_phase) % m1.d)


def commutation_phase_multi(m1: MultiPauli, m2: MultiPauli) -> int:
    """sum of the factor-wise commutation phases; m1·m2 = ω^k m2·m1"""
    _check_same_shape(m1, m2)
    return sum(commutation_phase(f1, f2) for f1, f2 in zip(m1.factors, m2.factors)) % m1.d


def power_multi(m: MultiPauli, n: int) -> MultiPauli:
    """n-th power of a multi-qudit element (negative powers use the adjoint)"""
    factors = tensor([power(f, n) for f in m.factors])
    return MultiPauli(factors.factors, (factors.global_phase + n * m.global_phase) % m.d)


def dagger_multi(m: MultiPauli) -> MultiPauli:
    """adjoint of a multi-qudit element"""
    return power_multi(m, -1)


def matrix_of_multi(m: MultiPauli) -> ComplexMatrix:
    """
    Dense unitary matrix of a multi-qudit element: ω^phase times the Kronecker product of the
    factor matrices, the first factor being the most significant.

    :param m: the element
    :return: the complex matrix of side d^{n_qudits}
    """
    mat = reduce(np.kron, (matrix_of(f) for f in m.factors))
    return omega_power(m.d, m.global_phase) * mat


def multi_error_basis(d: int, n_qudits: int) -> list[MultiPauli]:
    """
    The d^{2·n_qudits} phase-free multi-qudit basis elements in row-major order over the
    per-qudit indices (m_1, ..., m_r).

    :param d: prime dimension
    :param n_qudits: number of qudits
    :return: the list of basis elements
    """
    basis = error_basis(d)
    return [MultiPauli(tuple(combo)) for combo in product(basis, repeat=n_qudits)]


def basis_matrices(elements: Iterable[PauliElement]) -> NDArray[np.complex128]:
    """stack of the dense matrices of the given elements with shape (count, d, d)"""
    return np.array([matrix_of(e) for e in elements])
