"""
Exhaustive checks of the structural claims behind direct characterization for one prime
dimension: the group algebra of the error basis, the normalizer structure of the coherence
probes, mutual unbiasedness of the logical bases, the rank of the measurement equations and
the degenerate-code Hamming bound.
"""

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable

import numpy as np

from .channels import depolarizing_chi, identity_chi, random_cp_map
from .config import Settings
from .pauli import (basis_matrices, check_prime, commutation_phase, commutation_phase_multi,
                    compose, embed, error_basis, matrix_of, w_subset)
from .protocol import (AlphaPolicy, ExperimentalConfiguration, enumerate_configurations,
                       expanded_stabilizer_probs, run_coherence, simulate)
from .reconstruct import assemble_system, rank_report
from .stabilizer import (StabilizerCode, abelian_subgroups, check_hamming_bound, cosets,
                         eigenbasis_of, eigenprojector, logical_bases, mub_check,
                         mub_family_indices, normalizer, population_probe, stabilizer_cosets,
                         stabilizer_group, useful_subgroups, validate_alphas)


@dataclass(frozen=True)
class CheckResult:
    """
    Verdict of one structural check.

    Attributes:
        name: short name of the claim
        passed: whether the claim holds
        detail: the measured quantity, e.g. "|N(S)|=8"
    """
    name: str
    passed: bool
    detail: str = ""


def _check(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    passed, detail = fn()
    return CheckResult(name, passed, detail)


def check_compose(d: int, tolerance: float) -> tuple[bool, str]:
    """composition of every pair of basis elements matches the dense matrix product"""
    basis = error_basis(d)
    mats = basis_matrices(basis)
    worst = max(float(np.max(np.abs(matrix_of(compose(e1, e2)) - mats[i] @ mats[j])))
                for (i, e1), (j, e2) in product(enumerate(basis), repeat=2))
    return worst <= tolerance, f"max deviation {worst:.2e}"


def check_commutation(d: int, tolerance: float) -> tuple[bool, str]:
    """E_1 E_2 = ω^k E_2 E_1 with k the commutation phase, for every pair"""
    basis = error_basis(d)
    mats = basis_matrices(basis)
    omega = np.exp(2j * np.pi / d)
    worst = 0.0
    for (i, e1), (j, e2) in product(enumerate(basis), repeat=2):
        k = commutation_phase(e1, e2)
        diff = mats[i] @ mats[j] - omega ** k * mats[j] @ mats[i]
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst <= tolerance, f"max deviation {worst:.2e}"


def check_orthogonality(d: int, tolerance: float) -> tuple[bool, str]:
    """Tr(E_m† E_n) = d δ_mn over the whole basis"""
    mats = basis_matrices(error_basis(d))
    gram = np.einsum("mab,nab->mn", mats.conj(), mats)
    deviation = float(np.max(np.abs(gram - d * np.eye(d * d))))
    return deviation <= tolerance, f"{d * d} elements, max deviation {deviation:.2e}"


def check_unique_solution(d: int) -> tuple[bool, str]:
    """
    For q ≠ 0 and any p, q′, k there is exactly one p′ with p·q′ − q·p′ = k (mod d). With q = 0
    the equation does not involve p′ at all, so for p ≠ 0 the unique unknown is q′ instead.
    """
    for q, p, q2, k in product(range(1, d), range(d), range(d), range(d)):
        solutions = [p2 for p2 in range(d) if (p * q2 - q * p2) % d == k]
        if len(solutions) != 1:
            return False, f"q={q}, p={p}, q'={q2}, k={k} has {len(solutions)} solutions"
    for p, k in product(range(1, d), range(d)):
        solutions = [q2 for q2 in range(d) if (p * q2) % d == k]
        if len(solutions) != 1:
            return False, f"q=0, p={p}, k={k} has {len(solutions)} solutions for q'"
    return True, f"{(d - 1) * d ** 3 + (d - 1) * d} equations"


def check_syndromes(d: int) -> tuple[bool, str]:
    """the d² errors on qudit A give distinct outcome pairs on the population probe"""
    probe = population_probe(d)
    seen = {tuple(commutation_phase_multi(g, embed(e, 0, 2)) for g in probe.generators)
            for e in error_basis(d)}
    return len(seen) == d * d, f"{len(seen)} distinct syndromes"


def check_w_partition(d: int) -> tuple[bool, str]:
    """the subsets W_k^i for k = 0..d−1 partition the basis into d sets of size d"""
    for i in range(1, d * d):
        subsets = [w_subset(d, i, k) for k in range(d)]
        if any(len(s) != d for s in subsets) or \
                frozenset().union(*subsets) != frozenset(range(d * d)):
            return False, f"W^{i} is not a partition"
    return True, f"{d * d - 1} partitions into {d} subsets of {d}"


def _policy(settings: Settings) -> AlphaPolicy:
    return AlphaPolicy(ratio=settings.alpha_ratio, tolerance=settings.alpha_tolerance)


def _probes(d: int, settings: Settings) -> list[StabilizerCode]:
    policy = _policy(settings)
    return [policy.probe(d, i, 0, pos + 1) for pos, i in enumerate(mub_family_indices(d))]


def check_normalizer_order(probes: list[StabilizerCode]) -> tuple[bool, str]:
    """each single-generator probe has a normalizer of order d³"""
    d = probes[0].d
    orders = {len(normalizer(probe)) for probe in probes}
    return orders == {d ** 3}, ", ".join(f"|N(S)|={n}" for n in sorted(orders))


def check_abelian_subgroups(probes: list[StabilizerCode]) -> tuple[bool, str]:
    """d+1 Abelian subgroups of order d² meeting pairwise in the stabilizer group"""
    d = probes[0].d
    counts: set[int] = set()
    for probe in probes:
        subgroups = abelian_subgroups(probe)
        counts.add(len(subgroups))
        stab = stabilizer_group(probe)
        if any(len(sub.elements) != d * d for sub in subgroups):
            return False, "subgroup order differs from d²"
        if any(first.elements & second.elements != stab
               for first, second in combinations(subgroups, 2)):
            return False, "two subgroups share more than the stabilizer group"
        if sum(sub.useful for sub in subgroups) != d:
            return False, f"{sum(sub.useful for sub in subgroups)} useful subgroups"
    return counts == {d + 1}, ", ".join(f"{n} Abelian subgroups" for n in sorted(counts))


def check_cosets(probes: list[StabilizerCode]) -> tuple[bool, str]:
    """each Abelian subgroup splits into d disjoint cosets of the stabilizer group"""
    d = probes[0].d
    for probe in probes:
        for sub in abelian_subgroups(probe):
            parts = stabilizer_cosets(sub, probe.generator)
            if len(set(parts)) != d or frozenset().union(*parts) != sub.elements:
                return False, f"subgroup {sub.index} does not split into {d} cosets"
    return True, f"{d} cosets each"


def check_distinct_phases(probes: list[StabilizerCode]) -> tuple[bool, str]:
    """members of a coset of a useful subgroup carry distinct commutation phases with E_i"""
    d = probes[0].d
    for probe in probes:
        e_i = probe.generator.factors[0]
        for sub in useful_subgroups(probe):
            for coset in cosets(sub, probe.generator):
                phases = {commutation_phase(m.factors[0], e_i) for m in coset.members}
                if len(phases) != d:
                    return False, f"subgroup {sub.index}, coset {coset.coset_label}"
    return True, f"{d} distinct phases per coset"


def check_distinct_phases_in_w(d: int) -> tuple[bool, str]:
    """for E_r in W_k^i with k ≠ 0, distinct members of W_k^i have distinct phases with E_r"""
    basis = error_basis(d)
    for i in range(1, d * d):
        for k in range(1, d):
            members = w_subset(d, i, k)
            for r in members:
                phases = {commutation_phase(basis[r], basis[m]) for m in members}
                if len(phases) != d:
                    return False, f"E_{r} in W_{k}^{i}"
    return True, f"{(d * d - 1) * (d - 1)} subsets"


def check_logical_mub(probes: list[StabilizerCode], tolerance: float) -> tuple[bool, str]:
    """the eigenbases of the d+1 Abelian subgroups on the code space are mutually unbiased"""
    d = probes[0].d
    passed = all(mub_check(logical_bases(probe), tolerance) for probe in probes)
    return passed, f"MUB overlap 1/{d}"


def check_family_mub(d: int, tolerance: float) -> tuple[bool, str]:
    """the eigenbases of Z, X, XZ, ..., XZ^{d−1} are mutually unbiased"""
    bases = [eigenbasis_of(error_basis(d)[i]) for i in mub_family_indices(d)]
    return mub_check(bases, tolerance), f"{len(bases)} bases"


def check_projectors(probes: list[StabilizerCode], tolerance: float) -> tuple[bool, str]:
    """the outcome projectors of every generator are orthogonal and sum to the identity"""
    d = probes[0].d
    generators = [g for probe in [population_probe(d)] + probes for g in probe.generators]
    worst = 0.0
    for gen in generators:
        projs = [eigenprojector(gen, k) for k in range(d)]
        worst = max(worst, float(np.max(np.abs(sum(projs) - np.eye(d * d)))))
        for (k, first), (l, second) in product(enumerate(projs), repeat=2):
            expected = first if k == l else np.zeros_like(first)
            worst = max(worst, float(np.max(np.abs(first @ second - expected))))
    return worst <= tolerance, f"{len(generators)} generators, max deviation {worst:.2e}"


def check_probe_conditions(probes: list[StabilizerCode], settings: Settings) -> tuple[bool, str]:
    """the default probes satisfy the nonzero-overlap conditions for every coset"""
    margin = np.inf
    for probe in probes:
        assert probe.alphas is not None
        for sub in useful_subgroups(probe):
            for coset in cosets(sub, probe.generator):
                check = validate_alphas(probe.d, probe.alphas, coset, settings.alpha_tolerance)
                margin = min(margin, check.margin)
    return margin > settings.alpha_tolerance, f"smallest overlap {margin:.3g}"


def check_probability_expansion(d: int, settings: Settings) -> tuple[bool, str]:
    """dense stabilizer probabilities match their closed-form expansion in χ"""
    chi = random_cp_map(d, 1, d * d, False, seed=d)
    configs = enumerate_configurations(d, _policy(settings))
    worst = 0.0
    for config in configs[1:]:
        dense = run_coherence(chi, config, settings.undefined_probability).stabilizer_probs
        worst = max(worst, float(np.max(np.abs(dense - expanded_stabilizer_probs(chi, config)))))
    return worst <= settings.matrix_tolerance, f"max deviation {worst:.2e}"


def _duplicate(config: ExperimentalConfiguration, offset: int,
               index: int) -> ExperimentalConfiguration:
    """the same probe measuring another coset of the same Abelian subgroup"""
    sub = next(s for s in useful_subgroups(config.probe)
               if s.index == config.abelian_subgroup_index)
    assert config.coset_label is not None
    coset = cosets(sub, config.probe.generator)[(config.coset_label + offset) % config.d]
    return ExperimentalConfiguration(index, config.kind, config.probe, config.stabilizer_index,
                                     sub.index, coset.coset_label, coset.measured)


def check_ranks(d: int, settings: Settings) -> list[CheckResult]:
    """
    Rank claims of the measurement equations: d² configurations, each adding d² to the rank,
    no rank from a second coset of the same Abelian subgroup, and full rank d⁴ overall.
    """
    configs = enumerate_configurations(d, _policy(settings))
    # coefficients do not depend on the map so any valid one gives the rank structure
    chi = depolarizing_chi(d, 0.5)
    records = simulate(chi, configs, undefined_probability=settings.undefined_probability)
    report = rank_report(assemble_system(configs, records), settings.rank_threshold)
    increments = [c.increment for c in report.contributions]
    results = [
        CheckResult("configuration count", len(configs) == d * d,
                    f"{len(configs)} configurations"),
        CheckResult("rank per configuration", all(i == d * d for i in increments),
                    f"increments {sorted(set(increments))}"),
        CheckResult("full rank", report.rank == d ** 4, f"rank {report.rank} of {d ** 4}"),
    ]
    duplicate = _duplicate(configs[1], 1, 2)
    pair = [configs[1], duplicate]
    pair_records = [run_coherence(identity_chi(d), c, settings.undefined_probability)
                    for c in pair]
    dup_report = rank_report(assemble_system(pair, pair_records), settings.rank_threshold)
    extra = dup_report.contributions[-1].increment
    results.append(CheckResult("second coset adds no rank", extra == 0, f"increment {extra}"))
    return results


def check_hamming(d: int) -> tuple[bool, str]:
    """the degenerate-code Hamming bound cases: saturation at d² and d, and the n = k case"""
    cases = [
        (check_hamming_bound(2, 0, 1, 1, 1, d), d * d),
        (check_hamming_bound(2, 1, d, 1, 1, d), d * d),
        (check_hamming_bound(1, 0, d, 1, 1, d), d),
    ]
    saturated = all(b.holds and b.lhs == b.rhs == value for b, value in cases)
    impossible = [g for g in range(1, d * d + 1) if check_hamming_bound(1, 1, g, 1, 1, d).holds]
    return saturated and impossible == [d * d], \
        f"saturated at {d * d}, {d * d}, {d}; n=k holds only for g={impossible}"


def run_checks(d: int, settings: Settings = Settings()) -> list[CheckResult]:
    """
    Run every structural check for the prime dimension `d`.

    :param d: prime dimension
    :param settings: numeric tolerances and probe settings
    :return: the `CheckResult` of each check in a fixed order
    """
    check_prime(d)
    tol = settings.matrix_tolerance
    probes = _probes(d, settings)
    results = [
        _check("composition", lambda: check_compose(d, tol)),
        _check("commutation phase", lambda: check_commutation(d, tol)),
        _check("basis orthogonality", lambda: check_orthogonality(d, tol)),
        _check("unique solution", lambda: check_unique_solution(d)),
        _check("population syndromes", lambda: check_syndromes(d)),
        _check("W partition", lambda: check_w_partition(d)),
        _check("normalizer order", lambda: check_normalizer_order(probes)),
        _check("Abelian subgroups", lambda: check_abelian_subgroups(probes)),
        _check("cosets", lambda: check_cosets(probes)),
        _check("coset phases", lambda: check_distinct_phases(probes)),
        _check("W phases", lambda: check_distinct_phases_in_w(d)),
        _check("logical MUB", lambda: check_logical_mub(probes, tol)),
        _check("family MUB", lambda: check_family_mub(d, tol)),
        _check("outcome projectors", lambda: check_projectors(probes, tol)),
        _check("probe conditions", lambda: check_probe_conditions(probes, settings)),
        _check("probability expansion", lambda: check_probability_expansion(d, settings)),
    ]
    results.extend(check_ranks(d, settings))
    results.append(_check("Hamming bound", lambda: check_hamming(d)))
    return results
