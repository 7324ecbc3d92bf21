"""Unit tests for `dcqd/protocol.py`"""

import numpy as np
import pytest

from dcqd.channels import (ChiMatrix, error_states, identity_chi, kraus_to_chi, pauli_chi,
                           random_kraus, tensor_chi)
from dcqd.pauli import DimensionError, commutation_phase, error_basis, matrix_of_multi, w_subset
from dcqd.protocol import (AlphaKind, AlphaPolicy, ConfigurationKind, DimensionCapError,
                           enumerate_configurations, expanded_stabilizer_probs,
                           geometric_alphas, outcome_grid, outcome_to_basis_index,
                           population_configuration, population_diagonal,
                           population_probe_multi, random_alphas, run_coherence,
                           run_population, run_population_multiqudit, sample_outcomes, simulate)
from dcqd.stabilizer import InvalidProbeError, eigenprojector, mub_family_indices

from unit.util import max_abs, random_chi


@pytest.fixture(name="bit_flip")
def create_bit_flip() -> ChiMatrix:
    """process matrix of the qubit bit flip with probability 0.3"""
    return pauli_chi(2, [0.7, 0.0, 0.3, 0.0])


def test_configuration_count():
    """there are exactly d² configurations: one population and (d+1)(d−1) coherence runs"""
    for d, expected in ((2, 4), (3, 9), (5, 25)):
        configs = enumerate_configurations(d)
        assert len(configs) == expected
        assert [c.index for c in configs] == list(range(expected))
        assert configs[0].kind == ConfigurationKind.POPULATION
        assert all(c.kind == ConfigurationKind.COHERENCE for c in configs[1:])


def test_configuration_layout():
    """each stabilizer is used d−1 times with cosets of distinct useful Abelian subgroups"""
    d = 3
    configs = enumerate_configurations(d)[1:]
    stabilizers = [c.stabilizer_index for c in configs]
    assert stabilizers == [i for i in mub_family_indices(d) for _ in range(d - 1)]
    for pos in range(0, len(configs), d - 1):
        group = configs[pos:pos + d - 1]
        assert len({c.abelian_subgroup_index for c in group}) == d - 1
        assert all(c.coset_label == 0 for c in group)
        assert all(len(c.measured_normalizers) == d - 1 for c in group)
        alphas = [c.probe.alphas for c in group]
        assert alphas[0] is not None and alphas[1] is not None
        assert not np.allclose(alphas[0], alphas[1])
    shifted = enumerate_configurations(d, subgroup_choice=[2, 1], coset_label=4)
    assert all(c.coset_label == 1 for c in shifted[1:])
    assert shifted[1].abelian_subgroup_index != configs[0].abelian_subgroup_index
    with pytest.raises(ValueError):
        enumerate_configurations(d, subgroup_choice=[0, 0])
    with pytest.raises(ValueError):
        enumerate_configurations(d, subgroup_choice=[0, 3])
    with pytest.raises(ValueError):
        enumerate_configurations(d, subgroup_choice=[0])


def test_alpha_policies():
    """coefficient policies are normalized and deterministic per seed"""
    for d in (2, 3, 5):
        assert np.isclose(np.linalg.norm(geometric_alphas(d, 0.8)), 1.0)
        assert np.isclose(np.linalg.norm(random_alphas(d, np.random.default_rng(1))), 1.0)
    policy = AlphaPolicy(AlphaKind.RANDOM, seed=13)
    first = policy.probe(3, 1, 0, 4)
    second = policy.probe(3, 1, 0, 4)
    assert first.alphas is not None and second.alphas is not None
    assert np.array_equal(first.alphas, second.alphas)
    other = AlphaPolicy(AlphaKind.RANDOM, seed=14).probe(3, 1, 0, 4)
    assert other.alphas is not None
    assert not np.allclose(first.alphas, other.alphas)
    with pytest.raises(InvalidProbeError):
        AlphaPolicy(AlphaKind.FIXED).probe(3, 1, 0, 1)
    fixed = AlphaPolicy(AlphaKind.FIXED, fixed=(1.0, 1.0)).probe(2, 1, 0, 1)
    assert fixed.alphas is not None
    assert np.allclose(fixed.alphas, [1 / np.sqrt(2)] * 2)


def test_population_equals_diagonal():
    """the population run recovers diag(χ) for random maps"""
    for d in (2, 3, 5):
        for seed in range(50):
            chi = random_chi(d, seed, trace_preserving=seed % 2 == 0)
            record = run_population(chi)
            assert max_abs(population_diagonal(record), np.diag(chi.entries).real) <= 1e-10
            assert abs(record.stabilizer_probs.sum() - chi.trace) <= 1e-10


def test_population_outcomes(bit_flip: ChiMatrix):
    """outcome (k, k′) detects the error X^{k′} Z^{−k}"""
    assert outcome_to_basis_index(2, 0, 1) == 2
    assert outcome_to_basis_index(3, 1, 0) == 2
    assert outcome_to_basis_index(3, 2, 2) == 7
    grid = outcome_grid(run_population(bit_flip))
    assert max_abs(grid, [[0.7, 0.3], [0.0, 0.0]]) <= 1e-12
    record = run_population(identity_chi(3))
    assert np.isclose(record.stabilizer_probs[0], 1.0)
    with pytest.raises(DimensionError):
        run_population(identity_chi(2, 2))
    coherence = enumerate_configurations(2)[1]
    with pytest.raises(ValueError):
        run_coherence(identity_chi(2), population_configuration(2))
    with pytest.raises(ValueError):
        population_diagonal(run_coherence(identity_chi(2), coherence))


def test_population_multiqudit(bit_flip: ChiMatrix):
    """a single measurement on two entangled pairs gives the 16 diagonal entries"""
    code = population_probe_multi(2, 2)
    assert len(code.generators) == 4
    for gen in code.generators:
        assert max_abs(matrix_of_multi(gen) @ code.state, code.state) <= 1e-12
    record = run_population_multiqudit(identity_chi(2, 2))
    assert np.isclose(record.stabilizer_probs[0], 1.0)
    assert np.isclose(record.stabilizer_probs.sum(), 1.0)
    product = tensor_chi([bit_flip, bit_flip])
    diagonal = population_diagonal(run_population_multiqudit(product))
    assert max_abs(diagonal, np.kron(np.diag(bit_flip.entries).real,
                                     np.diag(bit_flip.entries).real)) <= 1e-10
    chi = random_chi(2, 17, n_qudits=2)
    record = run_population_multiqudit(chi)
    assert max_abs(population_diagonal(record), np.diag(chi.entries).real) <= 1e-8
    assert abs(record.stabilizer_probs.sum() - chi.trace) <= 1e-10
    with pytest.raises(ValueError):
        outcome_grid(record)
    with pytest.raises(DimensionCapError):
        run_population_multiqudit(chi, dimension_cap=8)


def test_coherence_identity():
    """the undisturbed probe gives outcome 0 and the probe's own normalizer expectations"""
    for d in (2, 3):
        for config in enumerate_configurations(d)[1:]:
            record = run_coherence(identity_chi(d), config)
            assert max_abs(record.stabilizer_probs, np.eye(d)[0]) <= 1e-10
            assert record.normalizer_expectations is not None
            state = config.probe.state
            for b, member in enumerate(config.measured_normalizers):
                expected = np.vdot(state, matrix_of_multi(member) @ state)
                assert abs(record.normalizer_expectations[0, b] - expected) <= 1e-10
            assert np.all(np.isnan(record.normalizer_expectations[1:]))


def test_coherence_unitary_error():
    """a Weyl error moves all weight to its commutation phase with E_i"""
    d = 3
    basis = error_basis(d)
    configs = enumerate_configurations(d)[1:]
    for j in range(1, d * d):
        chi = pauli_chi(d, np.eye(d * d)[j])
        for config in configs:
            assert config.stabilizer_index is not None
            k0 = commutation_phase(basis[config.stabilizer_index], basis[j])
            record = run_coherence(chi, config)
            assert abs(record.stabilizer_probs[k0] - 1.0) <= 1e-10


def test_coherence_dephasing():
    """Z errors commute with the Z⊗Z probe so all weight stays on outcome 0"""
    config = enumerate_configurations(2)[1]
    assert config.stabilizer_index == 1
    record = run_coherence(pauli_chi(2, [0.7, 0.3, 0.0, 0.0]), config)
    assert max_abs(record.stabilizer_probs, [1.0, 0.0]) <= 1e-10


def test_record_linearity():
    """records of a mixture of maps are the same mixture of their records"""
    for d in (2, 3):
        configs = enumerate_configurations(d)
        chi1, chi2 = random_chi(d, 40), random_chi(d, 41, trace_preserving=False)
        mixed = ChiMatrix(d, 1, 0.3 * chi1.entries + 0.5 * chi2.entries)
        for config in configs:
            records = [simulate(chi, [config])[0] for chi in (chi1, chi2, mixed)]
            first, second, combined = records
            expected = 0.3 * first.stabilizer_probs + 0.5 * second.stabilizer_probs
            assert max_abs(combined.stabilizer_probs, expected) <= 1e-10
            assert abs(combined.trace - (0.3 * first.trace + 0.5 * second.trace)) <= 1e-10
            if config.kind == ConfigurationKind.COHERENCE:
                assert first.joint_values is not None and second.joint_values is not None
                assert combined.joint_values is not None
                expected = 0.3 * first.joint_values + 0.5 * second.joint_values
                assert max_abs(combined.joint_values, expected) <= 1e-10


def test_probability_expansion():
    """dense stabilizer probabilities match their closed-form expansion in χ"""
    for d in (2, 3):
        configs = enumerate_configurations(d)
        for seed in range(5):
            chi = random_chi(d, seed, trace_preserving=seed % 2 == 1)
            for config in configs[1:]:
                record = run_coherence(chi, config)
                dense = record.stabilizer_probs
                assert max_abs(dense, expanded_stabilizer_probs(chi, config)) <= 1e-10
                assert abs(dense.sum() - record.trace) <= 1e-10
                if seed % 2 == 1:
                    assert abs(dense.sum() - 1.0) <= 1e-10
    with pytest.raises(ValueError):
        expanded_stabilizer_probs(identity_chi(2), population_configuration(2))


def test_projected_support():
    """P_k keeps E_m|φ⟩ for E_m in W_k and removes it otherwise"""
    for d in (2, 3):
        for config in enumerate_configurations(d)[1:]:
            assert config.stabilizer_index is not None
            psi = error_states(identity_chi(d), config.probe.state)
            for k in range(d):
                proj = eigenprojector(config.probe.generator, k)
                inside = w_subset(d, config.stabilizer_index, k)
                for m in range(d * d):
                    expected = psi[:, m] if m in inside else np.zeros(d * d)
                    assert max_abs(proj @ psi[:, m], expected) <= 1e-10


def test_simulate_workers():
    """threaded simulation returns the serial records in enumeration order"""
    chi = random_chi(3, 8)
    configs = enumerate_configurations(3)
    serial = simulate(chi, configs)
    threaded = simulate(chi, configs, workers=3)
    assert all(record.config is config for record, config in zip(serial, configs))
    assert serial[0].config.kind == ConfigurationKind.POPULATION
    for first, second in zip(serial, threaded):
        assert first.config is second.config
        assert np.array_equal(first.stabilizer_probs, second.stabilizer_probs)


def test_sample_population():
    """population shots are deterministic per seed and converge to the exact statistics"""
    record = run_population(identity_chi(2))
    sampled = sample_outcomes(record, 1000, seed=3)
    assert sampled.shots == 1000
    assert sampled.counts is not None
    assert sampled.counts.tolist() == [1000, 0, 0, 0]
    chi = random_chi(2, 21)
    exact = run_population(chi)
    first = sample_outcomes(exact, 5000, seed=9)
    second = sample_outcomes(exact, 5000, seed=9)
    assert first.counts is not None and second.counts is not None
    assert np.array_equal(first.counts, second.counts)
    large = sample_outcomes(exact, 10 ** 6, seed=9)
    assert max_abs(large.stabilizer_probs, exact.stabilizer_probs) <= 5e-3
    with pytest.raises(ValueError):
        sample_outcomes(exact, 0, seed=9)


def test_sample_coherence():
    """coherence shots are split among the normalizers and lost weight stays unobserved"""
    d = 3
    config = enumerate_configurations(d)[1]
    lossy = kraus_to_chi(random_kraus(d, 1, 4, False, seed=2))
    record = run_coherence(lossy, config)
    sampled = sample_outcomes(record, 1001, seed=4)
    assert sampled.counts is not None
    assert sampled.counts.shape == (d - 1, d, d)
    shares = sampled.counts.sum(axis=(1, 2))
    assert shares.sum() < 1001
    assert np.all(shares <= [501, 500])
    large = sample_outcomes(record, 10 ** 6, seed=4)
    assert max_abs(large.stabilizer_probs, record.stabilizer_probs) <= 5e-3
    assert large.joint_values is not None and record.joint_values is not None
    assert max_abs(large.joint_values, record.joint_values) <= 1e-2


if __name__ == "__main__":
    # boilerplate to invoke pytest on this file for debugging
    pytest.main([__file__, "-s"])
