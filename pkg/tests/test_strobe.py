"""
Unit tests for strobe.py
"""

import math

import numpy as np
import pytest
from scipy import stats
from django.test import SimpleTestCase

from qnd_app.ensemble import Basis, SpinAxis, fock_state, random_state, xx_polarized_state
from qnd_app.exceptions import ContractError, DomainError
from qnd_app.strobe import (
    OutcomeSequence,
    apply_sequence,
    basis_probabilities,
    enumerate_sequences,
    offset_weights,
    sample_trajectories,
    sample_trajectory,
    sequence_operator,
    sequence_probability,
    strobe_diagnostics,
    trajectory_rng,
)


class TestOutcomeSequence(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: OutcomeSequence"""

    @pytest.mark.timeout(30)
    def test_alternation_enforced(self):
        """Sequences start on z and alternate"""
        with self.assertRaises(ContractError):
            OutcomeSequence(((Basis.X, 0),))
        with self.assertRaises(ContractError):
            OutcomeSequence(((Basis.Z, 0), (Basis.Z, 1)))
        with self.assertRaises(ContractError):
            OutcomeSequence.from_deltas([0, -1])

    @pytest.mark.timeout(30)
    def test_properties(self):
        """Parity, rounds and deltas follow the entries"""
        seq = OutcomeSequence.odd_rounds(3)
        self.assertEqual(len(seq), 7)
        self.assertEqual(seq.parity, "odd")
        self.assertEqual(seq.rounds, 3)
        self.assertEqual(OutcomeSequence.from_deltas([1, 2]).parity, "even")
        self.assertEqual(OutcomeSequence.from_deltas([1, 2]).deltas, (1, 2))

    @pytest.mark.timeout(30)
    def test_offsets_beyond_n(self):
        """Offsets larger than N are a domain error"""
        with self.assertRaises(DomainError):
            OutcomeSequence.from_deltas([0, 3]).check_size(2)

    @pytest.mark.timeout(30)
    def test_enumeration_count(self):
        """(N+1)^L sequences of length L"""
        self.assertEqual(sum(1 for _ in enumerate_sequences(2, 3)), 27)


class TestApplySequence(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: apply_sequence"""

    @pytest.mark.timeout(30)
    def test_matches_dense_product(self):
        """Projector-by-projector application equals P_last ... P_first"""
        state = random_state(2, np.random.default_rng(3))
        for deltas in ([0], [0, 1], [1, 0, 2], [0, 0, 0, 0]):
            seq = OutcomeSequence.from_deltas(deltas)
            np.testing.assert_allclose(apply_sequence(state, seq).amps,
                                       sequence_operator(2, seq) @ state.amps, atol=1e-12)

    @pytest.mark.timeout(30)
    def test_probabilities_sum_to_one(self):
        """All outcome sequences of a fixed length exhaust the probability"""
        state = random_state(2, np.random.default_rng(9))
        for length in (1, 2, 3):
            total = sum(sequence_probability(state, s) for s in enumerate_sequences(2, length))
            self.assertAlmostEqual(total, 1.0, places=12)

    @pytest.mark.timeout(30)
    def test_single_z_projection_of_xx_state(self):
        """P(delta = 0) for the x-polarized pair is C(2N,N)/4^N"""
        for n in (1, 4, 7):
            probability = sequence_probability(xx_polarized_state(n), OutcomeSequence.all_zero(1))
            self.assertAlmostEqual(probability, math.comb(2 * n, n) / 4 ** n, places=12)

    @pytest.mark.timeout(30)
    def test_zero_branch_stops_early(self):
        """An impossible outcome yields the zero vector"""
        projected = apply_sequence(fock_state(2, 1, 1), OutcomeSequence.from_deltas([2, 0, 0]))
        self.assertEqual(projected.norm_sq, 0.0)

    @pytest.mark.timeout(30)
    def test_offset_weights_sum_to_norm(self):
        """Offset weights partition the norm in both bases"""
        state = random_state(3, np.random.default_rng(1))
        for basis in (Basis.Z, Basis.X):
            self.assertAlmostEqual(float(offset_weights(state, basis).sum()), 1.0, places=12)


class TestTrajectories(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: sample_trajectory, sample_trajectories"""

    @pytest.mark.timeout(30)
    def test_trajectory_is_consistent(self):
        """Step probabilities multiply to the exact sequence probability"""
        state = random_state(2, np.random.default_rng(6))
        record = sample_trajectory(state, 5, trajectory_rng(17, 0), seed=17)
        self.assertEqual(len(record.entries), 5)
        self.assertAlmostEqual(record.joint_prob, sequence_probability(state, record.sequence), places=10)
        for step_state in record.step_states:
            self.assertTrue(step_state.is_normalized())

    @pytest.mark.timeout(30)
    def test_thread_count_does_not_change_results(self):
        """Per-index seeding makes threaded runs identical to serial ones"""
        state = xx_polarized_state(3)
        serial = sample_trajectories(state, 7, master_seed=42, count=6, threads=1)
        threaded = sample_trajectories(state, 7, master_seed=42, count=6, threads=3)
        self.assertEqual([r.entries for r in serial], [r.entries for r in threaded])
        self.assertEqual([r.index for r in threaded], list(range(6)))

    @pytest.mark.timeout(60)
    def test_sequence_frequencies_follow_born_rule(self):
        """Sampled outcome sequences pass a chi-square test against sequence_probability"""
        state = random_state(1, np.random.default_rng(13))
        count = 3000
        records = sample_trajectories(state, 3, master_seed=99, count=count)
        observed = {}
        for record in records:
            observed[record.sequence.deltas] = observed.get(record.sequence.deltas, 0) + 1
        sequences = [s for s in enumerate_sequences(1, 3) if sequence_probability(state, s) > 1e-12]
        probabilities = np.array([sequence_probability(state, s) for s in sequences])
        expected = probabilities / probabilities.sum() * count
        counts = np.array([observed.get(s.deltas, 0) for s in sequences])
        self.assertEqual(int(counts.sum()), count)
        self.assertGreater(stats.chisquare(counts, expected).pvalue, 1e-3)

    @pytest.mark.timeout(30)
    def test_negative_length_rejected(self):
        """Trajectory length is nonnegative"""
        with self.assertRaises(DomainError):
            sample_trajectory(fock_state(1, 0, 0), -1, np.random.default_rng(0))


class TestBasisProbabilities(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: basis_probabilities"""

    @pytest.mark.timeout(30)
    def test_fock_state_in_zz(self):
        """A Fock state is a point mass at [k1, k2] in the z basis"""
        p = basis_probabilities(fock_state(3, 1, 2), SpinAxis.Z, SpinAxis.Z)
        self.assertAlmostEqual(p[1, 2], 1.0, places=12)
        self.assertAlmostEqual(float(p.sum()), 1.0, places=12)

    @pytest.mark.timeout(30)
    def test_distributions_are_normalized(self):
        """Every axis pair gives a probability distribution"""
        state = random_state(3, np.random.default_rng(12))
        for axes in ((SpinAxis.X, SpinAxis.X), (SpinAxis.Y, SpinAxis.Y), (SpinAxis.Z, SpinAxis.X)):
            p = basis_probabilities(state, *axes)
            self.assertAlmostEqual(float(p.sum()), 1.0, places=12)
            self.assertGreaterEqual(float(p.min()), 0.0)

    @pytest.mark.timeout(30)
    def test_xx_state_is_a_point_in_the_x_basis(self):
        """The x-polarized pair concentrates on one x-basis label pair"""
        p = basis_probabilities(xx_polarized_state(4), SpinAxis.X, SpinAxis.X)
        self.assertAlmostEqual(float(p.max()), 1.0, places=10)


class TestStrobeDiagnostics(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: strobe_diagnostics"""

    @pytest.mark.timeout(30)
    def test_diagnostics_along_rounds(self):
        """Success probability falls with rounds and stays bounded"""
        n = 3
        diagnostics = strobe_diagnostics(xx_polarized_state(n), [0, 1, 2, 4])
        self.assertEqual([d.rounds for d in diagnostics], [0, 1, 2, 4])
        self.assertAlmostEqual(diagnostics[0].probability, math.comb(2 * n, n) / 4 ** n, places=12)
        probabilities = [d.probability for d in diagnostics]
        for earlier, later in zip(probabilities, probabilities[1:]):
            self.assertLessEqual(later, earlier + 1e-12)
        for d in diagnostics:
            self.assertGreaterEqual(d.fidelity, 0.0)
            self.assertLessEqual(d.fidelity, 1.0)
            self.assertGreaterEqual(d.entropy_ratio, 0.0)
            self.assertLessEqual(d.entropy_ratio, 1.0 + 1e-12)

    @pytest.mark.timeout(60)
    def test_converges_to_epr_at_twenty_atoms(self):
        """N=20: fidelity above 0.99 by six rounds, probability settles at 1/(N+1) with amplitude near 0.22"""
        diagnostics = strobe_diagnostics(xx_polarized_state(20), [6, 30])
        self.assertGreaterEqual(diagnostics[0].fidelity, 0.99)
        self.assertGreater(diagnostics[1].entropy_ratio, 0.99)
        self.assertAlmostEqual(diagnostics[1].probability, 1.0 / 21, delta=1e-3)
        self.assertAlmostEqual(diagnostics[1].amplitude, 0.22, delta=0.01)
