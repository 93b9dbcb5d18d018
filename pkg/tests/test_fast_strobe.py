"""
Unit tests for fast_strobe.py
"""

import numpy as np
import pytest
from django.test import SimpleTestCase

from qnd_app.ensemble import Basis, random_state, xx_polarized_state
from qnd_app.exceptions import ContractError, DomainError
from qnd_app.fast_strobe import (
    FORWARD,
    INVERSE,
    fast_apply_sequence,
    fast_sequence_probability,
    lambda_steps,
    recurse,
    recurse_all,
    to_z_basis,
)
from qnd_app.joint_svd import compute_joint_svd
from qnd_app.strobe import OutcomeSequence, apply_sequence, enumerate_sequences, sequence_probability


class TestLambdaSteps(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: lambda_steps"""

    @pytest.mark.timeout(30)
    def test_step_pattern(self):
        """Odd sequences alternate forward/inverse; even ones end on a forward step"""
        jsvd = compute_joint_svd(2)
        odd = lambda_steps(jsvd, OutcomeSequence.from_deltas([0, 1, 2]))
        self.assertEqual([d for d, _ in odd], [FORWARD, INVERSE])
        self.assertEqual([(f.dz, f.dx) for _, f in odd], [(0, 1), (2, 1)])
        even = lambda_steps(jsvd, OutcomeSequence.from_deltas([0, 1, 2, 0]))
        self.assertEqual([d for d, _ in even], [FORWARD, INVERSE, FORWARD])
        self.assertEqual((even[-1][1].dz, even[-1][1].dx), (2, 0))

    @pytest.mark.timeout(30)
    def test_short_sequences_rejected(self):
        """A single readout has no Lambda step"""
        with self.assertRaises(ContractError):
            lambda_steps(compute_joint_svd(1), OutcomeSequence.all_zero(1))


class TestRecurse(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: recurse"""

    @pytest.mark.timeout(30)
    def test_two_atom_all_zero_round(self):
        """For N=2 and (0, 0, 0) the two surviving indices carry 1 and 1/4"""
        jsvd = compute_joint_svd(2)
        seq = OutcomeSequence.all_zero(3)
        first = recurse(jsvd, 0, seq)
        self.assertEqual(first.final_index, 0)
        self.assertAlmostEqual(first.coefficient, 1.0, places=12)
        second = recurse(jsvd, 1, seq, trace=True)
        self.assertEqual(second.final_index, 1)
        self.assertAlmostEqual(second.coefficient, 0.25, places=12)
        self.assertEqual(len(second.trace), 2)
        self.assertIsNone(recurse(jsvd, 2, seq).final_index)

    @pytest.mark.timeout(30)
    def test_vectorized_matches_scalar(self):
        """recurse_all agrees with recurse at every starting index"""
        jsvd = compute_joint_svd(3)
        seq = OutcomeSequence.from_deltas([0, 1, 1, 2, 1])
        index, coefficient = recurse_all(jsvd, seq)
        for k in range(jsvd.dim):
            result = recurse(jsvd, k, seq)
            if result.final_index is None:
                self.assertEqual(index[k], -1)
                self.assertEqual(coefficient[k], 0.0)
            else:
                self.assertEqual(index[k], result.final_index)
                self.assertAlmostEqual(coefficient[k], result.coefficient, places=14)

    @pytest.mark.timeout(30)
    def test_index_out_of_range(self):
        """Starting indices must lie inside the basis"""
        jsvd = compute_joint_svd(1)
        with self.assertRaises(DomainError):
            recurse(jsvd, jsvd.dim, OutcomeSequence.all_zero(2))


class TestFastApplySequence(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: fast_apply_sequence"""

    @pytest.mark.timeout(120)
    def test_agrees_with_exact_engine_exhaustively(self):
        """Every sequence up to length 4 reproduces the exact state"""
        rng = np.random.default_rng(21)
        for n in (1, 2):
            jsvd = compute_joint_svd(n)
            state = random_state(n, rng)
            for length in (1, 2, 3, 4):
                for seq in enumerate_sequences(n, length):
                    exact = apply_sequence(state, seq)
                    fast = to_z_basis(fast_apply_sequence(state, seq, jsvd), jsvd)
                    np.testing.assert_allclose(fast.amps, exact.amps, atol=1e-10)

    @pytest.mark.timeout(60)
    def test_long_random_sequences(self):
        """Long sequences at larger N keep the exact probability"""
        rng = np.random.default_rng(5)
        n = 4
        jsvd = compute_joint_svd(n)
        state = random_state(n, rng)
        for length in (6, 11, 21):
            seq = OutcomeSequence.from_deltas(rng.integers(0, 2, size=length))
            self.assertAlmostEqual(fast_sequence_probability(state, seq, jsvd),
                                   sequence_probability(state, seq), places=10)

    @pytest.mark.timeout(30)
    def test_output_basis_follows_parity(self):
        """Odd sequences end in V, even ones in U, short ones in z"""
        jsvd = compute_joint_svd(2)
        state = xx_polarized_state(2)
        self.assertIs(fast_apply_sequence(state, OutcomeSequence.all_zero(3), jsvd).basis, Basis.V)
        self.assertIs(fast_apply_sequence(state, OutcomeSequence.all_zero(4), jsvd).basis, Basis.U)
        self.assertIs(fast_apply_sequence(state, OutcomeSequence.all_zero(1), jsvd).basis, Basis.Z)

    @pytest.mark.timeout(30)
    def test_accepts_v_basis_input(self):
        """A state already in V gives the same result as its z form"""
        jsvd = compute_joint_svd(2)
        state = random_state(2, np.random.default_rng(2))
        seq = OutcomeSequence.from_deltas([1, 0, 1])
        from_z = fast_apply_sequence(state, seq, jsvd)
        from_v = fast_apply_sequence(jsvd.express(state), seq, jsvd)
        np.testing.assert_allclose(from_v.amps, from_z.amps, atol=1e-12)
