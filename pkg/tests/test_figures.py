"""
Unit tests for figures.py
"""

import math

import pytest
from django.test import SimpleTestCase

from qnd_app.config import RunConfig
from qnd_app.exceptions import ConfigurationError
from qnd_app.figures import build_figure
from qnd_app.joint_svd import compute_joint_svd
from qnd_app.output import Records, Table


class TestBuildFigure(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: build_figure"""

    @pytest.mark.timeout(30)
    def test_unknown_figure(self):
        """Only the known figure ids are accepted"""
        with self.assertRaises(ConfigurationError):
            build_figure(4, RunConfig(n=2), compute_joint_svd)

    @pytest.mark.timeout(30)
    def test_c_function_maps(self):
        """Four heat-map panels over the full (k1, k2) grid"""
        panels = build_figure(2, RunConfig(n=2, alpha=3.0).validate(), compute_joint_svd)
        self.assertEqual([p.key for p in panels], ["a", "b", "c", "d"])
        self.assertEqual(len(panels[0].data.rows), 9)
        self.assertAlmostEqual(panels[1].tau, math.pi / 4)

    @pytest.mark.timeout(30)
    def test_outcome_probabilities_columns(self):
        """Outcome tables list delta, nc, nd and prob"""
        panels = build_figure(3, RunConfig(n=2, alpha=2.0).validate(), compute_joint_svd)
        self.assertEqual(panels[0].data.columns, ["delta", "nc", "nd", "prob"])
        self.assertEqual(len(panels[0].data.rows), 5 * 5)

    @pytest.mark.timeout(60)
    def test_convergence_table(self):
        """One diagnostic row per round, starting at the single-projection probability"""
        panels = build_figure(5, RunConfig(n=2, rounds=3).validate(), compute_joint_svd)
        table = panels[1].data
        self.assertEqual([row[0] for row in table.rows], [0, 1, 2, 3])
        self.assertAlmostEqual(table.rows[0][3], math.comb(4, 2) / 16, places=12)
        self.assertEqual(table.columns[-1], "amplitude")
        for row in table.rows:
            self.assertAlmostEqual(row[4], math.sqrt(row[3]), places=12)

    @pytest.mark.timeout(60)
    def test_trajectories_are_records(self):
        """Each trajectory panel holds 2L+1 steps"""
        panels = build_figure(7, RunConfig(n=2, rounds=2).validate(), compute_joint_svd)
        self.assertEqual([p.key for p in panels], ["a", "b", "c", "d"])
        for panel in panels:
            self.assertIsInstance(panel.data, Records)
            self.assertEqual(len(panel.data.records), 5)
            self.assertEqual([r["basis"] for r in panel.data.records[:2]], ["z", "x"])

    @pytest.mark.timeout(60)
    def test_dark_readouts_have_no_offset(self):
        """Finite-alpha readouts with no photons report delta and residual as None"""
        config = RunConfig(n=2, rounds=1, alpha=0.0, finite_alpha=True).validate()
        for panel in build_figure(7, config, compute_joint_svd):
            for record in panel.data.records:
                self.assertEqual((record["nc"], record["nd"]), (0, 0))
                self.assertIsNone(record["delta"])
                self.assertIsNone(record["residual"])

    @pytest.mark.timeout(60)
    def test_threads_do_not_change_trajectories(self):
        """Threaded figure runs reproduce the serial records"""
        serial = build_figure(7, RunConfig(n=2, rounds=2, seed=9).validate(), compute_joint_svd)
        threaded = build_figure(7, RunConfig(n=2, rounds=2, seed=9, threads=4).validate(), compute_joint_svd)
        self.assertEqual([p.data.records for p in serial], [p.data.records for p in threaded])

    @pytest.mark.timeout(60)
    def test_mixed_state_rows(self):
        """Every round lists every V index"""
        panels = build_figure(8, RunConfig(n=2, rounds=2).validate(), compute_joint_svd)
        self.assertIsInstance(panels[0].data, Table)
        self.assertEqual(len(panels[0].data.rows), 3 * 9)

    @pytest.mark.timeout(60)
    def test_unavailable_columns_are_skipped(self):
        """Sectors or ranks missing at small N drop their panel"""
        panels = build_figure(9, RunConfig(n=2).validate(), compute_joint_svd)
        self.assertEqual([p.key for p in panels], ["a", "c"])

    @pytest.mark.timeout(60)
    def test_spectrum_panels_carry_their_size(self):
        """Panel b is computed at twice the requested N"""
        config = RunConfig(n=1).validate()
        panels = build_figure(10, config, compute_joint_svd)
        self.assertEqual([p.n for p in panels], [1, 2])
        self.assertEqual(panels[1].header(config, 10)["N"], 2)
        self.assertEqual(len(panels[1].data.rows), 9)
