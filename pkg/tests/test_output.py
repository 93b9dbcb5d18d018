"""
Unit tests for output.py
"""

import json
import tempfile
from pathlib import Path

import pytest
from django.test import SimpleTestCase

from qnd_app.output import Records, Table, format_value, write_panel


class TestWritePanel(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: write_panel"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.directory = Path(self._tmp.name) / "out"

    def tearDown(self):
        self._tmp.cleanup()

    @pytest.mark.timeout(30)
    def test_csv_layout(self):
        """Header lines come first, then the column row, then the data"""
        header = {"figureId": 5, "N": 2, "tau": 0.1}
        table = Table("fig5b", ["L", "fidelity"], [(0, 0.5), (1, 1 / 3)])
        path = write_panel(self.directory, "fig5b", header, table, "csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(path.name, "fig5b.csv")
        self.assertEqual(lines[:3], ["# figureId=5", "# N=2", "# tau=0.10000000000000001"])
        self.assertEqual(lines[3], "L,fidelity")
        self.assertEqual(lines[5], "1,0.33333333333333331")

    @pytest.mark.timeout(30)
    def test_json_layout(self):
        """JSON output carries header, columns and rows"""
        table = Table("fig8a", ["round", "index", "weight"], [(0, 1, 0.25)])
        path = write_panel(self.directory, "fig8a", {"N": 2}, table, "json")
        document = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(document["header"], {"N": 2})
        self.assertEqual(document["columns"], ["round", "index", "weight"])
        self.assertEqual(document["rows"], [[0, 1, 0.25]])

    @pytest.mark.timeout(30)
    def test_records_go_to_json_lines(self):
        """Trajectory records are written one per line after the header"""
        records = Records("fig7a", [{"step": 0, "delta": 1}, {"step": 1, "delta": 0}])
        path = write_panel(self.directory, "fig7a", {"seed": 3}, records, "csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(path.suffix, ".jsonl")
        self.assertEqual(json.loads(lines[0]), {"header": {"seed": 3}})
        self.assertEqual(json.loads(lines[2]), {"step": 1, "delta": 0})

    @pytest.mark.timeout(30)
    def test_format_value(self):
        """Booleans are lowercase and floats keep 17 significant digits"""
        self.assertEqual(format_value(True), "true")
        self.assertEqual(format_value(0.1), "0.10000000000000001")
        self.assertEqual(format_value(7), "7")
