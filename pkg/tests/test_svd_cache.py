"""
Unit tests for svd_cache.py
"""

import dataclasses
import tempfile
from pathlib import Path

import numpy as np
import pytest
from django.test import SimpleTestCase

from qnd_app import svd_cache
from qnd_app.exceptions import CacheChecksumError, CacheMissingError
from qnd_app.joint_svd import LambdaFactor, compute_joint_svd


class CacheTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.directory = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()


class TestSaveLoad(CacheTestCase):
    """Test kind: unit_tests. Original method FQN: save, load"""

    @pytest.mark.timeout(30)
    def test_loaded_decomposition_is_identical(self):
        """A cached decomposition comes back bit for bit"""
        jsvd = compute_joint_svd(2)
        path = svd_cache.save(jsvd, self.directory)
        self.assertEqual(path.name, "jsvd-N2.npz")
        loaded = svd_cache.load(2, self.directory)
        np.testing.assert_array_equal(loaded.u, jsvd.u)
        np.testing.assert_array_equal(loaded.v, jsvd.v)
        for key, factor in jsvd.factors.items():
            np.testing.assert_array_equal(loaded.factors[key].rows, factor.rows)
            np.testing.assert_array_equal(loaded.factors[key].cols, factor.cols)
            np.testing.assert_array_equal(loaded.factors[key].amplitudes, factor.amplitudes)

    @pytest.mark.timeout(30)
    def test_missing_file(self):
        """Loading an absent size raises CacheMissingError"""
        with self.assertRaises(CacheMissingError):
            svd_cache.load(3, self.directory)

    @pytest.mark.timeout(30)
    def test_tampered_archive_fails_checksum(self):
        """Changing any stored array invalidates the digest"""
        path = svd_cache.save(compute_joint_svd(1), self.directory)
        with np.load(path) as archive:
            contents = {name: archive[name] for name in archive.files}
        contents["u"] = contents["u"] * -1.0
        with path.open("wb") as handle:
            np.savez(handle, **contents)
        with self.assertRaises(CacheChecksumError):
            svd_cache.load(1, self.directory)

    @pytest.mark.timeout(30)
    def test_garbage_file_is_unreadable(self):
        """A file that is not an archive fails like a bad checksum"""
        svd_cache.cache_path(2, self.directory).write_bytes(b"not an archive")
        with self.assertRaises(CacheChecksumError):
            svd_cache.load(2, self.directory)

    @pytest.mark.timeout(30)
    def test_wrong_size_is_rejected(self):
        """An archive renamed to another N is refused"""
        path = svd_cache.save(compute_joint_svd(1), self.directory)
        path.rename(svd_cache.cache_path(2, self.directory))
        with self.assertRaises(CacheChecksumError):
            svd_cache.load(2, self.directory)


class TestLoadOrBuild(CacheTestCase):
    """Test kind: unit_tests. Original method FQN: load_or_build, clear, inspect"""

    @pytest.mark.timeout(30)
    def test_builds_only_when_asked(self):
        """Without build the miss propagates; with build the archive appears"""
        with self.assertRaises(CacheMissingError):
            svd_cache.load_or_build(2, build=False, directory=self.directory)
        jsvd = svd_cache.load_or_build(2, build=True, directory=self.directory)
        self.assertTrue(svd_cache.cache_path(2, self.directory).exists())
        self.assertEqual(jsvd.n, 2)

    @pytest.mark.timeout(30)
    def test_clear_leaves_other_files(self):
        """Only jsvd-N*.npz archives are removed"""
        svd_cache.save(compute_joint_svd(1), self.directory)
        svd_cache.save(compute_joint_svd(2), self.directory)
        other = self.directory / "notes.txt"
        other.write_text("keep")
        removed = svd_cache.clear(1, self.directory)
        self.assertEqual([p.name for p in removed], ["jsvd-N1.npz"])
        removed = svd_cache.clear(None, self.directory)
        self.assertEqual([p.name for p in removed], ["jsvd-N2.npz"])
        self.assertTrue(other.exists())
        self.assertEqual(svd_cache.clear(None, self.directory / "absent"), [])

    @pytest.mark.timeout(30)
    def test_inspect_summary(self):
        """The summary lists sector sizes and counts every nonzero Lambda entry"""
        jsvd = compute_joint_svd(2)
        summary = svd_cache.inspect(jsvd)
        self.assertEqual(summary["sectors"], {0: 3, 1: 4, 2: 2})
        self.assertEqual(summary["nonzero"], sum(len(f) for f in jsvd.factors.values()))
        self.assertEqual(sum(bin_["count"] for bin_ in summary["histogram"]), summary["nonzero"])

    @pytest.mark.timeout(30)
    def test_inspect_counts_unit_entries_above_one(self):
        """Amplitudes an ulp above 1 land in the top bin"""
        jsvd = compute_joint_svd(1)
        bumped = LambdaFactor(0, 0, jsvd.dim, [0, 1], [0, 1], [np.nextafter(1.0, 2.0), 1.0])
        summary = svd_cache.inspect(dataclasses.replace(jsvd, factors={(0, 0): bumped}))
        self.assertEqual(summary["nonzero"], 2)
        self.assertEqual(summary["histogram"][-1]["count"], 2)
