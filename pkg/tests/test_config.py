"""
Unit tests for config.py
"""

import math
import os
from pathlib import Path
from unittest.mock import patch, MagicMock

import pytest
from django.test import SimpleTestCase, override_settings

from qnd_app.config import (
    RunConfig,
    cache_dir,
    dense_limit,
    read_config_parameter,
    svd_max_n,
)
from qnd_app.exceptions import ConfigurationError


class TestReadConfigParameter(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: read_config_parameter"""

    @pytest.mark.timeout(30)
    def test_read_config_parameter_from_env_local_file(self):
        """Test reading parameter from .env.local file"""
        with patch('qnd_app.config.Path') as mock_path, \
             patch('qnd_app.config.dotenv_values') as mock_dotenv_values, \
             patch.dict(os.environ, {}, clear=True):

            mock_file = MagicMock()
            mock_file.exists.return_value = True
            mock_path.return_value = mock_file
            mock_dotenv_values.return_value = {'QND_DENSE_LIMIT': '8'}

            result = read_config_parameter('qnd_dense_limit')

            self.assertEqual(result, '8')
            mock_path.assert_called_once_with('.env.local')
            mock_dotenv_values.assert_called_once_with(mock_file)

    @pytest.mark.timeout(30)
    def test_read_config_parameter_from_environment(self):
        """Test reading parameter from environment when .env.local doesn't exist"""
        with patch('qnd_app.config.Path') as mock_path, \
             patch('qnd_app.config.dotenv_values') as mock_dotenv_values, \
             patch.dict(os.environ, {'QND_SVD_MAX_N': '25'}, clear=True):

            mock_file = MagicMock()
            mock_file.exists.return_value = False
            mock_path.return_value = mock_file

            result = read_config_parameter('qnd_svd_max_n')

            self.assertEqual(result, '25')
            mock_dotenv_values.assert_not_called()

    @pytest.mark.timeout(30)
    def test_read_config_parameter_env_local_priority(self):
        """Test that .env.local takes priority over environment"""
        with patch('qnd_app.config.Path') as mock_path, \
             patch('qnd_app.config.dotenv_values') as mock_dotenv_values, \
             patch.dict(os.environ, {'QND_DENSE_LIMIT': '4'}, clear=True):

            mock_file = MagicMock()
            mock_file.exists.return_value = True
            mock_path.return_value = mock_file
            mock_dotenv_values.return_value = {'QND_DENSE_LIMIT': '9'}

            result = read_config_parameter('QND_DENSE_LIMIT')

            self.assertEqual(result, '9')

    @pytest.mark.timeout(30)
    def test_read_config_parameter_not_found(self):
        """Test when parameter is not found anywhere"""
        with patch('qnd_app.config.Path') as mock_path, \
             patch('qnd_app.config.dotenv_values') as mock_dotenv_values, \
             patch.dict(os.environ, {}, clear=True):

            mock_file = MagicMock()
            mock_file.exists.return_value = False
            mock_path.return_value = mock_file
            mock_dotenv_values.return_value = {}

            self.assertIsNone(read_config_parameter('nonexistent_param'))


class TestConfiguredLimits(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: dense_limit, svd_max_n, cache_dir"""

    @pytest.mark.timeout(30)
    @override_settings(QND_DENSE_LIMIT=12, QND_SVD_MAX_N=40)
    def test_limits_fall_back_to_settings(self):
        """Without overrides the Django settings apply"""
        with patch('qnd_app.config.read_config_parameter', return_value=None):
            self.assertEqual(dense_limit(), 12)
            self.assertEqual(svd_max_n(), 40)

    @pytest.mark.timeout(30)
    def test_limit_override_from_environment(self):
        """An integer override replaces the setting"""
        with patch('qnd_app.config.read_config_parameter', return_value='7'):
            self.assertEqual(dense_limit(), 7)

    @pytest.mark.timeout(30)
    def test_non_integer_limit_raises(self):
        """A malformed override is a configuration error"""
        with patch('qnd_app.config.read_config_parameter', return_value='many'):
            with self.assertRaises(ConfigurationError) as context:
                dense_limit()
            self.assertIn('QND_DENSE_LIMIT', str(context.exception))

    @pytest.mark.timeout(30)
    @override_settings(QND_CACHE_DIR=Path('/tmp/qnd-settings-cache'))
    def test_cache_dir_prefers_override(self):
        """QND_CACHE_DIR from the environment wins over settings"""
        with patch('qnd_app.config.read_config_parameter', return_value='/tmp/qnd-env-cache'):
            self.assertEqual(cache_dir(), Path('/tmp/qnd-env-cache'))
        with patch('qnd_app.config.read_config_parameter', return_value=None):
            self.assertEqual(cache_dir(), Path('/tmp/qnd-settings-cache'))


class TestRunConfig(SimpleTestCase):
    """Test kind: unit_tests. Original method FQN: RunConfig"""

    @pytest.mark.timeout(30)
    def test_tau_defaults_to_sharp_projection_time(self):
        """tau left unset resolves to pi/2N"""
        config = RunConfig(n=20)
        self.assertAlmostEqual(config.tau, math.pi / 40)

    @pytest.mark.timeout(30)
    def test_validate_rejects_bad_values(self):
        """Each invalid field raises ConfigurationError"""
        bad = [
            RunConfig(n=0),
            RunConfig(n=2, tau=-1.0),
            RunConfig(n=2, alpha=-0.5),
            RunConfig(n=2, output_format='xml'),
            RunConfig(n=2, threads=0),
            RunConfig(n=2, seed=-1),
        ]
        for config in bad:
            with self.assertRaises(ConfigurationError):
                config.validate()

    @pytest.mark.timeout(30)
    def test_header_order_and_content(self):
        """Header keys follow the fixed order and carry the seed"""
        with patch('qnd_app.config.tool_version', return_value='9.9.9'):
            header = RunConfig(n=5, alpha=3.0, seed=42).validate().header(7)
        self.assertEqual(list(header), ['figureId', 'N', 'alpha', 'tau', 'seed', 'toolVersion'])
        self.assertEqual(header['seed'], 42)
        self.assertEqual(header['figureId'], 7)
        self.assertEqual(header['toolVersion'], '9.9.9')
