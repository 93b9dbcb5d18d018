"""
Runtime configuration: env-file parameters and the per-run option bundle.
"""

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from dotenv import dotenv_values

from .exceptions import ConfigurationError


def read_config_parameter(param_name: str) -> str | None:
    """
    Read a configuration parameter from the .env.local file without mutating the current environment.
    The .env.local file wins over the process environment.
    Case-insensitive.
    """
    param_name = param_name.upper()
    file = Path(".env.local")
    env_map = dotenv_values(file) if file.exists() else {}
    value_from_env_local = env_map.get(param_name)
    value_from_env = os.getenv(param_name)
    return value_from_env_local or value_from_env or None


def _int_parameter(param_name: str, default: int) -> int:
    raw = read_config_parameter(param_name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{param_name} must be an integer, got {raw!r}") from exc


def cache_dir() -> Path:
    raw = read_config_parameter('QND_CACHE_DIR')
    return Path(raw) if raw else Path(settings.QND_CACHE_DIR)


def dense_limit() -> int:
    return _int_parameter('QND_DENSE_LIMIT', settings.QND_DENSE_LIMIT)


def svd_max_n() -> int:
    return _int_parameter('QND_SVD_MAX_N', settings.QND_SVD_MAX_N)


def tool_version() -> str:
    return settings.QND_TOOL_VERSION


@dataclass(frozen=True)
class RunConfig:
    """
    Options shared by the figure, verify and bench commands.

    `tau` left as None resolves to the sharp-projection time pi/(2N).
    """

    n: int
    alpha: float = 10.0
    tau: float | None = None
    seed: int = 0
    rounds: int = 10
    output_path: Path = field(default_factory=Path.cwd)
    output_format: str = "csv"
    threads: int = 1
    build_cache: bool = False
    finite_alpha: bool = False

    def __post_init__(self):
        if self.tau is None and self.n >= 1:
            object.__setattr__(self, "tau", math.pi / (2 * self.n))

    def validate(self) -> "RunConfig":
        if self.n < 1:
            raise ConfigurationError(f"N must be at least 1, got {self.n}")
        if self.tau is None or self.tau <= 0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if self.alpha < 0:
            raise ConfigurationError(f"alpha must be nonnegative, got {self.alpha}")
        if self.output_format not in ("csv", "json"):
            raise ConfigurationError(f"format must be csv or json, got {self.output_format!r}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.threads}")
        if self.rounds < 0:
            raise ConfigurationError(f"rounds must be nonnegative, got {self.rounds}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must fit in 64 bits, got {self.seed}")
        return self

    def header(self, figure_id) -> dict:
        """Ordered header block embedded in every output file."""
        return {
            "figureId": figure_id,
            "N": self.n,
            "alpha": self.alpha,
            "tau": self.tau,
            "seed": self.seed,
            "toolVersion": tool_version(),
        }
