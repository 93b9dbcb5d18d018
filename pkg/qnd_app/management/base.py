"""
Shared plumbing for the simulator's management commands.
"""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ..exceptions import QndError

logger = logging.getLogger(__name__)


class QndCommand(BaseCommand):
    """Runs `run()` and turns simulator errors into CommandError (non-zero exit)."""

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except QndError as exc:
            logger.error("%s failed: %s", self.__class__.__module__.rsplit(".", 1)[-1], exc)
            raise CommandError(str(exc)) from exc

    def run(self, **options):
        raise NotImplementedError

    @staticmethod
    def add_run_arguments(parser, rounds_default: int = 10):
        parser.add_argument("--n", type=int, help="atoms per ensemble")
        parser.add_argument("--alpha", type=float, help="coherent-light amplitude")
        parser.add_argument("--tau", type=float, help="interaction time (default pi/2N)")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--rounds", "-L", type=int, default=rounds_default, dest="rounds")
        parser.add_argument("--out", type=Path, default=None, help="output directory (default: cwd)")
        parser.add_argument("--format", choices=["csv", "json"], default="csv", dest="output_format")
        parser.add_argument("--threads", type=int, default=1)
        parser.add_argument("--build-cache", action="store_true", dest="build_cache")
