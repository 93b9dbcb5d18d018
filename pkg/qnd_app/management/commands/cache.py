import json
from pathlib import Path

from qnd_app import svd_cache
from qnd_app.exceptions import ConfigurationError
from qnd_app.joint_svd import compute_joint_svd
from qnd_app.management.base import QndCommand


class Command(QndCommand):
    help = "Build, inspect or clear cached joint SVDs."

    def add_arguments(self, parser):
        parser.add_argument("action", choices=["build", "inspect", "clear"])
        parser.add_argument("--n", type=int, default=None)
        parser.add_argument("--dir", type=Path, default=None, help="cache directory (default: QND_CACHE_DIR)")

    def run(self, **options):
        action, n, directory = options["action"], options["n"], options["dir"]
        if action != "clear" and n is None:
            raise ConfigurationError(f"cache {action} needs --n")
        if action == "build":
            path = svd_cache.save(compute_joint_svd(n), directory)
            self.stdout.write(str(path))
        elif action == "inspect":
            summary = svd_cache.inspect(svd_cache.load(n, directory))
            self.stdout.write(json.dumps(summary, indent=2))
        else:
            for path in svd_cache.clear(n, directory):
                self.stdout.write(f"removed {path}")
