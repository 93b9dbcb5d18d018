from pathlib import Path

from qnd_app import svd_cache
from qnd_app.benchmark import DEFAULT_SIZES, run_benchmark
from qnd_app.config import RunConfig
from qnd_app.exceptions import ConfigurationError
from qnd_app.management.base import QndCommand
from qnd_app.output import Table, write_panel


def _sizes(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"--sizes must be a comma-separated list of integers, got {raw!r}") from exc


class Command(QndCommand):
    help = "Time the exact and the fast engine on all-zero sequences (timings are not reproducible)."

    def add_arguments(self, parser):
        parser.add_argument("--sizes", default=",".join(str(n) for n in DEFAULT_SIZES))
        parser.add_argument("--rounds", "-L", type=int, default=100, dest="rounds")
        parser.add_argument("--repeat", type=int, default=5)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", type=Path, default=None)
        parser.add_argument("--build-cache", action="store_true", dest="build_cache")

    def run(self, **options):
        sizes = _sizes(options["sizes"])
        if not sizes:
            raise ConfigurationError("--sizes is empty")
        if options["repeat"] < 1:
            raise ConfigurationError("--repeat must be at least 1")
        config = RunConfig(
            n=max(sizes),
            seed=options["seed"],
            rounds=options["rounds"],
            output_path=options["out"] or Path.cwd(),
            build_cache=options["build_cache"],
        ).validate()

        def loader(n):
            return svd_cache.load_or_build(n, build=config.build_cache)

        rows = run_benchmark(sizes, config.rounds, loader, repetitions=options["repeat"], seed=config.seed)
        table = Table("bench", ["N", "L", "naive_ms", "fast_ms", "speedup"],
                      [(r.n, r.rounds, r.naive_ms, r.fast_ms, r.speedup) for r in rows])
        path = write_panel(config.output_path, "bench", config.header("bench"), table, "csv")
        self.stdout.write(str(path))
