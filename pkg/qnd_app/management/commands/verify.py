import json
from pathlib import Path

from django.core.management.base import CommandError

from qnd_app.management.base import QndCommand
from qnd_app.verification import SUITES, run_suite


class Command(QndCommand):
    help = "Run a verification suite and report the worst residual of every check."

    def add_arguments(self, parser):
        parser.add_argument("suite", choices=[*SUITES, "all"])
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--json", action="store_true", help="write verify-<suite>.json to --out")
        parser.add_argument("--out", type=Path, default=None)

    def run(self, **options):
        suite = options["suite"]
        results = run_suite(suite, seed=options["seed"])
        if options["json"]:
            directory = options["out"] or Path.cwd()
            directory.mkdir(parents=True, exist_ok=True)
            path = directory / f"verify-{suite}.json"
            path.write_text(json.dumps([r.as_dict() for r in results], indent=2) + "\n", encoding="utf-8")
            self.stdout.write(str(path))
        else:
            for result in results:
                status = "PASS" if result.passed else "FAIL"
                self.stdout.write(
                    f"{status}  {result.check:<40} N={result.n_range:<10} "
                    f"residual={result.max_residual:.3e} threshold={result.threshold:.0e}"
                )
        failed = [r.check for r in results if not r.passed]
        if failed:
            raise CommandError(f"{len(failed)} check(s) failed: {', '.join(failed)}")
