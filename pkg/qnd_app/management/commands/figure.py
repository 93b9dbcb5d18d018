from pathlib import Path

from qnd_app import svd_cache
from qnd_app.config import RunConfig
from qnd_app.figures import FIGURE_DEFAULTS, FIGURES, build_figure
from qnd_app.management.base import QndCommand
from qnd_app.output import write_panel


class Command(QndCommand):
    help = "Write the data behind one figure, one file per panel."

    def add_arguments(self, parser):
        parser.add_argument("figure_id", type=int, choices=sorted(FIGURES))
        self.add_run_arguments(parser)
        parser.add_argument("--finite-alpha", action="store_true", dest="finite_alpha",
                            help="figure 7: sample photon counts instead of ideal projections")
        parser.add_argument("--panel", action="append", default=None, help="only write these panels")

    def run(self, **options):
        figure_id = options["figure_id"]
        defaults = FIGURE_DEFAULTS[figure_id]
        config = RunConfig(
            n=options["n"] if options["n"] is not None else defaults["n"],
            alpha=options["alpha"] if options["alpha"] is not None else defaults.get("alpha", 10.0),
            tau=options["tau"],
            seed=options["seed"],
            rounds=options["rounds"],
            output_path=options["out"] or Path.cwd(),
            output_format=options["output_format"],
            threads=options["threads"],
            build_cache=options["build_cache"],
            finite_alpha=options["finite_alpha"],
        ).validate()

        def loader(n):
            return svd_cache.load_or_build(n, build=config.build_cache)

        wanted = set(options["panel"] or [])
        for panel in build_figure(figure_id, config, loader):
            if wanted and panel.key not in wanted:
                continue
            path = write_panel(config.output_path, f"fig{figure_id}{panel.key}",
                               panel.header(config, figure_id), panel.data, config.output_format)
            self.stdout.write(str(path))
