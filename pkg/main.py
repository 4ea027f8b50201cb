#!/usr/bin/env python3
"""
Main entry point for gadgetlab.
Runs one experiment from a JSON config and writes a CSV table plus a JSON
summary; errors are reported as JSON on standard error.
"""
import argparse
import logging
import os
import sys

# Add the current directory to the path so we can import our modules
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from controllers.experiment_controller import ExperimentController
from models.experiment import ExperimentConfig
from storage.result_store import ResultStore
from utils.errors import ConfigError, GadgetLabError
from utils.settings import VERSION, Settings
from views.report_view import ReportView

logger = logging.getLogger("gadgetlab")


def build_parser():
    """
    Command-line parser: gadgetlab <kind> --config FILE [--out DIR] [--jobs N] [--seed S].
    """
    parser = argparse.ArgumentParser(
        prog="gadgetlab",
        description="Numerical experiments on Hamiltonian gadgets, Zeno gadgets and light-cone truncation.",
    )
    parser.add_argument("kind", choices=ExperimentConfig.KINDS, help="Experiment kind")
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", default=None, help="Output directory (overrides out_path)")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes for sweep points")
    parser.add_argument("--seed", type=int, default=None, help="Random seed (overrides seed)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More log output")
    parser.add_argument("--version", action="version", version=f"gadgetlab {VERSION}")
    return parser


def configure_logging(settings, verbose):
    level = settings.log_level
    if verbose == 1:
        level = "INFO"
    elif verbose >= 2:
        level = "DEBUG"
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv=None):
    """
    Run the command line.

    Args:
        argv: Argument list (defaults to sys.argv[1:])

    Returns:
        Exit status: 0 on success, 2 invalid input, 3 dimension cap, 4 numerical failure
    """
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env()
        configure_logging(settings, args.verbose)
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be at least 1, got {args.jobs}")

        controller = ExperimentController(settings)
        config = controller.load_config(args.config, args.kind, {"seed": args.seed, "out_path": args.out})
        out_path = config.out_path or os.path.join("results", config.kind)

        table, summary = controller.run(config, jobs=args.jobs)
        view = ReportView(controller.provenance(config))
        paths = ResultStore(out_path).write_run(config.kind, view.render_csv(table), view.render_summary(summary))
        for path in paths:
            logger.info("Output: %s", path)
        return 0

    except GadgetLabError as e:
        print(ReportView.render_error(e), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        error = GadgetLabError(f"Unexpected error: {str(e)}")
        print(ReportView.render_error(error), file=sys.stderr)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
