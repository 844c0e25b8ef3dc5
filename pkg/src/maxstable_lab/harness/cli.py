"""``maxstable-lab <experiment_id> --config FILE [--seed S] [--out DIR]``.

Exit status: 0 when every gate passes, 2 when a gate fails, 1 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ParameterError
from .config import EXPERIMENTS, load_config

EXIT_OK, EXIT_USAGE, EXIT_GATE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="maxstable-lab", description="Run one verification experiment.")
    p.add_argument("experiment_id", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="flat key = value file")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--out", default=None, help="override output_dir")
    p.add_argument("--workers", type=int, default=None, help="worker processes")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.config, args.experiment_id,
            master_seed=args.seed, output_dir=args.out, workers=args.workers,
        )
    except (OSError, ParameterError) as exc:
        print(f"maxstable-lab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    from .experiments import run_experiment

    try:
        result = run_experiment(cfg)
    except OSError as exc:
        print(f"maxstable-lab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for report in result.reports:
        print(report.line())
    print(f"outputs in {result.files['report'].parent}")
    return EXIT_OK if result.all_passed else EXIT_GATE


if __name__ == "__main__":
    sys.exit(main())
