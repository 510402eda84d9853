"""Command line entry point: ``ksnr <experiment> [--config FILE] [--scale
desk|paper] [--seed N] [--out DIR]``."""

import argparse
import json
import logging
import sys

from ksnr.experiments import EXPERIMENTS, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksnr",
        description="Koopman spectrum regulation experiments")
    parser.add_argument("experiment", choices=EXPERIMENTS,
                        help="experiment to run")
    parser.add_argument("--config", default=None,
                        help="JSON file overriding the named defaults")
    parser.add_argument("--scale", choices=("desk", "paper"), default="desk",
                        help="desk halves sample/iteration counts (default)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None,
                        help="output directory (default runs/<experiment>-seed<N>)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = None
    if args.config:
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 2
    try:
        summary = run_experiment(args.experiment, overrides, args.scale,
                                 args.seed, args.out)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    metrics = summary.get("metrics", {k: v for k, v in summary.items()
                                      if isinstance(v, float)})
    for key in sorted(metrics):
        print(f"{key}: {metrics[key]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
