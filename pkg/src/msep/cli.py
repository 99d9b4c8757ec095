"""Command-line entry point.

Examples:
    msep --config plan.yaml --series year.csv --mode dwdcg --out-dir results
    msep --synthetic 7:small --mode direct --out-dir demo
    msep --config plan.yaml --series year.csv --sweep-cer 0,0.25,0.5,0.75,1.0
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from msep import runner
from msep.synthetic import PROFILES, generate_synthetic


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msep",
        description="Multi-stage expansion planning for a thermal-supported "
                    "renewable base with battery, hydrogen and ammonia storage.",
    )
    parser.add_argument("--config", metavar="FILE",
                        help="planning config (YAML)")
    parser.add_argument("--series", metavar="FILE",
                        help="time series CSV with columns t,wind_pu,solar_pu,uhvdc_mw")
    parser.add_argument("--mode", choices=("direct", "dwdcg"), default="dwdcg",
                        help="solve the assembled model directly, or by "
                             "column generation (default: %(default)s)")
    parser.add_argument("--epsilon", type=float, default=None, metavar="EPS",
                        help="relative convergence gap for dwdcg mode "
                             "(default: config value)")
    parser.add_argument("--max-iters", type=int, default=None, metavar="K",
                        help="iteration budget for dwdcg mode (default: config value)")
    parser.add_argument("--threads", type=int, default=None, metavar="T",
                        help="parallel pricing solves in dwdcg mode "
                             "(default: MSEP_THREADS or 1)")
    parser.add_argument("--out-dir", default="msep-out", metavar="DIR",
                        help="artifact directory (default: %(default)s)")
    parser.add_argument("--sweep-cer", default=None, metavar="V1,V2,...",
                        help="comma-separated final-stage carbon reduction targets; "
                             "solves one plan per target and writes sweep.csv")
    parser.add_argument("--synthetic", default=None, metavar="SEED:PROFILE",
                        help="generate a synthetic instance instead of reading "
                             f"--config/--series; profiles: {', '.join(sorted(PROFILES))}")
    parser.add_argument("--paper-literal", action="store_true",
                        help="use the published variants of the documented "
                             "modeling choices (absolute synthesis transients, "
                             "undiscounted degradation, hydrogen-credited ammonia)")
    return parser


def _threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("MSEP_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"error: MSEP_THREADS={env!r} is not an integer", file=sys.stderr)
            raise SystemExit(runner.EXIT_INPUT)
    return 1


def _parse_synthetic(spec: str) -> tuple[int, str]:
    seed_text, sep, profile = spec.partition(":")
    if not sep or profile not in PROFILES:
        raise runner.RunError(
            runner.EXIT_INPUT,
            f"--synthetic expects SEED:PROFILE with profile in "
            f"{sorted(PROFILES)}, got {spec!r}")
    try:
        seed = int(seed_text)
    except ValueError:
        raise runner.RunError(runner.EXIT_INPUT,
                              f"--synthetic seed must be an integer, got {seed_text!r}")
    return seed, profile


def _parse_targets(spec: str) -> list[float]:
    try:
        targets = [float(part) for part in spec.split(",") if part.strip() != ""]
    except ValueError:
        raise runner.RunError(runner.EXIT_INPUT,
                              f"--sweep-cer expects comma-separated numbers, got {spec!r}")
    if not targets:
        raise runner.RunError(runner.EXIT_INPUT, "--sweep-cer list is empty")
    for t in targets:
        if not 0.0 <= t <= 1.0:
            raise runner.RunError(runner.EXIT_INPUT,
                                  f"carbon reduction target {t} outside [0, 1]")
    return targets


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = runner.RunSettings(
        mode=args.mode,
        epsilon=args.epsilon,
        max_iterations=args.max_iters,
        threads=_threads(args.threads),
        out_dir=Path(args.out_dir),
        paper_literal=args.paper_literal,
    )
    try:
        if args.synthetic is not None:
            if args.config or args.series:
                raise runner.RunError(
                    runner.EXIT_INPUT,
                    "--synthetic replaces --config/--series; pass one or the other")
            seed, profile = _parse_synthetic(args.synthetic)
            settings.seed = seed
            config_path, series_path = generate_synthetic(seed, profile,
                                                          settings.out_dir)
        else:
            if not args.config or not args.series:
                raise runner.RunError(runner.EXIT_INPUT,
                                      "--config and --series are both required "
                                      "unless --synthetic is given")
            config_path, series_path = Path(args.config), Path(args.series)

        if args.sweep_cer is not None:
            targets = _parse_targets(args.sweep_cer)
            return runner.sweep_cer(config_path, series_path, targets, settings)
        return runner.run(config_path, series_path, settings)
    except runner.RunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
