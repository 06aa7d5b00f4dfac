"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .config import ConfigError, WorkbenchConfig, parse_config
from .groups import Ball, validate_descriptor
from .cocycles import validate_cocycle
from .report import Report, emit_report
from .workbench import cmd_check_cartan, cmd_counterexample, cmd_reproduce, cmd_weyl

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG = 0, 1, 2


def _parse_element(text: str) -> tuple[tuple[int, ...], Fraction]:
    """"0,0,0,0,1" or "0,0,0,0,1@1/4" (coefficient as a circle angle)."""
    coords, _, angle = text.partition("@")
    return tuple(int(x) for x in coords.split(",")), Fraction(angle or "0")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="workbench config (JSON)")
    common.add_argument("--subgroup", help="subgroup name from the config")
    common.add_argument("--ball", type=int, help="ball radius")
    common.add_argument("--kmax", type=int, help="largest power tried when centralizing")
    common.add_argument("--samples", type=int, help="sample count for randomized checks")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--timings", action="store_true", help="include wall times")
    common.add_argument("--output", type=Path, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="cartan-workbench", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="validate group, cocycle and subgroups")
    sub.add_parser("check-cartan", parents=[common], help="check the Cartan hypotheses")
    w = sub.add_parser("weyl", parents=[common], help="Weyl action and cocycle tables")
    w.add_argument("--force", action="store_true", help="run even if prerequisites fail")
    ce = sub.add_parser("counterexample", parents=[common], help="commutant scan for a probe element")
    ce.add_argument(
        "--element",
        action="append",
        help='term of h as "a1,...,an[@angle]"; repeat for more terms',
    )
    sub.add_parser("reproduce", parents=[common], help="run all built-in scenarios")
    return p


def _load(args) -> WorkbenchConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    cfg = parse_config(text)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        cfg.samples = args.samples
    if args.kmax is not None:
        cfg.k_max = args.kmax
    if args.ball is not None:
        cfg.ball_radius = args.ball
    return cfg


def _validate(cfg: WorkbenchConfig) -> Report:
    B = Ball(cfg.ball_radius)
    report = Report("validate", meta={"ball": B.radius, "seed": cfg.seed})
    report.add(validate_descriptor(cfg.group, B, cfg.samples, cfg.seed))
    report.add(validate_cocycle(cfg.cocycle, cfg.group, B, 2 * cfg.samples, cfg.seed))
    return report


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            report, code = cmd_reproduce(
                k_max=args.kmax,
                seed=args.seed or 0,
                samples=args.samples or 200,
                progress=lambda m: print(f"[reproduce] {m}", file=sys.stderr),
            )
        else:
            cfg = _load(args)
            if args.command == "validate":
                report = _validate(cfg)
            elif args.command == "check-cartan":
                report = cmd_check_cartan(cfg, args.subgroup)
            elif args.command == "weyl":
                report = cmd_weyl(cfg, args.subgroup, force=args.force)
            else:
                terms = [_parse_element(e) for e in args.element] if args.element else None
                report = cmd_counterexample(cfg, args.subgroup, terms, ball=args.ball or 4)
            code = EXIT_OK if report.root_verdict == "pass" else EXIT_MISMATCH
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    data = emit_report(report, args.format, timings=args.timings)
    if args.output:
        args.output.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return code


if __name__ == "__main__":
    sys.exit(main())
