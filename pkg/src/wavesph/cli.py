"""Command line entry point: ``wavesph run|validate|sweep-chi``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .runner import run, sweep_chi


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", choices=["standing_wave", "wave_tank", "hydrostatic"])
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--chi", type=float, help="depth fraction of a wavelength to correct")
    common.add_argument("--mode", choices=["none", "full", "localized"])
    common.add_argument("--dp", type=float, help="particle spacing")
    common.add_argument("--threads", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="wavesph", description="SPH water-wave solver with localized gradient correction")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run a scenario")
    sub.add_parser("validate", parents=[common], help="check a configuration and print it")
    sweep = sub.add_parser("sweep-chi", parents=[common], help="damping ratio over a list of chi values")
    sweep.add_argument("--chis", default="0.15,0.3333333333333333,0.5,inf",
                       help="comma-separated chi values (default: %(default)s)")
    return p


def _load(args):
    text = args.config.read_text(encoding="utf-8") if args.config else ""
    return parse_config(text, scenario=args.scenario, out=args.out, chi=args.chi, mode=args.mode,
                        dp=args.dp, threads=args.threads)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep-chi" and args.mode is None and args.chi is None:
        # the sweep sets mode and chi per run; start from a valid base
        args.mode = "full"
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as exc:
        print(f"wavesph: {exc}", file=sys.stderr)
        return 1
    if args.command == "validate":
        sys.stdout.write(cfg.to_text())
        return 0
    if args.command == "run":
        result = run(cfg)
        if result.status:
            print(f"wavesph: {result.error}", file=sys.stderr)
        return result.status
    chis = [math.inf if c.strip().lower() == "inf" else float(c) for c in args.chis.split(",") if c.strip()]
    rows = sweep_chi(cfg, chis)
    for r in rows:
        print(f"chi={r['chi']} beta={r['beta']} ratio={r['damping_ratio']} mipps={r['mipps']:.4g}")
    return max(r["status"] for r in rows)


if __name__ == "__main__":
    raise SystemExit(main())
