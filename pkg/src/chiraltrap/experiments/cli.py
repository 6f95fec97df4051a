"""Command-line entry point: ``chiral-trap {simulate,preset,list-presets,validate}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, ExperimentConfig
from .presets import UnknownPresetError, get_preset, presets
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chiral-trap", description="Chiral atomic array transport experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a JSON experiment config")
    sim.add_argument("config")
    pre = sub.add_parser("preset", help="run a named preset")
    pre.add_argument("name")
    for sp_ in (sim, pre):
        sp_.add_argument("--out", help="output directory")
        sp_.add_argument("--seed", type=int, help="override the config seed")
        sp_.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")

    sub.add_parser("list-presets", help="print preset names and descriptions")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")
    return p


def _execute(cfg: ExperimentConfig, args) -> int:
    if args.seed is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    cfg.validate()
    records = run(cfg, args.out, threads=max(1, args.threads))
    failed = [r for r in records if r.status != "ok"]
    out = args.out or cfg.raw.get("output") or f"results/{cfg.name}"
    print(f"{cfg.name}: {len(records)} records, {len(failed)} failed, config {cfg.hash} -> {out}")
    for r in failed:
        print(f"  point {r.point} realization {r.realization}: {r.error}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "list-presets":
            for name, raw in presets().items():
                print(f"{name:8s} {raw.get('description', '')}")
            return EXIT_OK
        if args.command == "validate":
            cfg = ExperimentConfig.load(args.config)
            cfg.validate()
            print(f"{cfg.name}: ok, {len(cfg.points())} points, config {cfg.hash}")
            return EXIT_OK
        if args.command == "preset":
            return _execute(get_preset(args.name), args)
        return _execute(ExperimentConfig.load(args.config), args)
    except (ConfigError, UnknownPresetError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
