"""Command line entry point: run, sweep and validate scenario files."""

from __future__ import annotations

import argparse
import logging
import sys

import yaml

from . import config as config_mod
from .config import ConfigInvalid
from .runner import default_jobs, run_scenario, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _floats(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list:
    return [int(x) for x in text.split(",") if x.strip()]


def _words(text: str) -> list:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load(path: str):
    """A path on disk, or the name of a bundled scenario."""
    try:
        return config_mod.load(path)
    except FileNotFoundError:
        if path in config_mod.bundled_names():
            return config_mod.bundled(path)
        raise


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onsim", description="Opportunistic network simulator")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write its CSV reports")
    r.add_argument("config", help="scenario file or bundled scenario name")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default="out")
    r.add_argument("--positions", action="store_true", help="also write node positions")

    s = sub.add_parser("sweep", help="phase x level x protocol sweep with replications")
    s.add_argument("config")
    s.add_argument("--phases", type=_ints, default=[1, 2, 3, 4])
    s.add_argument("--levels", type=_floats, default=None, help="speeds in m/s, comma separated")
    s.add_argument("--protocols", type=_words, default=["reactive"])
    s.add_argument("--reps", type=int, default=None)
    s.add_argument("--seed", type=int, default=None, help="first replication seed")
    s.add_argument("--out", default="out")
    s.add_argument("--jobs", type=int, default=default_jobs())

    v = sub.add_parser("validate", help="check a scenario file and report field errors")
    v.add_argument("config")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args.config)
    except ConfigInvalid as e:
        for err in e.errors:
            print(f"{args.config}: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, yaml.YAMLError) as e:
        print(f"{args.config}: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"{args.config}: ok ({len(cfg.nodes)} nodes, {len(cfg.flows)} flows)")
        return EXIT_OK

    try:
        if args.command == "run":
            rep = run_scenario(cfg, args.seed, args.out, verbose=args.positions)
            for row in rep.rows:
                delay = "-" if row.mean_delay_s is None else f"{row.mean_delay_s:.4f} s"
                print(f"phase {row.phase}: power {row.total_power_mw:.1f} mW "
                      f"({row.reduction_pct:.1f}% below phase 1), delay {delay}, "
                      f"ONs {row.ons_formed}")
            for c in rep.comparison:
                print(f"{c['mode']}: mean latency {c['mean_latency_s']:.3f} s, "
                      f"power {c['total_power_mw']:.1f} mW")
        else:
            if args.seed is not None:
                cfg = cfg.with_overrides(seed=args.seed)
            res = sweep(cfg, args.phases, args.levels, args.protocols, args.reps,
                        jobs=max(1, args.jobs), out_dir=args.out)
            for c in res.cells:
                acc = c.acceptable(res.threshold_s)
                print(f"phase {c.phase} level {c.level:g} {c.protocol}: "
                      f"delay {c.mean_delay():.4f} s acceptable={acc}")
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:  # noqa: BLE001 - any crash maps to the runtime exit code
        logging.getLogger(__name__).exception("run failed")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
