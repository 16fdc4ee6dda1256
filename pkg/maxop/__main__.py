"""Command line entry point for maxop.

Every subcommand writes its artifacts to ``--out-dir``. For example:

```sh
    python -m maxop maximal --kernel poisson --grid-n 512 \
        --function '{"type": "tent", "params": {"half_width": 1.0}}'
    python -m maxop verify --suite continuity --seed 7 --out-dir out/
```

Exit status is 0 when every selected check passes, 1 when a check fails and
2 for an invalid configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, List

from dotenv import load_dotenv

from .config import SUITES, build_config
from .errors import ConfigError, MaxopError


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", choices=["poisson", "heat", "fracpoisson"], default=None, help="Kernel family")
    p.add_argument("--alpha", type=float, default=None, help="Fractional order for fracpoisson, in [0.01, 0.99]")
    p.add_argument("--function", default=None, help="Function as inline JSON or a path to a JSON file")
    p.add_argument("--grid-n", type=int, default=None, help="Number of grid points (>= 16)")
    p.add_argument("--grid-span", type=float, default=None, help="Uniform grid on [-span, span] instead of the adaptive grid")
    p.add_argument("--tol", type=float, default=None, help="Certified absolute error per sample")
    p.add_argument("--delta", type=float, default=None, help="Detachment threshold (default 10*tol)")
    p.add_argument("--seed", type=int, default=None, help="Seed for the corpus and random sequences")
    p.add_argument("--out-dir", default=None, help="Output directory (default: maxop-out)")
    p.add_argument("--threads", type=int, default=None, help="Worker threads (MAXOP_THREADS caps this)")
    p.add_argument("--db-url", default=None, help="SQLAlchemy URL of the report ledger (optional)")
    p.add_argument("--config", default=None, help="JSON/YAML config file overriding flags")
    p.add_argument("--verbose", action="store_true", help="Enable verbose logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxop", description="Maximal function lab CLI")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="Tabulate a kernel profile")
    _common(p)
    p.add_argument("action", nargs="?", choices=["tabulate"], default="tabulate")
    p.add_argument("--span", dest="tabulate_span", type=float, default=None, help="Tabulate on [-span, span]")

    p = sub.add_parser("maximal", help="Sample u* on a grid")
    _common(p)

    p = sub.add_parser("verify", help="Run property suites over the seeded corpus")
    _common(p)
    p.add_argument("--suite", choices=SUITES, default=None)
    p.add_argument("--corpus-size", type=int, default=None)

    p = sub.add_parser("continuity", help="E_j table along u_j -> u")
    _common(p)
    p.add_argument("--mode", choices=["additive", "translate", "jitter"], default=None)
    p.add_argument("--indices", type=int, nargs="+", default=None)

    p = sub.add_parser("bruteforce", help="Dense-ladder oracle against maximal")
    _common(p)
    p.add_argument("--oracle-scales", type=int, default=None)
    p.add_argument("--corpus", dest="oracle_corpus", action="store_const", const=True, default=None, help="Check every corpus function on all three kernels")
    p.add_argument("--corpus-size", type=int, default=None)
    p.add_argument("--points", dest="oracle_points", type=int, default=None, help="Points per function in corpus mode")
    return parser


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    load_dotenv()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")

    flags: Dict[str, Any] = {k: v for k, v in vars(args).items() if k not in ("config", "action")}
    try:
        cfg = build_config(flags, args.config)
    except ConfigError as e:
        print(f"maxop: invalid configuration: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"maxop: invalid configuration: function: {e}", file=sys.stderr)
        return 2

    from .runner import run

    try:
        outcome = run(cfg)
    except ConfigError as e:
        print(f"maxop: invalid configuration: {e}", file=sys.stderr)
        return 2
    except MaxopError as e:
        print(f"maxop: {cfg.command} failed: {e}", file=sys.stderr)
        return 1

    print(f"{cfg.command}: wrote {len(outcome.files)} file(s) to {cfg.out_dir}")
    for path in outcome.failures:
        print(f"FAILED: {path}")
    return outcome.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
