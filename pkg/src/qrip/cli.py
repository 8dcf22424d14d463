"""Command line entry point: ``qrip <experiment> [options]``.

Exit status is 0 on success, 1 for configuration errors and 2 for runtime or
verification failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .exceptions import ConfigError, QripError, VerificationError
from .experiments import KINDS, build_config, read_config_file, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

log = logging.getLogger("qrip")

# flag name -> config field
_FLAGS = {
    "seed": "master_seed",
    "m": "m",
    "n": "n",
    "s": "s",
    "trials": "matrix_trials",
    "vectors_per_support": "vectors_per_support",
    "total_vectors": "total_vectors",
    "field": "field",
    "bins": "histogram_bins",
    "out": "out",
    "workers": "workers",
    "max_supports": "max_supports",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrip", description="Quaternion Gaussian matrix experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", metavar="PATH", help="flat key = value file; flags override it")
        p.add_argument("--seed", type=_u64, metavar="U64")
        p.add_argument("--m", type=int, metavar="N")
        p.add_argument("--n", type=int, metavar="N")
        p.add_argument("--s", type=int, metavar="N")
        p.add_argument("--trials", type=int, metavar="N", help="matrix realizations")
        p.add_argument("--vectors-per-support", type=int, metavar="N")
        p.add_argument("--total-vectors", type=int, metavar="N")
        p.add_argument("--field", choices=("real", "quaternion", "both"))
        p.add_argument("--bins", type=int, metavar="N", help="histogram bins")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--workers", type=int, metavar="N")
        p.add_argument("--max-supports", type=int, metavar="N")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors exit with EXIT_CONFIG, --help with 0
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = {field: getattr(args, flag) for flag, field in _FLAGS.items()}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.kind, file_values, overrides)
    except ConfigError as exc:
        print(f"qrip: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s into %s", cfg.kind, cfg.out)
    try:
        manifest = run_experiment(cfg)
    except ConfigError as exc:
        print(f"qrip: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (VerificationError, QripError, OSError) as exc:
        print(f"qrip: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps({"kind": cfg.kind, "out": cfg.out, "result": manifest["result"]}, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
