"""``precis-cs`` command line.

Exit status: 0 on success, 1 when reconstruction (or a cross-check)
fails, 2 on usage errors, including parameters outside a bound's domain.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bounds, harness
from .decoder import decode_unknown_support
from .errors import DomainError, PrecisCSError, ReconstructionError, UsageError
from .numerics import EXTENDED, STANDARD
from .sensing import MeasurementVector

log = logging.getLogger("precis_cs")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _params(text):
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _dump(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_decode(args):
    mode = EXTENDED if args.extended else STANDARD
    try:
        with open(args.input) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read measurement file: {exc}") from exc
    y = MeasurementVector.from_json(raw, mode)
    bits = args.bits if args.bits is not None else y.bits
    try:
        res = decode_unknown_support(y, args.n, args.k, bits)
    except ReconstructionError as exc:
        _dump({"error": str(exc), "attempts": {str(t): r for t, r in exc.residuals.items()}})
        return EXIT_FAILURE
    _dump(res.to_json())
    return EXIT_OK


def cmd_sweep(args):
    mode = EXTENDED if args.extended else STANDARD
    result = harness.sweep_min_bits(
        [args.n], args.k, args.ell, args.trials, seed=args.seed,
        bits_min=args.bits_min, bits_max=args.bits_max, window=args.window,
        precision_mode=mode,
        progress=lambda c: log.info("n=%d k=%d ell=%d min_sufficient_bits=%s",
                                    c.n, c.k, c.ell, c.min_sufficient_bits),
    )
    harness.emit_report(result, args.format, args.out)
    _dump(result.summary())
    return EXIT_OK


def cmd_bounds(args):
    _dump(bounds.evaluate(args.name, args.params).to_json())
    return EXIT_OK


def cmd_oracle_check(args):
    report = harness.oracle_check(args.n, args.k, args.seed, args.trials)
    _dump(report)
    return EXIT_FAILURE if report["mismatches"] else EXIT_OK


def cmd_verify_bounds(args):
    pairs = [(n, k) for n in args.n for k in range(1, min(8, n // 2) + 1)]
    report = {
        "vandermonde": harness.vandermonde_condition_suite(pairs, args.samples, args.seed),
        "locator": harness.locator_bound_suite(range(4, 65), 4, args.samples, args.seed),
    }
    _dump(report)
    return EXIT_FAILURE if report["locator"]["rigorous_violations"] else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="precis-cs", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decode", help="decode a measurement JSON file")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--bits", type=int, help="quantization bits (default: from the file)")
    d.add_argument("--input", required=True)
    d.add_argument("--extended", action="store_true", help="113-bit arithmetic")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("sweep", help="success rate versus measurement bits")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=_int_list, required=True)
    s.add_argument("--ell", type=_int_list, required=True)
    s.add_argument("--bits-min", type=int)
    s.add_argument("--bits-max", type=int)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--window", type=int, default=harness.DEFAULT_WINDOW)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out", required=True)
    s.add_argument("--extended", action="store_true")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bounds", help="evaluate a closed-form bound")
    b.add_argument("--name", required=True, choices=bounds.BOUND_NAMES)
    b.add_argument("--params", type=_params, default={})
    b.set_defaults(func=cmd_bounds)

    o = sub.add_parser("oracle-check", help="compare the decoder with exhaustive search")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--trials", type=int, default=50)
    o.set_defaults(func=cmd_oracle_check)

    v = sub.add_parser("verify-bounds", help="empirical check of the conditioning and locator bounds")
    v.add_argument("--n", type=_int_list, default=[8, 16, 32, 64])
    v.add_argument("--samples", type=int, default=500)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify_bounds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"precis-cs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisCSError as exc:
        print(f"precis-cs: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
