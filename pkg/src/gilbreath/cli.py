"""Command-line front end.

Subcommands expose the verification pipeline, the brute-force oracle, the
record-gap predictor, log statistics and a gap scanner. Human-readable
results go to stdout as key=value lines or CSV; progress and diagnostics
go to stderr, so output stays pipeable. Exit codes are fixed so shell
pipelines can branch on failure modes:

    0 success          1 usage / bad input       2 overlap or window exhausted
    3 io error         4 oracle limit too large  5 sensitivity check failed
    6 malformed or empty result log
"""

import argparse
import sys
from decimal import Decimal, InvalidOperation

from . import pipeline, predictor, stats
from .errors import (
    GapTableError,
    GilbreathError,
    OverlapExhaustedError,
    RangeTooLargeError,
    ResultLogError,
    StepBudgetExhaustedError,
)
from .fmt import ratio_string
from .primes import primes_in_range
from .triangle import full_triangle_oracle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_OVERLAP = 2
EXIT_IO = 3
EXIT_ORACLE_LIMIT = 4
EXIT_SENSITIVITY = 5
EXIT_BAD_LOG = 6

ORACLE_LIMIT_CAP = 10 ** 9
DEFAULT_LOG_PATH = "gilbreath-log.csv"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the fixed taxonomy wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def integer(text):
    """Integer flag value; plain and scientific notation are equivalent."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(d)


def build_parser():
    parser = _Parser(prog="gilbreath", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(
        dest="command", required=True, metavar="command", parser_class=_Parser
    )

    p = sub.add_parser(
        "verify",
        help="blockwise verification of all primes up to a limit",
    )
    p.add_argument("--limit", type=integer, required=True, help="verify primes <= limit")
    p.add_argument("--slice-size", type=integer, default=pipeline.DEFAULT_BODY_COUNT,
                   help="primes per slice body (default %(default)s)")
    p.add_argument("--overlap", type=integer, default=pipeline.DEFAULT_OVERLAP_COUNT,
                   help="primes shared with the next slice (default %(default)s)")
    p.add_argument("--threads", type=integer, default=None,
                   help="worker processes (default: available cores)")
    p.add_argument("--out", default=DEFAULT_LOG_PATH,
                   help="result log path (default %(default)s)")
    p.add_argument("--resume", action="store_true",
                   help="skip slices already present in the log")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "oracle",
        help="brute-force whole-range triangle (small limits only)",
    )
    p.add_argument("--limit", type=integer, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser(
        "predict",
        help="anticipate G from record prime gaps",
    )
    p.add_argument("--prime", type=integer, help="lower prime of one record gap")
    p.add_argument("--gap", type=integer, help="the record gap size")
    p.add_argument("--gaps-file", help="file of 'gap prime [label]' lines")
    p.add_argument("--before", type=integer, default=predictor.DEFAULT_BEFORE,
                   help="window primes at or below the record (default %(default)s)")
    p.add_argument("--after", type=integer, default=predictor.DEFAULT_AFTER,
                   help="window primes above the record (default %(default)s)")
    p.add_argument("--no-sensitivity", action="store_true",
                   help="skip the doubled-window agreement check")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser(
        "stats",
        help="summarize a result log; optional histogram CSV and SVG chart",
    )
    p.add_argument("log", help="result log written by verify")
    p.add_argument("--hist-out", help="write an R histogram CSV here")
    p.add_argument("--svg", help="write an R histogram SVG chart here")
    p.add_argument("--bin-width", type=float, default=stats.DEFAULT_BIN_WIDTH,
                   help="histogram bin width (default %(default)s)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser(
        "scan-gaps",
        help="largest gap between consecutive primes in [lo, hi]",
    )
    p.add_argument("lo", type=integer)
    p.add_argument("hi", type=integer)
    p.set_defaults(func=cmd_scan_gaps)

    return parser


def cmd_verify(args):
    if args.limit < 3:
        print("verify: --limit must be at least 3", file=sys.stderr)
        return EXIT_USAGE

    def progress(res):
        print(f"slice {res.index} g={res.g} m={res.m}", file=sys.stderr)

    try:
        report = pipeline.run_verification(
            prime_limit=args.limit,
            body_count=args.slice_size,
            overlap_count=args.overlap,
            workers=args.threads,
            log_path=args.out,
            resume=args.resume,
            progress=progress,
        )
    except OverlapExhaustedError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_OVERLAP
    except ResultLogError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    pipeline.write_report(report)
    return EXIT_OK


def cmd_oracle(args):
    if args.limit < 3:
        print("oracle: --limit must be at least 3", file=sys.stderr)
        return EXIT_USAGE
    if args.limit > ORACLE_LIMIT_CAP:
        print(
            f"oracle: limit {args.limit} too large to materialize "
            f"(cap {ORACLE_LIMIT_CAP})",
            file=sys.stderr,
        )
        return EXIT_ORACLE_LIMIT
    block = primes_in_range(2, args.limit + 1)
    outcome = full_triangle_oracle(block, starts_at_two=True)
    print(f"g={outcome.g}")
    print(f"m={outcome.m}")
    print(f"r={ratio_string(outcome.g, outcome.m)}")
    return EXIT_OK


def _predict_records(args):
    if args.gaps_file:
        try:
            with open(args.gaps_file, "r", encoding="utf-8") as fh:
                return list(predictor.parse_gap_table(fh))
        except OSError as exc:
            raise _ExitWith(EXIT_IO, f"predict: {exc}")
        except GapTableError as exc:
            raise _ExitWith(EXIT_USAGE, f"predict: {exc}")
    if args.prime is None or args.gap is None:
        raise _ExitWith(
            EXIT_USAGE, "predict: need --gaps-file or both --prime and --gap"
        )
    return [predictor.GapRecord(gap=args.gap, lower_prime=args.prime)]


class _ExitWith(Exception):
    def __init__(self, code, message):
        self.code = code
        self.message = message


def _stepping_progress(done, total):
    print(f"collected {done}/{total} window primes", file=sys.stderr)


def cmd_predict(args):
    try:
        records = _predict_records(args)
    except _ExitWith as exc:
        print(exc.message, file=sys.stderr)
        return exc.code

    print(predictor.PREDICTION_CSV_HEADER)
    flagged = []
    for rec in records:
        progress = _stepping_progress if rec.lower_prime > 10 ** 16 else None
        try:
            pred = predictor.local_g_prime(
                rec, before=args.before, after=args.after, progress=progress,
                clamp_before=True,  # records near 2 get whatever exists below
            )
        except (ValueError, StepBudgetExhaustedError, RangeTooLargeError) as exc:
            print(f"predict: {rec.gap} after {rec.lower_prime}: {exc}", file=sys.stderr)
            return EXIT_OVERLAP if isinstance(exc, StepBudgetExhaustedError) else EXIT_USAGE
        print(pred.csv_line())
        sys.stdout.flush()
        if not args.no_sensitivity:
            doubled = predictor.local_g_prime(
                rec, before=2 * args.before, after=2 * args.after,
                progress=progress, clamp_before=True,
            )
            if doubled.g_prime != pred.g_prime:
                flagged.append(
                    f"sensitivity: {rec.gap} after {rec.lower_prime}: "
                    f"g'={pred.g_prime} but doubled window gives {doubled.g_prime}"
                )
    for line in flagged:
        print(line, file=sys.stderr)
    return EXIT_SENSITIVITY if flagged else EXIT_OK


def cmd_stats(args):
    try:
        results = pipeline.read_result_log(args.log)
    except OSError as exc:
        print(f"stats: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResultLogError as exc:
        print(f"stats: {exc}", file=sys.stderr)
        return EXIT_BAD_LOG
    if not results:
        print(f"stats: {args.log} holds no records", file=sys.stderr)
        return EXIT_BAD_LOG
    summary = stats.summarize(results)
    print(stats.format_summary(summary))
    range_width = max(r.last_prime for r in results)
    for warning in stats.corridor_warnings(summary, range_width=range_width):
        print(f"stats: warning: {warning}", file=sys.stderr)

    if args.hist_out or args.svg:
        rs = [r.r for r in results]
        lo = 0.5 if min(rs) >= 0.5 else None
        hist = stats.histogram(rs, args.bin_width, lo=lo)
        try:
            if args.hist_out:
                with open(args.hist_out, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(stats.histogram_csv(hist))
            if args.svg:
                stats.emit_svg(
                    hist, f"R distribution over {summary.count} slices", args.svg
                )
        except OSError as exc:
            print(f"stats: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def cmd_scan_gaps(args):
    try:
        gap, lower = stats.scan_max_gap(args.lo, args.hi)
    except (ValueError, RangeTooLargeError) as exc:
        print(f"scan-gaps: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"gap={gap}")
    print(f"lower_prime={lower}")
    return EXIT_OK


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GilbreathError as exc:  # anything not mapped above
        print(f"gilbreath: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
