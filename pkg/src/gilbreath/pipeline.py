"""Blockwise verification over overlapping slices of the prime sequence.

The prime sequence is cut into slices of body_count consecutive primes
plus overlap_count extra primes shared with the following slice. Each
slice's triangle is independent work, so slices run on a worker pool; the
overlap makes the blockwise results stitch into a global statement as long
as every slice terminates in fewer steps than the overlap provides.

The producer enumerates primes once, in ascending order, and resolves each
slice's boundary values; workers re-sieve their own sub-range from those
boundaries (cheap relative to the triangle work, and it keeps inter-process
traffic to a few integers per slice). Results are written to an
append-only CSV log in slice order, so logs are byte-identical for any
worker count, and an interrupted run can resume from the log.
"""

import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import primes as primes_mod
from .errors import OverlapExhaustedError, ResultLogError, StepBudgetExhaustedError
from .fmt import decimal_string, ratio_string
from .primes import iter_prime_arrays, next_prime, primes_in_range
from .triangle import gaps_from_primes, steps_to_terminal

DEFAULT_BODY_COUNT = 10_000_000
DEFAULT_OVERLAP_COUNT = 4_000
RECOMMENDED_MIN_OVERLAP = 3_000  # floor used by real runs; tests may go lower

LOG_HEADER = "index,first_prime,last_prime,prime_count,g,m,r"


@dataclass(frozen=True)
class SliceSpec:
    """A planned slice: which prime ordinals it owns and how far it reads."""

    index: int
    start_ordinal: int
    body_count: int
    overlap_count: int


@dataclass(frozen=True)
class SliceResult:
    """Outcome of one slice. first/last_prime and prime_count describe the
    body (the ordinals this slice owns); g and m are computed over the body
    plus overlap."""

    index: int
    first_prime: int
    last_prime: int
    prime_count: int
    g: int
    m: int
    r: float

    def csv_line(self):
        return (
            f"{self.index},{self.first_prime},{self.last_prime},"
            f"{self.prime_count},{self.g},{self.m},{ratio_string(self.g, self.m)}"
        )


@dataclass(frozen=True)
class VerificationReport:
    prime_limit: int
    slice_count: int
    g_global: int
    m_global: int
    argmax_prime: int
    mean_g: float
    mean_r: float
    stddev_r: float
    share_r_le_1: float


def plan_slices(total_primes, body_count, overlap_count):
    """Cut total_primes ordinals into ceil(total/body) slices.

    Slice i owns ordinals [i*body, (i+1)*body) and reads overlap_count
    extra primes past its body; the last slice is truncated at the end of
    the range.
    """
    if total_primes < 2:
        raise ValueError("need at least 2 primes to verify anything")
    if body_count < 2 or overlap_count < 1:
        raise ValueError("need body_count >= 2 and overlap_count >= 1")
    n = (total_primes + body_count - 1) // body_count
    return [
        SliceSpec(
            index=i,
            start_ordinal=i * body_count,
            body_count=body_count,
            overlap_count=overlap_count,
        )
        for i in range(n)
    ]


@dataclass(frozen=True)
class _SliceTask:
    """Resolved boundaries for one slice: everything a worker needs."""

    index: int
    first_value: int
    last_value: int  # last prime of body+overlap, inclusive
    window_count: int  # primes in [first_value, last_value]
    body_count: int  # primes this slice owns (<= nominal body_count)
    overlap_count: int
    leading: bool  # slice 0 starts at 2 and may carry the leading 1


def _stream_slice_tasks(prime_limit, body_count, overlap_count):
    """Enumerate primes <= prime_limit once; yield one resolved task per slice."""
    open_slices = {}  # index -> first prime value
    next_index = 0
    cum = 0
    for arr in iter_prime_arrays(2, prime_limit + 1):
        n = int(arr.size)
        # open every slice whose first ordinal lands in this segment
        while next_index * body_count < cum + n:
            open_slices[next_index] = int(arr[next_index * body_count - cum])
            next_index += 1
        # emit every open slice whose window ends inside this segment
        for idx in sorted(open_slices):
            end_ord = idx * body_count + body_count + overlap_count - 1
            if end_ord < cum + n:
                yield _SliceTask(
                    index=idx,
                    first_value=open_slices.pop(idx),
                    last_value=int(arr[end_ord - cum]),
                    window_count=body_count + overlap_count,
                    body_count=body_count,
                    overlap_count=overlap_count,
                    leading=idx == 0,
                )
        cum += n
    total = cum
    for idx in sorted(open_slices):  # slices truncated by the end of the range
        yield _SliceTask(
            index=idx,
            first_value=open_slices.pop(idx),
            last_value=None,
            window_count=total - idx * body_count,
            body_count=min(body_count, total - idx * body_count),
            overlap_count=overlap_count,
            leading=idx == 0,
        )


def process_slice(spec, primes):
    """Run the triangle on one slice's primes (body plus overlap).

    Slice 0 is the only one allowed the leading 1. Raises
    OverlapExhaustedError when the slice needs more steps than the overlap
    provides, which invalidates the whole run.
    """
    values = primes.primes if hasattr(primes, "primes") else np.asarray(primes)
    if values.size < 2:
        raise ValueError(
            f"slice {spec.index} holds fewer than 2 primes; "
            "use a smaller body_count or a larger limit"
        )
    row = gaps_from_primes(values, starts_at_two=spec.index == 0)
    try:
        outcome = steps_to_terminal(row, max_steps=spec.overlap_count)
    except StepBudgetExhaustedError as exc:
        raise OverlapExhaustedError(
            f"slice {spec.index} did not terminate within the overlap "
            f"({spec.overlap_count}); restart with a larger overlap",
            violations=[spec.index],
        ) from exc
    body = min(spec.body_count, int(values.size))
    return SliceResult(
        index=spec.index,
        first_prime=int(values[0]),
        last_prime=int(values[body - 1]),
        prime_count=body,
        g=outcome.g,
        m=outcome.m,
        r=float(ratio_string(outcome.g, outcome.m)),
    )


def _compute_slice(task, prime_limit):
    """Worker: sieve the slice's primes and run the triangle.

    Returns (SliceResult, lower prime of the slice's maximal gap).
    """
    hi = (task.last_value + 1) if task.last_value is not None else (prime_limit + 1)
    block = primes_in_range(task.first_value, hi)
    values = block.primes
    if values.size != task.window_count:
        raise RuntimeError(
            f"slice {task.index}: sieved {values.size} primes, "
            f"expected {task.window_count}"
        )
    spec = SliceSpec(
        index=task.index,
        start_ordinal=task.index * task.body_count,
        body_count=task.body_count,
        overlap_count=task.overlap_count,
    )
    result = process_slice(spec, block)
    gaps = np.diff(values)
    argmax_lower = int(values[int(np.argmax(gaps))])
    return result, argmax_lower


def read_result_log(path, tolerate_torn_tail=False):
    """Parse a slice-result log; raises ResultLogError with the offending
    line number on malformed content.

    With tolerate_torn_tail, a malformed *final* line is dropped instead:
    that is what a killed run leaves behind (records are flushed per line).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != LOG_HEADER:
        raise ResultLogError(f"{path}: missing or wrong header", line_number=1)
    content = [(ln, line) for ln, line in enumerate(lines[1:], start=2) if line != ""]
    results = []
    for pos, (ln, line) in enumerate(content):
        parts = line.split(",")
        try:
            if len(parts) != 7:
                raise ValueError(f"expected 7 fields, got {len(parts)}")
            results.append(
                SliceResult(
                    index=int(parts[0]),
                    first_prime=int(parts[1]),
                    last_prime=int(parts[2]),
                    prime_count=int(parts[3]),
                    g=int(parts[4]),
                    m=int(parts[5]),
                    r=float(parts[6]),
                )
            )
        except ValueError as exc:
            if tolerate_torn_tail and pos == len(content) - 1:
                break
            raise ResultLogError(f"{path}:{ln}: {exc}", line_number=ln) from exc
    return results


def _contiguous_prefix(results):
    """Longest prefix of results with indices 0, 1, 2, ... in order."""
    prefix = []
    seen = {r.index: r for r in results}
    i = 0
    while i in seen:
        prefix.append(seen[i])
        i += 1
    return prefix


def stitching_violations(results, overlap_count):
    """Reasons why a completed result list does not certify its range."""
    problems = []
    ordered = sorted(results, key=lambda r: r.index)
    for pos, res in enumerate(ordered):
        if res.index != pos:
            problems.append(f"slice index {pos} missing from results")
            return problems
    for res in ordered:
        if res.g >= overlap_count:
            problems.append(
                f"slice {res.index}: g={res.g} reaches the overlap "
                f"({overlap_count}); range not certified"
            )
    for a, b in zip(ordered, ordered[1:]):
        if next_prime(a.last_prime) != b.first_prime:
            problems.append(
                f"slices {a.index}/{b.index}: prime ranges do not abut "
                f"({a.last_prime} .. {b.first_prime})"
            )
    return problems


def validate_stitching(results, overlap_count):
    """True iff every slice's g stays below the overlap and consecutive
    slice bodies abut exactly."""
    return not stitching_violations(results, overlap_count)


def estimate_work(total_primes, mean_g):
    """Order-of-magnitude count of difference operations for a full run."""
    if total_primes < 0 or mean_g < 0:
        raise ValueError("inputs must be nonnegative")
    return int(total_primes * mean_g)


def _aggregate(prime_limit, results, argmax_lower_by_index, tasks_by_index):
    ordered = sorted(results, key=lambda r: r.index)
    g_global = max(r.g for r in ordered)
    m_global = max(r.m for r in ordered)
    champion = min(r.index for r in ordered if r.m == m_global)
    argmax_prime = argmax_lower_by_index.get(champion)
    if argmax_prime is None:
        # Slice was replayed from the log; rescan its window for the gap.
        from .stats import scan_max_gap

        task = tasks_by_index[champion]
        hi = task.last_value if task.last_value is not None else prime_limit
        _, argmax_prime = scan_max_gap(task.first_value, hi)
    rs = [r.r for r in ordered]
    gs = [r.g for r in ordered]
    n = len(ordered)
    mean_r = sum(rs) / n
    return VerificationReport(
        prime_limit=prime_limit,
        slice_count=n,
        g_global=g_global,
        m_global=m_global,
        argmax_prime=int(argmax_prime),
        mean_g=sum(gs) / n,
        mean_r=mean_r,
        stddev_r=math.sqrt(sum((x - mean_r) ** 2 for x in rs) / n),
        share_r_le_1=sum(1 for x in rs if x <= 1.0) / n,
    )


class _LogWriter:
    """Appends one line per record and flushes, so an interrupted run loses
    at most a torn final line (which resume trims)."""

    def __init__(self, path):
        self.fh = open(path, "a", encoding="utf-8", newline="") if path else None

    def write(self, line):
        if self.fh is not None:
            self.fh.write(line + "\n")
            self.fh.flush()

    def close(self):
        if self.fh is not None:
            self.fh.close()


def _prepare_log(log_path, resume):
    """Set up or trim the log; returns results replayed from a resume."""
    if log_path is None:
        return []
    if resume and os.path.exists(log_path):
        prefix = _contiguous_prefix(read_result_log(log_path, tolerate_torn_tail=True))
        # rewrite so a torn final line or out-of-order tail cannot linger
        with open(log_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(LOG_HEADER + "\n")
            for r in prefix:
                fh.write(r.csv_line() + "\n")
        return prefix
    with open(log_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(LOG_HEADER + "\n")
    return []


def default_worker_count():
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # non-Linux
        return max(1, os.cpu_count() or 1)


def run_verification(
    prime_limit,
    body_count=DEFAULT_BODY_COUNT,
    overlap_count=DEFAULT_OVERLAP_COUNT,
    workers=None,
    log_path=None,
    resume=False,
    progress=None,
):
    """Verify the range [2, prime_limit] blockwise and report G, M and the
    per-slice statistics.

    Streams primes once to resolve slice boundaries, fans slices out to
    `workers` processes (inline when workers == 1), appends one CSV record
    per slice to log_path in index order, and raises OverlapExhaustedError
    if any slice's step count reaches overlap_count. With resume=True,
    slices already present in the log are not recomputed; the final log and
    report are identical to an uninterrupted run's.
    """
    if prime_limit < 3:
        raise ValueError("prime_limit must be at least 3 (two primes)")
    if workers is None:
        workers = default_worker_count()

    replayed = {r.index: r for r in _prepare_log(log_path, resume)}
    # warm the base-prime cache before forking workers
    primes_mod._base_primes(min(math.isqrt(prime_limit), primes_mod.BASE_PRIME_LIMIT))

    results = {}
    argmax_lower = {}
    tasks = {}
    log = _LogWriter(log_path)
    next_to_write = 0

    def emit_ready():
        nonlocal next_to_write
        while next_to_write in results:
            if next_to_write not in replayed:
                log.write(results[next_to_write].csv_line())
            if progress is not None:
                progress(results[next_to_write])
            next_to_write += 1

    def check_replayed(task):
        prev = replayed[task.index]
        if prev.first_prime != task.first_value or prev.prime_count != task.body_count:
            raise ResultLogError(
                f"log does not match this run's slicing at slice {task.index}; "
                "resume requires the original limit, slice size and overlap"
            )

    try:
        if workers == 1:
            for task in _stream_slice_tasks(prime_limit, body_count, overlap_count):
                tasks[task.index] = task
                if task.index in replayed:
                    check_replayed(task)
                    results[task.index] = replayed[task.index]
                else:
                    res, arg = _compute_slice(task, prime_limit)
                    results[task.index] = res
                    argmax_lower[task.index] = arg
                emit_ready()
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {}
                try:
                    for task in _stream_slice_tasks(
                        prime_limit, body_count, overlap_count
                    ):
                        tasks[task.index] = task
                        if task.index in replayed:
                            check_replayed(task)
                            results[task.index] = replayed[task.index]
                        else:
                            futures[task.index] = pool.submit(
                                _compute_slice, task, prime_limit
                            )
                        for idx in sorted(futures):  # drain without blocking
                            if futures[idx].done():
                                res, arg = futures.pop(idx).result()
                                results[idx] = res
                                argmax_lower[idx] = arg
                            else:
                                break
                        emit_ready()
                    for idx in sorted(futures):
                        res, arg = futures[idx].result()
                        results[idx] = res
                        argmax_lower[idx] = arg
                        emit_ready()
                except Exception:
                    pool.shutdown(wait=False, cancel_futures=True)
                    raise
    finally:
        log.close()

    if not results:
        raise ValueError(f"no primes found up to {prime_limit}")
    ordered = [results[i] for i in range(len(results))]
    over = [r.index for r in ordered if r.g >= overlap_count]
    if over:
        raise OverlapExhaustedError(
            f"{len(over)} slice(s) reached the overlap budget "
            f"({overlap_count}): {over[:10]}; restart with a larger overlap",
            violations=over,
        )
    return _aggregate(prime_limit, ordered, argmax_lower, tasks)


def format_report(report):
    """Machine-readable key=value rendering of a report."""
    return "\n".join(
        [
            f"prime_limit={report.prime_limit}",
            f"slice_count={report.slice_count}",
            f"g_global={report.g_global}",
            f"m_global={report.m_global}",
            f"argmax_prime={report.argmax_prime}",
            f"mean_g={decimal_string(report.mean_g)}",
            f"mean_r={decimal_string(report.mean_r)}",
            f"stddev_r={decimal_string(report.stddev_r)}",
            f"share_r_le_1={decimal_string(report.share_r_le_1)}",
        ]
    )


def write_report(report, stream=None):
    (stream or sys.stdout).write(format_report(report) + "\n")
