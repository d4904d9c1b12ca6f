"""Predict the step count of a huge range from a known record prime gap.

The step count of a range is governed by its largest prime gap: G/M stays
near 0.83 across slices, so computing the triangle on a modest window
around the first occurrence of the largest gap below some bound
anticipates the G of the whole range without touching the other primes.
The 766 gap after 19581334192423 gives 693 this way, the ratio 0.9046.

Windows default to 4000 primes before the record and 2,000,000 after.
Differences propagate leftward one position per step, so `before` only
needs to exceed the expected step count and `after` to dwarf it; a
doubling agreement check (window_sensitivity_check) backs that up
empirically before a prediction is trusted.
"""

import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import primes as primes_mod
from .errors import GapTableError, StepBudgetExhaustedError
from .fmt import ratio_string
from .primes import is_prime, window_before_after
from .triangle import ROW_VALUE_LIMIT, gaps_from_primes, steps_to_terminal

DEFAULT_BEFORE = 4_000
DEFAULT_AFTER = 2_000_000


@dataclass(frozen=True)
class GapRecord:
    """A first-occurrence record gap: `gap` first appears after lower_prime."""

    gap: int
    lower_prime: int
    label: Optional[str] = None


@dataclass(frozen=True)
class PredictionRecord:
    record: GapRecord
    g_prime: int
    ratio: float  # g_prime / gap, stored at printing precision
    window_before: int
    window_after: int

    def csv_line(self):
        return (
            f"{self.record.label or ''},{self.record.gap},{self.record.lower_prime},"
            f"{self.g_prime},{ratio_string(self.g_prime, self.record.gap)},"
            f"{self.window_before},{self.window_after}"
        )


PREDICTION_CSV_HEADER = "label,gap,lower_prime,g_prime,ratio,window_before,window_after"


@dataclass(frozen=True)
class GapTable:
    records: tuple

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def parse_gap_table(stream, warn=None):
    """Read `gap prime [label]` lines into a GapTable, ascending by prime.

    Lines starting with # are comments. The degenerate record "1 2" (the
    odd gap from 2 to 3 that heads real first-occurrence lists) is skipped
    with a warning; any other odd or out-of-range gap is an error.
    """
    if warn is None:
        warn = lambda msg: print(msg, file=sys.stderr)
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [line.rstrip("\n") for line in stream]
    records = []
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GapTableError(
                f"line {ln}: expected 'gap prime [label]', got {len(parts)} fields",
                line_number=ln,
            )
        try:
            gap, prime = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GapTableError(f"line {ln}: {exc}", line_number=ln) from exc
        label = parts[2] if len(parts) == 3 else None
        if gap == 1 and prime == 2:
            warn(f"line {ln}: skipping the degenerate gap 1 after 2")
            continue
        if gap % 2 != 0:
            raise GapTableError(f"line {ln}: odd gap {gap}", line_number=ln)
        if not 2 <= gap < ROW_VALUE_LIMIT:
            raise GapTableError(
                f"line {ln}: gap {gap} outside [2, {ROW_VALUE_LIMIT})", line_number=ln
            )
        if prime < 2:
            raise GapTableError(f"line {ln}: bad prime {prime}", line_number=ln)
        records.append(GapRecord(gap=gap, lower_prime=prime, label=label))
    records.sort(key=lambda r: r.lower_prime)
    for a, b in zip(records, records[1:]):
        if a.lower_prime == b.lower_prime:
            raise GapTableError(f"duplicate record prime {a.lower_prime}")
    return GapTable(records=tuple(records))


def local_g_prime(record, before=DEFAULT_BEFORE, after=DEFAULT_AFTER, progress=None,
                  clamp_before=False):
    """Steps to terminal for a window around one record gap.

    Validates that the gap really is where the table says (the next prime
    after lower_prime must be exactly gap away), then iterates the window's
    difference triangle. Records beyond the sieve range fall back to
    neighbor-prime stepping and are slow; a progress callback is accepted.
    """
    if not is_prime(record.lower_prime):
        raise ValueError(f"record prime {record.lower_prime} is not prime")
    if record.lower_prime > primes_mod.SIEVE_LIMIT and progress is None:
        print(
            f"note: {record.lower_prime} exceeds the sieve range; "
            f"collecting {after} primes by stepping (expect minutes to hours)",
            file=sys.stderr,
        )
    window = window_before_after(
        record.lower_prime, before, after, progress=progress,
        clamp_before=clamp_before,
    )
    values = window.primes
    pos = int(np.searchsorted(values, record.lower_prime))
    actual = int(values[pos + 1]) - int(values[pos])
    if actual != record.gap:
        raise ValueError(
            f"table claims gap {record.gap} after {record.lower_prime}, "
            f"but the next prime is {actual} away"
        )
    # A window that reaches down to 2 is the leading range itself.
    starts_at_two = int(values[0]) == 2
    row = gaps_from_primes(window, starts_at_two=starts_at_two)
    outcome = steps_to_terminal(row, max_steps=len(row))
    after_count = int(values.size) - pos - 1
    # The record influences positions up to g steps to its left, and their
    # step-g values read gaps up to g positions to its right. A terminal
    # depth that reaches either margin means the window cropped the very
    # phenomenon being measured; only a roomy window is trustworthy (and
    # window_sensitivity_check confirms the room was enough).
    if outcome.g >= after_count:
        raise StepBudgetExhaustedError(
            f"terminal depth {outcome.g} reaches the window's after side "
            f"({after_count}); enlarge it",
            steps_tried=outcome.g,
        )
    if outcome.g >= pos + 1:
        raise StepBudgetExhaustedError(
            f"terminal depth {outcome.g} reaches the window's before side "
            f"({pos + 1}); enlarge it",
            steps_tried=outcome.g,
        )
    return PredictionRecord(
        record=record,
        g_prime=outcome.g,
        ratio=float(ratio_string(outcome.g, record.gap)),
        window_before=pos + 1,
        window_after=int(values.size) - pos - 1,
    )


def window_sensitivity_check(record, before=DEFAULT_BEFORE, after=DEFAULT_AFTER):
    """True iff doubling the window leaves g' unchanged.

    The doubled window is allowed to saturate at the bottom of the prime
    sequence for records close to 2.
    """
    base = local_g_prime(record, before, after)
    doubled = local_g_prime(record, 2 * before, 2 * after, clamp_before=True)
    return base.g_prime == doubled.g_prime


def predict_table(table, labels=None, before=DEFAULT_BEFORE, after=DEFAULT_AFTER,
                  progress=None):
    """One prediction per selected record, in table order.

    labels=None selects every record; otherwise only records whose label is
    in the given collection.
    """
    selected = [
        rec for rec in table if labels is None or (rec.label and rec.label in labels)
    ]
    return [
        local_g_prime(rec, before=before, after=after, progress=progress)
        for rec in selected
    ]
