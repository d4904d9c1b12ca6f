"""Prime generation and primality queries.

Two complementary engines live here:

* a segmented, odd-only sieve of Eratosthenes that can enumerate every
  prime in an arbitrary sub-range of [2, 10^16), streaming one segment at
  a time so memory stays bounded by the segment size;
* a deterministic Miller-Rabin test (fixed witness set, no probabilistic
  mode) answering point queries and neighbor-prime stepping for integers
  far beyond the sieve range.

All functions are pure after the one-time base-prime table build, so they
are safe to call concurrently from worker processes.
"""

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeTooLargeError

SIEVE_LIMIT = 10 ** 16
BASE_PRIME_LIMIT = 10 ** 8  # covers sqrt(SIEVE_LIMIT)

# Witness set proven deterministic for n < 3.317e24 (Sorenson & Webster),
# which comfortably covers the full 64-bit range this package targets.
MILLER_RABIN_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
MILLER_RABIN_VALID_BELOW = 3_317_044_064_679_887_385_961_981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)

# Odd numbers per segment. Small segments keep the flag buffer cache-resident
# but pay a fixed numpy dispatch cost per base prime per segment, which
# dominates once sqrt(hi) is large; the default therefore scales with the
# range being sieved (see _default_segment_odds).
MIN_SEGMENT_ODDS = 1 << 18
MAX_SEGMENT_ODDS = 1 << 24


@dataclass
class PrimeBlock:
    """All primes in [lo, hi), ascending, as an int64 array."""

    lo: int
    hi: int
    primes: np.ndarray = field(repr=False)

    def __len__(self):
        return int(self.primes.size)

    def __iter__(self):
        return iter(self.primes.tolist())


def simple_sieve(limit):
    """Primes <= limit via a dense sieve; used for base-prime tables."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


_base_cache_limit = 0
_base_cache = np.empty(0, dtype=np.int64)


def _base_primes(limit):
    """Odd base primes <= limit, cached and grown monotonically."""
    global _base_cache_limit, _base_cache
    if limit > BASE_PRIME_LIMIT:
        raise RangeTooLargeError(
            f"base primes above {BASE_PRIME_LIMIT} requested ({limit})"
        )
    if limit > _base_cache_limit:
        primes = simple_sieve(limit)
        _base_cache = primes[primes > 2]
        _base_cache_limit = limit
    cache = _base_cache
    if limit == _base_cache_limit:
        return cache
    return cache[: np.searchsorted(cache, limit, side="right")]


def _default_segment_odds(hi):
    return min(max(MIN_SEGMENT_ODDS, 32 * math.isqrt(hi)), MAX_SEGMENT_ODDS)


def _sieve_segment_flags(seg_lo, seg_hi, base, base_sq):
    """Flag array for odd numbers seg_lo, seg_lo+2, ... < seg_hi.

    seg_lo must be odd. Base primes with many hits in the segment are
    cleared with strided slice stores; the sparse tail (at most a few hits
    each) is cleared in vectorized batches to avoid per-prime dispatch cost.
    """
    n_odds = (seg_hi - seg_lo + 1) // 2
    flags = np.ones(n_odds, dtype=bool)

    # Only primes with p*p < seg_hi can have a composite to clear here.
    n_active = int(np.searchsorted(base_sq, seg_hi, side="left"))
    if n_active == 0:
        return flags
    active = base[:n_active]

    # First odd multiple of p that is >= seg_lo and >= p*p.
    start = ((seg_lo + active - 1) // active) * active
    start = np.maximum(start, base_sq[:n_active])
    start += np.where(start & 1, 0, active)

    span = seg_hi - seg_lo
    n_dense = int(np.searchsorted(active, span // 8, side="right"))

    for i in range(n_dense):
        p = int(active[i])
        s = int(start[i])
        if s < seg_hi:
            flags[(s - seg_lo) >> 1 :: p] = False

    pos = start[n_dense:]
    step = 2 * active[n_dense:]
    live = np.flatnonzero(pos < seg_hi)
    while live.size:
        hit = pos[live]
        flags[(hit - seg_lo) >> 1] = False
        pos[live] = hit + step[live]
        live = live[pos[live] < seg_hi]
    return flags


def iter_prime_arrays(lo, hi, segment_odds=None):
    """Yield ascending int64 arrays that together hold every prime in [lo, hi).

    Memory use is bounded by the segment size regardless of hi - lo.
    """
    if lo < 2 or lo >= hi:
        raise ValueError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > SIEVE_LIMIT:
        raise RangeTooLargeError(
            f"sieve supports hi <= {SIEVE_LIMIT}; use neighbor-prime queries instead"
        )
    if segment_odds is None:
        segment_odds = _default_segment_odds(hi)
    segment_odds = max(int(segment_odds), 1)

    base = _base_primes(math.isqrt(hi - 1))
    base_sq = base * base

    head = []
    if lo <= 2:
        head.append(2)
    cur = max(lo, 3)
    if cur % 2 == 0:
        cur += 1
    span = 2 * segment_odds
    while cur < hi:
        seg_hi = min(cur + span, hi)
        flags = _sieve_segment_flags(cur, seg_hi, base, base_sq)
        primes = cur + 2 * np.flatnonzero(flags).astype(np.int64)
        if head:
            primes = np.concatenate([np.array(head, dtype=np.int64), primes])
            head = []
        if primes.size:
            yield primes
        cur = seg_hi if seg_hi % 2 == 1 else seg_hi + 1
    if head:  # range was [2, 3): only the prime 2
        yield np.array(head, dtype=np.int64)


def primes_in_range(lo, hi, segment_odds=None):
    """Every prime in [lo, hi) as a PrimeBlock (fully materialized).

    For ranges whose output would not fit in memory, consume
    iter_prime_arrays directly instead.
    """
    chunks = list(iter_prime_arrays(lo, hi, segment_odds))
    if chunks:
        primes = np.concatenate(chunks)
    else:
        primes = np.empty(0, dtype=np.int64)
    return PrimeBlock(lo=lo, hi=hi, primes=primes)


def count_primes(lo, hi, segment_odds=None):
    """Number of primes in [lo, hi)."""
    return sum(int(a.size) for a in iter_prime_arrays(lo, hi, segment_odds))


def is_prime(n):
    """Deterministic primality test.

    Exact (never probabilistic) for every n below ~3.3e24, which covers the
    whole 64-bit range and the record-gap tables this package consumes.
    """
    if n < 0:
        raise ValueError("is_prime expects a nonnegative integer")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n >= MILLER_RABIN_VALID_BELOW:
        raise RangeTooLargeError(
            f"deterministic witness set only proven below {MILLER_RABIN_VALID_BELOW}"
        )
    d = n - 1
    r = (d & -d).bit_length() - 1  # largest power of two dividing n-1
    d >>= r
    for a in MILLER_RABIN_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n):
    """Smallest prime strictly greater than n."""
    if n < 2:
        return 2
    if n + 3 >= MILLER_RABIN_VALID_BELOW:
        raise OverflowError("next_prime beyond the deterministic test's range")
    c = n + 1 if n % 2 == 0 else n + 2
    while not is_prime(c):
        c += 2
    return c


def prev_prime(n):
    """Largest prime strictly smaller than n."""
    if n <= 2:
        raise ValueError("no prime below 2")
    if n == 3:
        return 2
    c = n - 1 if n % 2 == 0 else n - 2
    if c <= 2:
        return 2
    while not is_prime(c):
        c -= 2
        if c < 2:
            raise ValueError("no prime found below {}".format(n))
    return c


def _collect_before(p, count, allow_short=False):
    """The `count` primes <= p, ascending, p included."""
    out = [p]
    if p <= SIEVE_LIMIT:
        lo = p
        span = max(4096, int(count * (math.log(p) + 2) * 1.5))
        while len(out) < count and lo > 2:
            new_lo = max(2, lo - span)
            chunk = np.concatenate(
                list(iter_prime_arrays(new_lo, lo)) or [np.empty(0, np.int64)]
            )
            out = chunk.tolist() + out
            lo = new_lo
            span *= 2
    else:
        cur = p
        while len(out) < count and cur > 2:
            cur = prev_prime(cur)
            out.insert(0, cur)
    if len(out) < count and not allow_short:
        raise ValueError(f"only {len(out)} primes exist at or below {p}, need {count}")
    return out[-count:]


def _collect_after(p, count, progress=None):
    """The `count` primes > p, ascending."""
    out = []
    if p < SIEVE_LIMIT:
        lo = p + 1
        need = count
        while need > 0 and lo < SIEVE_LIMIT:
            span = max(4096, int(need * (math.log(lo) + 2) * 13 // 10))
            hi = min(lo + span, SIEVE_LIMIT)
            for arr in iter_prime_arrays(lo, hi):
                out.extend(arr.tolist())
                if progress is not None:
                    progress(min(len(out), count), count)
            need = count - len(out)
            lo = hi
    cur = out[-1] if out else p
    while len(out) < count:  # past the sieve limit: step one prime at a time
        cur = next_prime(cur)
        out.append(cur)
        if progress is not None and len(out) % 20000 == 0:
            progress(len(out), count)
    return out[:count]


def window_before_after(p, before, after, progress=None, clamp_before=False):
    """The `before` primes <= p followed by the `after` primes > p.

    p itself must be prime and counts toward `before`; with clamp_before,
    a window reaching below 2 is shortened instead of failing. Beyond the
    sieve limit this falls back to one-at-a-time neighbor stepping, which
    is correct but slow (minutes per million primes); pass a progress
    callback to surface that.
    """
    if before < 1 or after < 0:
        raise ValueError("need before >= 1 and after >= 0")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > SIEVE_LIMIT and progress is None:
        print(
            f"note: {p} is beyond the sieve range; stepping primes one by one",
            file=sys.stderr,
        )
    values = _collect_before(p, before, allow_short=clamp_before)
    if after:
        values.extend(_collect_after(p, after, progress=progress))
    # Record gaps near 10^19-10^20 exceed int64; uint64 still holds them.
    dtype = np.int64 if values[-1] < 2 ** 63 else np.uint64
    primes = np.array(values, dtype=dtype)
    return PrimeBlock(lo=int(values[0]), hi=int(values[-1]) + 1, primes=primes)
