import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gilbreath import primes
from gilbreath.errors import RangeTooLargeError
from tests.conftest import naive_primes


class TestPrimesInRange:
    def test_small_range_by_hand(self):
        assert primes.primes_in_range(10, 30).primes.tolist() == [11, 13, 17, 19, 23, 29]

    def test_leading_range(self):
        assert primes.primes_in_range(2, 32).primes.tolist() == [
            2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31,
        ]

    def test_empty_and_tiny(self):
        assert primes.primes_in_range(2, 3).primes.tolist() == [2]
        assert primes.primes_in_range(24, 29).primes.tolist() == []
        assert primes.primes_in_range(8, 10).primes.tolist() == []

    def test_matches_trial_division(self):
        assert primes.primes_in_range(1000, 3000).primes.tolist() == naive_primes(
            1000, 3000
        )

    @given(
        lo=st.integers(min_value=2, max_value=5000),
        width=st.integers(min_value=1, max_value=2000),
    )
    @settings(max_examples=40, deadline=None)
    def test_agrees_with_point_primality(self, lo, width):
        got = primes.primes_in_range(lo, lo + width).primes.tolist()
        assert got == [n for n in range(lo, lo + width) if primes.is_prime(n)]

    @pytest.mark.parametrize("segment_odds", [32, 1000, 1 << 14, 1 << 22])
    def test_segment_size_invariance(self, segment_odds, primes_to_1e5):
        got = primes.primes_in_range(2, 10 ** 5 + 1, segment_odds=segment_odds).primes
        assert np.array_equal(got, primes_to_1e5)

    def test_bad_ranges(self):
        with pytest.raises(ValueError):
            primes.primes_in_range(1, 10)
        with pytest.raises(ValueError):
            primes.primes_in_range(10, 10)
        with pytest.raises(RangeTooLargeError):
            primes.primes_in_range(2, 10 ** 16 + 1)

    def test_count_to_1e9_matches_published_pi(self):
        # Cross-checked two ways before freezing: the count matches the
        # published pi(1e9), and a sampled subrange agrees with the
        # deterministic point test (below).
        assert primes.count_primes(2, 10 ** 9) == 50_847_534

    def test_sampled_subrange_near_1e9_against_point_test(self):
        lo = 999_950_000
        got = primes.primes_in_range(lo, 10 ** 9).primes.tolist()
        assert got == [n for n in range(lo, 10 ** 9) if primes.is_prime(n)]
        assert got, "sample range unexpectedly empty"


class TestIsPrime:
    def test_record_prime(self):
        assert primes.is_prime(19581334192423)

    def test_small_cases(self):
        assert not primes.is_prime(0)
        assert not primes.is_prime(1)
        assert primes.is_prime(2)
        assert [n for n in range(60) if primes.is_prime(n)] == naive_primes(0, 60)

    def test_record_gap_interior_is_composite(self):
        # gap 766: nothing between the record prime and the next one
        p = 19581334192423
        assert all(not primes.is_prime(p + 2 * k) for k in range(1, 383))
        assert primes.is_prime(p + 766)

    def test_strong_pseudoprimes_rejected(self):
        # composites that fool small witness subsets
        for n in (3215031751, 3825123056546413051, 341550071728321, 561, 1373653):
            assert not primes.is_prime(n), n

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            primes.is_prime(-7)

    def test_beyond_witness_validity(self):
        with pytest.raises(RangeTooLargeError):
            primes.is_prime(primes.MILLER_RABIN_VALID_BELOW + 12)


class TestNeighbors:
    def test_record_gaps(self):
        assert primes.next_prime(19581334192423) == 19581334193189
        assert primes.next_prime(218209405436543) == 218209405437449
        assert primes.prev_prime(19581334193189) == 19581334192423

    def test_small(self):
        assert primes.next_prime(2) == 3
        assert primes.next_prime(0) == 2
        assert primes.prev_prime(3) == 2
        assert primes.prev_prime(30) == 29

    def test_prev_domain_error(self):
        with pytest.raises(ValueError):
            primes.prev_prime(2)

    @given(st.integers(min_value=3, max_value=10 ** 6))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_through_gap(self, n):
        p = primes.next_prime(n)
        assert primes.prev_prime(primes.next_prime(p)) == p

    @given(st.integers(min_value=3, max_value=10 ** 9))
    @settings(max_examples=40, deadline=None)
    def test_odd_prime_gaps_are_even(self, n):
        p = primes.next_prime(n)
        assert (primes.next_prime(p) - p) % 2 == 0


class TestWindowBeforeAfter:
    def test_around_13(self):
        w = primes.window_before_after(13, 2, 3)
        assert w.primes.tolist() == [11, 13, 17, 19, 23]

    def test_full_leading_row(self):
        w = primes.window_before_after(31, 11, 0)
        assert w.primes.tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]

    def test_record_pair(self):
        w = primes.window_before_after(19581334192423, 1, 1)
        assert w.primes.tolist() == [19581334192423, 19581334193189]

    def test_not_prime_rejected(self):
        with pytest.raises(ValueError):
            primes.window_before_after(15, 2, 2)

    def test_not_enough_below(self):
        with pytest.raises(ValueError):
            primes.window_before_after(13, 10, 1)
        w = primes.window_before_after(13, 10, 1, clamp_before=True)
        assert w.primes.tolist() == [2, 3, 5, 7, 11, 13, 17]

    def test_stepping_path_matches_sieve(self, monkeypatch):
        # force the beyond-sieve fallback and compare against the sieve
        want = primes.window_before_after(31397, 50, 120).primes
        monkeypatch.setattr(primes, "SIEVE_LIMIT", 10 ** 4)
        got = primes.window_before_after(31397, 50, 120, progress=lambda a, b: None)
        assert np.array_equal(got.primes, want)
