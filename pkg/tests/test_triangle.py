import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gilbreath import triangle
from gilbreath.errors import (
    GapOverflowError,
    RowExhaustedError,
    StepBudgetExhaustedError,
)
from gilbreath.primes import primes_in_range
from gilbreath.triangle import (
    GapRow,
    abs_diff_step,
    full_triangle_oracle,
    gaps_from_primes,
    is_terminal,
    row_max,
    steps_to_terminal,
)

LEADING_ROW = [1, 2, 2, 4, 2, 4, 2, 4, 6, 2]


def row(values, leading=False):
    return GapRow(values=np.array(values, dtype=np.int16), leading_one_allowed=leading)


class TestGapsFromPrimes:
    def test_leading_row(self):
        primes = primes_in_range(2, 32)
        got = gaps_from_primes(primes, starts_at_two=True)
        assert got.values.tolist() == LEADING_ROW
        assert got.leading_one_allowed

    def test_single_gap(self):
        assert gaps_from_primes(np.array([11, 13])).values.tolist() == [2]

    def test_record_gap(self):
        got = gaps_from_primes(np.array([19581334192423, 19581334193189]))
        assert got.values.tolist() == [766]

    def test_gap_overflow(self):
        with pytest.raises(GapOverflowError):
            gaps_from_primes(np.array([3, 3 + 32768]))
        # largest representable gap is fine
        assert gaps_from_primes(np.array([3, 3 + 32766])).values.tolist() == [32766]

    def test_too_short(self):
        with pytest.raises(ValueError):
            gaps_from_primes(np.array([7]))


class TestAbsDiffStep:
    def test_triangle_rows(self):
        r2 = abs_diff_step(row(LEADING_ROW, leading=True))
        assert r2.values.tolist() == [1, 0, 2, 2, 2, 2, 2, 2, 4]
        r3 = abs_diff_step(r2)
        assert r3.values.tolist() == [1, 2, 0, 0, 0, 0, 0, 2]
        assert r3.leading_one_allowed

    def test_constant_row(self):
        assert abs_diff_step(row([5, 5, 5])).values.tolist() == [0, 0]

    def test_exhausted(self):
        with pytest.raises(RowExhaustedError):
            abs_diff_step(row([4]))

    @given(st.lists(st.integers(min_value=0, max_value=32767), min_size=2, max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_shrinks_by_one_and_matches_definition(self, values):
        out = abs_diff_step(row(values))
        assert len(out) == len(values) - 1
        assert out.values.tolist() == [abs(b - a) for a, b in zip(values, values[1:])]

    @given(st.lists(st.sampled_from([0, 2]), min_size=2, max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_closure_on_zero_two(self, values):
        out = abs_diff_step(row(values))
        assert set(out.values.tolist()) <= {0, 2}

    @given(st.lists(st.sampled_from([0, 2]), min_size=1, max_size=100))
    @settings(max_examples=100, deadline=None)
    def test_terminal_rows_stay_terminal(self, tail):
        plain = row(tail)
        if len(tail) >= 2:
            assert is_terminal(abs_diff_step(plain))
        led = row([1] + tail, leading=True)
        assert is_terminal(led)
        assert is_terminal(abs_diff_step(led))


class TestIsTerminal:
    def test_leading_terminal(self):
        assert is_terminal(row([1, 2, 0, 0, 0, 0, 0, 2], leading=True))

    def test_leading_with_a_four_is_not(self):
        assert not is_terminal(row([1, 0, 2, 2, 2, 2, 2, 2, 4], leading=True))

    def test_plain_terminal(self):
        assert is_terminal(row([0, 2, 2, 0]))
        assert not is_terminal(row([0, 2, 1, 0]))
        # a leading 1 is only allowed when flagged
        assert not is_terminal(row([1, 0, 2]))

    def test_leading_requires_the_one(self):
        assert not is_terminal(row([0, 2, 2], leading=True))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            is_terminal(row([]))


class TestRowMax:
    def test_examples(self):
        assert row_max(row(LEADING_ROW)) == 6
        assert row_max(row([766])) == 766
        assert row_max(row([0])) == 0


class TestStepsToTerminal:
    def test_abstract_triangle(self):
        out = steps_to_terminal(row(LEADING_ROW, leading=True), max_steps=9)
        assert out.g == 3
        assert out.m == 6
        assert out.r * 6 == 3
        assert out.terminal_row_prefix == (1, 2, 0, 0, 0, 0, 0, 2)

    def test_already_terminal(self):
        out = steps_to_terminal(row([2, 2]), max_steps=5)
        assert out.g == 1 and out.m == 2

    def test_budget_exhausted(self):
        with pytest.raises(StepBudgetExhaustedError):
            steps_to_terminal(row([1, 5, 17, 3, 9, 27]), max_steps=2)

    def test_width_exhausted(self):
        # row that shrinks away before any terminal form
        with pytest.raises(StepBudgetExhaustedError):
            steps_to_terminal(row([9, 1, 7]), max_steps=100)

    def test_input_not_mutated(self):
        r = row(LEADING_ROW, leading=True)
        steps_to_terminal(r, max_steps=9)
        assert r.values.tolist() == LEADING_ROW


class TestOracleEquivalence:
    def test_abstract_triangle(self):
        out = full_triangle_oracle(primes_in_range(2, 32), starts_at_two=True)
        assert (out.g, out.m) == (3, 6)

    def test_tiny(self):
        out = full_triangle_oracle(np.array([3, 5, 7]))
        assert (out.g, out.m) == (1, 2)

    def test_kernel_equals_oracle_to_1e5(self, primes_to_1e5):
        r = gaps_from_primes(primes_to_1e5, starts_at_two=True)
        fast = steps_to_terminal(r, max_steps=10 ** 4)
        slow = full_triangle_oracle(primes_to_1e5, starts_at_two=True)
        assert (fast.g, fast.m) == (slow.g, slow.m) == (65, 72)

    @given(
        start=st.integers(min_value=0, max_value=9000),
        count=st.integers(min_value=2, max_value=400),
        leading=st.booleans(),
    )
    @settings(max_examples=60, deadline=None)
    def test_kernel_equals_oracle_on_windows(self, primes_to_1e5, start, count, leading):
        window = primes_to_1e5[start : start + count]
        leading = leading and start == 0
        r = gaps_from_primes(window, starts_at_two=leading)
        try:
            fast = steps_to_terminal(r, max_steps=len(r))
        except StepBudgetExhaustedError:
            with pytest.raises(StepBudgetExhaustedError):
                full_triangle_oracle(window, starts_at_two=leading)
            return
        slow = full_triangle_oracle(window, starts_at_two=leading)
        assert (fast.g, fast.m) == (slow.g, slow.m)


class TestLocality:
    @given(
        values=st.lists(
            st.integers(min_value=0, max_value=300), min_size=6, max_size=120
        ),
        data=st.data(),
    )
    @settings(max_examples=80, deadline=None)
    def test_window_rows_equal_full_rows(self, values, data):
        """Row k of any contiguous window equals the matching positions of the
        full row k; this is what makes slicing sound."""
        depth = data.draw(st.integers(min_value=1, max_value=len(values) - 2))
        lo = data.draw(st.integers(min_value=0, max_value=len(values) - depth - 2))
        hi = data.draw(st.integers(min_value=lo + depth + 2, max_value=len(values)))

        full = row(values)
        window = row(values[lo:hi])
        for _ in range(depth):
            full = abs_diff_step(full)
            window = abs_diff_step(window)
        assert window.values.tolist() == full.values.tolist()[lo : hi - depth]
