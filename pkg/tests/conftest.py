import numpy as np
import pytest

from gilbreath.primes import primes_in_range


@pytest.fixture(scope="session")
def primes_to_1e5():
    return primes_in_range(2, 10 ** 5 + 1).primes


@pytest.fixture(scope="session")
def primes_to_1e6():
    return primes_in_range(2, 10 ** 6 + 1).primes


def naive_primes(lo, hi):
    """Trial-division reference, independent of the sieve."""
    out = []
    for n in range(max(2, lo), hi):
        if all(n % d for d in range(2, int(n ** 0.5) + 1)):
            out.append(n)
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20251007)
