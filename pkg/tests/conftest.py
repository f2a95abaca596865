import pytest

from qmut import enumerate_class, linear_a, standard_d


@pytest.fixture(scope="session")
def d_class():
    """Memoised enumerated mutation classes of the fork quiver."""
    cache = {}

    def get(n: int):
        if n not in cache:
            cache[n] = enumerate_class(standard_d(n))
        return cache[n]

    return get


@pytest.fixture(scope="session")
def a_class():
    """Memoised enumerated mutation classes of the linear path."""
    cache = {}

    def get(k: int):
        if k not in cache:
            cache[k] = enumerate_class(linear_a(k))
        return cache[k]

    return get
