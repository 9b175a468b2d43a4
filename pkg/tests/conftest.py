import random
from fractions import Fraction

import pytest

from scalars import EPS_FIELD, RATIONAL, complex_field
from virasoro import clear_caches


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_rational(rng: random.Random, lo: int = 1, hi: int = 40) -> Fraction:
    """A small positive rational with a denominator that keeps weights generic."""
    return Fraction(rng.randint(lo, hi), rng.choice((7, 11, 13, 17, 19, 23)))


@pytest.fixture
def rand_q(rng):
    return lambda: random_rational(rng)


@pytest.fixture(params=["rat", "cplx"])
def number_field(request):
    return RATIONAL if request.param == "rat" else complex_field()


@pytest.fixture
def eps_field():
    return EPS_FIELD


@pytest.fixture(autouse=True)
def _fresh_caches():
    yield
    clear_caches()
