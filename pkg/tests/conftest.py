import random
from fractions import Fraction

import pytest

from piecewise_melnikov.melnikov import PerturbationSpec, ZONES_FOR_MODE


def random_spec(n: int, mode: str, rng: random.Random, density: float = 1.0) -> PerturbationSpec:
    """Random spec with exact rational coefficients in [-1, 1]."""
    coeffs = {}
    for zone in ZONES_FOR_MODE[mode]:
        for table in "ab":
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    if rng.random() <= density:
                        coeffs[(zone, table, i, j)] = Fraction(rng.randint(-1000, 1000), 1000)
    return PerturbationSpec(n, mode, coeffs)


@pytest.fixture
def rng():
    return random.Random(20240901)
