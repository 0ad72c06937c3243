import random
from fractions import Fraction

import pytest

from nilg2.exterior import KForm, Metric
from nilg2.g2 import G2Structure


@pytest.fixture
def metric7():
    return Metric.euclidean(7)


@pytest.fixture
def g2std():
    return G2Structure.standard()


def random_fraction(rng: random.Random, lo=-4, hi=4, den=3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_form(rng: random.Random, dim: int, degree: int,
                terms: int = 4) -> KForm:
    entries = []
    for _ in range(terms):
        idx = tuple(sorted(rng.sample(range(1, dim + 1), degree)))
        entries.append((idx, random_fraction(rng)))
    return KForm.from_terms(dim, degree, entries)
