import os
import random
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCHEMA_DIR = os.path.join(ROOT, "docs", "schemas")


@pytest.fixture
def rng():
    return random.Random(20240917)


def rational(rng, lo=-20, hi=20, nonzero=False):
    num = rng.randint(lo, hi)
    while nonzero and num == 0:
        num = rng.randint(lo, hi)
    return Fraction(num, rng.randint(1, hi))
