import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def brute_coeff(values, S, n):
    """f^(S) by a direct inner product; S a 1-based subset."""
    total = 0
    for idx, x in enumerate(itertools.product([1, -1], repeat=n)):
        x = x[::-1]  # itertools varies the last coordinate fastest; bit 0 is x_1
        sign = 1
        for i in S:
            sign *= x[i - 1]
        total += values[idx] * sign
    return total / 2**n


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
