import itertools

import pytest

from weibull_kl import WeibullParams

GRID_SHAPES = (0.5, 1.0, 2.0, 3.5, 5.0)
GRID_SCALES = (0.5, 1.0, 2.0, 10.0)


def grid_params():
    return [WeibullParams(k, l) for k, l in itertools.product(GRID_SHAPES, GRID_SCALES)]


def grid_pairs():
    """All 400 (p, q) pairs from shapes x shapes x scales x scales."""
    return [
        (WeibullParams(k1, l1), WeibullParams(k2, l2))
        for k1, k2, l1, l2 in itertools.product(GRID_SHAPES, GRID_SHAPES, GRID_SCALES, GRID_SCALES)
    ]


@pytest.fixture(scope="session")
def pairs():
    return grid_pairs()
