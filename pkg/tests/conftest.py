import numpy as np
import pytest

from lipext import LipschitzPoint, NormSpec, validate_metric


@pytest.fixture
def unit_pair():
    return validate_metric([[0, 1], [1, 0]])


@pytest.fixture
def triangle():
    return validate_metric([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


@pytest.fixture
def l2():
    return NormSpec(2, 2.0)


def point(*rows):
    """Build a point from rows for nodes 1..n; node 0 is the zero vector."""
    rows = [np.atleast_1d(np.asarray(r, dtype=float)) for r in rows]
    return LipschitzPoint(np.vstack([np.zeros_like(rows[0])] + rows))
