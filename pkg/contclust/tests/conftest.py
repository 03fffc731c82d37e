import contclust

import numpy as np
import pytest

from contclust.core_metric import MetricInstance, instance_from_points


@pytest.fixture
def test_data_dir():
    return contclust._get_data('test_data')


@pytest.fixture
def pair6():
    """Two clients at distance 6."""
    return MetricInstance(dist=[[0.0, 6.0], [6.0, 0.0]], clients=(0, 1))


@pytest.fixture
def ufl_two():
    """Two clients at distance 2, no other points."""
    return MetricInstance(dist=[[0.0, 2.0], [2.0, 0.0]], clients=(0, 1))


@pytest.fixture
def path3():
    """Clients at 0, 1 and 2 on a line."""
    return instance_from_points([[0.0], [1.0], [2.0]], norm='1')


@pytest.fixture
def kcwo_line():
    """Clients at 0 and 10, the midpoint 5 is a candidate point only."""
    return instance_from_points([[0.0], [10.0], [5.0]], norm='1', clients=(0, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
