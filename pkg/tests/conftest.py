import random

import pytest

from diracdeform.exterior import Chart


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def c2():
    return Chart(2)


@pytest.fixture
def c3():
    return Chart(3)


@pytest.fixture
def c4():
    return Chart(4)


@pytest.fixture
def c5():
    return Chart(5)
