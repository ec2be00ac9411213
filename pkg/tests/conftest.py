import random

import pytest

from credveil.params import ProtocolParams


@pytest.fixture(scope="session")
def params():
    # shallow trees keep proof generation fast; capacity 256 is plenty
    return ProtocolParams(tree_depth=8)


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)
