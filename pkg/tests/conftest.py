import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from apltune import build_graph, ring_lattice  # noqa: E402


@pytest.fixture
def k3():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def c8():
    return build_graph(8, [(i, (i + 1) % 8) for i in range(8)])


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def ring8_2():
    return ring_lattice(8, 2)
