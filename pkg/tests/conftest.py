import numpy as np
import pytest

from qdsmds.netgeom import NetworkLayout, enumerate_edges
from qdsmds.simcli import DEFAULT_ANCHORS, DEFAULT_ROOM, sample_targets


@pytest.fixture(scope="session")
def room_anchors():
    return np.array(DEFAULT_ANCHORS)


@pytest.fixture(scope="session")
def room_layout(room_anchors):
    """Reference geometry: 5 anchors, 15 seeded uniform targets."""
    targets = sample_targets(777, 0, 15, DEFAULT_ROOM)
    return NetworkLayout(room_anchors, targets)


@pytest.fixture(scope="session")
def room_edges():
    return enumerate_edges(5, 15)
