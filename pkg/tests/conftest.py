import numpy as np
import pytest

from netctrl import netgen
from netctrl.spectral import eig_sym


def make_network(n, interval, a, seed, edges_per_new_node=2):
    graph = netgen.generate_ba(n, edges_per_new_node, seed)
    return netgen.weight_and_shift(graph, interval, a, seed + 1)


@pytest.fixture(scope="session")
def nd_instance():
    """Small negative-definite network with its decomposition."""
    net = make_network(6, (0.0, 1.0), -3.0, seed=11)
    return net, eig_sym(net.entries)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240917)
