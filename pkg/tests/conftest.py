import numpy as np
import pytest

from posekit.representation.normalization import NormStats
from posekit.skeleton.presets import h36m_skeleton
from posekit.skeleton.skeleton import SkeletonTopology


def random_tree(rng: np.random.Generator, num_joints: int) -> SkeletonTopology:
    """Random valid tree with shuffled joint labels."""
    parent_in_order = [0] + [int(rng.integers(1, k)) for k in range(2, num_joints + 1)]
    label = np.concatenate([[0], rng.permutation(num_joints) + 1])
    parent = [0] * num_joints
    for k, p in enumerate(parent_in_order, start=1):
        parent[label[k] - 1] = int(label[p])
    return SkeletonTopology(parent=parent).validate()


def random_stats(rng: np.random.Generator, rows: int, columns: int, target: str, pairs=None) -> NormStats:
    return NormStats(
        mean=rng.normal(size=(rows, columns)),
        std=rng.uniform(0.5, 2.0, size=(rows, columns)),
        target=target,
        count=10,
        pairs=pairs,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def h36m():
    return h36m_skeleton()


@pytest.fixture
def chain3():
    """0 <- 1 <- 2 <- 3"""
    return SkeletonTopology(parent=(0, 1, 2))


@pytest.fixture
def make_tree():
    return random_tree


@pytest.fixture
def make_stats():
    return random_stats
