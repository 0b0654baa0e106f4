from pathlib import Path

import numpy as np
import pytest

from randersflag.algebra import ReductiveSplit, abelian, direct_sum, heisenberg3, su2
from randersflag.metric import MetricStructure
from randersflag.randers import RandersStructure

DATA_DIR = Path(__file__).parent / "data"


def unit(dim, index):
    v = np.zeros(dim)
    v[index] = 1.0
    return v


def random_spd(rng, dim, condition=100.0):
    """Random SPD matrix with eigenvalues in [1, condition]"""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigenvalues = rng.uniform(1.0, condition, dim)
    matrix = q @ np.diag(eigenvalues) @ q.T
    return 0.5 * (matrix + matrix.T)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def su2_alg():
    return su2()


@pytest.fixture
def u2_alg():
    return direct_sum(su2(), abelian(1))


@pytest.fixture
def heis_alg():
    return heisenberg3()


@pytest.fixture
def su2_randers(su2_alg):
    return RandersStructure(su2_alg, MetricStructure.identity(3), np.zeros(3))


@pytest.fixture
def u2_randers(u2_alg):
    return RandersStructure(u2_alg, MetricStructure.identity(4), 0.5 * unit(4, 3))


@pytest.fixture
def abelian_randers():
    return RandersStructure(abelian(3), MetricStructure.identity(3), np.array([0.2, 0.1, 0.0]))


@pytest.fixture
def s2_split():
    return ReductiveSplit.from_subalgebra([unit(3, 2)], np.eye(3), [2])
