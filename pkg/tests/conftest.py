import json
from importlib import resources

import pytest

from latgenus.lattice import GramLattice


@pytest.fixture(scope="session")
def tables():
    with resources.files("latgenus.data").joinpath("expected_tables.json").open() as f:
        return json.load(f)


def gram_E8():
    return GramLattice.from_rows([
        [2, -1, 0, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0, 0],
        [0, 0, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, -1],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, 0],
        [0, 0, 0, 0, -1, 0, 0, 2],
    ])


def gram_E7():
    return GramLattice.from_rows([
        [2, -1, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0],
        [0, 0, -1, 2, -1, 0, -1],
        [0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, -1, 2, 0],
        [0, 0, 0, -1, 0, 0, 2],
    ])


def gram_E6():
    return GramLattice.from_rows([
        [2, -1, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0],
        [0, -1, 2, -1, 0, -1],
        [0, 0, -1, 2, -1, 0],
        [0, 0, 0, -1, 2, 0],
        [0, 0, -1, 0, 0, 2],
    ])


def gram_D4():
    return GramLattice.from_rows([
        [2, -1, 0, 0],
        [-1, 2, -1, -1],
        [0, -1, 2, 0],
        [0, -1, 0, 2],
    ])


@pytest.fixture
def E8():
    return gram_E8()


@pytest.fixture
def E7():
    return gram_E7()


@pytest.fixture
def E6():
    return gram_E6()


@pytest.fixture
def D4():
    return gram_D4()
