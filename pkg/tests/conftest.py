"""Shared fixtures: catalog setups and small test systems"""

import sys
from pathlib import Path

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from core.dgrad import DissipationCase
from core.linalg import Vec
from core.model import LoadSchedule, State, SystemModel
from systems.linear_oscillator import make_linear_oscillator
from systems.spring_network import make_spring_demo
from systems.two_mass_non_polynomial import make_example2
from systems.two_mass_polynomial import make_example1


class Quartic1D(SystemModel):
    """V(q) = q^4 / 4 on the real line"""

    name = "quartic_1d"

    def __init__(self):
        super().__init__(np.eye(1))

    def potential(self, q: Vec) -> float:
        return 0.25 * float(q[0]) ** 4

    def grad_potential(self, q: Vec) -> Vec:
        return np.array([float(q[0]) ** 3])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def quartic():
    return Quartic1D()


@pytest.fixture
def example1():
    return make_example1(DissipationCase.FULL)


@pytest.fixture
def example2():
    return make_example2(DissipationCase.FULL)


@pytest.fixture
def oscillator():
    return make_linear_oscillator()


@pytest.fixture
def free_cube():
    """Cube network in free flight, spinning and drifting"""
    setup = make_spring_demo(load=LoadSchedule(base_force=np.zeros(24)))
    system, q0 = setup.system, setup.initial.q
    s0 = system.rotation_generator(np.array([0.3, -0.2, 0.5]), q0) + system.translation_generator(np.array([0.1, 0.0, -0.05]), q0)
    # Break the rigid motion so springs actually stretch
    s0 = s0 + 0.05 * np.random.default_rng(7).normal(size=q0.size)
    return setup.system, State(q=q0, s=s0)


@pytest.fixture
def catalog(example1, example2, oscillator, free_cube):
    """One instance of every catalog system"""
    return {
        "example1": example1.system,
        "example2": example2.system,
        "linear_oscillator": oscillator.system,
        "spring_network": free_cube[0],
    }
