import numpy as np
import pytest

from core.errors import DimensionMismatchError, MissingSymmetryDataError
from core.model import LoadSchedule, State, ViolationKind, eval_load, validate_system

from tests.conftest import Quartic1D


class WrongGradient(Quartic1D):
    def grad_potential(self, q):
        return np.array([2.0 * float(q[0]) ** 3])


def test_state_is_frozen_and_stacks():
    state = State(q=[1.0, 2.0], s=[3.0, 4.0], t=0.5)
    np.testing.assert_array_equal(state.stacked(), [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        state.q[0] = 5.0
    back = State.from_stacked(state.stacked(), t=0.5)
    np.testing.assert_array_equal(back.q, state.q)
    np.testing.assert_array_equal(back.s, state.s)


def test_state_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        State(q=[1.0, 2.0], s=[1.0])


def test_triangular_pulse():
    schedule = LoadSchedule.triangular_pulse([1.0, -2.0], peak=5.0, duration=1.0)
    assert schedule.end_time == 1.0
    assert schedule.scaling(0.25) == pytest.approx(2.5)
    assert schedule.scaling(0.5) == pytest.approx(5.0)
    assert schedule.scaling(1.5) == 0.0
    assert schedule.scaling(-0.1) == 0.0
    np.testing.assert_allclose(eval_load(schedule, 0.5), [5.0, -10.0])


def test_load_breakpoints_must_increase():
    with pytest.raises(ValueError):
        LoadSchedule(base_force=[1.0], breakpoints=((0.0, 0.0), (0.0, 1.0)))


def test_empty_schedule_is_zero():
    schedule = LoadSchedule(base_force=[1.0, 1.0])
    assert schedule.end_time == 0.0
    np.testing.assert_array_equal(eval_load(schedule, 3.0), [0.0, 0.0])


def test_catalog_systems_validate(catalog, rng):
    for name, system in catalog.items():
        assert validate_system(system, n_points=5, rng=rng) == [], name


def test_validation_catches_bad_gradient(rng):
    violations = validate_system(WrongGradient(), n_points=10, rng=rng)
    assert violations
    assert {v.kind for v in violations} == {ViolationKind.GRADIENT_MISMATCH}


def test_kinetic_energy(example1):
    assert example1.system.kinetic_energy(np.array([1.0, 2.0])) == pytest.approx(2.5)


def test_symmetry_data_is_optional(quartic):
    assert not quartic.has_symmetry
    with pytest.raises(MissingSymmetryDataError):
        quartic.invariant_map(np.zeros(1))
    with pytest.raises(DimensionMismatchError):
        quartic.rotation_generator(np.ones(3), np.zeros(1))
