from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from core.dgrad import DissipationCase, ForceScheme
from core.diagnostics import (
    MomentaSample,
    QuotientSeries,
    ScheduledRun,
    momenta,
    quotient_I,
    quotient_II,
    sample_states,
)
from core.errors import GridMisalignedError
from core.integrator import SolverConfig, StepReport, Trajectory, integrate
from core.model import State
from systems.two_mass_non_polynomial import make_example2
from systems.two_mass_polynomial import make_example1


def _euler_runner(system, initial, t_end):
    """First-order reference integrator"""
    M_inv = np.linalg.inv(system.mass())

    def run(h):
        n_steps = int(round((t_end - initial.t) / h))
        trajectory = Trajectory(dt=h, records=[StepReport.initial(system, initial)])
        q, s = initial.q, initial.s
        for k in range(1, n_steps + 1):
            q, s = q + h * s, s - h * (M_inv @ system.grad_potential(q))
            state = State(q=q, s=s, t=initial.t + k * h)
            trajectory.records.append(StepReport.initial(system, state))
        return trajectory

    return run


def _reference(system, initial):
    return lambda t: system.exact_solution(initial, t).stacked()


def test_first_quotient_of_a_second_order_scheme(oscillator):
    system, initial = oscillator.system, oscillator.initial
    runner = ScheduledRun(system, ForceScheme(), SolverConfig(dt=0.1, rel_tol=1e-12), initial, t_end=2.0)
    series = quotient_I(_reference(system, initial), runner, h=0.1)
    assert series.times.size == 21
    assert 1.8 <= series.median_log2() <= 2.2
    # Both errors vanish at the initial time
    assert series.masked[0]
    assert np.isnan(series.Q[0])
    assert series.mask_rate < 0.1


def test_first_quotient_of_explicit_euler(oscillator):
    system, initial = oscillator.system, oscillator.initial
    series = quotient_I(_reference(system, initial), _euler_runner(system, initial, 1.0), h=0.01)
    assert 0.8 <= series.median_log2() <= 1.2


def test_second_quotient_on_example1():
    setup = make_example1(DissipationCase.CONSERVATIVE)
    runner = ScheduledRun(
        setup.system,
        ForceScheme(dissipation=setup.dissipation),
        SolverConfig(dt=0.01),
        setup.initial,
        t_end=1.0,
    )
    series = quotient_II(runner, h=0.01)
    assert 1.8 <= series.median_log2() <= 2.2
    assert series.mask_rate < 0.1


def test_parallel_runs_match_sequential(oscillator):
    system, initial = oscillator.system, oscillator.initial
    runner = ScheduledRun(system, ForceScheme(), SolverConfig(dt=0.1), initial, t_end=1.0)
    samples = [0.2, 0.5, 1.0]
    sequential = quotient_II(runner, h=0.1, t_samples=samples)
    with ThreadPoolExecutor(max_workers=3) as executor:
        parallel = quotient_II(runner, h=0.1, t_samples=samples, executor=executor)
    np.testing.assert_array_equal(parallel.Q, sequential.Q)
    np.testing.assert_array_equal(parallel.times, samples)


def test_samples_must_lie_on_the_grid(oscillator):
    trajectory = integrate(oscillator.system, ForceScheme(), SolverConfig(dt=0.1), oscillator.initial, t_end=1.0)
    np.testing.assert_array_equal(sample_states(trajectory, [0.3])[0], trajectory.records[3].state.stacked())
    with pytest.raises(GridMisalignedError):
        sample_states(trajectory, [0.15])
    with pytest.raises(GridMisalignedError):
        sample_states(trajectory, [1.5])


def test_fully_masked_series_has_no_median():
    series = QuotientSeries(
        times=np.array([0.0, 1.0]),
        Q=np.full(2, np.nan),
        log2Q=np.full(2, np.nan),
        masked=np.array([True, True]),
    )
    assert series.n_masked == 2
    assert series.mask_rate == 1.0
    assert np.isnan(series.median_log2())


def test_momenta_of_a_spinning_cube(free_cube):
    system, initial = free_cube
    sample = momenta(system, initial)
    p = (system.mass() @ initial.s).reshape(-1, 3)
    np.testing.assert_allclose(sample.l, p.sum(axis=0))
    np.testing.assert_allclose(sample.j, np.cross(initial.q.reshape(-1, 3), p).sum(axis=0))
    assert sample.E == pytest.approx(system.kinetic_energy(initial.s) + system.potential(initial.q))


def test_momenta_only_for_particle_systems(example1):
    sample = momenta(example1.system, example1.initial)
    assert sample.l is None and sample.j is None
    assert sample.V == pytest.approx(4.721792)
    report = StepReport.initial(example1.system, example1.initial)
    assert MomentaSample.from_report(example1.system, report) == sample


@pytest.mark.slow
@pytest.mark.parametrize("make, h, t_end", [(make_example1, 1e-3, 10.0), (make_example2, 1e-4, 1.0)])
@pytest.mark.parametrize("case", list(DissipationCase))
def test_second_quotient_for_every_dissipation_case(make, h, t_end, case):
    setup = make(case)
    runner = ScheduledRun(
        setup.system,
        ForceScheme(dissipation=setup.dissipation),
        SolverConfig(dt=h),
        setup.initial,
        t_end=t_end,
    )
    series = quotient_II(runner, h=h, t_samples=setup.initial.t + np.linspace(0.0, t_end, 101))
    assert 1.8 <= series.median_log2() <= 2.2
    assert series.mask_rate < 0.1
