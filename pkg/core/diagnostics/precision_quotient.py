"""
Precision Quotients - order-of-accuracy checks from runs at h, h/2 and h/4

On the phase-space vector xi = (q, s):

    Q_I(t)  = |xi(t, h) - xi(t)| / |xi(t, h/2) - xi(t)|
    Q_II(t) = |xi(t, h) - xi(t, h/2)| / |xi(t, h/2) - xi(t, h/4)|

Both approach 2^p for a method of order p. Q_II needs no exact solution.
Samples whose numerator or denominator is below QUOTIENT_MASK_TOL * (1 + |xi|)
are masked: they carry no quotient but stay in the counts.
"""

from concurrent.futures import Executor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from core.constants import QUOTIENT_MASK_TOL
from core.dgrad import ForceScheme
from core.errors import GridMisalignedError
from core.integrator import SolverConfig, Trajectory, integrate
from core.linalg import Vec
from core.model import State, SystemModel
from utils.logger import get_logger

logger = get_logger(__name__)

# Relative slack when locating a sample time on a step grid
_GRID_TOL = 1e-8

Runner = Callable[[float], Trajectory]


@dataclass(frozen=True)
class QuotientSeries:
    """Quotient samples; Q and log2Q are NaN where masked is True"""
    times: np.ndarray
    Q: np.ndarray
    log2Q: np.ndarray
    masked: np.ndarray

    @property
    def n_masked(self) -> int:
        return int(np.count_nonzero(self.masked))

    @property
    def mask_rate(self) -> float:
        return self.n_masked / self.masked.size if self.masked.size else 0.0

    def median_log2(self) -> float:
        """Median of log2 Q over unmasked samples; NaN when all are masked"""
        valid = self.log2Q[~self.masked]
        return float(np.median(valid)) if valid.size else float("nan")


@dataclass(frozen=True)
class ScheduledRun:
    """
    Picklable runner: integrates one problem at a given step size.

    The step size replaces solver.dt; everything else is shared by all
    resolutions of a quotient study.
    """
    system: SystemModel
    scheme: ForceScheme
    solver: SolverConfig
    initial: State
    t_end: float

    def __call__(self, h: float) -> Trajectory:
        return integrate(self.system, self.scheme, replace(self.solver, dt=h), self.initial, self.t_end)


def quotient_I(
    reference: Callable[[float], Vec],
    runner: Runner,
    h: float,
    t_samples: Optional[Sequence[float]] = None,
    executor: Optional[Executor] = None,
) -> QuotientSeries:
    """
    First precision quotient against an exact solution.

    Args:
        reference: Exact phase-space vector xi(t)
        runner: Maps a step size to a trajectory
        t_samples: Sample times on the grid of h; every grid point when None
        executor: Runs the two resolutions concurrently when given

    Raises:
        GridMisalignedError: if a sample time is not on the grid of h
    """
    coarse, fine = run_resolutions(runner, (h, h / 2.0), executor)
    return first_quotient(reference, coarse, fine, t_samples)


def quotient_II(
    runner: Runner,
    h: float,
    t_samples: Optional[Sequence[float]] = None,
    executor: Optional[Executor] = None,
) -> QuotientSeries:
    """
    Second precision quotient from three resolutions.

    Raises:
        GridMisalignedError: if a sample time is not on the grid of h
    """
    coarse, mid, fine = run_resolutions(runner, (h, h / 2.0, h / 4.0), executor)
    return second_quotient(coarse, mid, fine, t_samples)


def first_quotient(
    reference: Callable[[float], Vec],
    coarse: Trajectory,
    fine: Trajectory,
    t_samples: Optional[Sequence[float]] = None,
) -> QuotientSeries:
    """Q_I from finished runs at h and h/2"""
    times = _sample_times(coarse, t_samples)
    exact = np.array([reference(t) for t in times])
    xi_h = sample_states(coarse, times)
    xi_h2 = sample_states(fine, times)
    return _assemble(times, xi_h - exact, xi_h2 - exact, exact)


def second_quotient(
    coarse: Trajectory,
    mid: Trajectory,
    fine: Trajectory,
    t_samples: Optional[Sequence[float]] = None,
) -> QuotientSeries:
    """Q_II from finished runs at h, h/2 and h/4"""
    times = _sample_times(coarse, t_samples)
    xi_h = sample_states(coarse, times)
    xi_h2 = sample_states(mid, times)
    xi_h4 = sample_states(fine, times)
    return _assemble(times, xi_h - xi_h2, xi_h2 - xi_h4, xi_h4)


def sample_states(trajectory: Trajectory, times: Sequence[float]) -> np.ndarray:
    """Phase-space vectors of a trajectory at grid times, one row per time"""
    stacked = trajectory.stacked()
    rows = []
    for t in times:
        ratio = (t - trajectory.t0) / trajectory.dt
        k = int(round(ratio))
        if abs(ratio - k) > _GRID_TOL * max(1.0, abs(ratio)) or not 0 <= k < len(stacked):
            raise GridMisalignedError(f"t={t} is not on the grid t0={trajectory.t0} + k*{trajectory.dt}")
        rows.append(stacked[k])
    return np.array(rows)


def run_resolutions(runner: Runner, steps: Sequence[float], executor: Optional[Executor] = None) -> list[Trajectory]:
    """One trajectory per step size, concurrently when an executor is given"""
    logger.info(f"Quotient runs at step sizes {', '.join(f'{h:g}' for h in steps)}")
    if executor is None:
        return [runner(h) for h in steps]
    return list(executor.map(runner, steps))


def _sample_times(coarse: Trajectory, t_samples: Optional[Sequence[float]]) -> np.ndarray:
    if t_samples is None:
        return coarse.times()
    return np.asarray(t_samples, dtype=float)


def _assemble(times: np.ndarray, numerator: np.ndarray, denominator: np.ndarray, scale_from: np.ndarray) -> QuotientSeries:
    num = np.linalg.norm(numerator, axis=1)
    den = np.linalg.norm(denominator, axis=1)
    floor = QUOTIENT_MASK_TOL * (1.0 + np.linalg.norm(scale_from, axis=1))
    masked = (den < floor) | (num < floor)

    Q = np.full(times.size, np.nan)
    Q[~masked] = num[~masked] / den[~masked]
    log2Q = np.full(times.size, np.nan)
    log2Q[~masked] = np.log2(Q[~masked])

    series = QuotientSeries(times=times, Q=Q, log2Q=log2Q, masked=masked)
    logger.info(f"Quotient median log2 {series.median_log2():.4f}, {series.n_masked}/{times.size} samples masked")
    return series
