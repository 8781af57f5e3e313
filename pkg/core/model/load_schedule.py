"""
Load Schedule - piecewise-linear time scaling of a fixed external load

f_ext(t) = f(t) * f0, with f given by breakpoints [(t_i, f_i)] and f(t) = 0
outside the breakpoint range.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.linalg import Vec, as_vec


@dataclass(frozen=True)
class LoadSchedule:
    """Base force and its piecewise-linear scaling"""

    base_force: Vec
    breakpoints: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        base = as_vec(self.base_force)
        base.setflags(write=False)
        object.__setattr__(self, "base_force", base)

        points = tuple((float(t), float(f)) for t, f in self.breakpoints)
        times = [t for t, _ in points]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError(f"Load breakpoints must be strictly increasing in t: {times}")
        object.__setattr__(self, "breakpoints", points)

    @classmethod
    def triangular_pulse(cls, base_force: Sequence[float], peak: float = 5.0, duration: float = 1.0) -> "LoadSchedule":
        """Pulse rising linearly to `peak` at duration/2 and back to zero at `duration`"""
        return cls(
            base_force=np.asarray(base_force, dtype=float),
            breakpoints=((0.0, 0.0), (0.5 * duration, peak), (duration, 0.0)),
        )

    @property
    def end_time(self) -> float:
        """Time after which the load is identically zero"""
        if not self.breakpoints:
            return 0.0
        return self.breakpoints[-1][0]

    def scaling(self, t: float) -> float:
        if not self.breakpoints:
            return 0.0
        times = [p[0] for p in self.breakpoints]
        values = [p[1] for p in self.breakpoints]
        return float(np.interp(t, times, values, left=0.0, right=0.0))


def eval_load(schedule: LoadSchedule, t: float) -> Vec:
    """External load vector at time t"""
    return schedule.scaling(t) * schedule.base_force
