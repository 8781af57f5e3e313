"""
State - configuration and velocity of a mechanical system at one instant
"""

from dataclasses import dataclass

import numpy as np

from core.errors import DimensionMismatchError
from core.linalg import Vec, as_vec


@dataclass(frozen=True)
class State:
    """Generalized coordinates q and velocities s at time t (s)"""

    q: Vec
    s: Vec
    t: float = 0.0

    def __post_init__(self):
        q = as_vec(self.q)
        s = as_vec(self.s)
        if q.size != s.size:
            raise DimensionMismatchError(f"dim(q)={q.size} but dim(s)={s.size}")
        q.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self) -> int:
        return self.q.size

    def stacked(self) -> Vec:
        """Phase-space vector xi = (q, s)"""
        return np.concatenate([self.q, self.s])

    @classmethod
    def from_stacked(cls, xi: Vec, t: float) -> "State":
        n = xi.size // 2
        return cls(q=xi[:n].copy(), s=xi[n:].copy(), t=t)
