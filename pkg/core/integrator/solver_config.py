"""
Solver Config - Newton-Raphson settings for one run
"""

from dataclasses import dataclass
from enum import Enum

from core.constants import DEFAULT_MAX_ITERS, DEFAULT_REL_TOL


class JacobianMode(Enum):
    FINITE_DIFFERENCE = "finite_difference"
    # Analytic Hessian for the averaged force, finite differences when absent
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class SolverConfig:
    """Time step (s) and Newton iteration controls"""
    dt: float
    rel_tol: float = DEFAULT_REL_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    jacobian: JacobianMode = JacobianMode.FINITE_DIFFERENCE

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "jacobian", JacobianMode(self.jacobian))
