# Core time integration package
from core.integrator.solver_config import JacobianMode, SolverConfig
from core.integrator.trajectory import StepReport, Trajectory
from core.integrator.newton_stepper import (
    residual,
    step,
    integrate,
    steps_between,
    check_scheme,
    bind_time_step,
)

__all__ = [
    "JacobianMode",
    "SolverConfig",
    "StepReport",
    "Trajectory",
    "residual",
    "step",
    "integrate",
    "steps_between",
    "check_scheme",
    "bind_time_step",
]
