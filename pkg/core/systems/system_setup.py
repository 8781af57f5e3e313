"""
System Setup - a system together with the run it was designed for
"""

from dataclasses import dataclass, replace
from typing import Optional

from core.dgrad import DissipationConfig
from core.integrator import SolverConfig
from core.linalg import as_vec
from core.model import State, SystemModel


@dataclass(frozen=True)
class SystemSetup:
    """
    Ready-to-integrate problem.

    solver and duration are None when the system has no canonical run;
    the run description must then provide them. dissipation is the preset
    that dissipation cases select from.
    """
    system: SystemModel
    initial: State
    solver: Optional[SolverConfig] = None
    dissipation: Optional[DissipationConfig] = None
    duration: Optional[float] = None

    def __post_init__(self):
        if self.dissipation is None:
            object.__setattr__(self, "dissipation", DissipationConfig.none())

    def with_initial_overrides(self, params: dict) -> "SystemSetup":
        """Replace the canonical initial state with `q0` / `s0` from a run description"""
        if "q0" not in params and "s0" not in params:
            return self
        n = self.system.dim
        q0 = as_vec(params.get("q0", self.initial.q), dim=n)
        s0 = as_vec(params.get("s0", self.initial.s), dim=n)
        return replace(self, initial=State(q=q0, s=s0, t=self.initial.t))
