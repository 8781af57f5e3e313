"""
Observables - energies and momenta of a state, discrete energy balance
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.integrator import StepReport
from core.linalg import Vec
from core.model import State, SystemModel


@dataclass(frozen=True)
class MomentaSample:
    """
    Energy split and, for particle systems in R^3n, linear momentum l (kg m/s)
    and angular momentum j about the origin (kg m^2/s). l and j are None for
    other systems.
    """
    t: float
    T: float
    V: float
    l: Optional[Vec] = None
    j: Optional[Vec] = None

    @property
    def E(self) -> float:
        return self.T + self.V

    @classmethod
    def from_report(cls, system: SystemModel, report: StepReport) -> "MomentaSample":
        """Reuse the energies already stored in a step report"""
        l, j = _momenta_vectors(system, report.state)
        return cls(t=report.t, T=report.kinetic, V=report.potential, l=l, j=j)


def momenta(system: SystemModel, state: State) -> MomentaSample:
    """Energies and momenta of one state"""
    l, j = _momenta_vectors(system, state)
    return MomentaSample(
        t=state.t,
        T=system.kinetic_energy(state.s),
        V=system.potential(state.q),
        l=l,
        j=j,
    )


def energy_balance_residual(report: StepReport, prev: MomentaSample) -> float:
    """(dT + dV) - (W_ext - D_f - D_s) over one step; zero for schemes with directionality"""
    change = (report.kinetic - prev.T) + (report.potential - prev.V)
    return change - (report.work_ext - report.diss_f - report.diss_s)


def _momenta_vectors(system: SystemModel, state: State) -> tuple[Optional[Vec], Optional[Vec]]:
    if not system.is_particle_system:
        return None, None
    p = (system.mass() @ state.s).reshape(-1, 3)
    positions = state.q.reshape(-1, 3)
    return p.sum(axis=0), np.cross(positions, p).sum(axis=0)
